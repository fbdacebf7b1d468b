#ifndef AMGR_SA_IO_HPP
#define AMGR_SA_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "anneal.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "splitting.hpp"

namespace amgr_sa {

using Json = nlohmann::json;

inline constexpr int splitting_format_version = 1;
inline constexpr int report_format_version = 1;

struct SplittingRecord {
    CfSplitting splitting;
    double theta = 0.56;
    std::string method;
    std::optional<std::uint64_t> seed;
    Json provenance = Json::object(); ///< free-form run description
};

inline Json to_json(const SplittingRecord& r) {
    if (!r.splitting.is_finalized()) throw std::invalid_argument("to_json: splitting has U points");
    Json j;
    j["format_version"] = splitting_format_version;
    j["n"] = r.splitting.size();
    j["theta"] = r.theta;
    j["method"] = r.method;
    j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
    j["f_indices"] = r.splitting.f_indices();
    j["provenance"] = r.provenance;
    return j;
}

inline SplittingRecord splitting_from_json(const Json& j) {
    try {
        if (j.at("format_version").get<int>() != splitting_format_version)
            throw ParseError("unsupported splitting format_version " + j.at("format_version").dump(), 0);
        SplittingRecord r;
        const auto n = j.at("n").get<std::size_t>();
        const auto f = j.at("f_indices").get<std::vector<Index>>();
        for (std::size_t k = 1; k < f.size(); ++k)
            if (f[k] <= f[k - 1]) throw ParseError("f_indices must be strictly increasing", 0);
        r.splitting = CfSplitting::from_f_indices(n, f);
        r.theta = j.at("theta").get<double>();
        r.method = j.at("method").get<std::string>();
        if (j.contains("seed") && !j["seed"].is_null()) r.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("provenance")) r.provenance = j["provenance"];
        return r;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed splitting document: ") + e.what(), 0);
    } catch (const DimensionError& e) {
        throw ParseError(e.what(), 0);
    }
}

inline void write_json(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

inline Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
}

/// Writes the record after re-checking feasibility against A.
inline void write_splitting(const SplittingRecord& r, const CsrMatrix& A, const std::filesystem::path& path) {
    if (const auto bad = first_violation(A, r.splitting, r.theta))
        throw InfeasibleSplitting("refusing to write splitting: row " + std::to_string(*bad) +
                                  " violates theta-dominance");
    write_json(to_json(r), path);
}

inline SplittingRecord read_splitting(const std::filesystem::path& path) {
    return splitting_from_json(read_json(path));
}

inline Json to_json(const AnnealConfig& c) {
    return {{"theta", c.theta},
            {"total_steps_per_dof", c.total_steps_per_dof},
            {"steps_per_dof_per_sweep", c.steps_per_dof_per_sweep},
            {"t_initial", c.t_initial},
            {"t_final_fraction", c.t_final_fraction},
            {"x", c.x},
            {"y", c.y},
            {"seed", c.seed},
            {"additive", c.additive}};
}

inline AnnealConfig anneal_config_from_json(const Json& j) {
    AnnealConfig c;
    c.theta = j.value("theta", c.theta);
    c.total_steps_per_dof = j.value("total_steps_per_dof", c.total_steps_per_dof);
    c.steps_per_dof_per_sweep = j.value("steps_per_dof_per_sweep", c.steps_per_dof_per_sweep);
    c.t_initial = j.value("t_initial", c.t_initial);
    c.t_final_fraction = j.value("t_final_fraction", c.t_final_fraction);
    c.x = j.value("x", c.x);
    c.y = j.value("y", c.y);
    c.seed = j.value("seed", c.seed);
    c.additive = j.value("additive", c.additive);
    return c;
}

inline Json to_json(const SolveReport& r) {
    return {{"format_version", report_format_version},
            {"rho", r.rho},
            {"diverged", r.diverged},
            {"c_grid", r.c_grid},
            {"c_op", r.c_op},
            {"f_ratio", r.f_ratio},
            {"k", r.k_used},
            {"seed", r.seed}};
}

/// CSV with header `step,temperature,best_f_size,sweep`.
inline void write_trace_csv(const std::vector<TraceSample>& trace, std::ostream& out) {
    out << "step,temperature,best_f_size,sweep\n";
    const auto old = out.precision(17);
    for (const auto& t : trace)
        out << t.step << ',' << t.temperature << ',' << t.best_f_size << ',' << t.sweep << '\n';
    out.precision(old);
}

inline void write_trace_csv(const std::vector<TraceSample>& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_trace_csv(trace, out);
}

} // namespace amgr_sa

#endif
