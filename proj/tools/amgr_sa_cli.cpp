// amgr_sa_cli: generate test matrices, compute C/F splittings, build AMGr
// hierarchies and measure them, and run the exhaustive oracle.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <regex>
#include <string>

#include "CLI11.hpp"
#include "amgr_sa/amgr_sa.hpp"

namespace {

using namespace amgr_sa;

enum Exit : int { ok = 0, usage = 2, check_failed = 3, stalled = 4 };

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ProblemOpts {
    std::string problem = "fd5";
    std::size_t n = 32;
    double delta = 1.0;
    std::string angle = "0";
    double eps = 1e-5;
    double bx = 1.0;
    double by = 0.0;
    double jitter = 0.2;
    std::string matrix;
    std::string mesh;
};

struct CoarsenOpts {
    std::string method = "greedy";
    double theta = 0.56;
    std::size_t steps_per_dof = 2000;
    std::size_t steps_per_dof_per_sweep = 5;
    double t_initial = 1.0;
    double t_final_fraction = 0.1;
    std::size_t x = 1;
    std::size_t y = 0;
    std::string subdomains = "global";
    bool second_pass = false;
    double strength = 0.30;
};

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    bool strict = false;
    std::size_t threads = 1;
};

bool structured(const std::string& p) {
    return p == "fd5" || p == "fe9" || p == "aniso-fd" || p == "aniso-fe" || p == "convdiff" ||
           p == "jittered";
}

/// Accepts a plain number or a multiple/fraction of pi such as "pi/3", "2*pi/3", "-pi".
double parse_angle(const std::string& s) {
    static const std::regex re(R"(^\s*([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$)");
    std::smatch m;
    if (std::regex_match(s, m, re)) {
        double k = 1.0;
        if (m[1].length() > 0 && m[1] != "+" && m[1] != "-") k = std::stod(m[1]);
        else if (m[1] == "-") k = -1.0;
        const double den = m[2].matched ? std::stod(m[2]) : 1.0;
        return k * std::numbers::pi / den;
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("cannot parse angle '" + s + "'");
}

void add_problem_options(CLI::App* app, ProblemOpts& p) {
    app->add_option("--problem", p.problem, "Generator")
        ->check(CLI::IsMember({"fd5", "fe9", "lap1d", "identity", "aniso-fd", "aniso-fe", "convdiff",
                               "jittered", "mesh", "matrix"}))
        ->capture_default_str();
    app->add_option("--n", p.n, "Grid points per direction (unknowns for lap1d/identity)")->capture_default_str();
    app->add_option("--delta", p.delta, "Anisotropy strength")->capture_default_str();
    app->add_option("--angle", p.angle, "Anisotropy angle, radians or e.g. pi/3")->capture_default_str();
    app->add_option("--eps", p.eps, "Diffusion coefficient for convdiff")->capture_default_str();
    app->add_option("--bx", p.bx, "Convection velocity x")->capture_default_str();
    app->add_option("--by", p.by, "Convection velocity y")->capture_default_str();
    app->add_option("--jitter", p.jitter, "Node displacement for the jittered mesh, in cell widths")
        ->capture_default_str();
    app->add_option("--matrix", p.matrix, "Matrix Market input (problem=matrix)");
    app->add_option("--mesh", p.mesh, "Mesh file input (problem=mesh)");
}

void add_coarsen_options(CLI::App* app, CoarsenOpts& c) {
    app->add_option("--method", c.method, "Coarsening method")
        ->check(CLI::IsMember({"greedy", "sa", "by-hand"}))
        ->capture_default_str();
    app->add_option("--theta", c.theta, "Dominance threshold")->capture_default_str();
    app->add_option("--steps-per-dof", c.steps_per_dof, "Total annealing steps per DoF")->capture_default_str();
    app->add_option("--steps-per-dof-per-sweep", c.steps_per_dof_per_sweep, "Annealing steps per DoF per sweep")
        ->capture_default_str();
    app->add_option("--t-initial", c.t_initial, "Initial temperature")->capture_default_str();
    app->add_option("--t-final-fraction", c.t_final_fraction, "Final / initial temperature")->capture_default_str();
    app->add_option("--swap-x", c.x, "Points exchanged in an exchange move")->capture_default_str();
    app->add_option("--swap-y", c.y, "Extra points moved by grow/shrink")->capture_default_str();
    app->add_option("--subdomains", c.subdomains, "global | geometric:BXxBY | lloyd:AVG")->capture_default_str();
    app->add_flag("--second-pass", c.second_pass, "Apply the Ruge-Stueben second pass");
    app->add_option("--strength", c.strength, "Strength threshold for the second pass")->capture_default_str();
}

void require_seed(const GlobalOpts& g, const char* what) {
    if (g.strict && !g.seed) throw UsageError(std::string(what) + " is randomized; --strict requires --seed");
}

std::uint64_t seed_of(const GlobalOpts& g) { return g.seed.value_or(0); }

struct Problem {
    CsrMatrix A;
    std::optional<TriMesh> mesh;
    std::size_t grid = 0; ///< N for structured problems, 0 otherwise
};

Problem make_problem(const ProblemOpts& p, const GlobalOpts& g) {
    Problem out;
    if (p.n == 0) throw UsageError("--n must be positive");
    if (structured(p.problem)) out.grid = p.n;
    const auto& kind = p.problem;
    if (kind == "fd5") out.A = gen_fd_laplacian_5pt(p.n);
    else if (kind == "fe9") out.A = gen_fe_bilinear_9pt(p.n);
    else if (kind == "lap1d") out.A = gen_laplacian_1d(p.n);
    else if (kind == "identity") out.A = CsrMatrix::identity(p.n);
    else if (kind == "aniso-fd" || kind == "aniso-fe") {
        AnisotropyParams ap{p.delta, parse_angle(p.angle)};
        out.A = gen_anisotropic(p.n, ap, kind == "aniso-fd" ? Scheme::FD : Scheme::FE);
    } else if (kind == "convdiff") {
        out.A = gen_convection_diffusion(p.n, p.eps, {p.bx, p.by});
    } else if (kind == "jittered") {
        require_seed(g, "the jittered mesh");
        out.mesh = jittered_square_mesh(p.n, p.jitter, seed_of(g));
        out.A = assemble_p1(*out.mesh, {p.delta, parse_angle(p.angle)});
        out.grid = 0;
    } else if (kind == "mesh") {
        if (p.mesh.empty()) throw UsageError("problem=mesh needs --mesh");
        out.mesh = load_mesh(p.mesh);
        out.A = assemble_p1(*out.mesh, {p.delta, parse_angle(p.angle)});
    } else {
        if (p.matrix.empty()) throw UsageError("problem=matrix needs --matrix");
        out.A = read_matrix_market(std::filesystem::path(p.matrix));
    }
    return out;
}

Json describe(const ProblemOpts& p) {
    Json j{{"problem", p.problem}, {"n", p.n}};
    if (p.problem.starts_with("aniso") || p.problem == "jittered" || p.problem == "mesh") {
        j["delta"] = p.delta;
        j["angle"] = p.angle;
    }
    if (p.problem == "convdiff") {
        j["eps"] = p.eps;
        j["b"] = {p.bx, p.by};
    }
    if (p.problem == "jittered") j["jitter"] = p.jitter;
    if (!p.matrix.empty()) j["matrix"] = p.matrix;
    if (!p.mesh.empty()) j["mesh"] = p.mesh;
    return j;
}

AnnealConfig anneal_config(const CoarsenOpts& c, const GlobalOpts& g) {
    AnnealConfig a;
    a.theta = c.theta;
    a.total_steps_per_dof = c.steps_per_dof;
    a.steps_per_dof_per_sweep = c.steps_per_dof_per_sweep;
    a.t_initial = c.t_initial;
    a.t_final_fraction = c.t_final_fraction;
    a.x = c.x;
    a.y = c.y;
    a.seed = seed_of(g);
    return a;
}

SubdomainDecomposition decomposition(const std::string& spec, const CsrMatrix& A, std::size_t grid,
                                     double theta, std::uint64_t seed) {
    std::smatch m;
    if (spec == "global") return single_subdomain(A.rows(), prepin_safe_f(A, theta));
    if (std::regex_match(spec, m, std::regex(R"(geometric:(\d+)x(\d+))"))) {
        if (grid == 0 || grid * grid != A.rows())
            throw UsageError("geometric subdomains need a structured N x N problem");
        return geometric_blocks(grid, std::stoul(m[1]), std::stoul(m[2]), A, theta);
    }
    if (std::regex_match(spec, m, std::regex(R"(lloyd:(\d+))")))
        return lloyd_aggregate(A, std::stoul(m[1]), seed, prepin_safe_f(A, theta));
    throw UsageError("unknown subdomain spec '" + spec + "'");
}

struct Coarsened {
    CfSplitting splitting;
    std::vector<TraceSample> trace;
    std::size_t c_before_second_pass = 0;
};

Coarsened run_coarsener(const CsrMatrix& A, const CoarsenOpts& c, const GlobalOpts& g,
                        const ProblemOpts& p, std::size_t grid) {
    Coarsened out;
    if (c.method == "greedy") {
        out.splitting = greedy_coarsen(A, c.theta);
    } else if (c.method == "sa") {
        require_seed(g, "simulated annealing");
        auto d = decomposition(c.subdomains, A, grid, c.theta, seed_of(g));
        auto r = sa_coarsen(A, d, anneal_config(c, g));
        out.splitting = std::move(r.splitting);
        out.trace = std::move(r.trace);
    } else {
        if (p.problem == "fd5") out.splitting = by_hand_fd(p.n);
        else if (p.problem == "fe9") out.splitting = by_hand_fe(p.n);
        else throw UsageError("by-hand splittings exist only for fd5 and fe9");
        if (c.theta != 0.56 && !is_feasible(A, out.splitting, c.theta))
            throw InfeasibleSplitting("the by-hand splitting is not feasible at this theta");
    }
    if (!is_feasible(A, out.splitting, c.theta))
        throw InfeasibleSplitting("coarsener output violates theta-dominance at row " +
                                  std::to_string(*first_violation(A, out.splitting, c.theta)));
    out.c_before_second_pass = out.splitting.c_count();
    if (c.second_pass) out.splitting = second_pass(A, out.splitting, c.strength);
    return out;
}

void print_splitting_summary(const CsrMatrix& A, const CfSplitting& s, double theta) {
    const bool feasible = is_feasible(A, s, theta);
    std::printf("n=%zu |F|=%zu |C|=%zu ratio=%.4f feasible=%s\n", s.size(), s.f_count(), s.c_count(),
                f_ratio(s), feasible ? "yes" : "no");
}

int cmd_generate(const ProblemOpts& p, const GlobalOpts& g, const std::string& output,
                 const std::string& mesh_output) {
    auto prob = make_problem(p, g);
    write_matrix_market(prob.A, std::filesystem::path(output));
    if (!mesh_output.empty()) {
        if (!prob.mesh) throw UsageError("--mesh-output needs a mesh-based problem");
        write_mesh(*prob.mesh, std::filesystem::path(mesh_output));
    }
    std::printf("n=%zu nnz=%zu\n", prob.A.rows(), prob.A.nnz());
    return ok;
}

int cmd_coarsen(const ProblemOpts& p, const CoarsenOpts& c, const GlobalOpts& g, const std::string& output,
                const std::string& trace) {
    auto prob = make_problem(p, g);
    auto res = run_coarsener(prob.A, c, g, p, prob.grid);
    print_splitting_summary(prob.A, res.splitting, c.theta);
    if (c.second_pass)
        std::printf("second pass: |C| %zu -> %zu\n", res.c_before_second_pass, res.splitting.c_count());
    if (!output.empty()) {
        SplittingRecord rec;
        rec.splitting = res.splitting;
        rec.theta = c.theta;
        rec.method = c.method;
        if (c.method == "sa") rec.seed = seed_of(g);
        rec.provenance = {{"problem", describe(p)}, {"second_pass", c.second_pass}};
        if (c.method == "sa") {
            rec.provenance["anneal"] = to_json(anneal_config(c, g));
            rec.provenance["subdomains"] = c.subdomains;
        }
        if (c.second_pass) rec.provenance["strength"] = c.strength;
        write_splitting(rec, prob.A, output);
    }
    if (!trace.empty()) {
        if (c.method != "sa") throw UsageError("--trace is only available for --method sa");
        write_trace_csv(res.trace, std::filesystem::path(trace));
    }
    return ok;
}

struct SolveOpts {
    std::string splitting_file;
    std::size_t levels = 2;
    std::string cycle = "V";
    std::size_t nu = 1;
    std::string interpolation = "amgr";
    std::string dff = "bound";
    std::string restriction = "auto";
    std::string coarse_subdomains = "lloyd:36";
    std::size_t k = 800;
    std::uint64_t rho_seed = 1;
    std::string report;
    bool compare = false;
};

HierarchyOptions hierarchy_options(const SolveOpts& s, const CoarsenOpts& c, const CsrMatrix& A) {
    HierarchyOptions o;
    o.levels = s.levels;
    o.theta = c.theta;
    o.cycle = s.cycle == "W" ? CycleType::W : CycleType::V;
    o.nu = s.nu;
    o.interpolation = s.interpolation == "classical" ? InterpolationMode::Classical : InterpolationMode::Amgr;
    o.dff_scaling = s.dff == "diagonal" ? DffScaling::Diagonal : DffScaling::Bound;
    o.symmetric = s.restriction == "auto" ? is_symmetric(A) : s.restriction == "symmetric";
    o.theta_s = c.strength;
    return o;
}

Json level_json(const AmgrHierarchy& h) {
    Json levels = Json::array();
    for (std::size_t l = 0; l < h.num_levels(); ++l)
        levels.push_back({{"n", h.matrix(l).rows()}, {"nnz", h.matrix(l).nnz()}});
    return levels;
}

int cmd_solve(const ProblemOpts& p, const CoarsenOpts& c, const GlobalOpts& g, const SolveOpts& s) {
    auto prob = make_problem(p, g);
    const auto& A = prob.A;
    auto opts = hierarchy_options(s, c, A);
    // the second pass is applied by the coarsener below, not again by the hierarchy
    opts.second_pass = false;

    auto level0 = [&](const CoarsenOpts& co) -> Coarsened {
        if (!s.splitting_file.empty()) {
            auto rec = read_splitting(s.splitting_file);
            if (rec.splitting.size() != A.rows())
                throw UsageError("splitting file has n=" + std::to_string(rec.splitting.size()) +
                                 " but the matrix has " + std::to_string(A.rows()) + " rows");
            if (const auto bad = first_violation(A, rec.splitting, rec.theta))
                throw InfeasibleSplitting("splitting file violates theta-dominance in row " + std::to_string(*bad));
            Coarsened out{rec.splitting, {}, rec.splitting.c_count()};
            if (co.second_pass) out.splitting = second_pass(A, out.splitting, co.strength);
            return out;
        }
        return run_coarsener(A, co, g, p, prob.grid);
    };

    auto solve_with = [&](const CoarsenOpts& co) {
        const Coarsened first = level0(co);
        Coarsener coarsen = [&](const CsrMatrix& M, std::size_t level) -> CfSplitting {
            if (level == 0) return first.splitting;
            CoarsenOpts lower = co;
            if (lower.method == "by-hand") lower.method = "greedy";
            lower.subdomains = s.coarse_subdomains;
            GlobalOpts gl = g;
            gl.seed = seed_of(g) + level;
            return run_coarsener(M, lower, gl, p, 0).splitting;
        };
        auto h = build_hierarchy(A, coarsen, opts);
        auto rep = measure(h, s.k, s.rho_seed);
        Json j = to_json(rep);
        j["method"] = co.method;
        j["levels"] = level_json(h);
        j["c_count"] = first.splitting.c_count();
        if (co.second_pass) j["c_count_before_second_pass"] = first.c_before_second_pass;
        return std::pair{rep, j};
    };

    Json report;
    report["format_version"] = report_format_version;
    report["problem"] = describe(p);
    report["config"] = {{"levels", s.levels},  {"cycle", s.cycle},
                        {"nu", s.nu},          {"interpolation", s.interpolation},
                        {"dff", s.dff},        {"symmetric_restriction", opts.symmetric},
                        {"theta", c.theta},    {"second_pass", c.second_pass},
                        {"strength", c.strength}, {"k", s.k},
                        {"rho_seed", s.rho_seed}};
    if (g.seed) report["seed"] = *g.seed;

    if (s.compare) {
        if (!s.splitting_file.empty()) throw UsageError("--compare builds its own splittings; drop --splitting");
        std::printf("%-8s %8s %8s %8s %8s\n", "method", "F/n", "rho", "C_grid", "C_op");
        Json rows = Json::array();
        for (const char* m : {"greedy", "sa", "by-hand"}) {
            if (std::string(m) == "by-hand" && p.problem != "fd5" && p.problem != "fe9") continue;
            CoarsenOpts co = c;
            co.method = m;
            auto [rep, j] = solve_with(co);
            std::printf("%-8s %8.4f %8.4f %8.3f %8.3f%s\n", m, rep.f_ratio, rep.rho, rep.c_grid, rep.c_op,
                        rep.diverged ? " diverged" : "");
            rows.push_back(j);
        }
        report["rows"] = rows;
    } else {
        auto [rep, j] = solve_with(c);
        std::printf("rho=%.4f%s C_grid=%.4f C_op=%.4f F/n=%.4f levels=%zu\n", rep.rho,
                    rep.diverged ? " (diverged)" : "", rep.c_grid, rep.c_op, rep.f_ratio, j["levels"].size());
        if (j.contains("c_count_before_second_pass"))
            std::printf("second pass: |C| %zu -> %zu\n", j["c_count_before_second_pass"].get<std::size_t>(),
                        j["c_count"].get<std::size_t>());
        report["result"] = j;
    }
    if (!s.report.empty()) write_json(report, s.report);
    return ok;
}

int cmd_oracle(const ProblemOpts& p, const GlobalOpts& g, double theta, const std::string& output) {
    auto prob = make_problem(p, g);
    if (prob.A.rows() > brute_force_max_n)
        throw UsageError("oracle refuses n=" + std::to_string(prob.A.rows()) + " (limit " +
                         std::to_string(brute_force_max_n) + ")");
    auto r = brute_force_optimal_f(prob.A, theta);
    std::printf("n=%zu optimal |F|=%zu feasible sets=%zu\nF =", prob.A.rows(), r.best_size, r.feasible_count);
    for (Index i : r.best_f) std::printf(" %zu", i);
    std::printf("\n");
    if (!output.empty()) {
        SplittingRecord rec{CfSplitting::from_f_indices(prob.A.rows(), r.best_f), theta, "brute-force", {},
                            {{"problem", describe(p)}, {"feasible_count", r.feasible_count}}};
        write_splitting(rec, prob.A, output);
    }
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulated-annealing C/F splittings for reduction-based AMG"};
    app.set_config("--config", "", "Run file (TOML or INI); command-line flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Random seed")->trigger_on_parse(false);
    app.add_flag("--strict", g.strict, "Require --seed for randomized commands");
    app.add_option("--threads", g.threads, "Worker threads")->capture_default_str();

    ProblemOpts p;
    CoarsenOpts c;
    SolveOpts s;
    std::string output, trace, mesh_output;
    double oracle_theta = 0.56;

    auto* gen = app.add_subcommand("generate", "Write a test matrix in Matrix Market format");
    add_problem_options(gen, p);
    gen->add_option("-o,--output", output, "Matrix Market output")->required();
    gen->add_option("--mesh-output", mesh_output, "Also write the mesh (mesh-based problems)");

    auto* coarsen = app.add_subcommand("coarsen", "Compute a C/F splitting");
    add_problem_options(coarsen, p);
    add_coarsen_options(coarsen, c);
    coarsen->add_option("-o,--output", output, "Splitting JSON output");
    coarsen->add_option("--trace", trace, "Annealing trace CSV output");

    auto* solve = app.add_subcommand("solve", "Build an AMGr hierarchy and measure it");
    add_problem_options(solve, p);
    add_coarsen_options(solve, c);
    solve->add_option("--splitting", s.splitting_file, "Use this finest-level splitting");
    solve->add_option("--levels", s.levels, "Number of levels")->capture_default_str();
    solve->add_option("--cycle", s.cycle, "Cycle type")->check(CLI::IsMember({"V", "W"}))->capture_default_str();
    solve->add_option("--nu", s.nu, "Pre- and post-relaxation sweeps")->capture_default_str();
    solve->add_option("--interpolation", s.interpolation, "Interpolation")
        ->check(CLI::IsMember({"amgr", "classical"}))
        ->capture_default_str();
    solve->add_option("--dff", s.dff, "D_FF scaling")->check(CLI::IsMember({"bound", "diagonal"}))->capture_default_str();
    solve->add_option("--restriction", s.restriction, "Restriction")
        ->check(CLI::IsMember({"auto", "symmetric", "nonsymmetric"}))
        ->capture_default_str();
    solve->add_option("--coarse-subdomains", s.coarse_subdomains, "Subdomains on coarse levels (sa)")
        ->capture_default_str();
    solve->add_option("-k,--cycles", s.k, "Cycles for the convergence factor")->capture_default_str();
    solve->add_option("--rho-seed", s.rho_seed, "Seed of the random initial error")->capture_default_str();
    solve->add_option("--report", s.report, "Report JSON output");
    solve->add_flag("--compare", s.compare, "Side-by-side greedy, SA and by-hand rows");

    auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum for n <= 24");
    add_problem_options(oracle, p);
    oracle->add_option("--theta", oracle_theta, "Dominance threshold")->capture_default_str();
    oracle->add_option("-o,--output", output, "Splitting JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }
    if (seed_opt->count() > 0) g.seed = seed;

    try {
        if (g.threads != 1) throw UsageError("only --threads 1 is implemented");
        if (*gen) return cmd_generate(p, g, output, mesh_output);
        if (*coarsen) return cmd_coarsen(p, c, g, output, trace);
        if (*solve) return cmd_solve(p, c, g, s);
        return cmd_oracle(p, g, oracle_theta, output);
    } catch (const InfeasibleSplitting& e) {
        std::cerr << "error: " << e.what() << '\n';
        return check_failed;
    } catch (const CoarseningStalled& e) {
        std::cerr << "error: " << e.what() << '\n';
        return stalled;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return check_failed;
    }
}
