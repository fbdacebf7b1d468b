#ifndef AMGR_SA_METRICS_HPP
#define AMGR_SA_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "amgr.hpp"

namespace amgr_sa {

struct RhoResult {
    double rho = 0.0;
    bool diverged = false;
    std::size_t k = 0;
};

namespace detail {

inline Vector random_guess(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector x(n);
    for (auto& v : x) v = u(rng);
    return x;
}

} // namespace detail

/// (||x_k|| / ||x_0||)^(1/k) for k cycles on A x = 0 from a seeded random
/// guess in [-1, 1]^n. The iterate is renormalised after every cycle and
/// the per-cycle factors are summed in log space.
inline RhoResult asymptotic_rho(const AmgrHierarchy& h, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw std::invalid_argument("asymptotic_rho: k must be at least 1");
    const std::size_t n = h.matrix(0).rows();
    RhoResult res;
    res.k = k;
    if (n == 0) return res;
    Vector x = detail::random_guess(n, seed);
    const Vector zero(n, 0.0);
    double norm = norm2(x);
    for (auto& v : x) v /= norm;
    double log_sum = 0.0;
    for (std::size_t it = 0; it < k; ++it) {
        cycle(h, 0, x, zero);
        norm = norm2(x);
        if (norm == 0.0) return res; // exact solve
        log_sum += std::log(norm);
        for (auto& v : x) v /= norm;
    }
    res.rho = std::exp(log_sum / static_cast<double>(k));
    res.diverged = log_sum > std::log(10.0);
    return res;
}

/// Direct evaluation of the same quantity without renormalisation.
inline double direct_rho(const AmgrHierarchy& h, std::size_t k, std::uint64_t seed) {
    const std::size_t n = h.matrix(0).rows();
    Vector x = detail::random_guess(n, seed);
    const Vector zero(n, 0.0);
    const double n0 = norm2(x);
    for (std::size_t it = 0; it < k; ++it) cycle(h, 0, x, zero);
    return std::pow(norm2(x) / n0, 1.0 / static_cast<double>(k));
}

struct Complexities {
    double c_grid = 1.0;
    double c_op = 1.0;
};

inline Complexities complexities(const AmgrHierarchy& h) {
    const double n0 = static_cast<double>(h.matrix(0).rows());
    const double z0 = static_cast<double>(h.matrix(0).nnz());
    double n = 0.0, z = 0.0;
    for (std::size_t l = 0; l < h.num_levels(); ++l) {
        n += static_cast<double>(h.matrix(l).rows());
        z += static_cast<double>(h.matrix(l).nnz());
    }
    return {n0 > 0 ? n / n0 : 1.0, z0 > 0 ? z / z0 : 1.0};
}

struct SolveReport {
    double rho = 0.0;
    bool diverged = false;
    double c_grid = 1.0;
    double c_op = 1.0;
    double f_ratio = 0.0;
    std::size_t k_used = 0;
    std::uint64_t seed = 0;
};

inline SolveReport measure(const AmgrHierarchy& h, std::size_t k, std::uint64_t seed) {
    SolveReport r;
    const auto rho = asymptotic_rho(h, k, seed);
    const auto c = complexities(h);
    r.rho = rho.rho;
    r.diverged = rho.diverged;
    r.c_grid = c.c_grid;
    r.c_op = c.c_op;
    r.f_ratio = h.levels.empty() ? 0.0 : f_ratio(h.levels.front().splitting);
    r.k_used = k;
    r.seed = seed;
    return r;
}

} // namespace amgr_sa

#endif
