#ifndef AMGR_SA_BRUTE_FORCE_HPP
#define AMGR_SA_BRUTE_FORCE_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "splitting.hpp"

namespace amgr_sa {

struct BruteForceResult {
    std::vector<Index> best_f;
    std::size_t best_size = 0;
    std::size_t feasible_count = 0; ///< number of feasible F-sets, the empty set included
};

inline constexpr std::size_t brute_force_max_n = 24;

/// Exhaustive search for the largest theta-dominant F-set. Among maximisers
/// the lexicographically smallest sorted index list is returned.
inline BruteForceResult brute_force_optimal_f(const CsrMatrix& A, double theta) {
    if (!A.square()) throw DimensionError("brute_force_optimal_f: matrix must be square");
    const std::size_t n = A.rows();
    if (n > brute_force_max_n)
        throw std::invalid_argument("brute_force_optimal_f: n = " + std::to_string(n) +
                                    " exceeds the exhaustive limit of " +
                                    std::to_string(brute_force_max_n));

    std::vector<double> diag(n);
    for (Index i = 0; i < n; ++i) diag[i] = std::abs(A.diagonal(i));

    BruteForceResult res;
    std::uint32_t best_mask = 0;
    const std::uint32_t end = n == 0 ? 1u : (1u << n);
    for (std::uint32_t mask = 0; mask < end; ++mask) {
        bool ok = true;
        for (std::uint32_t rest = mask; ok && rest; rest &= rest - 1) {
            const auto i = static_cast<Index>(std::countr_zero(rest));
            const auto r = A.row(i);
            double sum = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k)
                if (mask >> r.cols[k] & 1u) sum += std::abs(r.vals[k]);
            ok = meets_dominance(diag[i], sum, theta);
        }
        if (!ok) continue;
        ++res.feasible_count;
        const auto size = static_cast<std::size_t>(std::popcount(mask));
        // equal sizes: the smaller list holds the lowest index of the symmetric difference
        const std::uint32_t diff = mask ^ best_mask;
        if (size > res.best_size ||
            (size == res.best_size && diff && (mask >> std::countr_zero(diff) & 1u))) {
            res.best_size = size;
            best_mask = mask;
        }
    }
    for (Index i = 0; i < n; ++i)
        if (best_mask >> i & 1u) res.best_f.push_back(i);
    return res;
}

} // namespace amgr_sa

#endif
