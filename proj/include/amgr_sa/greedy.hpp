#ifndef AMGR_SA_GREEDY_HPP
#define AMGR_SA_GREEDY_HPP

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "splitting.hpp"

namespace amgr_sa {

namespace detail {

inline void require_theta(double theta) {
    if (!(theta > 0.5)) throw std::invalid_argument("dominance threshold theta must exceed 1/2");
}

inline std::vector<double> abs_diagonal(const CsrMatrix& A) {
    std::vector<double> d(A.rows());
    for (Index i = 0; i < A.rows(); ++i) d[i] = std::abs(A.diagonal(i));
    return d;
}

} // namespace detail

/// Rows already theta-dominant over their full row. Such a row stays
/// feasible in any F-set, since restricting the sum to F can only shrink it.
inline std::vector<Index> prepin_safe_f(const CsrMatrix& A, double theta) {
    detail::require_theta(theta);
    std::vector<Index> out;
    for (Index i = 0; i < A.rows(); ++i) {
        const auto r = A.row(i);
        double sum = 0.0;
        for (double v : r.vals) sum += std::abs(v);
        if (meets_dominance(std::abs(A.diagonal(i)), sum, theta)) out.push_back(i);
    }
    return out;
}

/// Greedy F-set maximisation under the theta-dominance constraint.
///
/// Points whose dominance over F u U already meets theta go to F; otherwise
/// the least dominant undecided point becomes C and its neighbours are
/// re-examined. Ties on the minimum go to the lowest index.
inline CfSplitting greedy_coarsen(const CsrMatrix& A, double theta) {
    detail::require_theta(theta);
    if (!A.square()) throw DimensionError("greedy_coarsen: matrix must be square");
    const auto n = A.rows();
    const auto diag = detail::abs_diagonal(A);
    for (Index i = 0; i < n; ++i)
        if (diag[i] == 0.0)
            throw std::domain_error("greedy_coarsen: zero diagonal in row " + std::to_string(i));

    // rows i with A_ij != 0, i.e. the rows whose F u U sum changes when j leaves U
    const CsrMatrix At = transpose(A);
    CfSplitting s(n, Label::U);

    auto open_sum = [&](Index i) { // sum over F u U of |A_ij|
        const auto r = A.row(i);
        double sum = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k)
            if (!s.is_c(r.cols[k])) sum += std::abs(r.vals[k]);
        return sum;
    };

    std::vector<double> ratio(n);
    std::set<std::pair<double, Index>> undecided;
    for (Index i = 0; i < n; ++i) {
        const double sum = open_sum(i);
        ratio[i] = diag[i] / sum;
        if (meets_dominance(diag[i], sum, theta)) s.set(i, Label::F);
        else undecided.emplace(ratio[i], i);
    }

    while (!undecided.empty()) {
        const auto [_, j] = *undecided.begin();
        undecided.erase(undecided.begin());
        s.set(j, Label::C);
        for (Index i : At.row(j).cols) {
            if (s.label(i) != Label::U) continue;
            undecided.erase({ratio[i], i});
            const double sum = open_sum(i);
            ratio[i] = sum == 0.0 ? std::numeric_limits<double>::infinity() : diag[i] / sum;
            if (meets_dominance(diag[i], sum, theta)) s.set(i, Label::F);
            else undecided.emplace(ratio[i], i);
        }
    }
    return s;
}

} // namespace amgr_sa

#endif
