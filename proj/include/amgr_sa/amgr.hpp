#ifndef AMGR_SA_AMGR_HPP
#define AMGR_SA_AMGR_HPP

/// \file amgr.hpp
/// Reduction-based AMG (AMGr) built from a C/F splitting.
///
/// Stored entries of A carry their actual signs. Interpolation of an F-point
/// i from a C-point c is P_ic = -A_ic / (D_FF)_ii with
/// (D_FF)_ii = (2 - 1/theta) A_ii; C-points are injected. F-relaxation is
/// x_F <- x_F + sigma D_FF^{-1} (b - A x)_F with sigma = 2 / (2 + epsilon),
/// epsilon = (2 - 2 theta) / (2 theta - 1).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dense.hpp"
#include "greedy.hpp"
#include "splitting.hpp"

namespace amgr_sa {

struct DffResult {
    Vector d_ff; ///< length n; zero on C-points
    double epsilon = 0.0;
    double sigma = 1.0;
};

inline double amgr_epsilon(double theta) { return (2.0 - 2.0 * theta) / (2.0 * theta - 1.0); }
inline double amgr_sigma(double theta) { return 2.0 / (2.0 + amgr_epsilon(theta)); }

/// How (D_FF)_ii is formed from a_ii. `Bound` uses (2 - 1/theta) a_ii, the
/// scaling under which the convergence bound holds; `Diagonal` uses a_ii and
/// keeps sigma = 2/(2 + eps) as the relaxation weight.
enum class DffScaling { Bound, Diagonal };

inline DffResult build_dff(const CsrMatrix& A, const CfSplitting& s, double theta,
                           DffScaling scaling = DffScaling::Bound) {
    detail::require_theta(theta);
    if (!A.square() || s.size() != A.rows()) throw DimensionError("build_dff: size mismatch");
    DffResult r;
    r.epsilon = amgr_epsilon(theta);
    r.sigma = amgr_sigma(theta);
    r.d_ff.assign(A.rows(), 0.0);
    const double scale = scaling == DffScaling::Bound ? 2.0 - 1.0 / theta : 1.0;
    for (Index i = 0; i < A.rows(); ++i) {
        if (!s.is_f(i)) continue;
        const double a = A.diagonal(i);
        if (!(a > 0.0))
            throw std::domain_error("build_dff: nonpositive diagonal at F-point " + std::to_string(i));
        r.d_ff[i] = scale * a;
    }
    return r;
}

namespace detail {

inline std::vector<Index> coarse_numbering(const CfSplitting& s) {
    std::vector<Index> pos(s.size(), std::numeric_limits<Index>::max());
    Index next = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s.is_c(i)) pos[i] = next++;
    return pos;
}

} // namespace detail

/// n x |C| interpolation; columns follow increasing C index.
inline CsrMatrix build_interpolation(const CsrMatrix& A, const CfSplitting& s, const Vector& d_ff) {
    if (!s.is_finalized()) throw std::invalid_argument("build_interpolation: splitting has U points");
    const auto pos = detail::coarse_numbering(s);
    const std::size_t nc = s.c_count();
    std::vector<Triplet> t;
    for (Index i = 0; i < A.rows(); ++i) {
        if (s.is_c(i)) {
            t.push_back({i, pos[i], 1.0});
            continue;
        }
        if (d_ff.at(i) == 0.0)
            throw std::domain_error("build_interpolation: zero D_FF entry at " + std::to_string(i));
        const auto r = A.row(i);
        for (std::size_t k = 0; k < r.size(); ++k)
            if (s.is_c(r.cols[k])) t.push_back({i, pos[r.cols[k]], -r.vals[k] / d_ff[i]});
    }
    return CsrMatrix::from_triplets(A.rows(), nc, std::move(t));
}

/// |C| x n restriction. Symmetric mode returns P^T; otherwise the C-rows
/// hold -A_cj / (D_FF)_jj for F-columns j and 1 at the point itself.
inline CsrMatrix build_restriction(const CsrMatrix& A, const CfSplitting& s, const Vector& d_ff,
                                   bool symmetric) {
    if (symmetric) return transpose(build_interpolation(A, s, d_ff));
    const auto pos = detail::coarse_numbering(s);
    std::vector<Triplet> t;
    for (Index c = 0; c < A.rows(); ++c) {
        if (!s.is_c(c)) continue;
        t.push_back({pos[c], c, 1.0});
        const auto r = A.row(c);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const Index j = r.cols[k];
            if (!s.is_f(j)) continue;
            if (d_ff.at(j) == 0.0)
                throw std::domain_error("build_restriction: zero D_FF entry at " + std::to_string(j));
            t.push_back({pos[c], j, -r.vals[k] / d_ff[j]});
        }
    }
    return CsrMatrix::from_triplets(s.c_count(), A.rows(), std::move(t));
}

inline CsrMatrix galerkin_coarse(const CsrMatrix& R, const CsrMatrix& A, const CsrMatrix& P) {
    if (R.cols() != A.rows() || A.cols() != P.rows())
        throw DimensionError("galerkin_coarse: incompatible dimensions");
    return multiply(R, multiply(A, P));
}

// ---------------------------------------------------------------------------
// Strength of connection and the Ruge-Stueben second pass

/// strong[i] lists the j != i that strongly influence i:
/// -A_ij >= theta_s * max_{k != i} (-A_ik), with the maximum positive.
struct StrengthGraph {
    std::vector<std::vector<Index>> strong;

    bool influences(Index j, Index i) const {
        return std::binary_search(strong[i].begin(), strong[i].end(), j);
    }
    std::size_t edge_count() const {
        std::size_t e = 0;
        for (const auto& s : strong) e += s.size();
        return e;
    }
};

inline StrengthGraph strength_graph(const CsrMatrix& A, double theta_s) {
    if (!(theta_s > 0.0 && theta_s <= 1.0))
        throw std::invalid_argument("strength_graph: theta_s must lie in (0, 1]");
    StrengthGraph g;
    g.strong.resize(A.rows());
    for (Index i = 0; i < A.rows(); ++i) {
        const auto r = A.row(i);
        double mx = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k)
            if (r.cols[k] != i) mx = std::max(mx, -r.vals[k]);
        if (mx <= 0.0) continue;
        for (std::size_t k = 0; k < r.size(); ++k)
            if (r.cols[k] != i && -r.vals[k] >= theta_s * mx) g.strong[i].push_back(r.cols[k]);
    }
    return g;
}

/// Strongly connected F-F pairs (i, j), j in S_i, without a C-point that
/// strongly influences both.
inline std::vector<std::pair<Index, Index>> second_pass_violations(const StrengthGraph& g,
                                                                   const CfSplitting& s) {
    std::vector<std::pair<Index, Index>> bad;
    for (Index i = 0; i < s.size(); ++i) {
        if (!s.is_f(i)) continue;
        for (Index j : g.strong[i]) {
            if (!s.is_f(j)) continue;
            bool common = false;
            for (Index c : g.strong[i])
                if (s.is_c(c) && g.influences(c, j)) {
                    common = true;
                    break;
                }
            if (!common) bad.emplace_back(i, j);
        }
    }
    return bad;
}

/// Ruge-Stueben second pass: F-points are scanned in index order; the first
/// strong F-neighbour j lacking a common strong C-point becomes a tentative
/// C-point, and a second such neighbour makes i itself C instead. Repeated
/// until no violation remains. Only ever moves points from F to C.
inline CfSplitting second_pass(const CsrMatrix& A, const CfSplitting& s0, double theta_s) {
    if (!s0.is_finalized()) throw std::invalid_argument("second_pass: splitting has U points");
    const auto g = strength_graph(A, theta_s);
    CfSplitting s = s0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (Index i = 0; i < s.size(); ++i) {
            if (!s.is_f(i)) continue;
            std::optional<Index> tentative;
            bool promote_i = false;
            for (Index j : g.strong[i]) {
                if (!s.is_f(j)) continue;
                bool common = false;
                for (Index c : g.strong[i])
                    if (s.is_c(c) && g.influences(c, j)) {
                        common = true;
                        break;
                    }
                if (common) continue;
                if (tentative) {
                    promote_i = true;
                    break;
                }
                tentative = j;
                s.set(j, Label::C);
            }
            if (promote_i) {
                s.set(*tentative, Label::F);
                s.set(i, Label::C);
                changed = true;
            } else if (tentative) {
                changed = true;
            }
        }
    }
    return s;
}

/// Classical (Ruge-Stueben) interpolation from the strong C-neighbours.
/// Strong F-neighbours are distributed over the common C-points through
/// their own connections of opposite sign to their diagonal; everything else
/// is lumped into the diagonal.
inline CsrMatrix classical_interpolation(const CsrMatrix& A, const CfSplitting& s, const StrengthGraph& g) {
    const auto pos = detail::coarse_numbering(s);
    std::vector<Triplet> t;
    std::vector<double> w(A.rows(), 0.0);
    for (Index i = 0; i < A.rows(); ++i) {
        if (s.is_c(i)) {
            t.push_back({i, pos[i], 1.0});
            continue;
        }
        const auto& Si = g.strong[i];
        auto strong_c = [&](Index j) { return s.is_c(j) && std::binary_search(Si.begin(), Si.end(), j); };

        double diag = 0.0;
        std::vector<Index> ci;
        const auto r = A.row(i);
        for (std::size_t q = 0; q < r.size(); ++q) {
            const Index j = r.cols[q];
            if (j == i) diag += r.vals[q];
            else if (strong_c(j)) {
                ci.push_back(j);
                w[j] += r.vals[q];
            }
        }
        for (std::size_t q = 0; q < r.size(); ++q) {
            const Index k = r.cols[q];
            if (k == i || strong_c(k)) continue;
            const bool strong_f = s.is_f(k) && std::binary_search(Si.begin(), Si.end(), k);
            if (!strong_f) {
                diag += r.vals[q]; // weak connection
                continue;
            }
            const double akk = A.diagonal(k);
            const auto rk = A.row(k);
            double denom = 0.0;
            for (std::size_t p = 0; p < rk.size(); ++p)
                if (strong_c(rk.cols[p]) && rk.vals[p] * akk < 0.0) denom += rk.vals[p];
            if (denom == 0.0) {
                diag += r.vals[q];
                continue;
            }
            for (std::size_t p = 0; p < rk.size(); ++p)
                if (strong_c(rk.cols[p]) && rk.vals[p] * akk < 0.0)
                    w[rk.cols[p]] += r.vals[q] * rk.vals[p] / denom;
        }
        if (diag == 0.0)
            throw std::domain_error("classical_interpolation: zero lumped diagonal at " + std::to_string(i));
        for (Index j : ci) {
            t.push_back({i, pos[j], -w[j] / diag});
            w[j] = 0.0;
        }
    }
    return CsrMatrix::from_triplets(A.rows(), s.c_count(), std::move(t));
}

// ---------------------------------------------------------------------------
// Hierarchy and cycles

enum class CycleType { V, W };
enum class InterpolationMode { Amgr, Classical };

struct AmgrLevel {
    CsrMatrix A;
    CfSplitting splitting;
    Vector d_ff;
    double epsilon = 0.0;
    double sigma = 1.0;
    CsrMatrix P;
    CsrMatrix R;
};

/// Builds the operators of one level from A and a finalized splitting.
inline AmgrLevel build_level(CsrMatrix A, CfSplitting s, double theta, bool symmetric,
                             InterpolationMode mode = InterpolationMode::Amgr, double theta_s = 0.3,
                             DffScaling scaling = DffScaling::Bound) {
    AmgrLevel L;
    auto dff = build_dff(A, s, theta, scaling);
    L.d_ff = std::move(dff.d_ff);
    L.epsilon = dff.epsilon;
    L.sigma = dff.sigma;
    if (mode == InterpolationMode::Amgr) {
        L.P = build_interpolation(A, s, L.d_ff);
        L.R = build_restriction(A, s, L.d_ff, symmetric);
    } else {
        L.P = classical_interpolation(A, s, strength_graph(A, theta_s));
        L.R = transpose(L.P);
    }
    L.A = std::move(A);
    L.splitting = std::move(s);
    return L;
}

/// x_F <- x_F + sigma D_FF^{-1} (b - A x)_F; C entries untouched.
inline void f_relax(const AmgrLevel& L, Vector& x, std::span<const double> b) {
    const auto r = residual(L.A, x, b);
    for (Index i = 0; i < x.size(); ++i)
        if (L.d_ff[i] != 0.0) x[i] += L.sigma * r[i] / L.d_ff[i];
}

struct AmgrHierarchy {
    std::vector<AmgrLevel> levels; ///< all but the coarsest
    CsrMatrix coarsest;
    DenseLU coarsest_lu;
    CycleType cycle = CycleType::V;
    std::size_t nu = 1;

    std::size_t num_levels() const { return levels.size() + 1; }
    const CsrMatrix& matrix(std::size_t l) const { return l < levels.size() ? levels[l].A : coarsest; }

    /// Finalises a hierarchy whose last coarse operator is `coarse`.
    void set_coarsest(CsrMatrix coarse) {
        coarsest = std::move(coarse);
        coarsest_lu = coarsest.rows() ? DenseLU(DenseMatrix::from_sparse(coarsest)) : DenseLU();
    }
};

/// One cycle on level l; x is updated in place.
inline void cycle(const AmgrHierarchy& h, std::size_t l, Vector& x, std::span<const double> b) {
    if (l == h.levels.size()) {
        if (!x.empty()) x = h.coarsest_lu.solve(b);
        return;
    }
    const AmgrLevel& L = h.levels[l];
    for (std::size_t k = 0; k < h.nu; ++k) f_relax(L, x, b);
    if (L.P.cols() > 0) {
        const auto rc = spmv(L.R, residual(L.A, x, b));
        Vector ec(rc.size(), 0.0);
        const int visits = (h.cycle == CycleType::W && l + 1 < h.levels.size()) ? 2 : 1;
        for (int v = 0; v < visits; ++v) cycle(h, l + 1, ec, rc);
        const auto corr = spmv(L.P, ec);
        for (Index i = 0; i < x.size(); ++i) x[i] += corr[i];
    }
    for (std::size_t k = 0; k < h.nu; ++k) f_relax(L, x, b);
}

using Coarsener = std::function<CfSplitting(const CsrMatrix& A, std::size_t level)>;

struct HierarchyOptions {
    std::size_t levels = 2;
    double theta = 0.56;
    bool symmetric = true; ///< R = P^T; false selects the nonsymmetric restriction
    bool second_pass = false;
    double theta_s = 0.30;
    InterpolationMode interpolation = InterpolationMode::Amgr;
    DffScaling dff_scaling = DffScaling::Bound;
    CycleType cycle = CycleType::V;
    std::size_t nu = 1;
    std::size_t coarse_cap = 16;
    double stall_fraction = 0.9;
};

/// Recursively coarsens A. Level l's splitting comes from `coarsen(A_l, l)`
/// (optionally augmented by the second pass); coarsening stops at
/// opts.levels levels, once a level has at most coarse_cap unknowns, or
/// when |C| >= stall_fraction * n. A splitting with C = Omega on the finest
/// level throws CoarseningStalled.
inline AmgrHierarchy build_hierarchy(const CsrMatrix& A, const Coarsener& coarsen, const HierarchyOptions& opts) {
    if (opts.levels < 2) throw std::invalid_argument("build_hierarchy: need at least two levels");
    if (!A.square()) throw DimensionError("build_hierarchy: matrix must be square");
    AmgrHierarchy h;
    h.cycle = opts.cycle;
    h.nu = opts.nu;
    CsrMatrix current = A;
    while (h.levels.size() + 1 < opts.levels) {
        const std::size_t n = current.rows();
        if (!h.levels.empty() && n <= opts.coarse_cap) break;
        CfSplitting s = coarsen(current, h.levels.size());
        if (s.size() != n || !s.is_finalized())
            throw std::invalid_argument("build_hierarchy: coarsener returned an invalid splitting");
        if (opts.second_pass) s = second_pass(current, s, opts.theta_s);
        const std::size_t nc = s.c_count();
        if (n > 0 && nc == n) {
            if (h.levels.empty()) throw CoarseningStalled("coarsening stalled: every point is coarse");
            break;
        }
        if (!h.levels.empty() && static_cast<double>(nc) >= opts.stall_fraction * static_cast<double>(n)) break;
        AmgrLevel L = build_level(std::move(current), std::move(s), opts.theta, opts.symmetric,
                                  opts.interpolation, opts.theta_s, opts.dff_scaling);
        current = galerkin_coarse(L.R, L.A, L.P);
        h.levels.push_back(std::move(L));
    }
    h.set_coarsest(std::move(current));
    return h;
}

/// Two-level hierarchy from a given finest splitting.
inline AmgrHierarchy two_level(const CsrMatrix& A, const CfSplitting& s, const HierarchyOptions& opts) {
    HierarchyOptions o = opts;
    o.levels = 2;
    return build_hierarchy(A, [&](const CsrMatrix&, std::size_t) { return s; }, o);
}

} // namespace amgr_sa

#endif
