#ifndef AMGR_SA_PROBLEMS_HPP
#define AMGR_SA_PROBLEMS_HPP

/// \file problems.hpp
/// Structured-grid test operators on the unit square with eliminated
/// Dirichlet boundary. Unknowns are the N x N interior nodes, numbered
/// row-major with x fastest: index = iy * N + ix.
///
/// The Laplacian stencils are left unscaled (integer / thirds entries) so
/// that per-row dominance ratios come out as simple fractions. The
/// convection-diffusion operator keeps its physical 1/h^2 and 1/h scaling.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparse.hpp"

namespace amgr_sa {

/// Rotated diffusion tensor K = Q diag(delta, 1) Q^T.
struct AnisotropyParams {
    double delta = 1.0; ///< weak-direction coefficient, in (0, 1]
    double angle = 0.0; ///< rotation of Q in radians

    void validate() const {
        if (!(delta > 0.0 && delta <= 1.0))
            throw std::invalid_argument("anisotropy delta must lie in (0, 1], got " +
                                        std::to_string(delta));
    }

    /// Components (K11, K12, K22) of the symmetric tensor.
    std::array<double, 3> tensor() const {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        return {delta * c * c + s * s, (delta - 1.0) * c * s, delta * s * s + c * c};
    }
};

enum class Scheme { FD, FE };

namespace detail {

inline void require_grid(std::size_t N, std::size_t min = 1) {
    if (N < min)
        throw std::invalid_argument("grid size N must be at least " + std::to_string(min));
}

/// Adds a constant 3x3 stencil (offsets -1..1 in x and y) at every interior node.
inline CsrMatrix assemble_stencil(std::size_t N, const std::array<std::array<double, 3>, 3>& st) {
    std::vector<Triplet> t;
    t.reserve(N * N * 9);
    const auto n = static_cast<long long>(N);
    for (long long y = 0; y < n; ++y) {
        for (long long x = 0; x < n; ++x) {
            const auto row = static_cast<Index>(y * n + x);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const double v = st[dy + 1][dx + 1];
                    const long long xx = x + dx, yy = y + dy;
                    if (v == 0.0 || xx < 0 || yy < 0 || xx >= n || yy >= n) continue;
                    t.push_back({row, static_cast<Index>(yy * n + xx), v});
                }
            }
        }
    }
    return CsrMatrix::from_triplets(N * N, N * N, std::move(t));
}

/// Bilinear element stiffness on the unit reference square for constant K,
/// integrated with 2x2 Gauss points. Local nodes: (0,0), (1,0), (0,1), (1,1).
inline std::array<std::array<double, 4>, 4> q1_stiffness(const std::array<double, 3>& K) {
    std::array<std::array<double, 4>, 4> ke{};
    const double g = 0.5 / std::numbers::sqrt3;
    const std::array<double, 2> pts{0.5 - g, 0.5 + g};
    const std::array<std::array<int, 2>, 4> corner{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
    for (double xi : pts) {
        for (double eta : pts) {
            std::array<std::array<double, 2>, 4> grad{};
            for (int a = 0; a < 4; ++a) {
                const double sx = corner[a][0] ? 1.0 : -1.0;
                const double sy = corner[a][1] ? 1.0 : -1.0;
                const double fx = corner[a][0] ? xi : 1.0 - xi;
                const double fy = corner[a][1] ? eta : 1.0 - eta;
                grad[a] = {sx * fy, sy * fx};
            }
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    ke[a][b] += 0.25 * (grad[a][0] * (K[0] * grad[b][0] + K[1] * grad[b][1]) +
                                        grad[a][1] * (K[1] * grad[b][0] + K[2] * grad[b][1]));
        }
    }
    return ke;
}

} // namespace detail

/// Five-point finite-difference Laplacian: 4 on the diagonal, -1 to the
/// cardinal neighbours.
inline CsrMatrix gen_fd_laplacian_5pt(std::size_t N) {
    detail::require_grid(N);
    return detail::assemble_stencil(N, {{{0, -1, 0}, {-1, 4, -1}, {0, -1, 0}}});
}

/// Nine-point bilinear finite-element Laplacian: 8/3 on the diagonal, -1/3
/// to all eight neighbours.
inline CsrMatrix gen_fe_bilinear_9pt(std::size_t N) {
    detail::require_grid(N);
    const double o = -1.0 / 3.0;
    return detail::assemble_stencil(N, {{{o, o, o}, {o, 8.0 / 3.0, o}, {o, o, o}}});
}

/// -div(K grad u) with K = Q diag(delta,1) Q^T.
///
/// FD: central differences, the mixed term 2 K12 u_xy by the four-point
/// cross difference. FE: bilinear elements assembled with 2x2 Gauss quadrature.
inline CsrMatrix gen_anisotropic(std::size_t N, const AnisotropyParams& p, Scheme scheme) {
    detail::require_grid(N, 2);
    p.validate();
    const auto [k11, k12, k22] = p.tensor();
    if (scheme == Scheme::FD) {
        const double q = 0.5 * k12;
        return detail::assemble_stencil(
            N, {{{-q, -k22, q}, {-k11, 2.0 * (k11 + k22), -k11}, {q, -k22, -q}}});
    }

    const auto ke = detail::q1_stiffness({k11, k12, k22});
    const std::size_t M = N + 2; // nodes per side including the boundary
    auto unknown = [&](std::size_t x, std::size_t y) -> long long {
        if (x == 0 || y == 0 || x == M - 1 || y == M - 1) return -1;
        return static_cast<long long>((y - 1) * N + (x - 1));
    };
    std::vector<Triplet> t;
    t.reserve((M - 1) * (M - 1) * 16);
    for (std::size_t cy = 0; cy + 1 < M; ++cy) {
        for (std::size_t cx = 0; cx + 1 < M; ++cx) {
            const std::array<long long, 4> dof{unknown(cx, cy), unknown(cx + 1, cy),
                                               unknown(cx, cy + 1), unknown(cx + 1, cy + 1)};
            for (int a = 0; a < 4; ++a) {
                if (dof[a] < 0) continue;
                for (int b = 0; b < 4; ++b) {
                    if (dof[b] < 0) continue;
                    t.push_back({static_cast<Index>(dof[a]), static_cast<Index>(dof[b]), ke[a][b]});
                }
            }
        }
    }
    return CsrMatrix::from_triplets(N * N, N * N, std::move(t));
}

/// Tridiagonal [-1 2 -1] on n unknowns.
inline CsrMatrix gen_laplacian_1d(std::size_t n) {
    detail::require_grid(n);
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i) {
        if (i > 0) t.push_back({i, i - 1, -1.0});
        t.push_back({i, i, 2.0});
        if (i + 1 < n) t.push_back({i, i + 1, -1.0});
    }
    return CsrMatrix::from_triplets(n, n, std::move(t));
}

/// -eps Laplace(u) + b . grad(u), five-point diffusion and first-order upwind
/// convection, h = 1/(N+1).
inline CsrMatrix gen_convection_diffusion(std::size_t N, double eps, std::array<double, 2> b) {
    detail::require_grid(N);
    if (!(eps > 0.0)) throw std::invalid_argument("diffusion coefficient eps must be positive");
    const double h = 1.0 / static_cast<double>(N + 1);
    const double d = eps / (h * h);
    std::array<std::array<double, 3>, 3> st{{{0, -d, 0}, {-d, 4 * d, -d}, {0, -d, 0}}};
    // upwind: a positive velocity component couples to the lower neighbour
    const double bx = b[0] / h, by = b[1] / h;
    st[1][1] += std::abs(bx) + std::abs(by);
    (bx >= 0 ? st[1][0] : st[1][2]) -= std::abs(bx);
    (by >= 0 ? st[0][1] : st[2][1]) -= std::abs(by);
    return detail::assemble_stencil(N, st);
}

} // namespace amgr_sa

#endif
