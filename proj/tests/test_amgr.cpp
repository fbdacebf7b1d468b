#include <catch_amalgamated.hpp>

#include <numbers>

#include "amgr_sa/amgr.hpp"
#include "amgr_sa/anneal.hpp"
#include "amgr_sa/by_hand.hpp"
#include "amgr_sa/greedy.hpp"
#include "amgr_sa/problems.hpp"
#include "helpers.hpp"

using namespace amgr_sa;
using Catch::Approx;

namespace {

DenseMatrix dense_relaxation(const AmgrLevel& L) {
    const auto n = L.A.rows();
    auto S = DenseMatrix::identity(n);
    const auto A = DenseMatrix::from_sparse(L.A);
    for (std::size_t i = 0; i < n; ++i)
        if (L.d_ff[i] != 0.0)
            for (std::size_t j = 0; j < n; ++j) S(i, j) -= L.sigma / L.d_ff[i] * A(i, j);
    return S;
}

/// R_relax^nu (I - P (R A P)^{-1} R A) R_relax^nu, assembled densely.
DenseMatrix dense_two_grid(const AmgrHierarchy& h) {
    const auto& L = h.levels.at(0);
    const auto n = L.A.rows();
    const auto A = DenseMatrix::from_sparse(L.A);
    const auto P = DenseMatrix::from_sparse(L.P);
    const auto R = DenseMatrix::from_sparse(L.R);
    auto T = DenseMatrix::identity(n);
    if (P.cols() > 0) T = T - P * (DenseLU(R * A * P).inverse() * (R * A));
    auto S = dense_relaxation(L);
    auto Sn = DenseMatrix::identity(n);
    for (std::size_t k = 0; k < h.nu; ++k) Sn = Sn * S;
    return Sn * T * Sn;
}

/// Error propagation of one cycle, column by column.
DenseMatrix cycle_operator(const AmgrHierarchy& h) {
    const auto n = h.matrix(0).rows();
    DenseMatrix E(n, n);
    const Vector zero(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        Vector x(n, 0.0);
        x[j] = 1.0;
        cycle(h, 0, x, zero);
        for (std::size_t i = 0; i < n; ++i) E(i, j) = x[i];
    }
    return E;
}

CfSplitting split(std::size_t n, std::vector<Index> f) { return CfSplitting::from_f_indices(n, f); }

/// sqrt of the largest eigenvalue of E^T A E relative to A, by power iteration on A^{-1} E^T A E.
double energy_norm(const DenseMatrix& E, const DenseMatrix& A) {
    const auto n = A.rows();
    DenseLU lu(A);
    const auto M = E.transposed() * A * E;
    Vector x(n, 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 3000; ++it) {
        Vector y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) y[i] += M(i, j) * x[j];
        y = lu.solve(y);
        double nrm = 0.0;
        for (double v : y) nrm = std::max(nrm, std::abs(v));
        if (nrm == 0.0) return 0.0;
        for (auto& v : y) v /= nrm;
        lambda = nrm;
        x = y;
    }
    return std::sqrt(lambda);
}

} // namespace

TEST_CASE("build_dff") {
    auto A = gen_fd_laplacian_5pt(3);
    SECTION("theta=1 gives the plain diagonal") {
        auto r = build_dff(A, CfSplitting(9, Label::F), 1.0);
        CHECK(r.epsilon == 0.0);
        CHECK(r.sigma == 1.0);
        for (double d : r.d_ff) CHECK(d == 4.0);
    }
    SECTION("theta=0.56") {
        auto r = build_dff(A, split(9, {0, 4}), 0.56);
        CHECK(r.epsilon == Approx(22.0 / 3.0));
        CHECK(r.sigma == Approx(3.0 / 14.0));
        CHECK(r.d_ff[4] == Approx(0.857142857142857));
        CHECK(r.d_ff[1] == 0.0);
    }
    SECTION("diagonal scaling keeps sigma") {
        auto r = build_dff(A, split(9, {0, 4}), 0.56, DffScaling::Diagonal);
        CHECK(r.d_ff[4] == 4.0);
        CHECK(r.sigma == Approx(3.0 / 14.0));
    }
    SECTION("nonpositive F diagonal") {
        auto B = CsrMatrix::from_triplets(2, 2, {{0, 0, -1.0}, {1, 1, 1.0}});
        CHECK_THROWS_AS(build_dff(B, CfSplitting(2, Label::F), 0.56), std::domain_error);
    }
}

TEST_CASE("interpolation on the 1D n=3 example") {
    auto A = gen_laplacian_1d(3);
    auto s = split(3, {0, 2});
    auto d = build_dff(A, s, 0.56);
    auto P = build_interpolation(A, s, d.d_ff);
    REQUIRE(P.rows() == 3);
    REQUIRE(P.cols() == 1);
    // 1 / ((2 - 1/0.56) * 2) = 7/3
    CHECK(P.at(0, 0) == Approx(7.0 / 3.0));
    CHECK(P.at(2, 0) == Approx(7.0 / 3.0));
    CHECK(P.at(1, 0) == 1.0);

    auto Pt = build_interpolation(A, s, build_dff(A, s, 1.0).d_ff);
    CHECK(Pt.at(0, 0) == Approx(0.5));

    auto R = build_restriction(A, s, d.d_ff, true);
    auto Ac = galerkin_coarse(R, A, P);
    auto dense = DenseMatrix::from_sparse(R) * DenseMatrix::from_sparse(A) * DenseMatrix::from_sparse(P);
    REQUIRE(Ac.rows() == 1);
    CHECK(Ac.at(0, 0) == Approx(dense(0, 0)));
    CHECK(Ac.at(0, 0) == Approx(2.0 - 4.0 * 7.0 / 3.0 + 2.0 * 2.0 * 49.0 / 9.0));
}

TEST_CASE("interpolation structure") {
    auto A = gen_fd_laplacian_5pt(8);
    auto s = greedy_coarsen(A, 0.56);
    auto d = build_dff(A, s, 0.56);
    auto P = build_interpolation(A, s, d.d_ff);
    auto pos = s.c_indices();
    for (Index k = 0; k < pos.size(); ++k) {
        auto r = P.row(pos[k]);
        REQUIRE(r.size() == 1);
        CHECK(r.cols[0] == k);
        CHECK(r.vals[0] == 1.0);
    }
    for (Index i : s.f_indices()) {
        double sum = 0.0, expect = 0.0;
        for (double v : P.row(i).vals) {
            CHECK(v > 0.0);
            sum += v;
        }
        for (Index j : A.row(i).cols)
            if (s.is_c(j)) expect += -A.at(i, j) / d.d_ff[i];
        CHECK(sum == Approx(expect));
    }
    auto bad = d.d_ff;
    bad[s.f_indices().front()] = 0.0;
    CHECK_THROWS_AS(build_interpolation(A, s, bad), std::domain_error);
}

TEST_CASE("restriction") {
    SECTION("symmetric mode is the transpose") {
        auto A = gen_fe_bilinear_9pt(6);
        auto s = greedy_coarsen(A, 0.56);
        auto d = build_dff(A, s, 0.56).d_ff;
        CHECK(build_restriction(A, s, d, true) == transpose(build_interpolation(A, s, d)));
        CHECK(build_restriction(A, s, d, false) == transpose(build_interpolation(A, s, d)));
    }
    SECTION("pure diffusion: nonsymmetric mode equals the transpose") {
        auto A = gen_convection_diffusion(6, 1e-2, {0.0, 0.0});
        auto s = greedy_coarsen(A, 0.56);
        auto d = build_dff(A, s, 0.56).d_ff;
        auto R = build_restriction(A, s, d, false);
        auto Pt = transpose(build_interpolation(A, s, d));
        CHECK(testing::max_abs_diff(DenseMatrix::from_sparse(R), DenseMatrix::from_sparse(Pt)) < 1e-12);
    }
    SECTION("grid-aligned convection: R differs from P^T") {
        auto A = gen_convection_diffusion(6, 1e-3, {1.0, 0.0});
        auto s = greedy_coarsen(A, 0.56);
        auto d = build_dff(A, s, 0.56).d_ff;
        CHECK_FALSE(build_restriction(A, s, d, false) == transpose(build_interpolation(A, s, d)));
    }
}

TEST_CASE("Galerkin product") {
    auto A = gen_fd_laplacian_5pt(5);
    auto I = CsrMatrix::identity(25);
    CHECK(galerkin_coarse(I, A, I) == A);
    auto s = greedy_coarsen(A, 0.56);
    auto d = build_dff(A, s, 0.56).d_ff;
    auto P = build_interpolation(A, s, d);
    auto Ac = galerkin_coarse(transpose(P), A, P);
    CHECK(is_symmetric(Ac));
    CHECK_THROWS_AS(galerkin_coarse(P, A, P), DimensionError);
}

TEST_CASE("F-relaxation") {
    auto A = gen_laplacian_1d(5);
    auto L = build_level(A, split(5, {0, 2, 4}), 0.56, true);
    Vector b{1, 2, 3, 4, 5};
    SECTION("exact solution is a fixed point") {
        auto x = DenseLU(DenseMatrix::from_sparse(A)).solve(b);
        auto y = x;
        f_relax(L, y, b);
        for (std::size_t i = 0; i < 5; ++i) CHECK(y[i] == Approx(x[i]).margin(1e-14));
    }
    SECTION("C entries are untouched and F entries follow the dense operator") {
        Vector x{0.3, -1.0, 2.0, 0.5, -0.7};
        auto y = x;
        f_relax(L, y, Vector(5, 0.0));
        CHECK(y[1] == x[1]);
        CHECK(y[3] == x[3]);
        auto S = dense_relaxation(L);
        for (std::size_t i = 0; i < 5; ++i) {
            double e = 0.0;
            for (std::size_t j = 0; j < 5; ++j) e += S(i, j) * x[j];
            CHECK(y[i] == Approx(e).margin(1e-14));
        }
    }
}

TEST_CASE("cycle matches the dense two-grid operator") {
    std::vector<std::pair<CsrMatrix, CfSplitting>> cases;
    cases.emplace_back(gen_laplacian_1d(6), split(6, {0, 2, 3, 5}));
    cases.emplace_back(gen_laplacian_1d(6), split(6, {0, 1, 3, 4}));
    for (std::size_t N : {4, 5, 6}) {
        auto fd = gen_fd_laplacian_5pt(N);
        cases.emplace_back(fd, greedy_coarsen(fd, 0.56));
        cases.emplace_back(fd, by_hand_fd(N));
        auto fe = gen_fe_bilinear_9pt(N);
        cases.emplace_back(fe, greedy_coarsen(fe, 0.56));
        auto cd = gen_convection_diffusion(N, 1e-3, {2.0, 3.0});
        cases.emplace_back(cd, greedy_coarsen(cd, 0.56));
        auto an = gen_anisotropic(N, {1e-3, std::numbers::pi / 3}, Scheme::FE);
        cases.emplace_back(an, second_pass(an, greedy_coarsen(an, 0.56), 0.3));
    }
    for (const auto& [A, s] : cases) {
        REQUIRE(A.rows() <= 36);
        for (std::size_t nu : {1, 2})
            for (auto mode : {InterpolationMode::Amgr, InterpolationMode::Classical})
                for (auto scaling : {DffScaling::Bound, DffScaling::Diagonal}) {
                    HierarchyOptions o;
                    o.nu = nu;
                    o.interpolation = mode;
                    o.dff_scaling = scaling;
                    o.symmetric = is_symmetric(A);
                    auto h = two_level(A, s, o);
                    const double diff = testing::max_abs_diff(cycle_operator(h), dense_two_grid(h));
                    INFO("n=" << A.rows() << " nu=" << nu);
                    CHECK(diff < 1e-10);
                }
    }
}

TEST_CASE("cycle edge cases") {
    auto A = gen_fd_laplacian_5pt(4);
    SECTION("all-C splitting on level 0 is rejected as stalled") {
        CHECK_THROWS_AS(two_level(A, CfSplitting(16, Label::C), {}), CoarseningStalled);
    }
    SECTION("F = empty except one point solves almost exactly") {
        CfSplitting s(16, Label::C);
        s.set(5, Label::F);
        auto h = two_level(A, s, {});
        auto E = cycle_operator(h);
        CHECK(E.max_abs() < 1.0);
    }
    SECTION("zero error stays zero") {
        auto h = two_level(A, greedy_coarsen(A, 0.56), {});
        Vector x(16, 0.0);
        cycle(h, 0, x, Vector(16, 0.0));
        CHECK(norm2(x) == 0.0);
    }
    SECTION("W and V coincide on two levels") {
        HierarchyOptions o;
        auto hv = two_level(A, greedy_coarsen(A, 0.56), o);
        o.cycle = CycleType::W;
        auto hw = two_level(A, greedy_coarsen(A, 0.56), o);
        CHECK(testing::max_abs_diff(cycle_operator(hv), cycle_operator(hw)) == 0.0);
    }
    SECTION("coarse correction annihilates range(P)") {
        auto h = two_level(A, greedy_coarsen(A, 0.56), {});
        const auto& L = h.levels[0];
        const auto Ad = DenseMatrix::from_sparse(L.A);
        const auto P = DenseMatrix::from_sparse(L.P);
        const auto R = DenseMatrix::from_sparse(L.R);
        auto T = DenseMatrix::identity(16) - P * (DenseLU(R * Ad * P).inverse() * (R * Ad));
        CHECK((T * P).max_abs() < 1e-12);
    }
}

TEST_CASE("two-level energy norm against the theta=0.56 bound") {
    // SPD problems with theta-feasible splittings
    std::vector<std::pair<CsrMatrix, CfSplitting>> cases;
    for (std::size_t N : {6, 8, 10}) {
        auto fd = gen_fd_laplacian_5pt(N);
        cases.emplace_back(fd, greedy_coarsen(fd, 0.56));
        cases.emplace_back(fd, by_hand_fd(N));
        auto fe = gen_fe_bilinear_9pt(N);
        cases.emplace_back(fe, greedy_coarsen(fe, 0.56));
        cases.emplace_back(fe, by_hand_fe(N));
    }
    for (const auto& [A, s] : cases) {
        REQUIRE(is_feasible(A, s, 0.56));
        auto h = two_level(A, s, {});
        const double norm = energy_norm(dense_two_grid(h), DenseMatrix::from_sparse(A));
        INFO("n=" << A.rows() << " |F|=" << s.f_count() << " ||MG2||_A=" << norm);
        CHECK(norm <= 0.977);
    }
}

TEST_CASE("strength graph") {
    SECTION("FD Laplacian: all neighbours strong") {
        auto A = gen_fd_laplacian_5pt(5);
        auto g = strength_graph(A, 0.30);
        for (Index i = 0; i < A.rows(); ++i) CHECK(g.strong[i].size() + 1 == A.row(i).size());
    }
    SECTION("diagonal matrix has no edges") { CHECK(strength_graph(CsrMatrix::identity(4), 0.3).edge_count() == 0); }
    SECTION("positive off-diagonals are never strong") {
        auto A = CsrMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 1, 2.0}, {1, 0, 1.0}});
        CHECK(strength_graph(A, 0.3).edge_count() == 0);
    }
    SECTION("weak entries are dropped") {
        auto A = CsrMatrix::from_triplets(3, 3, {{0, 0, 2.0}, {0, 1, -1.0}, {0, 2, -0.1}, {1, 1, 1.0}, {2, 2, 1.0}});
        auto g = strength_graph(A, 0.3);
        CHECK(g.strong[0] == std::vector<Index>{1});
        CHECK(g.influences(1, 0));
        CHECK_FALSE(g.influences(2, 0));
    }
    SECTION("theta_s range") { CHECK_THROWS_AS(strength_graph(CsrMatrix::identity(2), 0.0), std::invalid_argument); }
}

TEST_CASE("second pass") {
    SECTION("no strong F-F pairs leaves the splitting alone") {
        auto A = gen_laplacian_1d(7);
        auto s = split(7, {0, 2, 4, 6});
        CHECK(second_pass(A, s, 0.3) == s);
    }
    SECTION("postcondition and F-shrink on many inputs") {
        std::vector<CsrMatrix> mats{gen_fd_laplacian_5pt(10), gen_fe_bilinear_9pt(10),
                                    gen_anisotropic(12, {1e-6, std::numbers::pi / 3}, Scheme::FE),
                                    gen_anisotropic(12, {1e-6, std::numbers::pi / 3}, Scheme::FD),
                                    gen_anisotropic(12, {1e-3, std::numbers::pi / 6}, Scheme::FE)};
        for (const auto& A : mats)
            for (std::uint64_t seed = 0; seed < 4; ++seed) {
                auto s0 = seed == 0 ? greedy_coarsen(A, 0.56) : testing::random_splitting(A.rows(), 0.7, seed);
                for (double ts : {0.25, 0.3, 0.55}) {
                    auto s = second_pass(A, s0, ts);
                    CHECK(second_pass_violations(strength_graph(A, ts), s).empty());
                    for (Index i = 0; i < A.rows(); ++i)
                        if (s.is_f(i)) CHECK(s0.is_f(i));
                    if (is_feasible(A, s0, 0.56)) CHECK(is_feasible(A, s, 0.56));
                }
            }
    }
    SECTION("aniso FE produces extra C-points") {
        auto A = gen_anisotropic(16, {1e-6, std::numbers::pi / 3}, Scheme::FE);
        auto s0 = greedy_coarsen(A, 0.56);
        auto s = second_pass(A, s0, 0.3);
        CHECK(s.c_count() >= s0.c_count());
    }
}

TEST_CASE("classical interpolation") {
    auto A = gen_fd_laplacian_5pt(8);
    auto s = greedy_coarsen(A, 0.56);
    auto g = strength_graph(A, 0.25);
    auto P = classical_interpolation(A, s, g);
    CHECK(P.rows() == 64);
    CHECK(P.cols() == s.c_count());
    // constants are reproduced away from the Dirichlet boundary
    Vector ones(P.cols(), 1.0);
    auto y = spmv(P, ones);
    for (Index i = 0; i < 64; ++i) {
        const std::size_t x = i % 8, yy = i / 8;
        if (x == 0 || yy == 0 || x == 7 || yy == 7) continue;
        bool has_c = false;
        for (Index j : A.row(i).cols) has_c |= s.is_c(j);
        if (has_c && s.is_f(i)) CHECK(y[i] <= 1.0 + 1e-12);
    }
}

TEST_CASE("build_hierarchy") {
    SECTION("identity with greedy gives an all-F level and an empty coarse grid") {
        auto I = CsrMatrix::identity(5);
        auto h = build_hierarchy(I, [](const CsrMatrix& M, std::size_t) { return greedy_coarsen(M, 0.56); }, {});
        CHECK(h.num_levels() == 2);
        CHECK(h.matrix(1).rows() == 0);
        Vector x{1, 2, 3, 4, 5};
        cycle(h, 0, x, Vector(5, 0.0));
        CHECK(norm2(x) < 1e-12);
    }
    SECTION("three levels with greedy, coarse operators are Galerkin products") {
        auto A = gen_fd_laplacian_5pt(12);
        HierarchyOptions o;
        o.levels = 3;
        auto h = build_hierarchy(A, [](const CsrMatrix& M, std::size_t) { return greedy_coarsen(M, 0.56); }, o);
        REQUIRE(h.num_levels() == 3);
        for (std::size_t l = 0; l + 1 < h.num_levels(); ++l) {
            const auto& L = h.levels[l];
            CHECK(h.matrix(l + 1) == multiply(L.R, multiply(L.A, L.P)));
        }
    }
    SECTION("stops at the coarse cap") {
        auto A = gen_fd_laplacian_5pt(4);
        HierarchyOptions o;
        o.levels = 5;
        auto h = build_hierarchy(A, [](const CsrMatrix& M, std::size_t) { return greedy_coarsen(M, 0.56); }, o);
        CHECK(h.matrix(h.num_levels() - 1).rows() <= 16);
        CHECK(h.num_levels() <= 3);
    }
    SECTION("levels < 2 is rejected") {
        HierarchyOptions o;
        o.levels = 1;
        CHECK_THROWS_AS(build_hierarchy(CsrMatrix::identity(2),
                                        [](const CsrMatrix& M, std::size_t) { return CfSplitting(M.rows(), Label::F); }, o),
                        std::invalid_argument);
    }
}
