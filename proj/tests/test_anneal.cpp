#include <catch_amalgamated.hpp>

#include <chrono>
#include <map>

#include "amgr_sa/anneal.hpp"
#include "amgr_sa/brute_force.hpp"
#include "amgr_sa/by_hand.hpp"
#include "amgr_sa/greedy.hpp"
#include "amgr_sa/problems.hpp"

using namespace amgr_sa;
using Catch::Approx;

namespace {

bool trace_monotone(const std::vector<TraceSample>& t) {
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i].best_f_size < t[i - 1].best_f_size || t[i].step < t[i - 1].step) return false;
    return true;
}

AnnealConfig config(std::size_t steps, std::uint64_t seed) {
    AnnealConfig c;
    c.total_steps_per_dof = steps;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("temperature schedule") {
    AnnealConfig c;
    CHECK(temperature_schedule(c, 1) == Approx(0.1));
    CHECK(temperature_schedule(c, 100) == Approx(0.977237).epsilon(1e-6));
    for (std::size_t n : {1, 7, 100, 12345, 2000000}) {
        const double a = temperature_schedule(c, n);
        CHECK(std::pow(a, static_cast<double>(n)) == Approx(0.1).epsilon(1e-9));
    }
    CHECK_THROWS_AS(temperature_schedule(c, 0), std::invalid_argument);
}

TEST_CASE("acceptance rule") {
    CHECK(acceptance_probability(5, 5, 1.0) == 1.0);
    CHECK(acceptance_probability(5, 7, 0.01) == 1.0);
    CHECK(acceptance_probability(10, 8, 0.1) == Approx(2.061153622438558e-9));
    std::mt19937_64 rng(1);
    CHECK(accept_step(5, 5, 0.5, rng));
    CHECK_THROWS_AS(accept_step(5, 4, 0.0, rng), std::invalid_argument);
    int accepted = 0;
    for (int t = 0; t < 20000; ++t) accepted += accept_step(3, 2, 1.0, rng);
    CHECK(accepted / 20000.0 == Approx(std::exp(-1.0)).margin(0.015));
}

TEST_CASE("AnnealConfig validation") {
    AnnealConfig c;
    CHECK_NOTHROW(c.validate());
    c.theta = 0.5;
    CHECK_THROWS(c.validate());
    c = {};
    c.x = 0;
    CHECK_THROWS(c.validate());
    c = {};
    c.t_final_fraction = 1.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.steps_per_dof_per_sweep = 10;
    c.total_steps_per_dof = 5;
    CHECK_THROWS(c.validate());
}

TEST_CASE("swap_fc") {
    std::mt19937_64 rng(3);
    SECTION("cardinalities and union") {
        auto r = swap_fc({1, 2, 3}, {4, 5}, 1, 0, rng);
        CHECK(r.f.size() == 4);
        CHECK(r.c.size() == 1);
        std::vector<Index> all = r.f;
        all.insert(all.end(), r.c.begin(), r.c.end());
        std::sort(all.begin(), all.end());
        CHECK(all == std::vector<Index>{1, 2, 3, 4, 5});
    }
    SECTION("no-op") {
        auto r = swap_fc({1, 2, 3}, {4, 5}, 0, 0, rng);
        CHECK(r.f == std::vector<Index>{1, 2, 3});
        CHECK(r.c == std::vector<Index>{4, 5});
    }
    SECTION("exchange keeps sizes") {
        auto r = swap_fc({1, 2, 3}, {4, 5}, 2, 2, rng);
        CHECK(r.f.size() == 3);
        CHECK(r.c.size() == 2);
    }
    SECTION("insufficient elements") { CHECK_THROWS_AS(swap_fc({1}, {2}, 2, 0, rng), std::invalid_argument); }
    SECTION("promotion is uniform over C") {
        const std::vector<Index> C{10, 11, 12, 13, 14};
        std::map<Index, int> hits;
        const int trials = 10000;
        for (int t = 0; t < trials; ++t) {
            auto r = swap_fc({0, 1}, C, 1, 0, rng);
            ++hits[r.f.back()];
        }
        const double p = 1.0 / C.size();
        const double sd = std::sqrt(trials * p * (1 - p));
        for (Index c : C) CHECK(std::abs(hits[c] - trials * p) <= 3 * sd);
    }
}

TEST_CASE("fitness") {
    auto A = gen_laplacian_1d(5);
    CHECK(fitness(A, std::vector<Index>{}, 0.56) == 0);
    CHECK(fitness(A, std::vector<Index>{0, 2, 4}, 0.56) == 3);
    CHECK(fitness(A, std::vector<Index>{0, 1, 2, 3, 4}, 0.56) == 2);
}

TEST_CASE("halo assumptions") {
    auto A = gen_fd_laplacian_5pt(8);
    auto d = geometric_blocks(8, 3, 3, A, 0.56);
    Annealer ann(A, d, config(10, 1));
    const Index first = d.sweep_order().front();

    SECTION("unvisited neighbours and prepinned points are assumed F") {
        auto v = ann.halo_assumptions(first);
        CHECK_FALSE(v.halo.empty());
        for (bool f : v.halo_f_flags) CHECK(f);
    }
    SECTION("visited neighbours expose their tentative labels") {
        ann.set_alpha(0.999);
        for (Index k : d.sweep_order()) ann.anneal_subdomain(k, 50);
        for (Index k = 0; k < d.subdomains.size(); ++k) {
            auto v = ann.halo_assumptions(k);
            for (std::size_t q = 0; q < v.halo.size(); ++q) CHECK(v.halo_f_flags[q] == ann.tentative_f(v.halo[q]));
        }
    }
    SECTION("an uncoupled block has no halo") {
        auto I = CsrMatrix::identity(4);
        auto s = single_subdomain(4);
        Annealer a2(I, s, config(10, 1));
        CHECK(a2.halo_assumptions(0).halo.empty());
    }
}

TEST_CASE("anneal_subdomain bookkeeping") {
    auto A = gen_fd_laplacian_5pt(6);
    auto d = geometric_blocks(6, 2, 2, A, 0.56);
    Annealer ann(A, d, config(10, 4));
    ann.set_alpha(0.99);

    SECTION("zero steps only initialises the visit") {
        ann.anneal_subdomain(0, 0);
        CHECK(ann.visited(0));
        CHECK(ann.local_f(0).empty());
        CHECK(ann.local_c(0).size() == d.subdomains[0].size());
        CHECK(ann.temperature() == 1.0);
        CHECK(ann.steps_taken() == 0);
        CHECK(ann.best_feasible_local(0) == 0);
        CHECK(static_cast<std::size_t>(ann.current_fitness(0)) == ann.naive_fitness(0));
    }
    SECTION("temperature decays on every step and fitness stays exact") {
        std::vector<std::size_t> nbar(d.subdomains.size(), 0);
        for (int sweep = 0; sweep < 6; ++sweep)
            for (Index k : d.sweep_order()) {
                ann.anneal_subdomain(k, 13);
                CHECK(static_cast<std::size_t>(ann.current_fitness(k)) == ann.naive_fitness(k));
                std::vector<Index> u = ann.local_f(k);
                u.insert(u.end(), ann.local_c(k).begin(), ann.local_c(k).end());
                std::sort(u.begin(), u.end());
                CHECK(u == d.subdomains[k]);
                CHECK(ann.best_feasible_local(k) >= nbar[k]);
                nbar[k] = ann.best_feasible_local(k);
                CHECK(is_feasible(A, ann.global_splitting(), 0.56));
                CHECK(is_feasible(A, ann.best_splitting(), 0.56));
            }
        CHECK(ann.steps_taken() == 6 * 13 * d.subdomains.size());
        CHECK(ann.temperature() == Approx(std::pow(0.99, static_cast<double>(ann.steps_taken()))));
    }
}

TEST_CASE("a one-point subdomain toggles between F and C") {
    auto A = CsrMatrix::from_triplets(1, 1, {{0, 0, 1.0}});
    auto d = single_subdomain(1);
    AnnealConfig c = config(10, 2);
    Annealer ann(A, d, c);
    ann.set_alpha(1.0);
    std::size_t seen_f = 0;
    for (int t = 0; t < 200; ++t) {
        ann.anneal_subdomain(0, 1);
        const auto nf = ann.local_f(0).size();
        CHECK(nf + ann.local_c(0).size() == 1);
        seen_f += nf;
    }
    CHECK(seen_f > 0);
    CHECK(seen_f < 200);
    CHECK(ann.best_size() == 1);
}

TEST_CASE("sa_coarsen properties") {
    auto A = gen_fe_bilinear_9pt(12);
    auto d = geometric_blocks(12, 4, 4, A, 0.56);
    auto c = config(300, 9);
    auto r = sa_coarsen(A, d, c);
    CHECK(is_feasible(A, r.splitting, 0.56));
    CHECK(trace_monotone(r.trace));
    CHECK(r.trace.back().best_f_size == r.splitting.f_count());
    CHECK(r.sweeps == 60);
    std::size_t per_sweep = 0;
    for (const auto& s : d.subdomains) per_sweep += 5 * s.size();
    CHECK(r.steps == per_sweep * r.sweeps);
    CHECK(r.trace.back().temperature == Approx(0.1).epsilon(1e-9));

    auto again = sa_coarsen(A, d, c);
    CHECK(again.splitting == r.splitting);
    REQUIRE(again.trace.size() == r.trace.size());
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        CHECK(again.trace[i].step == r.trace[i].step);
        CHECK(again.trace[i].best_f_size == r.trace[i].best_f_size);
        CHECK(again.trace[i].temperature == r.trace[i].temperature);
    }
    for (std::size_t i : d.prepinned_f) CHECK(r.splitting.is_f(i));
}

TEST_CASE("zero budget returns only the prepinned points") {
    auto A = gen_fd_laplacian_5pt(8);
    auto d = geometric_blocks(8, 4, 4, A, 0.56);
    auto r = sa_coarsen(A, d, config(0, 1));
    CHECK(r.splitting.f_indices() == d.prepinned_f);
    CHECK(r.steps == 0);
}

TEST_CASE("SA reaches the exhaustive optimum on tiny problems") {
    std::vector<CsrMatrix> problems{gen_fd_laplacian_5pt(3)};
    for (std::size_t n = 5; n <= 12; ++n) problems.push_back(gen_laplacian_1d(n));
    for (const auto& A : problems) {
        const auto best = brute_force_optimal_f(A, 0.56).best_size;
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto r = sa_coarsen(A, single_subdomain(A.rows()), config(10000, seed));
            hits += r.splitting.f_count() == best;
        }
        INFO("n = " << A.rows() << ", optimum " << best);
        CHECK(hits >= 18);
    }
}

TEST_CASE("SA on FD 8x8 with a global subdomain matches the by-hand count") {
    auto A = gen_fd_laplacian_5pt(8);
    auto d = single_subdomain(64, prepin_safe_f(A, 0.56));
    auto r = sa_coarsen(A, d, config(2000, 1));
    CHECK(r.splitting.f_count() == by_hand_fd(8).f_count());
}

TEST_CASE("SA beats greedy on FD 32x32") {
    auto A = gen_fd_laplacian_5pt(32);
    auto r = sa_coarsen(A, geometric_blocks(32, 4, 4, A, 0.56), config(3000, 7));
    CHECK(r.splitting.f_count() > greedy_coarsen(A, 0.56).f_count());
    CHECK(trace_monotone(r.trace));
}

TEST_CASE("additive mode produces feasible splittings") {
    auto A = gen_fd_laplacian_5pt(10);
    auto c = config(200, 5);
    c.additive = true;
    auto r = sa_coarsen(A, geometric_blocks(10, 3, 3, A, 0.56), c);
    CHECK(is_feasible(A, r.splitting, 0.56));
    CHECK(trace_monotone(r.trace));
}

TEST_CASE("sa_coarsen rejects a mismatched decomposition") {
    auto A = gen_fd_laplacian_5pt(4);
    CHECK_THROWS(sa_coarsen(A, single_subdomain(15), config(10, 1)));
}
