#ifndef AMGR_SA_TEST_HELPERS_HPP
#define AMGR_SA_TEST_HELPERS_HPP

#include <random>
#include <vector>

#include "amgr_sa/dense.hpp"
#include "amgr_sa/splitting.hpp"

namespace testing {

using namespace amgr_sa;

inline CsrMatrix random_sparse(std::size_t rows, std::size_t cols, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> v(-2.0, 2.0);
    std::vector<Triplet> t;
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            if (u(rng) < density) t.push_back({i, j, v(rng)});
    return CsrMatrix::from_triplets(rows, cols, std::move(t));
}

inline CfSplitting random_splitting(std::size_t n, double p_f, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution f(p_f);
    CfSplitting s(n, Label::C);
    for (Index i = 0; i < n; ++i)
        if (f(rng)) s.set(i, Label::F);
    return s;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).max_abs(); }

} // namespace testing

#endif
