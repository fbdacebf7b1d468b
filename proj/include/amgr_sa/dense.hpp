#ifndef AMGR_SA_DENSE_HPP
#define AMGR_SA_DENSE_HPP

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sparse.hpp"

namespace amgr_sa {

/// Row-major dense matrix, used for coarsest-level solves and as a test oracle.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix from_sparse(const CsrMatrix& A) {
        DenseMatrix D(A.rows(), A.cols());
        for (Index i = 0; i < A.rows(); ++i) {
            const auto r = A.row(i);
            for (std::size_t k = 0; k < r.size(); ++k) D(i, r.cols[k]) = r.vals[k];
        }
        return D;
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix D(n, n);
        for (std::size_t i = 0; i < n; ++i) D(i, i) = 1.0;
        return D;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) throw DimensionError("dense product: inner dimensions differ");
        DenseMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("dense difference: shapes differ");
        DenseMatrix c = a;
        for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
        return c;
    }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// LU factorisation with partial pivoting.
class DenseLU {
public:
    DenseLU() = default;
    explicit DenseLU(DenseMatrix A) : lu_(std::move(A)), perm_(lu_.rows()) {
        if (lu_.rows() != lu_.cols()) throw DimensionError("DenseLU: matrix must be square");
        const std::size_t n = lu_.rows();
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
            if (lu_(p, k) == 0.0) throw std::domain_error("DenseLU: matrix is singular");
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
                std::swap(perm_[k], perm_[p]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                const double l = lu_(i, k) /= lu_(k, k);
                if (l == 0.0) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
            }
        }
    }

    std::size_t size() const { return lu_.rows(); }

    Vector solve(std::span<const double> b) const {
        const std::size_t n = lu_.rows();
        if (b.size() != n) throw DimensionError("DenseLU::solve: right-hand side has wrong length");
        Vector x(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = x[i];
            for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
            x[i] = s / lu_(i, i);
        }
        return x;
    }

    DenseMatrix inverse() const {
        const std::size_t n = lu_.rows();
        DenseMatrix inv(n, n);
        Vector e(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            e[j] = 1.0;
            const auto col = solve(e);
            for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
            e[j] = 0.0;
        }
        return inv;
    }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

} // namespace amgr_sa

#endif
