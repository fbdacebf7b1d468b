#ifndef AMGR_SA_SPARSE_HPP
#define AMGR_SA_SPARSE_HPP

/// \file sparse.hpp
/// Compressed sparse row storage and the handful of kernels the coarsening
/// and multigrid code needs: products, transposition and triplet assembly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace amgr_sa {

using Index = std::size_t;
using Vector = std::vector<double>;

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Square or rectangular sparse matrix in CSR layout.
///
/// Column indices are strictly increasing within a row and explicit zeros are
/// never stored, so the structure doubles as the adjacency graph of the matrix.
class CsrMatrix {
public:
    struct RowView {
        std::span<const Index> cols;
        std::span<const double> vals;

        std::size_t size() const noexcept { return cols.size(); }
    };

    CsrMatrix() : row_offsets_(1, 0) {}

    /// Takes ownership of raw CSR arrays. Validates the layout and drops
    /// explicitly stored zeros.
    CsrMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<Index> row_offsets,
              std::vector<Index> col_indices, std::vector<double> values)
        : n_rows_(n_rows), n_cols_(n_cols), row_offsets_(std::move(row_offsets)),
          col_indices_(std::move(col_indices)), values_(std::move(values)) {
        validate();
        drop_zeros();
    }

    /// Assembles from coordinate entries; duplicates are summed and entries
    /// that sum to zero are dropped.
    static CsrMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                   std::vector<Triplet> entries) {
        for (const auto& t : entries) {
            if (t.row >= n_rows || t.col >= n_cols)
                throw DimensionError("triplet (" + std::to_string(t.row) + ", " +
                                     std::to_string(t.col) + ") outside " +
                                     std::to_string(n_rows) + "x" + std::to_string(n_cols));
        }
        std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });

        std::vector<Index> offsets(n_rows + 1, 0);
        std::vector<Index> cols;
        std::vector<double> vals;
        cols.reserve(entries.size());
        vals.reserve(entries.size());
        for (std::size_t k = 0; k < entries.size();) {
            const Index r = entries[k].row;
            const Index c = entries[k].col;
            double sum = 0.0;
            for (; k < entries.size() && entries[k].row == r && entries[k].col == c; ++k)
                sum += entries[k].value;
            cols.push_back(c);
            vals.push_back(sum);
            ++offsets[r + 1];
        }
        std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
        return CsrMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
    }

    static CsrMatrix identity(std::size_t n) {
        std::vector<Index> offsets(n + 1);
        std::iota(offsets.begin(), offsets.end(), Index{0});
        std::vector<Index> cols(n);
        std::iota(cols.begin(), cols.end(), Index{0});
        return CsrMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
    }

    std::size_t rows() const noexcept { return n_rows_; }
    std::size_t cols() const noexcept { return n_cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }
    bool square() const noexcept { return n_rows_ == n_cols_; }

    std::span<const Index> row_offsets() const noexcept { return row_offsets_; }
    std::span<const Index> col_indices() const noexcept { return col_indices_; }
    std::span<const double> values() const noexcept { return values_; }

    RowView row(Index i) const noexcept {
        const auto b = row_offsets_[i];
        const auto e = row_offsets_[i + 1];
        return {std::span<const Index>(col_indices_).subspan(b, e - b),
                std::span<const double>(values_).subspan(b, e - b)};
    }

    /// Entry (i, j), zero when not stored.
    double at(Index i, Index j) const {
        const auto r = row(i);
        const auto it = std::lower_bound(r.cols.begin(), r.cols.end(), j);
        if (it == r.cols.end() || *it != j) return 0.0;
        return r.vals[static_cast<std::size_t>(it - r.cols.begin())];
    }

    double diagonal(Index i) const { return at(i, i); }

    bool has_entry(Index i, Index j) const {
        const auto r = row(i);
        return std::binary_search(r.cols.begin(), r.cols.end(), j);
    }

    friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

private:
    void validate() const {
        if (row_offsets_.size() != n_rows_ + 1)
            throw DimensionError("row_offsets must have n_rows + 1 entries");
        if (row_offsets_.front() != 0 || row_offsets_.back() != col_indices_.size() ||
            col_indices_.size() != values_.size())
            throw DimensionError("inconsistent CSR array lengths");
        for (std::size_t i = 0; i < n_rows_; ++i) {
            if (row_offsets_[i] > row_offsets_[i + 1])
                throw DimensionError("row_offsets must be nondecreasing");
            for (auto k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
                if (col_indices_[k] >= n_cols_)
                    throw DimensionError("column index out of range in row " + std::to_string(i));
                if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
                    throw DimensionError("column indices not strictly increasing in row " +
                                         std::to_string(i));
            }
        }
    }

    void drop_zeros() {
        if (std::none_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; }))
            return;
        std::size_t out = 0;
        std::size_t begin = 0;
        for (std::size_t i = 0; i < n_rows_; ++i) {
            const auto end = row_offsets_[i + 1];
            for (auto k = begin; k < end; ++k) {
                if (values_[k] == 0.0) continue;
                col_indices_[out] = col_indices_[k];
                values_[out] = values_[k];
                ++out;
            }
            begin = end;
            row_offsets_[i + 1] = out;
        }
        col_indices_.resize(out);
        values_.resize(out);
    }

    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<Index> row_offsets_;
    std::vector<Index> col_indices_;
    std::vector<double> values_;
};

/// y = A x
inline Vector spmv(const CsrMatrix& A, std::span<const double> x) {
    if (A.cols() != x.size())
        throw DimensionError("spmv: matrix has " + std::to_string(A.cols()) +
                             " columns, vector has " + std::to_string(x.size()) + " entries");
    Vector y(A.rows(), 0.0);
    const auto offsets = A.row_offsets();
    const auto cols = A.col_indices();
    const auto vals = A.values();
    for (std::size_t i = 0; i < A.rows(); ++i) {
        double sum = 0.0;
        for (auto k = offsets[i]; k < offsets[i + 1]; ++k) sum += vals[k] * x[cols[k]];
        y[i] = sum;
    }
    return y;
}

/// r = b - A x
inline Vector residual(const CsrMatrix& A, std::span<const double> x, std::span<const double> b) {
    if (b.size() != A.rows()) throw DimensionError("residual: rhs length mismatch");
    Vector r = spmv(A, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

inline CsrMatrix transpose(const CsrMatrix& A) {
    std::vector<Index> offsets(A.cols() + 1, 0);
    for (Index c : A.col_indices()) ++offsets[c + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());

    std::vector<Index> cols(A.nnz());
    std::vector<double> vals(A.nnz());
    std::vector<Index> next(offsets.begin(), offsets.end() - 1);
    for (Index i = 0; i < A.rows(); ++i) {
        const auto r = A.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const auto slot = next[r.cols[k]]++;
            cols[slot] = i;
            vals[slot] = r.vals[k];
        }
    }
    return CsrMatrix(A.cols(), A.rows(), std::move(offsets), std::move(cols), std::move(vals));
}

/// Sparse product A B (row-by-row accumulation with a dense workspace).
inline CsrMatrix multiply(const CsrMatrix& A, const CsrMatrix& B) {
    if (A.cols() != B.rows())
        throw DimensionError("multiply: inner dimensions " + std::to_string(A.cols()) + " and " +
                             std::to_string(B.rows()) + " differ");
    const std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> marker(B.cols(), none);
    std::vector<double> acc(B.cols(), 0.0);
    std::vector<Index> pattern;

    std::vector<Index> offsets(A.rows() + 1, 0);
    std::vector<Index> cols;
    std::vector<double> vals;
    for (Index i = 0; i < A.rows(); ++i) {
        pattern.clear();
        const auto ra = A.row(i);
        for (std::size_t ka = 0; ka < ra.size(); ++ka) {
            const auto rb = B.row(ra.cols[ka]);
            const double a = ra.vals[ka];
            for (std::size_t kb = 0; kb < rb.size(); ++kb) {
                const Index j = rb.cols[kb];
                if (marker[j] != i) {
                    marker[j] = i;
                    acc[j] = 0.0;
                    pattern.push_back(j);
                }
                acc[j] += a * rb.vals[kb];
            }
        }
        std::sort(pattern.begin(), pattern.end());
        for (Index j : pattern) {
            if (acc[j] == 0.0) continue;
            cols.push_back(j);
            vals.push_back(acc[j]);
        }
        offsets[i + 1] = cols.size();
    }
    return CsrMatrix(A.rows(), B.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

/// Structural and numerical symmetry up to a relative tolerance on each pair.
inline bool is_symmetric(const CsrMatrix& A, double rel_tol = 1e-12) {
    if (!A.square()) return false;
    for (Index i = 0; i < A.rows(); ++i) {
        const auto r = A.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double a = r.vals[k];
            const double b = A.at(r.cols[k], i);
            if (std::abs(a - b) > rel_tol * std::max(std::abs(a), std::abs(b))) return false;
        }
    }
    return true;
}

/// |A_ii| >= sum_{j != i} |A_ij| for every row.
inline bool is_diagonally_dominant(const CsrMatrix& A) {
    for (Index i = 0; i < A.rows(); ++i) {
        const auto r = A.row(i);
        double diag = 0.0;
        double off = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k)
            (r.cols[k] == i ? diag : off) += std::abs(r.vals[k]);
        if (off > diag) return false;
    }
    return true;
}

/// Linear combination alpha*A + beta*B of equally shaped matrices.
inline CsrMatrix add(const CsrMatrix& A, const CsrMatrix& B, double alpha = 1.0, double beta = 1.0) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) throw DimensionError("add: shape mismatch");
    std::vector<Triplet> t;
    t.reserve(A.nnz() + B.nnz());
    for (Index i = 0; i < A.rows(); ++i) {
        const auto ra = A.row(i);
        for (std::size_t k = 0; k < ra.size(); ++k) t.push_back({i, ra.cols[k], alpha * ra.vals[k]});
        const auto rb = B.row(i);
        for (std::size_t k = 0; k < rb.size(); ++k) t.push_back({i, rb.cols[k], beta * rb.vals[k]});
    }
    return CsrMatrix::from_triplets(A.rows(), A.cols(), std::move(t));
}

inline double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

} // namespace amgr_sa

#endif
