#ifndef AMGR_SA_SPLITTING_HPP
#define AMGR_SA_SPLITTING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sparse.hpp"

namespace amgr_sa {

enum class Label : std::uint8_t { F, C, U };

/// Coarse/fine assignment of the index set {0, ..., n-1}.
///
/// `U` marks points not yet decided; a finalized splitting has none.
class CfSplitting {
public:
    CfSplitting() = default;
    explicit CfSplitting(std::size_t n, Label initial = Label::U) : labels_(n, initial) {}

    /// F on the given indices, C everywhere else.
    static CfSplitting from_f_indices(std::size_t n, std::span<const Index> f) {
        CfSplitting s(n, Label::C);
        for (Index i : f) {
            if (i >= n) throw DimensionError("F index " + std::to_string(i) + " out of range");
            s.labels_[i] = Label::F;
        }
        return s;
    }

    std::size_t size() const noexcept { return labels_.size(); }
    Label label(Index i) const { return labels_[i]; }
    bool is_f(Index i) const { return labels_[i] == Label::F; }
    bool is_c(Index i) const { return labels_[i] == Label::C; }
    void set(Index i, Label l) { labels_[i] = l; }
    std::span<const Label> labels() const noexcept { return labels_; }

    bool is_finalized() const {
        return std::none_of(labels_.begin(), labels_.end(), [](Label l) { return l == Label::U; });
    }

    std::vector<Index> indices_of(Label l) const {
        std::vector<Index> out;
        for (Index i = 0; i < labels_.size(); ++i)
            if (labels_[i] == l) out.push_back(i);
        return out;
    }
    std::vector<Index> f_indices() const { return indices_of(Label::F); }
    std::vector<Index> c_indices() const { return indices_of(Label::C); }

    std::size_t count(Label l) const {
        return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), l));
    }
    std::size_t f_count() const { return count(Label::F); }
    std::size_t c_count() const { return count(Label::C); }

    friend bool operator==(const CfSplitting&, const CfSplitting&) = default;

private:
    std::vector<Label> labels_;
};

/// The four blocks of A under a finalized splitting, with A's stored signs.
struct BlockPartition {
    CsrMatrix ff, fc, cf, cc;
    std::vector<Index> f_points; // block row/column k <-> global index f_points[k]
    std::vector<Index> c_points;
};

inline BlockPartition extract_blocks(const CsrMatrix& A, const CfSplitting& s) {
    if (!A.square() || s.size() != A.rows()) throw DimensionError("extract_blocks: size mismatch");
    if (!s.is_finalized()) throw std::invalid_argument("extract_blocks: splitting has U points");

    BlockPartition out;
    out.f_points = s.f_indices();
    out.c_points = s.c_indices();
    std::vector<Index> local(A.rows());
    for (Index k = 0; k < out.f_points.size(); ++k) local[out.f_points[k]] = k;
    for (Index k = 0; k < out.c_points.size(); ++k) local[out.c_points[k]] = k;

    std::vector<Triplet> ff, fc, cf, cc;
    for (Index i = 0; i < A.rows(); ++i) {
        const auto r = A.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const Index j = r.cols[k];
            const Triplet t{local[i], local[j], r.vals[k]};
            if (s.is_f(i)) (s.is_f(j) ? ff : fc).push_back(t);
            else (s.is_f(j) ? cf : cc).push_back(t);
        }
    }
    const auto nf = out.f_points.size();
    const auto nc = out.c_points.size();
    out.ff = CsrMatrix::from_triplets(nf, nf, std::move(ff));
    out.fc = CsrMatrix::from_triplets(nf, nc, std::move(fc));
    out.cf = CsrMatrix::from_triplets(nc, nf, std::move(cf));
    out.cc = CsrMatrix::from_triplets(nc, nc, std::move(cc));
    return out;
}

/// Sum of |A_ij| over j with s.is_f(j), in stored column order.
inline double f_row_sum(const CsrMatrix& A, const CfSplitting& s, Index i) {
    const auto r = A.row(i);
    double sum = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k)
        if (s.is_f(r.cols[k])) sum += std::abs(r.vals[k]);
    return sum;
}

/// theta_i = |A_ii| / sum_{j in F} |A_ij|.
///
/// Infinity when no F column is stored in row i. Throws for a zero diagonal.
inline double dominance_factor(const CsrMatrix& A, const CfSplitting& s, Index i) {
    const double diag = std::abs(A.diagonal(i));
    if (diag == 0.0)
        throw std::domain_error("dominance_factor: zero diagonal in row " + std::to_string(i));
    const double denom = f_row_sum(A, s, i);
    return denom == 0.0 ? std::numeric_limits<double>::infinity() : diag / denom;
}

/// The constraint |A_ii| >= theta * sum_{j in F}|A_ij| evaluated without tolerance.
inline bool meets_dominance(double abs_diag, double f_sum, double theta) {
    return abs_diag >= theta * f_sum;
}

/// First F row violating the dominance constraint, if any.
inline std::optional<Index> first_violation(const CsrMatrix& A, const CfSplitting& s, double theta) {
    for (Index i = 0; i < A.rows(); ++i) {
        if (!s.is_f(i)) continue;
        if (!meets_dominance(std::abs(A.diagonal(i)), f_row_sum(A, s, i), theta)) return i;
    }
    return std::nullopt;
}

inline bool is_feasible(const CsrMatrix& A, const CfSplitting& s, double theta) {
    return !first_violation(A, s, theta).has_value();
}

inline double f_ratio(const CfSplitting& s) {
    return s.size() ? static_cast<double>(s.f_count()) / static_cast<double>(s.size()) : 0.0;
}

} // namespace amgr_sa

#endif
