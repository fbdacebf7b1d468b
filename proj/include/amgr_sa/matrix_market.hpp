#ifndef AMGR_SA_MATRIX_MARKET_HPP
#define AMGR_SA_MATRIX_MARKET_HPP

/// \file matrix_market.hpp
/// Coordinate-format Matrix Market I/O for real matrices. Symmetric files are
/// expanded to full storage; duplicate entries are summed.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sparse.hpp"

namespace amgr_sa {

namespace detail {

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline bool blank_or_comment(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '%';
}

} // namespace detail

inline CsrMatrix read_matrix_market(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty Matrix Market input", 1);
    ++lineno;

    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", lineno);
    object = detail::lowercase(object);
    format = detail::lowercase(format);
    field = detail::lowercase(field);
    symmetry = detail::lowercase(symmetry);
    if (object != "matrix" || format != "coordinate")
        throw ParseError("only 'matrix coordinate' files are supported", lineno);
    if (field != "real" && field != "integer" && field != "double")
        throw ParseError("unsupported field '" + field + "'", lineno);
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);
    const bool symmetric = symmetry == "symmetric";

    do {
        if (!std::getline(in, line)) throw ParseError("missing size line", lineno + 1);
        ++lineno;
    } while (detail::blank_or_comment(line));

    long long rows = 0, cols = 0, entries = 0;
    {
        std::istringstream size_line(line);
        if (!(size_line >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
            throw ParseError("malformed size line", lineno);
    }
    if (symmetric && rows != cols) throw ParseError("symmetric matrix must be square", lineno);

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
    long long seen = 0;
    while (seen < entries && std::getline(in, line)) {
        ++lineno;
        if (detail::blank_or_comment(line)) continue;
        std::istringstream entry(line);
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(entry >> i >> j >> v)) throw ParseError("malformed entry", lineno);
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw ParseError("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                 ") outside " + std::to_string(rows) + "x" + std::to_string(cols),
                             lineno);
        const auto r = static_cast<Index>(i - 1);
        const auto c = static_cast<Index>(j - 1);
        triplets.push_back({r, c, v});
        if (symmetric && r != c) triplets.push_back({c, r, v});
        ++seen;
    }
    if (seen != entries)
        throw ParseError("expected " + std::to_string(entries) + " entries, found " +
                             std::to_string(seen),
                         lineno);
    return CsrMatrix::from_triplets(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                                    std::move(triplets));
}

inline CsrMatrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string(), 0);
    return read_matrix_market(in);
}

/// Writes general coordinate format with 17 significant digits, which is
/// enough for an exact round trip of every double.
inline void write_matrix_market(const CsrMatrix& A, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
    char buf[64];
    for (Index i = 0; i < A.rows(); ++i) {
        const auto r = A.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", r.vals[k]);
            out << i + 1 << ' ' << r.cols[k] + 1 << ' ' << buf << '\n';
        }
    }
}

inline void write_matrix_market(const CsrMatrix& A, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_matrix_market(A, out);
}

} // namespace amgr_sa

#endif
