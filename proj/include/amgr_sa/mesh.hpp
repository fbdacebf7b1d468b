#ifndef AMGR_SA_MESH_HPP
#define AMGR_SA_MESH_HPP

/// \file mesh.hpp
/// Triangle meshes, their text format, and linear (P1) finite-element
/// assembly of -div(K grad u) with Dirichlet nodes eliminated.
///
/// Text format:
///     nodes <n>        followed by n lines "x y"
///     triangles <m>    followed by m lines "i j k" (0-based)
///     boundary <b>     followed by b node indices

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "problems.hpp"
#include "sparse.hpp"

namespace amgr_sa {

struct TriMesh {
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<Index, 3>> triangles;
    std::vector<Index> boundary_nodes; ///< sorted, unique

    friend bool operator==(const TriMesh&, const TriMesh&) = default;
};

inline double signed_area(const TriMesh& m, const std::array<Index, 3>& t) {
    const auto& a = m.nodes[t[0]];
    const auto& b = m.nodes[t[1]];
    const auto& c = m.nodes[t[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

/// Checks index ranges, rejects zero-area triangles, flips clockwise
/// triangles to counter-clockwise and normalises the boundary list.
inline void validate_mesh(TriMesh& m) {
    const auto n = m.nodes.size();
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        auto& tri = m.triangles[t];
        for (Index v : tri)
            if (v >= n)
                throw std::invalid_argument("triangle " + std::to_string(t) +
                                            " references node " + std::to_string(v) +
                                            " outside 0.." + std::to_string(n - 1));
        const double area = signed_area(m, tri);
        if (area == 0.0)
            throw std::invalid_argument("triangle " + std::to_string(t) + " has zero area");
        if (area < 0.0) std::swap(tri[1], tri[2]);
    }
    for (Index b : m.boundary_nodes)
        if (b >= n) throw std::invalid_argument("boundary node " + std::to_string(b) + " out of range");
    std::sort(m.boundary_nodes.begin(), m.boundary_nodes.end());
    m.boundary_nodes.erase(std::unique(m.boundary_nodes.begin(), m.boundary_nodes.end()),
                           m.boundary_nodes.end());
}

inline TriMesh load_mesh(std::istream& in) {
    TriMesh m;
    std::string line;
    std::size_t lineno = 0;

    auto next_line = [&](const char* what) {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return;
        }
        throw ParseError(std::string("unexpected end of file while reading ") + what, lineno + 1);
    };
    auto section = [&](const char* keyword) {
        next_line(keyword);
        std::istringstream ss(line);
        std::string kw;
        long long count = -1;
        if (!(ss >> kw >> count) || kw != keyword || count < 0)
            throw ParseError(std::string("expected '") + keyword + " <count>'", lineno);
        return static_cast<std::size_t>(count);
    };

    const auto n_nodes = section("nodes");
    m.nodes.resize(n_nodes);
    for (auto& p : m.nodes) {
        next_line("node coordinates");
        std::istringstream ss(line);
        if (!(ss >> p[0] >> p[1])) throw ParseError("malformed node coordinates", lineno);
    }
    const auto n_tris = section("triangles");
    m.triangles.resize(n_tris);
    for (std::size_t t = 0; t < n_tris; ++t) {
        next_line("triangle");
        std::istringstream ss(line);
        long long a, b, c;
        if (!(ss >> a >> b >> c)) throw ParseError("malformed triangle", lineno);
        for (long long v : {a, b, c})
            if (v < 0 || static_cast<std::size_t>(v) >= n_nodes)
                throw ParseError("triangle " + std::to_string(t) + " index " + std::to_string(v) +
                                     " out of range",
                                 lineno);
        m.triangles[t] = {static_cast<Index>(a), static_cast<Index>(b), static_cast<Index>(c)};
    }
    const auto n_bnd = section("boundary");
    m.boundary_nodes.reserve(n_bnd);
    while (m.boundary_nodes.size() < n_bnd) {
        next_line("boundary nodes");
        std::istringstream ss(line);
        long long v;
        while (ss >> v) {
            if (v < 0 || static_cast<std::size_t>(v) >= n_nodes)
                throw ParseError("boundary node " + std::to_string(v) + " out of range", lineno);
            m.boundary_nodes.push_back(static_cast<Index>(v));
        }
    }
    try {
        validate_mesh(m);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), 0);
    }
    return m;
}

inline TriMesh load_mesh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string(), 0);
    return load_mesh(in);
}

inline void write_mesh(const TriMesh& m, std::ostream& out) {
    char buf[96];
    out << "nodes " << m.nodes.size() << '\n';
    for (const auto& p : m.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g", p[0], p[1]);
        out << buf << '\n';
    }
    out << "triangles " << m.triangles.size() << '\n';
    for (const auto& t : m.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "boundary " << m.boundary_nodes.size() << '\n';
    for (Index b : m.boundary_nodes) out << b << '\n';
}

inline void write_mesh(const TriMesh& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_mesh(m, out);
}

/// P1 stiffness of one triangle for constant K (rows/cols follow the vertex order).
inline std::array<std::array<double, 3>, 3> p1_element_stiffness(const TriMesh& m,
                                                                 const std::array<Index, 3>& t,
                                                                 const std::array<double, 3>& K) {
    const auto& p0 = m.nodes[t[0]];
    const auto& p1 = m.nodes[t[1]];
    const auto& p2 = m.nodes[t[2]];
    const double area2 = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    // gradients of the barycentric coordinates, times 2*area
    const std::array<std::array<double, 2>, 3> g{{{p1[1] - p2[1], p2[0] - p1[0]},
                                                  {p2[1] - p0[1], p0[0] - p2[0]},
                                                  {p0[1] - p1[1], p1[0] - p0[0]}}};
    std::array<std::array<double, 3>, 3> ke{};
    const double scale = 1.0 / (2.0 * std::abs(area2));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            ke[a][b] = scale * (g[a][0] * (K[0] * g[b][0] + K[1] * g[b][1]) +
                                g[a][1] * (K[1] * g[b][0] + K[2] * g[b][1]));
    return ke;
}

/// Assembles the P1 operator with boundary rows and columns removed.
/// Unknowns are the non-boundary nodes in increasing node order.
inline CsrMatrix assemble_p1(const TriMesh& mesh, const AnisotropyParams& p) {
    p.validate();
    const auto K = p.tensor();
    std::vector<long long> unknown(mesh.nodes.size(), -1);
    std::vector<bool> is_boundary(mesh.nodes.size(), false);
    for (Index b : mesh.boundary_nodes) is_boundary.at(b) = true;
    std::size_t n = 0;
    for (std::size_t v = 0; v < mesh.nodes.size(); ++v)
        if (!is_boundary[v]) unknown[v] = static_cast<long long>(n++);

    std::vector<Triplet> trip;
    trip.reserve(mesh.triangles.size() * 9);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        if (signed_area(mesh, tri) == 0.0)
            throw std::invalid_argument("triangle " + std::to_string(t) + " has zero area");
        const auto ke = p1_element_stiffness(mesh, tri, K);
        for (int a = 0; a < 3; ++a) {
            if (unknown[tri[a]] < 0) continue;
            for (int b = 0; b < 3; ++b) {
                if (unknown[tri[b]] < 0) continue;
                trip.push_back({static_cast<Index>(unknown[tri[a]]),
                                static_cast<Index>(unknown[tri[b]]), ke[a][b]});
            }
        }
    }
    return CsrMatrix::from_triplets(n, n, std::move(trip));
}

/// (N+2) x (N+2) nodes on the unit square, each cell cut by its
/// lower-left to upper-right diagonal; the outer ring is the boundary.
inline TriMesh structured_square_mesh(std::size_t N) {
    detail::require_grid(N);
    const std::size_t M = N + 2;
    const double h = 1.0 / static_cast<double>(M - 1);
    TriMesh m;
    for (std::size_t y = 0; y < M; ++y)
        for (std::size_t x = 0; x < M; ++x) {
            m.nodes.push_back({static_cast<double>(x) * h, static_cast<double>(y) * h});
            if (x == 0 || y == 0 || x == M - 1 || y == M - 1) m.boundary_nodes.push_back(y * M + x);
        }
    for (std::size_t y = 0; y + 1 < M; ++y)
        for (std::size_t x = 0; x + 1 < M; ++x) {
            const Index a = y * M + x, b = a + 1, c = a + M, d = c + 1;
            m.triangles.push_back({a, b, d});
            m.triangles.push_back({a, d, c});
        }
    return m;
}

/// Structured node layout with interior nodes displaced by up to
/// `jitter * h` in each coordinate; every cell is cut along its shorter
/// diagonal. `jitter` must stay below 0.25 so that cells remain convex.
inline TriMesh jittered_square_mesh(std::size_t N, double jitter, std::uint64_t seed) {
    if (!(jitter >= 0.0 && jitter < 0.25)) throw std::invalid_argument("jitter must lie in [0, 0.25)");
    TriMesh m = structured_square_mesh(N);
    const std::size_t M = N + 2;
    const double h = 1.0 / static_cast<double>(M - 1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-jitter * h, jitter * h);
    for (std::size_t y = 1; y + 1 < M; ++y)
        for (std::size_t x = 1; x + 1 < M; ++x) {
            auto& p = m.nodes[y * M + x];
            p[0] += u(rng);
            p[1] += u(rng);
        }
    m.triangles.clear();
    auto dist2 = [&](Index i, Index j) {
        const double dx = m.nodes[i][0] - m.nodes[j][0];
        const double dy = m.nodes[i][1] - m.nodes[j][1];
        return dx * dx + dy * dy;
    };
    for (std::size_t y = 0; y + 1 < M; ++y)
        for (std::size_t x = 0; x + 1 < M; ++x) {
            const Index a = y * M + x, b = a + 1, c = a + M, d = c + 1;
            if (dist2(a, d) <= dist2(b, c)) {
                m.triangles.push_back({a, b, d});
                m.triangles.push_back({a, d, c});
            } else {
                m.triangles.push_back({a, b, c});
                m.triangles.push_back({b, d, c});
            }
        }
    validate_mesh(m);
    return m;
}

} // namespace amgr_sa

#endif
