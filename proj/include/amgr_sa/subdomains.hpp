#ifndef AMGR_SA_SUBDOMAINS_HPP
#define AMGR_SA_SUBDOMAINS_HPP

/// \file subdomains.hpp
/// Non-overlapping decompositions of the index set used to localise the
/// annealing: rectangular blocks on structured grids and Lloyd aggregates on
/// the matrix graph.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "greedy.hpp"
#include "sparse.hpp"

namespace amgr_sa {

struct SubdomainDecomposition {
    std::size_t n = 0;
    std::vector<std::vector<Index>> subdomains; ///< each sorted
    /// Sweep order as groups of subdomain ids. Subdomains sharing a group have
    /// no matrix coupling between their closures.
    std::vector<std::vector<Index>> color_groups;
    std::vector<Index> prepinned_f; ///< sorted; belongs to no subdomain

    std::vector<Index> sweep_order() const {
        std::vector<Index> order;
        for (const auto& g : color_groups) order.insert(order.end(), g.begin(), g.end());
        return order;
    }

    /// Subdomain id of every index, or `npos` for prepinned points.
    std::vector<Index> owner() const {
        std::vector<Index> o(n, npos);
        for (Index k = 0; k < subdomains.size(); ++k)
            for (Index i : subdomains[k]) o[i] = k;
        return o;
    }

    static constexpr Index npos = std::numeric_limits<Index>::max();
};

/// Throws unless the decomposition partitions {0..n-1} and the sweep order
/// lists every subdomain exactly once.
inline void validate_decomposition(const SubdomainDecomposition& d) {
    std::vector<int> seen(d.n, 0);
    auto mark = [&](Index i) {
        if (i >= d.n) throw std::invalid_argument("decomposition index out of range");
        if (seen[i]++) throw std::invalid_argument("index " + std::to_string(i) + " assigned twice");
    };
    for (const auto& s : d.subdomains)
        for (Index i : s) mark(i);
    for (Index i : d.prepinned_f) mark(i);
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw std::invalid_argument("decomposition does not cover every index");
    auto order = d.sweep_order();
    std::sort(order.begin(), order.end());
    for (Index k = 0; k < order.size(); ++k)
        if (order[k] != k || order.size() != d.subdomains.size())
            throw std::invalid_argument("sweep order must list each subdomain once");
}

/// Symmetrised off-diagonal structure of A as adjacency lists.
inline std::vector<std::vector<Index>> structural_graph(const CsrMatrix& A) {
    std::vector<std::vector<Index>> g(A.rows());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j : A.row(i).cols)
            if (j != i) {
                g[i].push_back(j);
                g[j].push_back(i);
            }
    for (auto& nb : g) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return g;
}

/// One subdomain holding every index outside `prepinned`.
inline SubdomainDecomposition single_subdomain(std::size_t n, std::vector<Index> prepinned = {}) {
    SubdomainDecomposition d;
    d.n = n;
    std::sort(prepinned.begin(), prepinned.end());
    d.prepinned_f = std::move(prepinned);
    std::vector<Index> all;
    for (Index i = 0; i < n; ++i)
        if (!std::binary_search(d.prepinned_f.begin(), d.prepinned_f.end(), i)) all.push_back(i);
    if (!all.empty()) {
        d.subdomains.push_back(std::move(all));
        d.color_groups.push_back({0});
    }
    return d;
}

/// Rectangular tiling of a structured N x N grid (row-major, x fastest).
///
/// Rows already theta-dominant are pinned to F and left out. The rest are
/// tiled from the lowest remaining row/column with blocks of
/// `block_x` x `block_y` points; the last block in each direction keeps the
/// remainder. Blocks are swept in four colours by (block-row, block-column)
/// parity.
inline SubdomainDecomposition geometric_blocks(std::size_t N, std::size_t block_x,
                                               std::size_t block_y, const CsrMatrix& A,
                                               double theta) {
    if (A.rows() != N * N) throw DimensionError("geometric_blocks: matrix is not N^2 x N^2");
    if (block_x == 0 || block_y == 0) throw std::invalid_argument("block dimensions must be positive");

    SubdomainDecomposition d;
    d.n = N * N;
    d.prepinned_f = prepin_safe_f(A, theta);
    std::vector<bool> pinned(d.n, false);
    for (Index i : d.prepinned_f) pinned[i] = true;

    std::size_t x0 = N, y0 = N;
    for (Index i = 0; i < d.n; ++i)
        if (!pinned[i]) {
            x0 = std::min(x0, i % N);
            y0 = std::min(y0, i / N);
        }
    if (x0 == N) return d; // everything pinned

    const std::size_t bx_count = (N - x0 + block_x - 1) / block_x;
    const std::size_t by_count = (N - y0 + block_y - 1) / block_y;
    std::vector<std::vector<Index>> grid_blocks(bx_count * by_count);
    for (Index i = 0; i < d.n; ++i) {
        if (pinned[i]) continue;
        const auto bx = (i % N - x0) / block_x;
        const auto by = (i / N - y0) / block_y;
        grid_blocks[by * bx_count + bx].push_back(i);
    }

    d.color_groups.assign(4, {});
    for (std::size_t by = 0; by < by_count; ++by)
        for (std::size_t bx = 0; bx < bx_count; ++bx) {
            auto& pts = grid_blocks[by * bx_count + bx];
            if (pts.empty()) continue;
            d.color_groups[2 * (by % 2) + (bx % 2)].push_back(d.subdomains.size());
            d.subdomains.push_back(std::move(pts));
        }
    std::erase_if(d.color_groups, [](const auto& g) { return g.empty(); });
    return d;
}

namespace detail {

/// Multi-source BFS. Each reached node takes the lowest owner among its
/// predecessors on a shortest path, so every cluster stays connected.
inline std::vector<Index> nearest_center(const std::vector<std::vector<Index>>& g,
                                         const std::vector<bool>& active,
                                         const std::vector<Index>& centers) {
    constexpr Index none = SubdomainDecomposition::npos;
    std::vector<Index> owner(g.size(), none);
    std::vector<std::size_t> dist(g.size(), std::numeric_limits<std::size_t>::max());
    std::deque<Index> queue;
    for (Index a = 0; a < centers.size(); ++a) {
        owner[centers[a]] = a;
        dist[centers[a]] = 0;
        queue.push_back(centers[a]);
    }
    while (!queue.empty()) {
        const Index u = queue.front();
        queue.pop_front();
        for (Index v : g[u]) {
            if (!active[v]) continue;
            if (owner[v] == none) {
                owner[v] = owner[u];
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            } else if (dist[v] == dist[u] + 1 && owner[u] < owner[v]) {
                owner[v] = owner[u];
            }
        }
    }
    return owner;
}

/// Member with the largest hop distance from the cluster boundary (members
/// adjacent to a non-member); ties go to the lowest index. Returns
/// `fallback` for a cluster without boundary.
inline Index deepest_member(const std::vector<std::vector<Index>>& g,
                            const std::vector<Index>& owner, const std::vector<Index>& members,
                            Index cluster, Index fallback) {
    std::unordered_map<Index, std::size_t> dist;
    std::deque<Index> queue;
    for (Index i : members)
        for (Index j : g[i])
            if (owner[j] != cluster) {
                dist.emplace(i, 0);
                queue.push_back(i);
                break;
            }
    if (queue.empty()) return fallback;
    while (!queue.empty()) {
        const Index u = queue.front();
        queue.pop_front();
        for (Index v : g[u])
            if (owner[v] == cluster && !dist.contains(v)) {
                dist.emplace(v, dist[u] + 1);
                queue.push_back(v);
            }
    }
    Index best = members.front();
    std::size_t best_d = 0;
    for (Index i : members) { // members sorted ascending
        const auto it = dist.find(i);
        const std::size_t di = it == dist.end() ? 0 : it->second;
        if (di > best_d) {
            best = i;
            best_d = di;
        }
    }
    return best;
}

} // namespace detail

/// Lloyd clustering on the unit-distance graph of A (after Bell).
///
/// Picks ceil(m / avg_size) random centres among the m non-excluded points,
/// then alternates nearest-centre assignment with re-centring at the member
/// deepest inside each cluster, until the assignment repeats or 20 rounds
/// pass. Points no centre can reach form one extra subdomain per connected
/// component. Excluded points become `prepinned_f`.
inline SubdomainDecomposition lloyd_aggregate(const CsrMatrix& A, std::size_t avg_size,
                                              std::uint64_t seed,
                                              std::vector<Index> excluded = {},
                                              std::size_t max_iters = 20) {
    if (avg_size == 0) throw std::invalid_argument("lloyd_aggregate: avg_size must be positive");
    if (!A.square()) throw DimensionError("lloyd_aggregate: matrix must be square");
    constexpr Index none = SubdomainDecomposition::npos;

    SubdomainDecomposition d;
    d.n = A.rows();
    std::sort(excluded.begin(), excluded.end());
    excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
    d.prepinned_f = excluded;
    std::vector<bool> active(d.n, true);
    for (Index i : excluded) active.at(i) = false;
    std::vector<Index> points;
    for (Index i = 0; i < d.n; ++i)
        if (active[i]) points.push_back(i);
    if (points.empty()) return d;

    const auto g = structural_graph(A);
    const std::size_t s = std::max<std::size_t>(1, (points.size() + avg_size - 1) / avg_size);

    std::mt19937_64 rng(seed);
    std::vector<Index> pool = points;
    std::vector<Index> centers;
    for (std::size_t a = 0; a < s; ++a) {
        std::uniform_int_distribution<std::size_t> pick(a, pool.size() - 1);
        std::swap(pool[a], pool[pick(rng)]);
        centers.push_back(pool[a]);
    }

    std::vector<Index> owner = detail::nearest_center(g, active, centers);
    for (std::size_t it = 0; it < max_iters; ++it) {
        std::vector<std::vector<Index>> members(s);
        for (Index i : points)
            if (owner[i] != none) members[owner[i]].push_back(i);
        for (Index a = 0; a < s; ++a)
            centers[a] = detail::deepest_member(g, owner, members[a], a, centers[a]);
        auto next = detail::nearest_center(g, active, centers);
        if (next == owner) break;
        owner = std::move(next);
    }

    d.subdomains.assign(s, {});
    for (Index i : points)
        if (owner[i] != none) d.subdomains[owner[i]].push_back(i);

    // unreached components become their own subdomains
    for (Index i : points) {
        if (owner[i] != none) continue;
        const Index id = d.subdomains.size();
        d.subdomains.emplace_back();
        std::deque<Index> queue{i};
        owner[i] = id;
        while (!queue.empty()) {
            const Index u = queue.front();
            queue.pop_front();
            d.subdomains[id].push_back(u);
            for (Index v : g[u])
                if (active[v] && owner[v] == none) {
                    owner[v] = id;
                    queue.push_back(v);
                }
        }
        std::sort(d.subdomains[id].begin(), d.subdomains[id].end());
    }

    std::vector<Index> order(d.subdomains.size());
    for (Index k = 0; k < order.size(); ++k) order[k] = k;
    d.color_groups.push_back(std::move(order));
    return d;
}

} // namespace amgr_sa

#endif
