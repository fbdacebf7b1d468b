#ifndef AMGR_SA_BY_HAND_HPP
#define AMGR_SA_BY_HAND_HPP

/// \file by_hand.hpp
/// Constructive benchmark splittings for the structured Laplacians.
///
/// For 1/2 < theta < 4/7 the dominance constraint reduces to a covering
/// condition on interior points (those not adjacent to the Dirichlet
/// boundary): with the five-point stencil an F-point needs one C among its
/// four neighbours, with the nine-point stencil two C among its eight.
/// Boundary-adjacent points satisfy the constraint unconditionally.
///
/// Both builders start from the periodic tiling (X-pentomino centres, or two
/// C-points per 3x3 brick), repair whatever the finite grid leaves uncovered,
/// then run a small local search that drops redundant C-points and replaces
/// pairs of C-points by one where possible. The best tiling offset wins.

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <utility>
#include <vector>

#include "splitting.hpp"

namespace amgr_sa {

namespace detail {

class GridCover {
public:
    GridCover(std::size_t N, bool eight_neighbours, int required)
        : N_(static_cast<long long>(N)), eight_(eight_neighbours), required_(required),
          coarse_(N * N, false) {}

    bool inner(long long x, long long y) const { return x >= 1 && y >= 1 && x < N_ - 1 && y < N_ - 1; }
    bool in_grid(long long x, long long y) const { return x >= 0 && y >= 0 && x < N_ && y < N_; }
    std::size_t id(long long x, long long y) const { return static_cast<std::size_t>(y * N_ + x); }
    bool coarse(long long x, long long y) const { return coarse_[id(x, y)]; }
    void set(long long x, long long y, bool c) { coarse_[id(x, y)] = c; }

    template <class Fn> void for_neighbours(long long x, long long y, Fn&& fn) const {
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if ((dx == 0 && dy == 0) || (!eight_ && dx != 0 && dy != 0)) continue;
                if (in_grid(x + dx, y + dy)) fn(x + dx, y + dy);
            }
    }

    bool satisfied(long long x, long long y) const {
        if (!inner(x, y) || coarse(x, y)) return true;
        int count = 0;
        for_neighbours(x, y, [&](long long u, long long v) { count += coarse(u, v); });
        return count >= required_;
    }

    /// The point and its neighbours, i.e. everything whose status depends on (x, y).
    bool satisfied_around(long long x, long long y) const {
        bool ok = satisfied(x, y);
        for_neighbours(x, y, [&](long long u, long long v) { ok = ok && satisfied(u, v); });
        return ok;
    }

    void repair() {
        for (long long y = 0; y < N_; ++y)
            for (long long x = 0; x < N_; ++x)
                while (!satisfied(x, y)) {
                    long long bx = -1, by = -1;
                    int best = -1;
                    for_neighbours(x, y, [&](long long u, long long v) {
                        if (coarse(u, v)) return;
                        int helps = 0;
                        set(u, v, true);
                        for_neighbours(u, v, [&](long long p, long long q) { helps += satisfied(p, q); });
                        set(u, v, false);
                        if (helps > best || (helps == best && id(u, v) < id(bx, by))) {
                            best = helps;
                            bx = u;
                            by = v;
                        }
                    });
                    if (best < 0) set(x, y, true);
                    else set(bx, by, true);
                }
    }

    /// Drops C-points that nothing depends on; returns true on any change.
    bool prune() {
        bool changed = false;
        for (long long y = 0; y < N_; ++y)
            for (long long x = 0; x < N_; ++x) {
                if (!coarse(x, y)) continue;
                set(x, y, false);
                if (satisfied_around(x, y)) changed = true;
                else set(x, y, true);
            }
        return changed;
    }

    /// Replaces one pair of nearby C-points by a single C-point if that keeps
    /// every point covered. Returns true on success.
    bool merge_pair() {
        std::vector<std::pair<long long, long long>> cs;
        for (long long y = 0; y < N_; ++y)
            for (long long x = 0; x < N_; ++x)
                if (coarse(x, y)) cs.emplace_back(x, y);
        for (std::size_t a = 0; a < cs.size(); ++a) {
            for (std::size_t b = a + 1; b < cs.size(); ++b) {
                const auto [ax, ay] = cs[a];
                const auto [bx, by] = cs[b];
                if (std::abs(ax - bx) > 3 || std::abs(ay - by) > 3) continue;
                set(ax, ay, false);
                set(bx, by, false);

                std::vector<std::pair<long long, long long>> open;
                auto collect = [&](long long u, long long v) {
                    if (!satisfied(u, v)) open.emplace_back(u, v);
                };
                collect(ax, ay);
                for_neighbours(ax, ay, collect);
                collect(bx, by);
                for_neighbours(bx, by, collect);

                if (open.empty()) return true; // both were redundant
                std::vector<std::pair<long long, long long>> candidates{open.front()};
                for_neighbours(open.front().first, open.front().second,
                               [&](long long u, long long v) { candidates.emplace_back(u, v); });
                for (const auto& [qx, qy] : candidates) {
                    if (coarse(qx, qy)) continue;
                    set(qx, qy, true);
                    bool ok = true;
                    for (const auto& [u, v] : open) ok = ok && satisfied(u, v);
                    if (ok) return true;
                    set(qx, qy, false);
                }
                set(ax, ay, true);
                set(bx, by, true);
            }
        }
        return false;
    }

    void improve() {
        prune();
        while (merge_pair()) prune();
    }

    std::size_t coarse_count() const {
        return static_cast<std::size_t>(std::count(coarse_.begin(), coarse_.end(), true));
    }

    CfSplitting splitting() const {
        CfSplitting s(coarse_.size(), Label::F);
        for (std::size_t i = 0; i < coarse_.size(); ++i)
            if (coarse_[i]) s.set(i, Label::C);
        return s;
    }

private:
    long long N_;
    bool eight_;
    int required_;
    std::vector<bool> coarse_;
};

} // namespace detail

/// X-pentomino splitting of the N x N five-point Laplacian.
inline CfSplitting by_hand_fd(std::size_t N) {
    std::optional<detail::GridCover> best;
    const auto n = static_cast<long long>(N);
    for (int offset = 0; offset < 5; ++offset) {
        detail::GridCover g(N, false, 1);
        for (long long y = 0; y < n; ++y)
            for (long long x = 0; x < n; ++x) {
                if ((x + 2 * y) % 5 != offset) continue;
                if (g.inner(x, y)) {
                    g.set(x, y, true);
                    continue;
                }
                // a centre on the boundary ring moves onto its interior neighbour
                g.for_neighbours(x, y, [&](long long u, long long v) {
                    if (g.inner(u, v)) g.set(u, v, true);
                });
            }
        g.repair();
        g.improve();
        if (!best || g.coarse_count() < best->coarse_count()) best = std::move(g);
    }
    return best->splitting();
}

/// 3x3-brick splitting of the N x N nine-point bilinear Laplacian: two
/// C-points in the middle row of each brick.
inline CfSplitting by_hand_fe(std::size_t N) {
    std::optional<detail::GridCover> best;
    const auto n = static_cast<long long>(N);
    for (int transposed = 0; transposed < 2; ++transposed)
        for (int oy = 0; oy < 3; ++oy)
            for (int ox = 0; ox < 3; ++ox) {
                detail::GridCover g(N, true, 2);
                for (long long y = 1; y < n - 1; ++y)
                    for (long long x = 1; x < n - 1; ++x) {
                        auto r = (y - 1 + oy) % 3;
                        auto c = (x - 1 + ox) % 3;
                        if (transposed) std::swap(r, c);
                        if (r == 1 && c != 1) g.set(x, y, true);
                    }
                g.repair();
                g.improve();
                if (!best || g.coarse_count() < best->coarse_count()) best = std::move(g);
            }
    return best->splitting();
}

} // namespace amgr_sa

#endif
