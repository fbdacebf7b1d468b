#ifndef AMGR_SA_ANNEAL_HPP
#define AMGR_SA_ANNEAL_HPP

/// \file anneal.hpp
/// Simulated-annealing coarsening: subdomain-local annealing of the F-set
/// under the theta-dominance constraint, swept Gauss-Seidel fashion over a
/// SubdomainDecomposition.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "splitting.hpp"
#include "subdomains.hpp"

namespace amgr_sa {

struct AnnealConfig {
    double theta = 0.56;
    std::size_t total_steps_per_dof = 2000;
    std::size_t steps_per_dof_per_sweep = 5;
    double t_initial = 1.0;
    double t_final_fraction = 0.1;
    std::size_t x = 1;
    std::size_t y = 0;
    std::uint64_t seed = 0;
    bool additive = false; ///< Jacobi-like halo exchange instead of Gauss-Seidel

    void validate() const {
        if (!(theta > 0.5)) throw std::invalid_argument("anneal: theta must exceed 1/2");
        if (x + y < 1) throw std::invalid_argument("anneal: x + y must be at least 1");
        if (!(t_final_fraction > 0.0 && t_final_fraction < 1.0))
            throw std::invalid_argument("anneal: t_final_fraction must lie in (0, 1)");
        if (!(t_initial > 0.0)) throw std::invalid_argument("anneal: t_initial must be positive");
        if (steps_per_dof_per_sweep == 0)
            throw std::invalid_argument("anneal: steps_per_dof_per_sweep must be positive");
        if (steps_per_dof_per_sweep > total_steps_per_dof && total_steps_per_dof != 0)
            throw std::invalid_argument("anneal: steps_per_dof_per_sweep exceeds total_steps_per_dof");
    }
};

/// Per-step decay factor alpha with alpha^n_ts = t_final_fraction.
inline double temperature_schedule(const AnnealConfig& cfg, std::size_t n_ts) {
    if (n_ts == 0) throw std::invalid_argument("temperature_schedule: n_ts must be at least 1");
    return std::pow(cfg.t_final_fraction, 1.0 / static_cast<double>(n_ts));
}

inline double acceptance_probability(long long z, long long z_new, double T) {
    if (z_new >= z) return 1.0;
    return std::exp(-static_cast<double>(z - z_new) / T);
}

/// Metropolis decision. Draws from `rng` only when the move is worse.
template <class Rng> bool accept_step(long long z, long long z_new, double T, Rng& rng) {
    if (!(T > 0.0)) throw std::invalid_argument("accept_step: temperature must be positive");
    if (z_new >= z) return true;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < acceptance_probability(z, z_new, T);
}

namespace detail {

/// Moves the last `count` entries of `v`, after a partial Fisher-Yates
/// shuffle, into `picked`. `on_swap(a, b)` reports position exchanges.
template <class Rng, class OnSwap>
void draw_tail(std::vector<Index>& v, std::size_t count, Rng& rng, OnSwap&& on_swap) {
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t last = v.size() - 1 - t;
        const std::size_t r = std::uniform_int_distribution<std::size_t>(0, last)(rng);
        if (r != last) {
            std::swap(v[r], v[last]);
            on_swap(r, last);
        }
    }
}

} // namespace detail

struct SwapResult {
    std::vector<Index> f;
    std::vector<Index> c;
};

/// Moves `n_f` uniformly chosen points from C to F and `n_c` from F to C.
/// Both selections are drawn from the sets as they were before the move.
template <class Rng>
SwapResult swap_fc(std::vector<Index> F, std::vector<Index> C, std::size_t n_f, std::size_t n_c,
                   Rng& rng) {
    if (F.size() < n_c || C.size() < n_f)
        throw std::invalid_argument("swap_fc: not enough points to move");
    auto nop = [](std::size_t, std::size_t) {};
    detail::draw_tail(F, n_c, rng, nop);
    detail::draw_tail(C, n_f, rng, nop);
    std::vector<Index> to_c(F.end() - static_cast<std::ptrdiff_t>(n_c), F.end());
    std::vector<Index> to_f(C.end() - static_cast<std::ptrdiff_t>(n_f), C.end());
    F.resize(F.size() - n_c);
    C.resize(C.size() - n_f);
    F.insert(F.end(), to_f.begin(), to_f.end());
    C.insert(C.end(), to_c.begin(), to_c.end());
    return {std::move(F), std::move(C)};
}

struct HaloView {
    std::vector<Index> interior;   ///< Omega_k, sorted
    std::vector<Index> halo;       ///< closure minus Omega_k, sorted
    std::vector<bool> halo_f_flags; ///< assumed label of each halo point (true = F)
};

/// Number of points of `fbar` that meet the dominance constraint, with
/// row sums taken over the F-set `in_f`. Reference implementation.
inline std::size_t fitness(const CsrMatrix& A, std::span<const Index> fbar,
                           const std::vector<bool>& in_f, double theta) {
    std::size_t z = 0;
    for (Index i : fbar) {
        const auto r = A.row(i);
        double sum = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k)
            if (in_f[r.cols[k]]) sum += std::abs(r.vals[k]);
        z += meets_dominance(std::abs(A.diagonal(i)), sum, theta);
    }
    return z;
}

/// Same, with the row sums over `fbar` itself.
inline std::size_t fitness(const CsrMatrix& A, std::span<const Index> fbar, double theta) {
    std::vector<bool> in_f(A.rows(), false);
    for (Index i : fbar) in_f.at(i) = true;
    return fitness(A, fbar, in_f, theta);
}

struct TraceSample {
    std::size_t step = 0;
    double temperature = 0.0;
    std::size_t best_f_size = 0;
    std::size_t sweep = 0;
};

/// Annealing state over a whole decomposition.
///
/// `labels` holds the tentative F/C assignment every subdomain sees: the
/// current F_k/C_k of visited subdomains, F for points of subdomains not yet
/// visited, F for prepinned points. `global` is the feasible F-set assembled
/// from accepted, fully feasible local states; `best` is its largest
/// snapshot.
class Annealer {
public:
    static constexpr Index npos = SubdomainDecomposition::npos;

    Annealer(const CsrMatrix& A, const SubdomainDecomposition& d, const AnnealConfig& cfg)
        : A_(A), At_(transpose(A)), d_(d), cfg_(cfg), rng_(cfg.seed), T_(cfg.t_initial) {
        cfg_.validate();
        if (!A.square() || A.rows() != d.n)
            throw DimensionError("Annealer: decomposition does not match the matrix");
        const std::size_t n = A.rows();
        diag_.resize(n);
        for (Index i = 0; i < n; ++i) {
            diag_[i] = std::abs(A.diagonal(i));
            if (diag_[i] == 0.0)
                throw std::domain_error("Annealer: zero diagonal in row " + std::to_string(i));
        }
        owner_ = d.owner();
        labels_.assign(n, 1);
        global_.assign(n, 0);
        for (Index i : d.prepinned_f) global_[i] = 1;
        global_count_ = d.prepinned_f.size();
        best_ = global_;
        best_count_ = global_count_;
        published_ = labels_;
        ok_.assign(n, 0);
        slot_.assign(n, npos);
        stamp_.assign(n, 0);
        aff_stamp_.assign(n, 0);
        dirty_pos_.assign(n, npos);

        const auto s = d.subdomains.size();
        fk_.assign(s, {});
        ck_.assign(s, {});
        visited_.assign(s, false);
        nbar_.assign(s, 0);
        z_.assign(s, 0);
    }

    void set_alpha(double alpha) { alpha_ = alpha; }
    double temperature() const { return T_; }
    std::size_t steps_taken() const { return steps_; }
    std::size_t best_size() const { return best_count_; }
    std::size_t global_size() const { return global_count_; }
    const std::vector<TraceSample>& trace() const { return trace_; }
    const std::vector<Index>& local_f(Index k) const { return fk_.at(k); }
    const std::vector<Index>& local_c(Index k) const { return ck_.at(k); }
    std::size_t best_feasible_local(Index k) const { return nbar_.at(k); }
    long long current_fitness(Index k) const { return z_.at(k); }
    bool visited(Index k) const { return visited_.at(k); }
    bool tentative_f(Index i) const { return labels_.at(i) != 0; }

    CfSplitting best_splitting() const { return to_splitting(best_); }
    CfSplitting global_splitting() const { return to_splitting(global_); }

    /// Halo of Omega_k with the labels subdomain k would currently assume.
    HaloView halo_assumptions(Index k) const {
        HaloView v;
        v.interior = d_.subdomains.at(k);
        const auto& lab = cfg_.additive ? published_ : labels_;
        std::vector<Index> halo;
        for (Index i : v.interior)
            for (Index j : A_.row(i).cols)
                if (owner_[j] != k) halo.push_back(j);
        std::sort(halo.begin(), halo.end());
        halo.erase(std::unique(halo.begin(), halo.end()), halo.end());
        v.halo = std::move(halo);
        for (Index j : v.halo) v.halo_f_flags.push_back(lab[j] != 0);
        return v;
    }

    /// Fitness of subdomain k recomputed from scratch with the current labels.
    std::size_t naive_fitness(Index k) const {
        const auto view = halo_assumptions(k);
        std::vector<bool> in_f(labels_.size());
        for (Index i = 0; i < labels_.size(); ++i) in_f[i] = labels_[i] != 0;
        std::vector<Index> fbar;
        for (Index i : view.interior)
            if (in_f[i]) fbar.push_back(i);
        for (Index j : view.halo)
            if (in_f[j]) fbar.push_back(j);
        return fitness(A_, fbar, in_f, cfg_.theta);
    }

    /// Runs `n_steps` annealing steps on subdomain k. Every step decays the
    /// shared temperature, whether or not a move was possible.
    void anneal_subdomain(Index k, std::size_t n_steps, std::size_t sweep = 0) {
        begin_visit(k);
        long long& z = z_[k];
        auto& F = fk_[k];
        auto& C = ck_[k];
        const std::size_t x = cfg_.x, y = cfg_.y;
        std::uniform_int_distribution<int> pick_move(0, 2);

        for (std::size_t step = 0; step < n_steps; ++step) {
            const int r = pick_move(rng_);
            std::size_t n_f = 0, n_c = 0;
            bool legal = false;
            switch (r) {
            case 0: // grow F
                n_f = x + y;
                n_c = y;
                legal = C.size() >= x + y && F.size() >= y;
                break;
            case 1: // exchange
                n_f = x;
                n_c = x;
                legal = std::min(F.size(), C.size()) > x;
                break;
            default: // shrink F
                n_f = y;
                n_c = x + y;
                legal = F.size() >= x + y && C.size() >= y;
                break;
            }
            if (legal) try_move(k, n_f, n_c, z, sweep);
            T_ *= alpha_;
            ++steps_;
        }
        end_visit(k);
    }

    /// Start of a sweep (publishes labels for the additive variant).
    void begin_sweep() {
        if (!cfg_.additive) return;
        for (Index k = 0; k < fk_.size(); ++k) {
            for (Index i : fk_[k]) published_[i] = 1;
            for (Index i : ck_[k]) published_[i] = 0;
        }
    }

    void record(std::size_t sweep) { trace_.push_back({steps_, T_, best_count_, sweep}); }

private:
    CfSplitting to_splitting(const std::vector<char>& f) const {
        CfSplitting s(f.size(), Label::C);
        for (Index i = 0; i < f.size(); ++i)
            if (f[i]) s.set(i, Label::F);
        return s;
    }

    template <class Lab> bool row_ok(Index i, const Lab& lab) const {
        const auto r = A_.row(i);
        double sum = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q)
            if (lab(r.cols[q])) sum += std::abs(r.vals[q]);
        return meets_dominance(diag_[i], sum, cfg_.theta);
    }
    bool row_ok(Index i) const {
        return row_ok(i, [this](Index j) { return labels_[j] != 0; });
    }

    void place(Index i, std::vector<Index>& list) {
        slot_[i] = list.size();
        list.push_back(i);
    }

    void dirty_toggle(Index j) {
        if (dirty_pos_[j] == npos) {
            dirty_pos_[j] = dirty_.size();
            dirty_.push_back(j);
        } else {
            const Index last = dirty_.back();
            dirty_[dirty_pos_[j]] = last;
            dirty_pos_[last] = dirty_pos_[j];
            dirty_.pop_back();
            dirty_pos_[j] = npos;
        }
    }

    void begin_visit(Index k) {
        const auto& omega = d_.subdomains.at(k);
        auto& F = fk_[k];
        auto& C = ck_[k];
        if (!visited_[k]) {
            visited_[k] = true;
            F.clear();
            C.clear();
            for (Index i : omega) {
                labels_[i] = 0;
                place(i, C);
            }
        }
        if (cfg_.additive) {
            for (Index i = 0; i < labels_.size(); ++i)
                if (owner_[i] != k) labels_[i] = published_[i];
            for (Index i : F) labels_[i] = 1;
            for (Index i : C) labels_[i] = 0;
        }

        ++visit_;
        closure_.clear();
        halo_f_ = 0;
        for (Index i : omega) {
            stamp_[i] = visit_;
            closure_.push_back(i);
        }
        for (Index i : omega)
            for (Index j : A_.row(i).cols)
                if (stamp_[j] != visit_) {
                    stamp_[j] = visit_;
                    closure_.push_back(j);
                    halo_f_ += labels_[j] != 0;
                }
        long long z = 0;
        for (Index i : closure_) {
            ok_[i] = row_ok(i);
            z += labels_[i] && ok_[i];
        }
        z_[k] = z;

        for (Index i : omega)
            if (labels_[i] != global_[i]) dirty_toggle(i);
    }

    void end_visit(Index) {
        for (Index j : dirty_) dirty_pos_[j] = npos;
        dirty_.clear();
    }

    void try_move(Index k, std::size_t n_f, std::size_t n_c, long long& z, std::size_t sweep) {
        auto& F = fk_[k];
        auto& C = ck_[k];
        auto fix_f = [&](std::size_t a, std::size_t b) {
            slot_[F[a]] = a;
            slot_[F[b]] = b;
        };
        auto fix_c = [&](std::size_t a, std::size_t b) {
            slot_[C[a]] = a;
            slot_[C[b]] = b;
        };
        detail::draw_tail(F, n_c, rng_, fix_f);
        detail::draw_tail(C, n_f, rng_, fix_c);
        moved_.assign(F.end() - static_cast<std::ptrdiff_t>(n_c), F.end()); // F -> C
        moved_.insert(moved_.end(), C.end() - static_cast<std::ptrdiff_t>(n_f), C.end()); // C -> F

        // rows of the closure whose F-sum or membership can change
        ++aff_visit_;
        affected_.clear();
        auto touch = [&](Index i) {
            if (stamp_[i] == visit_ && aff_stamp_[i] != aff_visit_) {
                aff_stamp_[i] = aff_visit_;
                affected_.push_back(i);
            }
        };
        for (Index j : moved_) {
            touch(j);
            for (Index i : At_.row(j).cols) touch(i);
        }
        long long before = 0;
        saved_ok_.clear();
        for (Index i : affected_) {
            before += labels_[i] && ok_[i];
            saved_ok_.push_back(ok_[i]);
        }
        for (Index j : moved_) labels_[j] ^= 1;
        long long after = 0;
        for (Index i : affected_) {
            ok_[i] = row_ok(i);
            after += labels_[i] && ok_[i];
        }
        const long long z_new = z - before + after;
        const std::size_t fbar_size = F.size() + n_f - n_c + halo_f_;

        if (!accept_step(z, z_new, T_, rng_)) {
            for (Index j : moved_) labels_[j] ^= 1;
            for (std::size_t q = 0; q < affected_.size(); ++q) ok_[affected_[q]] = saved_ok_[q];
            return; // the lists keep their (reshuffled) contents
        }

        // commit: the drawn points sit at the list tails
        F.resize(F.size() - n_c);
        C.resize(C.size() - n_f);
        for (std::size_t q = 0; q < n_c; ++q) place(moved_[q], C);
        for (std::size_t q = n_c; q < moved_.size(); ++q) place(moved_[q], F);
        for (Index j : moved_) dirty_toggle(j);
        z = z_new;

        // n_bar counts interior F-points only; the halo share of z moves with the neighbours
        if (static_cast<std::size_t>(z_new) == fbar_size && F.size() >= nbar_[k] && splice(k)) {
            nbar_[k] = F.size();
            if (global_count_ > best_count_) {
                best_ = global_;
                best_count_ = global_count_;
                trace_.push_back({steps_, T_, best_count_, sweep});
            }
        }
    }

    /// global <- (global \ Omega_k) u F_k, if the result stays feasible.
    bool splice(Index k) {
        auto cand = [&](Index j) { return owner_[j] == k ? labels_[j] != 0 : global_[j] != 0; };
        for (Index j : dirty_) {
            if (cand(j) && !row_ok(j, cand)) return false;
            for (Index i : At_.row(j).cols)
                if (cand(i) && !row_ok(i, cand)) return false;
        }
        for (Index j : dirty_) {
            global_count_ -= global_[j];
            global_[j] = labels_[j];
            global_count_ += global_[j];
            dirty_pos_[j] = npos;
        }
        dirty_.clear();
        return true;
    }

    const CsrMatrix& A_;
    CsrMatrix At_;
    const SubdomainDecomposition& d_;
    AnnealConfig cfg_;
    std::mt19937_64 rng_;
    double T_;
    double alpha_ = 1.0;
    std::size_t steps_ = 0;

    std::vector<double> diag_;
    std::vector<Index> owner_;
    std::vector<char> labels_, published_, global_, best_, ok_;
    std::size_t global_count_ = 0, best_count_ = 0;

    std::vector<std::vector<Index>> fk_, ck_;
    std::vector<Index> slot_;
    std::vector<bool> visited_;
    std::vector<std::size_t> nbar_;
    std::vector<long long> z_;

    std::vector<std::size_t> stamp_, aff_stamp_;
    std::size_t visit_ = 0, aff_visit_ = 0;
    std::vector<Index> closure_, affected_, moved_;
    std::vector<char> saved_ok_;
    std::size_t halo_f_ = 0;
    std::vector<Index> dirty_, dirty_pos_;
    std::vector<TraceSample> trace_;
};

struct SaResult {
    CfSplitting splitting;
    std::vector<TraceSample> trace;
    std::size_t steps = 0;
    std::size_t sweeps = 0;
};

/// Gauss-Seidel sweeps of subdomain annealing. Each sweep gives subdomain k
/// steps_per_dof_per_sweep * |Omega_k| steps; the number of sweeps is
/// total_steps_per_dof / steps_per_dof_per_sweep, and the temperature falls
/// from t_initial to t_initial * t_final_fraction over the whole run.
inline SaResult sa_coarsen(const CsrMatrix& A, const SubdomainDecomposition& d, const AnnealConfig& cfg) {
    cfg.validate();
    validate_decomposition(d);
    Annealer ann(A, d, cfg);
    SaResult res;
    res.sweeps = cfg.total_steps_per_dof / cfg.steps_per_dof_per_sweep;
    std::size_t per_sweep = 0;
    for (const auto& s : d.subdomains) per_sweep += cfg.steps_per_dof_per_sweep * s.size();
    const std::size_t n_ts = per_sweep * res.sweeps;

    ann.record(0);
    if (n_ts > 0) {
        ann.set_alpha(temperature_schedule(cfg, n_ts));
        const auto order = d.sweep_order();
        for (std::size_t sweep = 1; sweep <= res.sweeps; ++sweep) {
            ann.begin_sweep();
            for (Index k : order)
                ann.anneal_subdomain(k, cfg.steps_per_dof_per_sweep * d.subdomains[k].size(), sweep);
            ann.record(sweep);
        }
    }
    res.splitting = ann.best_splitting();
    res.trace = ann.trace();
    res.steps = ann.steps_taken();
    if (!is_feasible(A, res.splitting, cfg.theta))
        throw InfeasibleSplitting("sa_coarsen produced an infeasible splitting");
    return res;
}

} // namespace amgr_sa

#endif
