#pragma once

// Bounded-variable revised simplex on the slack-extended equality form
// A x + s = b. Composite phase 1 (no artificial columns), long-step
// piecewise ratio test in phase 1, two-pass Harris-style ratio test with
// bound flips in phase 2, Dantzig pricing with lowest-index ties, Bland's
// rule after a degeneracy streak. Basis factorization: Eigen SparseLU,
// refreshed every refactor_every pivots, with product-form eta updates in
// between. Rows/columns are equilibrated by max-norm using powers of two,
// so scaling and unscaling are exact.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "h2sc/model.hpp"
#include "h2sc/presolve.hpp"

namespace h2sc {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        default: return "iteration_limit";
    }
}

struct LpOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-7;
    double ratio_tol = 1e-9;   // Harris-style bound stretch in the ratio test
    double pivot_tol = 1e-9;   // minimum acceptable pivot magnitude
    long max_iter = 1000000;
    int refactor_every = 100;
    int bland_after = 1000;    // consecutive degenerate pivots before Bland's rule
    bool scale = true;
    bool presolve = false;     // reductions change reported duals of dropped rows to 0
    // Optional starting basis: the col_stat of a previous solve of a model
    // with the same variables and rows (bounds may differ). Ignored when it
    // does not fit or cannot be factorized. Not compatible with presolve.
    const std::vector<char>* warm = nullptr;
};

struct LpSolution {
    LpStatus status = LpStatus::iteration_limit;
    double objective = 0;
    std::vector<double> x;              // per variable
    std::vector<double> y;              // per row
    std::vector<double> reduced_costs;  // per variable
    long iterations = 0;
    double max_violation = 0;           // primal residual at the reported point
    // Final basis status per column (variables then row slacks), usable as
    // LpOptions::warm for a related solve. Empty when presolve was applied.
    std::vector<char> col_stat;
};

namespace simplex_detail {

enum class VStat : char { basic, lower, upper, fixed, free_nb };

struct Eta {
    int r = 0;
    double dr = 1.0;                          // 1 / pivot
    std::vector<std::pair<int, double>> d;    // -w_i / w_r for i != r
};

class Solver {
public:
    Solver(const ModelInstance& model, const LpOptions& opt) : m_(model), opt_(opt) {
        n_ = int(m_.vars().size());
        mrows_ = int(m_.rows().size());
        N_ = n_ + mrows_;
        build_columns();
        build_scaling();
        init_state();
    }

    LpSolution run() {
        LpSolution sol;
        if (mrows_ == 0) return solve_unconstrained();

        if (!try_refactor()) {
            // A warm basis can be singular under the new bounds; restart
            // cold rather than give up.
            cold_start();
            if (!try_refactor()) fail("simplex: basis factorization failed");
        }
        recompute_basics();

        bool feasible = false;
        long iter = 0;
        int restarts = 0;
        LpStatus verdict = LpStatus::iteration_limit;

        while (iter < opt_.max_iter) {
            bool phase2 = feasible;
            if (!phase2 && infeasibility() <= p1_done_tol_) {
                // Phase-1 tolerance met; snap and confirm with a fresh basis.
                refactor();
                recompute_basics();
                if (infeasibility() <= 10 * p1_done_tol_) {
                    feasible = true;
                    phase2 = true;
                }
            }
            in_phase2_ = phase2;

            int q = price(phase2);
            if (q < 0) {
                if (!phase2) {
                    // Phase-1 stationary. Accept if within the working
                    // feasibility tolerance, otherwise the LP is infeasible.
                    refactor();
                    recompute_basics();
                    if (infeasibility() <= opt_.feas_tol) {
                        feasible = true;
                        continue;
                    }
                    verdict = LpStatus::infeasible;
                    break;
                }
                // Optimality claimed: confirm on a refreshed factorization.
                refactor();
                recompute_basics();
                if (infeasibility() > 10 * p1_done_tol_ && restarts < 3) {
                    ++restarts;
                    feasible = false;
                    continue;
                }
                // Optimality must hold for the true costs and bounds, not
                // the perturbed ones; drop any relaxation and re-check.
                unperturb_costs();
                if (expanded_) {
                    unexpand_bounds();
                    if (infeasibility() > p1_done_tol_ && restarts < 3) {
                        ++restarts;
                        feasible = false;
                        continue;
                    }
                }
                q = price(true);
                if (q < 0) {
                    verdict = LpStatus::optimal;
                    break;
                }
            }

            ++iter;
            double sigma = direction_;
            Eigen::VectorXd aq = column_dense(q);
            Eigen::VectorXd w = ftran(aq);

            // An entering column whose transformed image is vanishingly small
            // is numerically dependent on the current basis; pivoting on it
            // would poison the factorization. Set it aside until the basis
            // changes. (An exactly zero image is a genuine empty column and
            // falls through to the bound-flip / unbounded logic.)
            double wmax = w.lpNorm<Eigen::Infinity>();
            if (wmax > 0.0 &&
                wmax < 1e-9 * std::max(1.0, aq.lpNorm<Eigen::Infinity>())) {
                banned_[q] = 1;
                ++banned_count_;
                continue;
            }

            bool did_pivot;
            if (phase2) {
                int r = -1;
                double theta = 0;
                int rc = ratio_phase2(q, sigma, w, r, theta);
                if (rc == 1) {
                    verdict = LpStatus::unbounded;
                    break;
                }
                did_pivot = apply_step(q, sigma, w, r, theta);
            } else {
                int r = -1;
                double theta = 0;
                ratio_phase1(q, sigma, w, r, theta);
                did_pivot = apply_step(q, sigma, w, r, theta);
            }

            if (did_pivot) clear_bans();  // dependence is basis-relative
            // Refresh the factorization on schedule, and more aggressively
            // during degenerate streaks: stalls are sustained by noise in
            // the update chain, and fresh numbers cut them short.
            bool streak_refresh =
                degen_streak_ > 0 && degen_streak_ % 256 == 0 && !etas_.empty();
            if ((did_pivot && int(etas_.size()) >= opt_.refactor_every) ||
                streak_refresh) {
                refactor();
                recompute_basics();
            }
        }

        sol.iterations = iter;
        if (iter >= opt_.max_iter) verdict = LpStatus::iteration_limit;
        sol.status = verdict;
        unperturb_costs();   // reported duals come from the true costs
        unexpand_bounds();   // reported values snap to the true bounds
        extract(sol, verdict == LpStatus::optimal || verdict == LpStatus::iteration_limit);
        return sol;
    }

private:
    const ModelInstance& m_;
    LpOptions opt_;
    int n_ = 0, mrows_ = 0, N_ = 0;

    // Scaled problem data. Structural columns first, then unit slacks.
    std::vector<std::vector<std::pair<int, double>>> cols_;  // scaled structural columns
    std::vector<double> lb_, ub_, cost_;                     // per column, scaled
    std::vector<double> b_;                                  // scaled rhs
    std::vector<double> rowscale_, colscale_;                // powers of two
    std::vector<double> pnorm_;   // static pricing weights, 1 + ||a_j||^2

    std::vector<VStat> stat_;
    std::vector<int> basis_;      // column basic in each row position
    std::vector<double> val_;     // current value per column (scaled)
    std::vector<Eta> etas_;
    // Last successfully factorized basis, for repair after a numerically
    // singular pivot sequence.
    std::vector<VStat> stat_good_;
    std::vector<int> basis_good_;
    std::vector<double> val_good_;
    bool have_good_ = false;
    int repairs_ = 0;
    double min_piv_ = 1e-9;       // working pivot floor; raised on repair
    std::vector<char> banned_;    // entering columns found numerically
    int banned_count_ = 0;        // dependent on the current basis
    bool in_phase2_ = false;
    bool perturbed_ = false;      // anti-degeneracy cost perturbation active
    std::vector<double> cost_orig_;
    bool expanded_ = false;       // anti-degeneracy bound expansion active
    std::vector<double> lb_orig_, ub_orig_;
    int perturbs_ = 0, expansions_ = 0;
    // mutable: Eigen's SparseLU::transpose() view is a non-const member even
    // though solving with it leaves the factorization untouched.
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    int direction_ = 1;           // entering direction chosen by price()
    int degen_streak_ = 0;
    bool bland_ = false;
    double p1_done_tol_ = 1e-9;

    // ---- setup ----------------------------------------------------------

    void build_columns() {
        cols_.assign(n_, {});
        for (int i = 0; i < mrows_; ++i)
            for (const auto& [j, c] : m_.row(i).coeffs)
                if (c != 0.0) cols_[j].emplace_back(i, c);
    }

    static double pow2_round(double v) {
        if (v <= 0 || !std::isfinite(v)) return 1.0;
        int e = 0;
        std::frexp(v, &e);       // v = f * 2^e, f in [0.5, 1)
        return std::ldexp(1.0, 1 - e);  // ~1/v rounded to a power of two
    }

    void build_scaling() {
        rowscale_.assign(mrows_, 1.0);
        colscale_.assign(n_, 1.0);
        if (opt_.scale) {
            for (int pass = 0; pass < 4; ++pass) {
                std::vector<double> rmax(mrows_, 0.0);
                for (int j = 0; j < n_; ++j)
                    for (const auto& [i, c] : cols_[j])
                        rmax[i] = std::max(rmax[i], std::fabs(rowscale_[i] * c * colscale_[j]));
                for (int i = 0; i < mrows_; ++i)
                    if (rmax[i] > 0) rowscale_[i] *= pow2_round(rmax[i]);
                for (int j = 0; j < n_; ++j) {
                    double cmax = 0;
                    for (const auto& [i, c] : cols_[j])
                        cmax = std::max(cmax, std::fabs(rowscale_[i] * c * colscale_[j]));
                    if (cmax > 0) colscale_[j] *= pow2_round(cmax);
                }
            }
        }
        for (int j = 0; j < n_; ++j)
            for (auto& [i, c] : cols_[j]) c *= rowscale_[i] * colscale_[j];

        // Static pricing weights: 1 + squared norm of each scaled column
        // (slacks are unit columns). Normalizing reduced costs by these keeps
        // Dantzig pricing from chasing long columns and cuts iteration counts.
        pnorm_.assign(N_, 2.0);
        for (int j = 0; j < n_; ++j) {
            double s = 1.0;
            for (const auto& [i, c] : cols_[j]) s += c * c;
            pnorm_[j] = s;
        }

        lb_.assign(N_, 0);
        ub_.assign(N_, 0);
        cost_.assign(N_, 0);
        for (int j = 0; j < n_; ++j) {
            const Variable& v = m_.var(j);
            lb_[j] = v.lb / colscale_[j];
            ub_[j] = v.ub / colscale_[j];
            cost_[j] = v.obj * colscale_[j];
        }
        b_.assign(mrows_, 0);
        for (int i = 0; i < mrows_; ++i) {
            const Row& r = m_.row(i);
            b_[i] = r.rhs * rowscale_[i];
            // Slack column n_+i has coefficient +1 (scaled identity); its
            // bounds encode the row sense, scaled by the row factor.
            double lo = 0, hi = 0;
            double rng = std::fabs(r.range);
            switch (r.sense) {
                case Sense::le: lo = 0; hi = r.range != 0 ? rng : kInf; break;
                case Sense::ge: lo = r.range != 0 ? -rng : -kInf; hi = 0; break;
                case Sense::eq:
                    if (r.range > 0) { lo = -r.range; hi = 0; }
                    else if (r.range < 0) { lo = 0; hi = -r.range; }
                    else { lo = 0; hi = 0; }
                    break;
            }
            int sj = n_ + i;
            lb_[sj] = lo * rowscale_[i];
            ub_[sj] = hi * rowscale_[i];
            cost_[sj] = 0;
        }
    }

    void cold_start() {
        stat_.assign(N_, VStat::lower);
        val_.assign(N_, 0);
        basis_.assign(mrows_, 0);
        for (int j = 0; j < N_; ++j) {
            if (ub_[j] - lb_[j] <= 0) {
                stat_[j] = VStat::fixed;
                val_[j] = lb_[j];
            } else if (std::isfinite(lb_[j])) {
                stat_[j] = VStat::lower;
                val_[j] = lb_[j];
            } else if (std::isfinite(ub_[j])) {
                stat_[j] = VStat::upper;
                val_[j] = ub_[j];
            } else {
                stat_[j] = VStat::free_nb;
                val_[j] = 0;
            }
        }
        for (int i = 0; i < mrows_; ++i) {
            basis_[i] = n_ + i;
            stat_[n_ + i] = VStat::basic;
        }
    }

    // Start from the final basis of a previous, structurally identical
    // solve. Statuses are re-anchored against the current bounds, so the
    // models may differ in bounds (the branch-and-bound case). Falls back
    // to the cold state when the supplied basis does not fit.
    void apply_warm(const std::vector<char>& ws) {
        if (int(ws.size()) != N_) return;
        std::vector<int> basics;
        basics.reserve(mrows_);
        for (int j = 0; j < N_; ++j)
            if (VStat(ws[j]) == VStat::basic) {
                basics.push_back(j);
                if (int(basics.size()) > mrows_) return;
            }
        if (int(basics.size()) != mrows_) return;
        for (int j = 0; j < N_; ++j) {
            VStat st = VStat(ws[j]);
            if (st == VStat::basic) {
                stat_[j] = VStat::basic;
                val_[j] = 0;  // recomputed from the factorization
                continue;
            }
            if (ub_[j] - lb_[j] <= 0) {
                stat_[j] = std::isfinite(lb_[j]) ? VStat::fixed : VStat::free_nb;
                val_[j] = stat_[j] == VStat::fixed ? lb_[j] : 0;
                continue;
            }
            bool want_upper = st == VStat::upper;
            if (want_upper && std::isfinite(ub_[j])) {
                stat_[j] = VStat::upper;
                val_[j] = ub_[j];
            } else if (!want_upper && st != VStat::free_nb && std::isfinite(lb_[j])) {
                stat_[j] = VStat::lower;
                val_[j] = lb_[j];
            } else if (std::isfinite(lb_[j])) {
                stat_[j] = VStat::lower;
                val_[j] = lb_[j];
            } else if (std::isfinite(ub_[j])) {
                stat_[j] = VStat::upper;
                val_[j] = ub_[j];
            } else {
                stat_[j] = VStat::free_nb;
                val_[j] = 0;
            }
        }
        for (int i = 0; i < mrows_; ++i) basis_[i] = basics[i];
    }

    void init_state() {
        cold_start();
        if (opt_.warm) apply_warm(*opt_.warm);
        p1_done_tol_ = opt_.feas_tol * 0.1;
        min_piv_ = opt_.pivot_tol;
        banned_.assign(N_, 0);
        banned_count_ = 0;
        have_good_ = false;
        repairs_ = 0;
        perturbed_ = false;
        expanded_ = false;
        perturbs_ = 0;
        expansions_ = 0;
        in_phase2_ = false;
    }

    LpSolution solve_unconstrained() {
        LpSolution sol;
        sol.x.assign(n_, 0);
        sol.reduced_costs.assign(n_, 0);
        for (int j = 0; j < n_; ++j) {
            const Variable& v = m_.var(j);
            double x;
            if (v.obj > 0) x = v.lb;
            else if (v.obj < 0) x = v.ub;
            else x = std::isfinite(v.lb) ? v.lb : (std::isfinite(v.ub) ? v.ub : 0.0);
            if (!std::isfinite(x)) {
                sol.status = LpStatus::unbounded;
                return sol;
            }
            sol.x[j] = x;
            sol.reduced_costs[j] = v.obj;
            sol.objective += v.obj * x;
        }
        sol.status = LpStatus::optimal;
        return sol;
    }

    // ---- factorization and solves ---------------------------------------

    bool try_refactor() {
        using Trip = Eigen::Triplet<double>;
        std::vector<Trip> trips;
        for (int i = 0; i < mrows_; ++i) {
            int j = basis_[i];
            if (j >= n_) {
                trips.emplace_back(j - n_, i, 1.0);
            } else {
                for (const auto& [ri, c] : cols_[j]) trips.emplace_back(ri, i, c);
            }
        }
        Eigen::SparseMatrix<double> B(mrows_, mrows_);
        B.setFromTriplets(trips.begin(), trips.end());
        lu_.compute(B);
        if (lu_.info() != Eigen::Success) return false;
        etas_.clear();
        // Remember this basis as a restart point for singularity repair.
        basis_good_ = basis_;
        stat_good_ = stat_;
        val_good_ = val_;
        have_good_ = true;
        return true;
    }

    // A long run of near-zero pivots can drive the working basis numerically
    // singular. Rather than give up, roll back to the last basis that
    // factorized, raise the pivot acceptance floor, and switch to
    // lowest-index pricing so the search leaves the bad trajectory.
    void refactor() {
        if (try_refactor()) return;
        if (!have_good_ || repairs_ >= 8) fail("simplex: basis factorization failed");
        ++repairs_;
        basis_ = basis_good_;
        stat_ = stat_good_;
        val_ = val_good_;
        min_piv_ = std::min(1e-5, min_piv_ * 100.0);
        degen_streak_ = 0;
        bland_ = true;
        clear_bans();
        // Re-perturb with a fresh seed so the restored state explores a
        // different pivot sequence instead of replaying the failing one.
        unperturb_costs();
        perturb_costs(100 + repairs_);
        if (!try_refactor()) fail("simplex: basis factorization failed");
        recompute_basics();
    }

    void clear_bans() {
        if (banned_count_ == 0) return;
        std::fill(banned_.begin(), banned_.end(), 0);
        banned_count_ = 0;
    }

    // Deterministic pseudo-random draw in [0, 1), a pure function of (j,
    // seed) so reruns stay byte-identical.
    static double hash01(int j, int seed) {
        unsigned long long h =
            0x9e3779b97f4a7c15ull * (unsigned long long)(j + 1) +
            0x517cc1b727220a95ull * (unsigned long long)(seed + 1);
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdull;
        h ^= h >> 33;
        return double(h & 0xfffffffull) / double(0x10000000ull);
    }

    // Deterministic cost perturbation: breaks pricing ties sustained by
    // noise in long degenerate stalls. Removed before optimality is
    // declared, so it never leaks into reported results.
    void perturb_costs(int seed) {
        if (perturbed_) return;
        cost_orig_ = cost_;
        for (int j = 0; j < N_; ++j) {
            double xi = 1e-6 * (0.5 + 0.5 * hash01(j, seed)) *
                        (1.0 + std::fabs(cost_[j]));
            if (stat_[j] == VStat::upper) cost_[j] -= xi;
            else cost_[j] += xi;
        }
        perturbed_ = true;
    }

    void unperturb_costs() {
        if (!perturbed_) return;
        cost_ = cost_orig_;
        perturbed_ = false;
    }

    // Bound expansion: the cure for primal degeneracy. Widening every
    // finite bound by a tiny deterministic amount gives each ratio test a
    // strictly positive step, so zero-length pivot cycles cannot persist.
    // The widening is far below the feasibility tolerance and is removed
    // (with values snapped back to the true bounds) before results are
    // reported.
    void expand_bounds(int seed) {
        if (expanded_) return;
        lb_orig_ = lb_;
        ub_orig_ = ub_;
        for (int j = 0; j < N_; ++j) {
            double eta = 1e-8 * (0.5 + 0.5 * hash01(j, seed));
            if (std::isfinite(lb_[j])) lb_[j] -= eta;
            if (std::isfinite(ub_[j])) ub_[j] += eta;
        }
        expanded_ = true;
    }

    void unexpand_bounds() {
        if (!expanded_) return;
        lb_ = lb_orig_;
        ub_ = ub_orig_;
        expanded_ = false;
        for (int j = 0; j < N_; ++j) {
            VStat st = stat_[j];
            if (st == VStat::basic || st == VStat::free_nb) continue;
            val_[j] = st == VStat::upper ? ub_[j] : lb_[j];
            if (lb_[j] == ub_[j]) stat_[j] = VStat::fixed;
        }
        recompute_basics();
    }

    Eigen::VectorXd column_dense(int j) const {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(mrows_);
        if (j >= n_) a[j - n_] = 1.0;
        else
            for (const auto& [i, c] : cols_[j]) a[i] = c;
        return a;
    }

    Eigen::VectorXd ftran(const Eigen::VectorXd& v) const {
        Eigen::VectorXd w = lu_.solve(v);
        for (const Eta& e : etas_) {
            double t = w[e.r];
            if (t == 0.0) continue;
            w[e.r] = e.dr * t;
            for (const auto& [i, d] : e.d) w[i] += d * t;
        }
        return w;
    }

    Eigen::VectorXd btran(const Eigen::VectorXd& v) const {
        Eigen::VectorXd w = v;
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double acc = it->dr * w[it->r];
            for (const auto& [i, d] : it->d) acc += d * w[i];
            w[it->r] = acc;
        }
        return lu_.transpose().solve(w).eval();
    }

    void recompute_basics() {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mrows_);
        for (int i = 0; i < mrows_; ++i) rhs[i] = b_[i];
        for (int j = 0; j < N_; ++j) {
            if (stat_[j] == VStat::basic || val_[j] == 0.0) continue;
            if (j >= n_) rhs[j - n_] -= val_[j];
            else
                for (const auto& [i, c] : cols_[j]) rhs[i] -= c * val_[j];
        }
        Eigen::VectorXd xb = ftran(rhs);
        for (int i = 0; i < mrows_; ++i) val_[basis_[i]] = xb[i];
    }

    double infeasibility() const {
        double s = 0;
        for (int i = 0; i < mrows_; ++i) {
            int j = basis_[i];
            s += std::max(0.0, lb_[j] - val_[j]);
            s += std::max(0.0, val_[j] - ub_[j]);
        }
        return s;
    }

    // ---- pricing ---------------------------------------------------------

    // Returns the entering column (or -1) and sets direction_.
    int price(bool phase2) {
        Eigen::VectorXd cb = Eigen::VectorXd::Zero(mrows_);
        for (int i = 0; i < mrows_; ++i) {
            int j = basis_[i];
            if (phase2) {
                cb[i] = cost_[j];
            } else {
                if (val_[j] < lb_[j] - p1_done_tol_) cb[i] = -1.0;
                else if (val_[j] > ub_[j] + p1_done_tol_) cb[i] = 1.0;
                else cb[i] = 0.0;
            }
        }
        Eigen::VectorXd y = btran(cb);

        int best = -1;
        double best_score = 0;
        int best_dir = 1;
        double tol = phase2 ? opt_.opt_tol : 1e-9;
        for (int j = 0; j < N_; ++j) {
            VStat st = stat_[j];
            if (st == VStat::basic || st == VStat::fixed) continue;
            if (banned_[j]) continue;
            double cj = phase2 ? cost_[j] : 0.0;
            double d;
            if (j >= n_) {
                d = cj - y[j - n_];
            } else {
                double dot = 0;
                for (const auto& [i, c] : cols_[j]) dot += c * y[i];
                d = cj - dot;
            }
            double score = 0;
            int dir = 0;
            if (st == VStat::lower && d < -tol) { score = -d; dir = 1; }
            else if (st == VStat::upper && d > tol) { score = d; dir = -1; }
            else if (st == VStat::free_nb && std::fabs(d) > tol) {
                score = std::fabs(d);
                dir = d > 0 ? -1 : 1;
            }
            if (dir == 0) continue;
            if (bland_) { best = j; best_dir = dir; break; }  // lowest index
            double ns = score * score / pnorm_[j];
            if (ns > best_score) {
                best_score = ns;
                best = j;
                best_dir = dir;
            }
        }
        direction_ = best_dir;
        return best;
    }

    // ---- ratio tests -----------------------------------------------------

    // Phase 1: walk the piecewise-linear infeasibility profile along the
    // edge, passing breakpoints while the slope stays negative. Writes the
    // blocking row into r (or -1 for a bound flip) and the step into theta.
    void ratio_phase1(int q, double sigma, const Eigen::VectorXd& w, int& r, double& theta) {
        struct Bp {
            double th;
            int row;     // -1 = entering bound flip
            double gain;
            char to_bound;  // 'l' or 'u'
        };
        std::vector<Bp> bps;
        double theta_own =
            (std::isfinite(lb_[q]) && std::isfinite(ub_[q])) ? ub_[q] - lb_[q] : kInf;

        for (int i = 0; i < mrows_; ++i) {
            double rho = -sigma * w[i];
            if (std::fabs(rho) < min_piv_) continue;
            int bj = basis_[i];
            double v = val_[bj], lo = lb_[bj], hi = ub_[bj];
            if (v < lo - p1_done_tol_) {
                if (rho > 0) {
                    bps.push_back({(lo - v) / rho, i, rho, 'l'});
                    if (std::isfinite(hi)) bps.push_back({(hi - v) / rho, i, rho, 'u'});
                }
            } else if (v > hi + p1_done_tol_) {
                if (rho < 0) {
                    bps.push_back({(v - hi) / -rho, i, -rho, 'u'});
                    if (std::isfinite(lo)) bps.push_back({(v - lo) / -rho, i, -rho, 'l'});
                }
            } else {
                if (rho > 0 && std::isfinite(hi)) bps.push_back({(hi - v) / rho, i, rho, 'u'});
                if (rho < 0 && std::isfinite(lo)) bps.push_back({(v - lo) / -rho, i, -rho, 'l'});
            }
        }
        std::sort(bps.begin(), bps.end(), [&](const Bp& a, const Bp& b) {
            if (a.th != b.th) return a.th < b.th;
            return basis_[a.row] < basis_[b.row];
        });

        // Initial slope equals the (negative) phase-1 reduced-cost score.
        double slope = 0;
        for (int i = 0; i < mrows_; ++i) {
            double rho = -sigma * w[i];
            int bj = basis_[i];
            if (val_[bj] < lb_[bj] - p1_done_tol_) slope -= rho;
            else if (val_[bj] > ub_[bj] + p1_done_tol_) slope += rho;
        }

        r = -1;
        theta = theta_own;
        int stop = -1;
        for (int k = 0; k < int(bps.size()); ++k) {
            if (bps[k].th >= theta_own) break;  // entering variable flips first
            slope += bps[k].gain;
            if (slope >= -1e-12) {
                stop = k;
                break;
            }
        }
        if (stop < 0) {
            if (!std::isfinite(theta))
                fail("simplex: phase-1 ratio test found no blocking bound");
            return;  // bound flip at theta_own
        }
        // Among breakpoints within a small stretch of the stopping step,
        // leave on the one with the largest pivot magnitude; tiny pivots
        // degrade the basis factorization.
        double window = bps[stop].th + opt_.ratio_tol * (1.0 + bps[stop].th);
        int pick = stop;
        double best = std::fabs(w[bps[stop].row]);
        for (int k = 0; k < int(bps.size()); ++k) {
            if (bps[k].th > window) break;  // sorted ascending
            if (k == stop) continue;
            double piv = std::fabs(w[bps[k].row]);
            if (piv > best) {
                best = piv;
                pick = k;
            }
        }
        r = bps[pick].row;
        theta = std::max(0.0, bps[pick].th);
        leave_to_ = bps[pick].to_bound;
    }

    // Phase 2: two-pass Harris-style test. Returns 1 for unbounded, else 0.
    int ratio_phase2(int q, double sigma, const Eigen::VectorXd& w, int& r, double& theta) {
        double theta_own =
            (std::isfinite(lb_[q]) && std::isfinite(ub_[q])) ? ub_[q] - lb_[q] : kInf;
        double stretch = bland_ ? 0.0 : opt_.ratio_tol;

        double theta_rel = theta_own;
        for (int i = 0; i < mrows_; ++i) {
            double rho = -sigma * w[i];
            if (std::fabs(rho) < min_piv_) continue;
            int bj = basis_[i];
            double cand;
            if (rho > 0) {
                if (!std::isfinite(ub_[bj])) continue;
                cand = (ub_[bj] - val_[bj] + stretch) / rho;
            } else {
                if (!std::isfinite(lb_[bj])) continue;
                cand = (val_[bj] - lb_[bj] + stretch) / -rho;
            }
            theta_rel = std::min(theta_rel, std::max(cand, 0.0));
        }
        if (!std::isfinite(theta_rel)) return 1;  // nothing blocks: unbounded

        // Second pass: among rows whose exact ratio fits under theta_rel,
        // prefer the largest pivot magnitude; break ties by variable index.
        r = -1;
        double best_piv = 0;
        double theta_exact = kInf;
        for (int i = 0; i < mrows_; ++i) {
            double rho = -sigma * w[i];
            if (std::fabs(rho) < min_piv_) continue;
            int bj = basis_[i];
            double cand;
            char tob;
            if (rho > 0) {
                if (!std::isfinite(ub_[bj])) continue;
                cand = (ub_[bj] - val_[bj]) / rho;
                tob = 'u';
            } else {
                if (!std::isfinite(lb_[bj])) continue;
                cand = (val_[bj] - lb_[bj]) / -rho;
                tob = 'l';
            }
            cand = std::max(cand, 0.0);
            if (cand <= theta_rel) {
                double piv = std::fabs(w[i]);
                bool better;
                if (bland_)
                    better = cand < theta_exact - 1e-15 ||
                             (std::fabs(cand - theta_exact) <= 1e-15 &&
                              (r < 0 || basis_[i] < basis_[r]));
                else
                    better = piv > best_piv ||
                             (piv == best_piv && (r < 0 || basis_[i] < basis_[r]));
                if (better) {
                    r = i;
                    best_piv = piv;
                    theta_exact = cand;
                    leave_to_ = tob;
                }
            }
        }
        if (r < 0) {
            if (!std::isfinite(theta_own)) return 1;
            theta = theta_own;  // bound flip
            return 0;
        }
        theta = std::min(theta_exact, theta_own);
        if (theta_own < theta_exact) r = -1;  // flip happens first
        return 0;
    }

    // Moves along the edge; pivots if r >= 0, else flips the entering
    // variable to its opposite bound. Returns whether a pivot happened.
    bool apply_step(int q, double sigma, const Eigen::VectorXd& w, int r, double theta) {
        theta = std::max(theta, 0.0);
        if (theta > 0) {
            for (int i = 0; i < mrows_; ++i) {
                if (w[i] == 0.0) continue;
                val_[basis_[i]] -= sigma * theta * w[i];
            }
        }
        double start = stat_[q] == VStat::upper ? ub_[q]
                     : stat_[q] == VStat::lower ? lb_[q]
                                                : val_[q];
        if (r < 0) {
            // Bound flip (or a free-variable stall, which cannot happen:
            // free entering variables have no finite flip bound).
            val_[q] = start + sigma * theta;
            if (stat_[q] == VStat::lower) {
                stat_[q] = VStat::upper;
                val_[q] = ub_[q];
            } else if (stat_[q] == VStat::upper) {
                stat_[q] = VStat::lower;
                val_[q] = lb_[q];
            }
            note_degeneracy(theta);
            return false;
        }

        int leaving = basis_[r];
        double wr = w[r];
        if (std::fabs(wr) < opt_.pivot_tol)
            fail("simplex: pivot element below tolerance");

        val_[q] = start + sigma * theta;
        val_[leaving] = leave_to_ == 'l' ? lb_[leaving] : ub_[leaving];
        stat_[leaving] = leave_to_ == 'l' ? VStat::lower : VStat::upper;
        if (lb_[leaving] == ub_[leaving]) stat_[leaving] = VStat::fixed;
        stat_[q] = VStat::basic;
        basis_[r] = q;

        Eta e;
        e.r = r;
        e.dr = 1.0 / wr;
        e.d.reserve(8);
        for (int i = 0; i < mrows_; ++i) {
            if (i == r || w[i] == 0.0) continue;
            e.d.emplace_back(i, -w[i] / wr);
        }
        etas_.push_back(std::move(e));
        note_degeneracy(theta);
        return true;
    }

    void note_degeneracy(double theta) {
        if (theta <= 1e-11) {
            if (++degen_streak_ > opt_.bland_after) {
                // Escalating stall defenses: widen the bounds so steps gain
                // positive length, then perturb the costs to break pricing
                // ties, then fall back to lowest-index pricing.
                if (!expanded_ && expansions_ < 4) {
                    ++expansions_;
                    expand_bounds(expansions_);
                    degen_streak_ = 0;
                } else if (in_phase2_ && !perturbed_ && perturbs_ < 4) {
                    ++perturbs_;
                    perturb_costs(perturbs_);
                    degen_streak_ = 0;
                } else {
                    bland_ = true;
                }
            }
        } else {
            degen_streak_ = 0;
            bland_ = false;
        }
    }

    // ---- reporting -------------------------------------------------------

    void extract(LpSolution& sol, bool with_duals) {
        sol.x.assign(n_, 0);
        for (int j = 0; j < n_; ++j) sol.x[j] = val_[j] * colscale_[j];
        sol.y.assign(mrows_, 0);
        sol.reduced_costs.assign(n_, 0);
        if (with_duals) {
            Eigen::VectorXd cb = Eigen::VectorXd::Zero(mrows_);
            for (int i = 0; i < mrows_; ++i) cb[i] = cost_[basis_[i]];
            Eigen::VectorXd y = btran(cb);
            for (int i = 0; i < mrows_; ++i) sol.y[i] = y[i] * rowscale_[i];
            for (int j = 0; j < n_; ++j) {
                if (stat_[j] == VStat::basic) continue;
                double dot = 0;
                for (const auto& [i, c] : cols_[j]) dot += c * y[i];
                sol.reduced_costs[j] = (cost_[j] - dot) / colscale_[j];
            }
        }
        sol.objective = m_.objective_value(sol.x);
        sol.max_violation = m_.max_violation(sol.x);
        sol.col_stat.resize(N_);
        for (int j = 0; j < N_; ++j) sol.col_stat[j] = char(stat_[j]);
    }

    char leave_to_ = 'l';
};

} // namespace simplex_detail

inline LpSolution solve_lp(const ModelInstance& model, const LpOptions& options = {}) {
    if (options.presolve) {
        PresolveResult pr = presolve(model);
        LpSolution out;
        if (pr.infeasible) {
            out.status = LpStatus::infeasible;
            out.x.assign(model.vars().size(), 0);
            out.y.assign(model.rows().size(), 0);
            out.reduced_costs.assign(model.vars().size(), 0);
            return out;
        }
        LpOptions inner = options;
        inner.presolve = false;
        inner.warm = nullptr;  // a full-space basis cannot seed the reduced space
        LpSolution red = solve_lp(pr.reduced, inner);
        out.status = red.status;
        out.iterations = red.iterations;
        out.x.assign(model.vars().size(), 0);
        out.y.assign(model.rows().size(), 0);
        out.reduced_costs.assign(model.vars().size(), 0);
        for (std::size_t j = 0; j < model.vars().size(); ++j)
            out.x[j] = pr.var_map[j] >= 0 ? red.x[pr.var_map[j]] : pr.fixed_val[j];
        for (std::size_t i = 0; i < model.rows().size(); ++i)
            if (pr.row_map[i] >= 0) out.y[i] = red.y[pr.row_map[i]];
        // Reduced costs recomputed against the original matrix; rows that
        // were eliminated by the reductions carry zero duals.
        for (std::size_t j = 0; j < model.vars().size(); ++j)
            out.reduced_costs[j] = model.var(int(j)).obj;
        for (std::size_t i = 0; i < model.rows().size(); ++i) {
            if (out.y[i] == 0.0) continue;
            for (const auto& [j, c] : model.row(int(i)).coeffs)
                out.reduced_costs[j] -= c * out.y[i];
        }
        out.objective = model.objective_value(out.x);
        out.max_violation = model.max_violation(out.x);
        return out;
    }
    simplex_detail::Solver s(model, options);
    return s.run();
}

// Strong-duality dual objective for the bounded-variable form:
// b'y + sum_{d_j > 0} d_j l_j + sum_{d_j < 0} d_j u_j.
inline double dual_objective(const ModelInstance& model, const LpSolution& sol,
                             double dual_tol = 0.0) {
    double obj = 0;
    for (std::size_t i = 0; i < model.rows().size(); ++i) obj += model.row(int(i)).rhs * sol.y[i];
    for (std::size_t j = 0; j < model.vars().size(); ++j) {
        double d = sol.reduced_costs[j];
        const Variable& v = model.var(int(j));
        if (d > dual_tol && std::isfinite(v.lb)) obj += d * v.lb;
        else if (d < -dual_tol && std::isfinite(v.ub)) obj += d * v.ub;
    }
    return obj;
}

} // namespace h2sc
