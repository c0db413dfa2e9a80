#pragma once

// Branch-and-bound for mixed-binary programs over the LP engine.
// Best-bound node selection (ties: deeper node, then lower node id),
// most-fractional branching (ties: lowest variable index), and a
// round-up rounding heuristic at the root. The instance is presolved once
// (fixed-variable substitution and row reductions are integrality-safe);
// every node re-derives its LP from the presolved instance plus its own
// fixings, so bound reductions never leak between siblings, and each node
// is warm-started from the most recently solved basis.

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "h2sc/model.hpp"
#include "h2sc/simplex.hpp"

namespace h2sc {

enum class MipStatus { optimal, infeasible, unbounded, node_limit };

inline const char* to_string(MipStatus s) {
    switch (s) {
        case MipStatus::optimal: return "optimal";
        case MipStatus::infeasible: return "infeasible";
        case MipStatus::unbounded: return "unbounded";
        default: return "node_limit";
    }
}

struct MipOptions {
    double int_tol = 1e-6;
    double gap_tol = 1e-6;
    long node_limit = 200000;
    LpOptions lp;
};

struct MipSolution {
    MipStatus status = MipStatus::node_limit;
    std::vector<double> x;
    double objective = 0;
    double best_bound = -kInf;
    double gap = kInf;
    long nodes = 0;
    long lp_iterations = 0;
};

namespace bb_detail {

struct Node {
    double bound = -kInf;  // parent LP objective: valid lower bound
    int depth = 0;
    long id = 0;
    std::vector<std::pair<int, double>> fixings;  // (binary var index, 0 or 1)
};

struct NodeOrder {
    // std::priority_queue pops the *largest*; invert to pop the best bound.
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        if (a.depth != b.depth) return a.depth < b.depth;  // deeper first
        return a.id > b.id;                                // older first
    }
};

inline LpSolution solve_node(const ModelInstance& base,
                             const std::vector<std::pair<int, double>>& fixings,
                             const LpOptions& lp_opt, long& lp_iters,
                             std::vector<char>& warm) {
    ModelInstance node_model = base;
    for (const auto& [j, v] : fixings) node_model.fix_var(j, v);
    LpOptions o = lp_opt;
    o.presolve = false;
    o.warm = warm.empty() ? nullptr : &warm;
    LpSolution s = solve_lp(node_model, o);
    lp_iters += s.iterations;
    if (s.status == LpStatus::optimal && !s.col_stat.empty()) warm = s.col_stat;
    return s;
}

inline int pick_branch_var(const std::vector<int>& binaries, const std::vector<double>& x,
                           double int_tol) {
    int best = -1;
    double best_frac = int_tol;
    for (int j : binaries) {
        double f = x[j] - std::floor(x[j]);
        double dist = std::min(f, 1.0 - f);  // distance to the nearest integer
        if (dist > best_frac + 1e-15) {
            best_frac = dist;
            best = j;
        }
    }
    return best;
}

} // namespace bb_detail

inline MipSolution solve_mip(const ModelInstance& model, const MipOptions& options = {}) {
    using bb_detail::Node;

    MipSolution out;
    long lp_iters = 0;

    // One integrality-safe presolve up front; the whole search runs in the
    // reduced space and results are mapped back on exit.
    PresolveResult pr = presolve(model);
    if (pr.infeasible) {
        out.status = MipStatus::infeasible;
        return out;
    }
    const ModelInstance& M = pr.reduced;
    auto to_full = [&](const std::vector<double>& rx) {
        std::vector<double> full(model.vars().size(), 0.0);
        for (std::size_t j = 0; j < full.size(); ++j)
            full[j] = pr.var_map[j] >= 0 ? rx[pr.var_map[j]] : pr.fixed_val[j];
        return full;
    };

    std::vector<int> binaries;
    for (std::size_t j = 0; j < M.vars().size(); ++j)
        if (M.var(int(j)).is_binary) binaries.push_back(int(j));

    // Basis of the most recent optimal node solve, seeding the next one.
    std::vector<char> warm;

    // Root relaxation.
    Node root;
    LpSolution root_lp = bb_detail::solve_node(M, root.fixings, options.lp, lp_iters, warm);
    out.nodes = 1;
    if (root_lp.status == LpStatus::infeasible) {
        out.status = MipStatus::infeasible;
        out.lp_iterations = lp_iters;
        return out;
    }
    if (root_lp.status == LpStatus::unbounded) {
        out.status = MipStatus::unbounded;
        out.lp_iterations = lp_iters;
        return out;
    }
    if (root_lp.status != LpStatus::optimal)
        fail("branch and bound: root relaxation hit the iteration limit");

    bool have_incumbent = false;
    double inc_obj = kInf;
    std::vector<double> inc_x;

    auto is_integral = [&](const std::vector<double>& x) {
        for (int j : binaries) {
            double f = x[j] - std::floor(x[j]);
            if (std::min(f, 1.0 - f) > options.int_tol) return false;
        }
        return true;
    };
    auto accept = [&](const std::vector<double>& x, double obj) {
        if (!have_incumbent || obj < inc_obj) {
            have_incumbent = true;
            inc_obj = obj;
            inc_x = x;
            for (int j : binaries) inc_x[j] = std::round(inc_x[j]);
        }
    };

    if (is_integral(root_lp.x)) {
        accept(root_lp.x, root_lp.objective);
        out.status = MipStatus::optimal;
        out.x = to_full(inc_x);
        out.objective = inc_obj + pr.obj_offset;
        out.best_bound = root_lp.objective + pr.obj_offset;
        out.gap = 0;
        out.lp_iterations = lp_iters;
        return out;
    }

    // Rounding heuristic: push every fractional binary up to 1 (values at
    // ~0 stay 0), resolve, and keep the result if it lands integral.
    {
        Node h;
        for (int j : binaries) {
            double v = root_lp.x[j];
            double up = v > options.int_tol ? 1.0 : 0.0;
            h.fixings.emplace_back(j, up);
        }
        LpSolution hs = bb_detail::solve_node(M, h.fixings, options.lp, lp_iters, warm);
        if (hs.status == LpStatus::optimal && is_integral(hs.x)) accept(hs.x, hs.objective);
        if (!have_incumbent) {
            // Nearest-integer fallback.
            Node h2;
            for (int j : binaries)
                h2.fixings.emplace_back(j, root_lp.x[j] >= 0.5 ? 1.0 : 0.0);
            LpSolution h2s = bb_detail::solve_node(M, h2.fixings, options.lp, lp_iters, warm);
            if (h2s.status == LpStatus::optimal && is_integral(h2s.x))
                accept(h2s.x, h2s.objective);
        }
    }

    std::priority_queue<Node, std::vector<Node>, bb_detail::NodeOrder> open;
    long next_id = 1;

    auto push_children = [&](const Node& parent, double parent_obj, int branch_var) {
        for (double v : {0.0, 1.0}) {
            Node child;
            child.bound = parent_obj;
            child.depth = parent.depth + 1;
            child.id = next_id++;
            child.fixings = parent.fixings;
            child.fixings.emplace_back(branch_var, v);
            open.push(child);
        }
    };

    int root_branch = bb_detail::pick_branch_var(binaries, root_lp.x, options.int_tol);
    push_children(root, root_lp.objective, root_branch);

    double rel_gap = kInf;
    auto update_gap = [&]() {
        double bound = open.empty() ? (have_incumbent ? inc_obj : -kInf) : open.top().bound;
        out.best_bound = bound;
        if (have_incumbent)
            rel_gap = (inc_obj - bound) / std::max(1.0, std::fabs(inc_obj));
        else
            rel_gap = kInf;
    };

    bool hit_limit = false;
    while (!open.empty()) {
        update_gap();
        if (have_incumbent && rel_gap <= options.gap_tol) break;
        if (out.nodes >= options.node_limit) {
            hit_limit = true;
            break;
        }
        Node node = open.top();
        open.pop();
        if (have_incumbent &&
            node.bound >= inc_obj - options.gap_tol * std::max(1.0, std::fabs(inc_obj)))
            continue;  // cannot improve

        LpSolution lp = bb_detail::solve_node(M, node.fixings, options.lp, lp_iters, warm);
        ++out.nodes;
        if (lp.status == LpStatus::infeasible) continue;
        if (lp.status != LpStatus::optimal)
            fail("branch and bound: node relaxation hit the iteration limit");
        if (have_incumbent &&
            lp.objective >= inc_obj - options.gap_tol * std::max(1.0, std::fabs(inc_obj)))
            continue;

        if (is_integral(lp.x)) {
            accept(lp.x, lp.objective);
            continue;
        }
        int bv = bb_detail::pick_branch_var(binaries, lp.x, options.int_tol);
        if (bv < 0) {  // numerically integral after all
            accept(lp.x, lp.objective);
            continue;
        }
        push_children(node, lp.objective, bv);
    }

    update_gap();
    out.lp_iterations = lp_iters;
    if (have_incumbent) {
        out.x = to_full(inc_x);
        out.objective = inc_obj + pr.obj_offset;
        out.gap = std::max(0.0, rel_gap);
        if (open.empty() || rel_gap <= options.gap_tol) {
            out.status = MipStatus::optimal;
            if (open.empty()) out.best_bound = inc_obj;
            out.gap = std::max(0.0, std::min(out.gap, rel_gap));
        } else {
            out.status = MipStatus::node_limit;
        }
        out.best_bound += pr.obj_offset;
        return out;
    }
    out.status = hit_limit ? MipStatus::node_limit : MipStatus::infeasible;
    out.best_bound += pr.obj_offset;
    return out;
}

} // namespace h2sc
