#pragma once

// Cheap reductions applied before the simplex in the MIP / case-runner
// path: fixed-variable substitution, empty-row elimination, and
// singleton-row bound tightening, iterated to a fixpoint. Technology
// restrictions fix most capacities to zero, so these cascades collapse
// restricted instances dramatically. Duals of eliminated rows are reported
// as zero in the postsolved solution.

#include <string>
#include <vector>

#include "h2sc/model.hpp"

namespace h2sc {

struct PresolveResult {
    ModelInstance reduced;
    std::vector<int> var_map;       // original var -> reduced index, or -1 if eliminated
    std::vector<double> fixed_val;  // value of eliminated variables
    std::vector<int> row_map;       // original row -> reduced index, or -1 if dropped
    double obj_offset = 0;
    bool infeasible = false;
    std::string reason;
};

inline PresolveResult presolve(const ModelInstance& m, double fix_tol = 1e-9,
                               double feas_tol = 1e-7) {
    const std::size_t n = m.vars().size();
    const std::size_t mm = m.rows().size();

    std::vector<double> lb(n), ub(n);
    for (std::size_t j = 0; j < n; ++j) {
        lb[j] = m.var(int(j)).lb;
        ub[j] = m.var(int(j)).ub;
    }
    std::vector<char> var_fixed(n, 0);
    std::vector<double> fixed_val(n, 0);
    std::vector<char> row_active(mm, 1);
    std::vector<std::vector<std::pair<int, double>>> coeffs(mm);
    std::vector<double> rhs(mm);
    for (std::size_t i = 0; i < mm; ++i) {
        coeffs[i] = m.row(int(i)).coeffs;
        rhs[i] = m.row(int(i)).rhs;
    }

    PresolveResult out;
    auto declare_infeasible = [&](const std::string& why) {
        out.infeasible = true;
        out.reason = why;
    };

    bool changed = true;
    int guard = 0;
    while (changed && !out.infeasible && ++guard < 200) {
        changed = false;

        // Fix variables whose bounds have collapsed.
        for (std::size_t j = 0; j < n; ++j) {
            if (var_fixed[j]) continue;
            if (lb[j] > ub[j] + feas_tol) {
                declare_infeasible("variable " + m.var(int(j)).name + " has lb > ub");
                break;
            }
            if (ub[j] - lb[j] <= fix_tol && std::isfinite(lb[j])) {
                var_fixed[j] = 1;
                fixed_val[j] = 0.5 * (lb[j] + ub[j]);
                changed = true;
            }
        }
        if (out.infeasible) break;

        for (std::size_t i = 0; i < mm; ++i) {
            if (!row_active[i]) continue;
            // Substitute fixed variables into the row.
            std::vector<std::pair<int, double>> keep;
            keep.reserve(coeffs[i].size());
            for (const auto& [j, c] : coeffs[i]) {
                if (var_fixed[j]) {
                    rhs[i] -= c * fixed_val[j];
                    changed = true;
                } else {
                    keep.emplace_back(j, c);
                }
            }
            coeffs[i] = std::move(keep);

            const Sense sense = m.row(int(i)).sense;
            if (coeffs[i].empty()) {
                bool ok = sense == Sense::le   ? rhs[i] >= -feas_tol
                          : sense == Sense::ge ? rhs[i] <= feas_tol
                                               : std::fabs(rhs[i]) <= feas_tol;
                if (!ok) {
                    declare_infeasible("row " + m.row(int(i)).name +
                                       " is unsatisfiable after substitution");
                    break;
                }
                row_active[i] = 0;
                changed = true;
                continue;
            }
            if (coeffs[i].size() == 1) {
                auto [j, a] = coeffs[i][0];
                if (std::fabs(a) < 1e-12) continue;
                double v = rhs[i] / a;
                bool upper_bound = (sense == Sense::le) == (a > 0);
                if (sense == Sense::eq) {
                    lb[j] = std::max(lb[j], v);
                    ub[j] = std::min(ub[j], v);
                } else if (upper_bound) {
                    ub[j] = std::min(ub[j], v);
                } else {
                    lb[j] = std::max(lb[j], v);
                }
                if (lb[j] > ub[j] + feas_tol) {
                    declare_infeasible("row " + m.row(int(i)).name +
                                       " forces empty bounds on " + m.var(j).name);
                    break;
                }
                row_active[i] = 0;
                changed = true;
            }
        }
    }

    out.var_map.assign(n, -1);
    out.fixed_val = fixed_val;
    out.row_map.assign(mm, -1);
    if (out.infeasible) return out;

    for (std::size_t j = 0; j < n; ++j)
        if (var_fixed[j]) out.obj_offset += m.var(int(j)).obj * fixed_val[j];

    out.reduced.name = m.name + "+presolved";
    for (std::size_t j = 0; j < n; ++j) {
        if (var_fixed[j]) continue;
        const Variable& v = m.var(int(j));
        out.var_map[j] = out.reduced.add_var(v.name, lb[j], ub[j], v.obj, v.stage, v.is_binary);
    }
    for (std::size_t i = 0; i < mm; ++i) {
        if (!row_active[i]) continue;
        std::vector<std::pair<int, double>> mapped;
        mapped.reserve(coeffs[i].size());
        for (const auto& [j, c] : coeffs[i]) mapped.emplace_back(out.var_map[j], c);
        out.row_map[i] =
            out.reduced.add_row(m.row(int(i)).name, std::move(mapped), m.row(int(i)).sense, rhs[i]);
    }
    return out;
}

} // namespace h2sc
