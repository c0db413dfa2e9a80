#pragma once

// Sparse MILP container: variables with bounds/objective/binary markers,
// constraint rows, and a name index. Ordering is construction order and is
// deterministic by contract; every consumer (solver, MPS writer, reports)
// relies on it.

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "h2sc/common.hpp"

namespace h2sc {

enum class Stage { first, second };
enum class Sense : char { le = 'L', eq = 'E', ge = 'G' };

struct Variable {
    std::string name;
    double lb = 0;
    double ub = kInf;
    double obj = 0;
    bool is_binary = false;
    Stage stage = Stage::first;
};

struct Row {
    std::string name;
    std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
    Sense sense = Sense::le;
    double rhs = 0;
    double range = 0;  // 0 = plain row; else MPS RANGES semantics
};

struct ModelStats {
    std::size_t variables = 0;
    std::size_t rows = 0;
    std::size_t nonzeros = 0;
    std::size_t binaries = 0;
};

class ModelInstance {
public:
    std::string name = "model";

    int add_var(const std::string& name, double lb, double ub, double obj,
                Stage stage, bool is_binary = false) {
        if (index_.count(name)) fail("duplicate variable name: " + name);
        if (lb > ub) fail("variable " + name + " has lb > ub");
        if (is_binary && (lb < 0 || ub > 1))
            fail("binary variable " + name + " must have bounds within [0,1]");
        Variable v{name, lb, ub, obj, is_binary, stage};
        vars_.push_back(std::move(v));
        int id = int(vars_.size()) - 1;
        index_.emplace(vars_.back().name, id);
        return id;
    }

    int add_row(const std::string& name, std::vector<std::pair<int, double>> coeffs,
                Sense sense, double rhs) {
        if (row_index_.count(name)) fail("duplicate row name: " + name);
        for (const auto& [j, c] : coeffs) {
            if (j < 0 || j >= int(vars_.size()))
                fail("row " + name + " references an invalid variable");
            (void)c;
        }
        Row r{name, std::move(coeffs), sense, rhs, 0.0};
        rows_.push_back(std::move(r));
        int id = int(rows_.size()) - 1;
        row_index_.emplace(rows_.back().name, id);
        return id;
    }

    int var_id(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) fail("unknown variable: " + name);
        return it->second;
    }
    bool has_var(const std::string& name) const { return index_.count(name) != 0; }

    const std::vector<Variable>& vars() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    Variable& var(int j) { return vars_[j]; }
    const Variable& var(int j) const { return vars_[j]; }
    const Row& row(int i) const { return rows_[i]; }
    Row& row_mut(int i) { return rows_[i]; }

    void set_objective(int j, double coeff) { vars_[j].obj = coeff; }
    void add_objective(int j, double coeff) { vars_[j].obj += coeff; }

    // Fixing by bound collapse; used for technology restrictions.
    void fix_var(int j, double value) {
        vars_[j].lb = value;
        vars_[j].ub = value;
    }

    ModelStats stats() const {
        ModelStats s;
        s.variables = vars_.size();
        s.rows = rows_.size();
        for (const auto& r : rows_) s.nonzeros += r.coeffs.size();
        for (const auto& v : vars_)
            if (v.is_binary) ++s.binaries;
        return s;
    }

    // Row activity and violation against sense/rhs at a point x.
    double row_activity(int i, const std::vector<double>& x) const {
        double a = 0;
        for (const auto& [j, c] : rows_[i].coeffs) a += c * x[j];
        return a;
    }
    double row_violation(int i, const std::vector<double>& x) const {
        double a = row_activity(i, x);
        const Row& r = rows_[i];
        switch (r.sense) {
            case Sense::le: return std::max(0.0, a - r.rhs);
            case Sense::ge: return std::max(0.0, r.rhs - a);
            default: return std::fabs(a - r.rhs);
        }
    }
    // Largest row violation plus bound violation at x.
    double max_violation(const std::vector<double>& x) const {
        double m = 0;
        for (std::size_t j = 0; j < vars_.size(); ++j) {
            m = std::max(m, vars_[j].lb - x[j]);
            m = std::max(m, x[j] - vars_[j].ub);
        }
        for (std::size_t i = 0; i < rows_.size(); ++i)
            m = std::max(m, row_violation(int(i), x));
        return m;
    }
    double objective_value(const std::vector<double>& x) const {
        double o = 0;
        for (std::size_t j = 0; j < vars_.size(); ++j) o += vars_[j].obj * x[j];
        return o;
    }

    // Human-readable row listing for debugging.
    std::string describe_rows(std::size_t limit = 50) const {
        std::string out;
        for (std::size_t i = 0; i < rows_.size() && i < limit; ++i) {
            const Row& r = rows_[i];
            out += r.name + ": ";
            for (const auto& [j, c] : r.coeffs)
                out += (c >= 0 ? "+" : "") + fmt_double(c) + "*" + vars_[j].name + " ";
            out += r.sense == Sense::le ? "<= " : r.sense == Sense::ge ? ">= " : "= ";
            out += fmt_double(r.rhs) + "\n";
        }
        return out;
    }

private:
    std::vector<Variable> vars_;
    std::vector<Row> rows_;
    std::unordered_map<std::string, int> index_;
    std::unordered_map<std::string, int> row_index_;
};

// Canonical variable-name rendering; injective over (base, scenario, t).
inline std::string var_key(const std::string& base) { return base; }
inline std::string var_key(const std::string& base, int s, int t) {
    return base + "[s" + std::to_string(s) + "][t" + std::to_string(t) + "]";
}
inline std::string var_key_k(const std::string& base, int k) {
    return base + "[k" + std::to_string(k) + "]";
}
inline std::string row_key(const std::string& base, int s, int t) {
    return base + "[s" + std::to_string(s) + "][t" + std::to_string(t) + "]";
}

} // namespace h2sc
