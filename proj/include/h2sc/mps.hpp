#pragma once

// Free-format MPS export and a strict reader. The writer emits every
// variable's objective entry (even zero) so each column materializes in
// COLUMNS; numbers use shortest round-tripping decimal form so that
// write -> read -> write reproduces the file byte for byte.

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "h2sc/model.hpp"

namespace h2sc {

inline std::string write_mps(const ModelInstance& m, const std::string& name = "H2SC") {
    std::ostringstream os;
    os << "NAME " << name << "\n";
    os << "ROWS\n";
    os << " N COST\n";
    for (const Row& r : m.rows()) os << ' ' << char(r.sense) << ' ' << r.name << "\n";

    // Column-major view of the row-major storage.
    std::vector<std::vector<std::pair<int, double>>> cols(m.vars().size());
    for (std::size_t i = 0; i < m.rows().size(); ++i)
        for (const auto& [j, c] : m.row(int(i)).coeffs) cols[j].emplace_back(int(i), c);

    os << "COLUMNS\n";
    bool in_int = false;
    int marker_no = 0;
    for (std::size_t j = 0; j < m.vars().size(); ++j) {
        const Variable& v = m.var(int(j));
        if (v.is_binary != in_int) {
            os << "    M" << marker_no++ << " 'MARKER' " << (v.is_binary ? "'INTORG'" : "'INTEND'")
               << "\n";
            in_int = v.is_binary;
        }
        os << "    " << v.name << " COST " << fmt_double(v.obj) << "\n";
        for (const auto& [i, c] : cols[j])
            os << "    " << v.name << ' ' << m.row(i).name << ' ' << fmt_double(c) << "\n";
    }
    if (in_int) os << "    M" << marker_no++ << " 'MARKER' 'INTEND'\n";

    os << "RHS\n";
    for (const Row& r : m.rows())
        if (r.rhs != 0.0) os << "    RHS " << r.name << ' ' << fmt_double(r.rhs) << "\n";

    bool any_range = false;
    for (const Row& r : m.rows())
        if (r.range != 0.0) any_range = true;
    if (any_range) {
        os << "RANGES\n";
        for (const Row& r : m.rows())
            if (r.range != 0.0) os << "    RNG " << r.name << ' ' << fmt_double(r.range) << "\n";
    }

    os << "BOUNDS\n";
    for (const Variable& v : m.vars()) {
        if (v.lb == v.ub) {
            os << " FX BND " << v.name << ' ' << fmt_double(v.lb) << "\n";
        } else if (v.is_binary && v.lb == 0.0 && v.ub == 1.0) {
            os << " BV BND " << v.name << "\n";
        } else if (v.lb == -kInf && v.ub == kInf) {
            os << " FR BND " << v.name << "\n";
        } else {
            if (v.lb == -kInf) os << " MI BND " << v.name << "\n";
            else if (v.lb != 0.0) os << " LO BND " << v.name << ' ' << fmt_double(v.lb) << "\n";
            if (v.ub != kInf) os << " UP BND " << v.name << ' ' << fmt_double(v.ub) << "\n";
        }
    }
    os << "ENDATA\n";
    return os.str();
}

namespace mps_detail {

inline std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

inline double parse_num(const std::string& s, int lineno) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        fail("mps line " + std::to_string(lineno) + ": bad number '" + s + "'");
    return v;
}

} // namespace mps_detail

// Strict reader for the dialect written by write_mps (free-format MPS with
// one coefficient pair or two per data line).
inline ModelInstance read_mps(const std::string& text) {
    using mps_detail::parse_num;
    using mps_detail::tokens;

    enum class Section { none, rows, columns, rhs, ranges, bounds, done };
    Section sec = Section::none;

    struct ColInfo {
        bool integer = false;
        double obj = 0;
        bool saw_obj = false;
        std::vector<std::pair<std::string, double>> entries;
        double lb = 0, ub = kInf;
        bool saw_lb = false, saw_ub = false, is_bv = false, is_fx = false;
        double fx_val = 0;
    };
    std::string obj_row;
    std::vector<std::pair<std::string, char>> row_order;  // name, sense
    std::unordered_map<std::string, std::size_t> row_ix;
    std::vector<std::string> col_order;
    std::unordered_map<std::string, ColInfo> cols;
    std::unordered_map<std::string, double> rhs_map, range_map;
    std::string model_name = "H2SC";
    bool in_int = false;
    bool saw_endata = false;

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '*') continue;
        std::vector<std::string> tk = tokens(line);
        if (tk.empty()) continue;

        if (!std::isspace(static_cast<unsigned char>(line[0]))) {
            const std::string& kw = tk[0];
            if (kw == "NAME") {
                if (tk.size() > 1) model_name = tk[1];
            } else if (kw == "ROWS") sec = Section::rows;
            else if (kw == "COLUMNS") sec = Section::columns;
            else if (kw == "RHS") sec = Section::rhs;
            else if (kw == "RANGES") sec = Section::ranges;
            else if (kw == "BOUNDS") sec = Section::bounds;
            else if (kw == "ENDATA") { sec = Section::done; saw_endata = true; }
            else fail("mps line " + std::to_string(lineno) + ": unknown section '" + kw + "'");
            continue;
        }

        switch (sec) {
            case Section::rows: {
                if (tk.size() != 2)
                    fail("mps line " + std::to_string(lineno) + ": ROWS entry needs 2 fields");
                char t = char(std::toupper(static_cast<unsigned char>(tk[0][0])));
                if (tk[0].size() != 1 || (t != 'N' && t != 'L' && t != 'G' && t != 'E'))
                    fail("mps line " + std::to_string(lineno) + ": bad row type '" + tk[0] + "'");
                if (t == 'N') {
                    if (!obj_row.empty())
                        fail("mps line " + std::to_string(lineno) + ": multiple objective rows");
                    obj_row = tk[1];
                } else {
                    if (row_ix.count(tk[1]))
                        fail("mps line " + std::to_string(lineno) + ": duplicate row '" + tk[1] +
                             "'");
                    row_ix[tk[1]] = row_order.size();
                    row_order.emplace_back(tk[1], t);
                }
                break;
            }
            case Section::columns: {
                if (tk.size() == 3 && tk[1] == "'MARKER'") {
                    if (tk[2] == "'INTORG'") in_int = true;
                    else if (tk[2] == "'INTEND'") in_int = false;
                    else
                        fail("mps line " + std::to_string(lineno) + ": bad marker '" + tk[2] +
                             "'");
                    break;
                }
                if (tk.size() != 3 && tk.size() != 5)
                    fail("mps line " + std::to_string(lineno) +
                         ": COLUMNS entry needs 3 or 5 fields");
                auto it = cols.find(tk[0]);
                if (it == cols.end()) {
                    col_order.push_back(tk[0]);
                    it = cols.emplace(tk[0], ColInfo{}).first;
                    it->second.integer = in_int;
                }
                for (std::size_t f = 1; f + 1 < tk.size(); f += 2) {
                    const std::string& rname = tk[f];
                    double val = parse_num(tk[f + 1], lineno);
                    if (rname == obj_row) {
                        if (it->second.saw_obj)
                            fail("mps line " + std::to_string(lineno) +
                                 ": duplicate objective entry for '" + tk[0] + "'");
                        it->second.obj = val;
                        it->second.saw_obj = true;
                    } else {
                        if (!row_ix.count(rname))
                            fail("mps line " + std::to_string(lineno) + ": unknown row '" +
                                 rname + "'");
                        for (const auto& e : it->second.entries)
                            if (e.first == rname)
                                fail("mps line " + std::to_string(lineno) +
                                     ": duplicate coefficient for '" + tk[0] + "' in '" + rname +
                                     "'");
                        it->second.entries.emplace_back(rname, val);
                    }
                }
                break;
            }
            case Section::rhs:
            case Section::ranges: {
                if (tk.size() != 3 && tk.size() != 5)
                    fail("mps line " + std::to_string(lineno) + ": entry needs 3 or 5 fields");
                auto& dest = sec == Section::rhs ? rhs_map : range_map;
                for (std::size_t f = 1; f + 1 < tk.size(); f += 2) {
                    if (!row_ix.count(tk[f]))
                        fail("mps line " + std::to_string(lineno) + ": unknown row '" + tk[f] +
                             "'");
                    if (dest.count(tk[f]))
                        fail("mps line " + std::to_string(lineno) + ": duplicate entry for '" +
                             tk[f] + "'");
                    dest[tk[f]] = parse_num(tk[f + 1], lineno);
                }
                break;
            }
            case Section::bounds: {
                if (tk.size() < 3)
                    fail("mps line " + std::to_string(lineno) + ": BOUNDS entry needs 3+ fields");
                const std::string& code = tk[0];
                const std::string& cname = tk[2];
                auto it = cols.find(cname);
                if (it == cols.end())
                    fail("mps line " + std::to_string(lineno) + ": unknown column '" + cname +
                         "'");
                ColInfo& ci = it->second;
                auto need_val = [&]() -> double {
                    if (tk.size() < 4)
                        fail("mps line " + std::to_string(lineno) + ": bound needs a value");
                    return parse_num(tk[3], lineno);
                };
                if (code == "LO" || code == "LI") { ci.lb = need_val(); ci.saw_lb = true; }
                else if (code == "UP" || code == "UI") { ci.ub = need_val(); ci.saw_ub = true; }
                else if (code == "FX") { ci.is_fx = true; ci.fx_val = need_val(); }
                else if (code == "FR") { ci.lb = -kInf; ci.ub = kInf; ci.saw_lb = ci.saw_ub = true; }
                else if (code == "MI") { ci.lb = -kInf; ci.saw_lb = true; }
                else if (code == "PL") { ci.ub = kInf; ci.saw_ub = true; }
                else if (code == "BV") { ci.is_bv = true; }
                else
                    fail("mps line " + std::to_string(lineno) + ": unknown bound code '" + code +
                         "'");
                break;
            }
            case Section::none:
                fail("mps line " + std::to_string(lineno) + ": data before any section");
            case Section::done:
                fail("mps line " + std::to_string(lineno) + ": data after ENDATA");
        }
    }
    if (!saw_endata) fail("mps: missing ENDATA");
    if (obj_row.empty()) fail("mps: missing objective row");

    ModelInstance m;
    m.name = model_name;
    for (const std::string& cn : col_order) {
        ColInfo& ci = cols[cn];
        double lb = ci.lb, ub = ci.ub;
        bool binary = false;
        if (ci.is_fx) { lb = ub = ci.fx_val; }
        if (ci.is_bv) { lb = 0; ub = 1; }
        if (ci.integer || ci.is_bv) {
            if (lb < -1e-12 || ub > 1 + 1e-12)
                fail("mps: integer column '" + cn + "' has non-binary bounds");
            binary = true;
            if (!ci.is_fx && !ci.saw_ub && !ci.is_bv) ub = 1;  // integer default range
        }
        m.add_var(cn, lb, ub, ci.obj, Stage::first, binary);
    }
    std::vector<std::vector<std::pair<int, double>>> row_coeffs(row_order.size());
    for (std::size_t j = 0; j < col_order.size(); ++j) {
        const ColInfo& ci = cols[col_order[j]];
        for (const auto& [en, ev] : ci.entries) row_coeffs[row_ix[en]].emplace_back(int(j), ev);
    }
    for (std::size_t i = 0; i < row_order.size(); ++i) {
        const auto& [rname, sense_ch] = row_order[i];
        Sense s = sense_ch == 'L' ? Sense::le : sense_ch == 'G' ? Sense::ge : Sense::eq;
        double rhs = 0, rng = 0;
        if (auto it = rhs_map.find(rname); it != rhs_map.end()) rhs = it->second;
        if (auto it = range_map.find(rname); it != range_map.end()) rng = it->second;
        int id = m.add_row(rname, std::move(row_coeffs[i]), s, rhs);
        m.row_mut(id).range = rng;
    }
    return m;
}

} // namespace h2sc
