#pragma once

// Plain-text solution exchange for the export workflow: one "name value"
// pair per line. Unknown names and duplicates are hard errors; variables
// absent from the file default to zero and are reported as warnings.

#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "h2sc/model.hpp"

namespace h2sc {

struct ImportedSolution {
    std::vector<double> x;
    std::vector<std::string> warnings;  // variables that defaulted to zero
};

inline std::string write_solution(const ModelInstance& m, const std::vector<double>& x) {
    if (x.size() != m.vars().size()) fail("solution write: length mismatch");
    std::ostringstream os;
    for (std::size_t j = 0; j < x.size(); ++j)
        os << m.var(int(j)).name << ' ' << fmt_double(x[j]) << "\n";
    return os.str();
}

inline ImportedSolution read_solution(const ModelInstance& m, const std::string& text) {
    ImportedSolution out;
    out.x.assign(m.vars().size(), 0.0);
    std::vector<char> seen(m.vars().size(), 0);

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string name, val, extra;
        if (!(ls >> name >> val))
            fail("solution line " + std::to_string(lineno) + ": expected 'name value'");
        if (ls >> extra)
            fail("solution line " + std::to_string(lineno) + ": trailing text '" + extra + "'");
        if (!m.has_var(name))
            fail("solution line " + std::to_string(lineno) + ": unknown variable '" + name + "'");
        int j = m.var_id(name);
        if (seen[j])
            fail("solution line " + std::to_string(lineno) + ": duplicate variable '" + name +
                 "'");
        seen[j] = 1;
        char* end = nullptr;
        double v = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0')
            fail("solution line " + std::to_string(lineno) + ": bad number '" + val + "'");
        out.x[j] = v;
    }
    for (std::size_t j = 0; j < seen.size(); ++j)
        if (!seen[j]) out.warnings.push_back(m.var(int(j)).name);
    return out;
}

} // namespace h2sc
