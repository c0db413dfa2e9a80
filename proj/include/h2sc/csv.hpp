#pragma once

// Weather and demand-shape CSV ingestion. Formats:
//   weather: header "timestamp,ghi_w_m2,temp_c", hourly rows, ISO timestamps
//            ("2019-01-01T00:00"), complete calendar years (8760/8784 rows).
//   shape:   header "hour,weight", exactly 8760 rows (one canonical year).

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "h2sc/common.hpp"

namespace h2sc {

// --- proleptic-Gregorian day arithmetic (Hinnant's civil algorithms) ------

inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
    int year;
    unsigned month, day;
};

inline CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), m, d};
}

inline bool is_leap_year(int y) {
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

inline int hours_in_year(int y) { return is_leap_year(y) ? 8784 : 8760; }

// --- weather CSV -----------------------------------------------------------

struct YearSeries {
    int year = 0;
    std::vector<double> ghi;   // W/m^2
    std::vector<double> temp;  // degC
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline bool parse_num(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

} // namespace detail

// One sequence per complete calendar year; rejects gaps, duplicated or
// backwards timestamps, negative GHI, and partial years. Errors carry the
// offending line number.
inline std::vector<YearSeries> parse_weather_csv(const std::string& path) {
    std::string text = read_file(path);
    std::vector<YearSeries> years;
    std::int64_t prev_hour = 0;
    bool have_prev = false;

    std::size_t pos = 0, lineno = 0;
    auto next_line = [&](std::string& line) {
        if (pos >= text.size()) return false;
        std::size_t e = text.find('\n', pos);
        if (e == std::string::npos) e = text.size();
        line.assign(text, pos, e - pos);
        pos = e + 1;
        ++lineno;
        return true;
    };

    std::string line;
    if (!next_line(line)) fail(path + ": empty weather CSV");
    {
        auto cols = detail::split_csv_line(line);
        if (cols.size() != 3 || cols[0] != "timestamp" || cols[1] != "ghi_w_m2" ||
            cols[2] != "temp_c")
            fail(path + ": expected header \"timestamp,ghi_w_m2,temp_c\"");
    }

    while (next_line(line)) {
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        auto cols = detail::split_csv_line(line);
        std::string where = path + ":" + std::to_string(lineno);
        if (cols.size() != 3) fail(where + ": expected 3 columns");
        int y, mo, d, hh, mi;
        if (std::sscanf(cols[0].c_str(), "%4d-%2d-%2dT%2d:%2d", &y, &mo, &d, &hh, &mi) != 5 ||
            mo < 1 || mo > 12 || d < 1 || d > 31 || hh < 0 || hh > 23 || mi != 0)
            fail(where + ": malformed timestamp \"" + cols[0] + "\"");
        std::int64_t hour = days_from_civil(y, unsigned(mo), unsigned(d)) * 24 + hh;
        if (have_prev) {
            if (hour <= prev_hour)
                fail(where + ": non-monotonic timestamp \"" + cols[0] + "\"");
            if (hour != prev_hour + 1)
                fail(where + ": gap before \"" + cols[0] + "\" (hourly cadence required)");
        }
        prev_hour = hour;
        have_prev = true;

        double ghi, temp;
        if (!detail::parse_num(cols[1], ghi)) fail(where + ": malformed ghi value");
        if (!detail::parse_num(cols[2], temp)) fail(where + ": malformed temp value");
        if (ghi < 0) fail(where + ": negative GHI");

        if (years.empty() || years.back().year != y) years.push_back({y, {}, {}});
        years.back().ghi.push_back(ghi);
        years.back().temp.push_back(temp);
    }

    if (years.empty()) fail(path + ": no data rows");
    for (const auto& ys : years) {
        int expect = hours_in_year(ys.year);
        if (int(ys.ghi.size()) != expect)
            fail(path + ": year " + std::to_string(ys.year) + " has " +
                 std::to_string(ys.ghi.size()) + " rows, expected " + std::to_string(expect));
    }
    return years;
}

// --- demand-shape CSV ------------------------------------------------------

// 8760 non-negative hourly weights; the absolute scale is irrelevant
// (profiles are rescaled against an annual total).
inline std::vector<double> parse_shape_csv(const std::string& path) {
    std::string text = read_file(path);
    std::vector<double> shape;
    std::size_t pos = 0, lineno = 0;
    bool header_seen = false;
    double sum = 0;
    while (pos < text.size()) {
        std::size_t e = text.find('\n', pos);
        if (e == std::string::npos) e = text.size();
        std::string line(text, pos, e - pos);
        pos = e + 1;
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto cols = detail::split_csv_line(line);
        std::string where = path + ":" + std::to_string(lineno);
        if (!header_seen) {
            if (cols.size() != 2 || cols[0] != "hour" || cols[1] != "weight")
                fail(path + ": expected header \"hour,weight\"");
            header_seen = true;
            continue;
        }
        if (cols.size() != 2) fail(where + ": expected 2 columns");
        double hour, w;
        if (!detail::parse_num(cols[0], hour) || hour != double(shape.size()))
            fail(where + ": hour column must count 0..8759 in order");
        if (!detail::parse_num(cols[1], w)) fail(where + ": malformed weight");
        if (w < 0) fail(where + ": negative shape entry");
        shape.push_back(w);
        sum += w;
    }
    if (shape.size() != 8760)
        fail(path + ": expected 8760 shape rows, found " + std::to_string(shape.size()));
    if (sum <= 0) fail(path + ": all-zero demand shape");
    return shape;
}

} // namespace h2sc
