#pragma once

// Demand-profile construction, multi-year -> representative-period
// reduction, and deterministic synthetic data generation for the checked-in
// example datasets.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "h2sc/csv.hpp"
#include "h2sc/domain.hpp"

namespace h2sc {

// ---------------------------------------------------------------------------
// Demand profiles (full 8760-hour canonical year)

inline DemandProfile make_demand(DemandKind kind, double annual_total,
                                 const std::optional<std::vector<double>>& shape = std::nullopt) {
    if (annual_total <= 0) fail("make_demand: annual_total must be > 0");
    DemandProfile p;
    p.kind = kind;
    p.annual_total = annual_total;
    if (kind == DemandKind::variable) {
        if (!shape) fail("make_demand: variable demand requires a shape");
        double sum = 0;
        for (double w : *shape) {
            if (w < 0) fail("make_demand: negative shape entry");
            sum += w;
        }
        if (sum <= 0) fail("make_demand: all-zero shape");
        p.shape.reserve(shape->size());
        double scale = annual_total / sum;
        for (double w : *shape) p.shape.push_back(w * scale);
    } else {
        // constant and ideal are both flat profiles.
        std::size_t n = 8760;
        p.shape.assign(n, annual_total / double(n));
    }
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// Period reduction

enum class ReductionKind { full_year, seasonal_weeks, first_hours };

struct ReductionPolicy {
    ReductionKind kind = ReductionKind::full_year;
    int param = 1;  // k weeks per season, or n hours

    static ReductionPolicy full_year() { return {ReductionKind::full_year, 0}; }
    static ReductionPolicy seasonal_weeks(int k) { return {ReductionKind::seasonal_weeks, k}; }
    static ReductionPolicy first_hours(int n) { return {ReductionKind::first_hours, n}; }

    std::string describe() const {
        switch (kind) {
            case ReductionKind::full_year: return "full_year";
            case ReductionKind::seasonal_weeks:
                return "seasonal_weeks(" + std::to_string(param) + ")";
            default: return "first_hours(" + std::to_string(param) + ")";
        }
    }
};

namespace detail {

// Hour-of-year indices selected by a policy (within the first 8760 hours).
inline std::vector<std::size_t> reduction_hours(const ReductionPolicy& policy) {
    std::vector<std::size_t> idx;
    switch (policy.kind) {
        case ReductionKind::full_year: {
            idx.resize(8760);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            break;
        }
        case ReductionKind::seasonal_weeks: {
            int k = policy.param;
            if (k < 1) fail("seasonal_weeks: k must be >= 1");
            // Non-leap starts of Jan/Apr/Jul/Oct; shortest of these months
            // holds 720 h, capping k at 4 whole weeks per season.
            if (168 * k > 720) fail("seasonal_weeks: k exceeds available data (max 4)");
            for (std::size_t start : {std::size_t{0}, std::size_t{2160}, std::size_t{4344},
                                      std::size_t{6552}}) {
                for (int h = 0; h < 168 * k; ++h) idx.push_back(start + h);
            }
            break;
        }
        case ReductionKind::first_hours: {
            int n = policy.param;
            if (n < 1 || n > 8760) fail("first_hours: n exceeds available data");
            idx.resize(n);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            break;
        }
    }
    return idx;
}

} // namespace detail

// Builds one scenario per source year (uniform weights). Leap years are
// commensurated by dropping everything past hour 8760. The demand profile's
// canonical-year shape is sliced by the same hour-of-year indices, keeping
// weather and demand aligned. With ideal_weather set, GHI is replaced by its
// annual mean at every hour before slicing.
inline ScenarioSet reduce_periods(const std::vector<YearSeries>& years,
                                  const ReductionPolicy& policy,
                                  const DemandProfile& demand,
                                  bool ideal_weather = false) {
    if (years.empty()) fail("reduce_periods: no weather years");
    if (demand.shape.size() != 8760)
        fail("reduce_periods: demand profile must cover a canonical 8760-h year");
    std::vector<std::size_t> idx = detail::reduction_hours(policy);

    ScenarioSet set;
    set.dt = 1.0;
    set.weight = 1.0 / double(years.size());
    set.annualization = 8760.0 / double(idx.size());
    for (const auto& ys : years) {
        Scenario sc;
        sc.label = std::to_string(ys.year);
        double ghi_mean = 0;
        if (ideal_weather) {
            for (std::size_t h = 0; h < 8760; ++h) ghi_mean += ys.ghi[h];
            ghi_mean /= 8760.0;
        }
        sc.ghi.reserve(idx.size());
        sc.temp.reserve(idx.size());
        sc.demand.kind = demand.kind;
        sc.demand.annual_total = demand.annual_total;
        sc.demand.shape.reserve(idx.size());
        for (std::size_t h : idx) {
            sc.ghi.push_back(ideal_weather ? ghi_mean : ys.ghi[h]);
            sc.temp.push_back(ys.temp[h]);
            sc.demand.shape.push_back(demand.shape[h]);
        }
        set.scenarios.push_back(std::move(sc));
    }
    set.check();
    return set;
}

// Annualized demand of the set, t/yr (exact for flat profiles; reported,
// not forced, for variable ones).
inline double annualized_demand(const ScenarioSet& set) {
    double total = 0;
    for (const auto& sc : set.scenarios) {
        double d = 0;
        for (double v : sc.demand.shape) d += v * set.dt;
        total += set.weight * set.annualization * d;
    }
    return total;
}

// ---------------------------------------------------------------------------
// JSON caching of scenario sets

inline nlohmann::ordered_json scenario_set_to_json(const ScenarioSet& set) {
    nlohmann::ordered_json doc;
    doc["dt"] = set.dt;
    doc["weight"] = set.weight;
    doc["annualization"] = set.annualization;
    doc["scenarios"] = nlohmann::ordered_json::array();
    for (const auto& sc : set.scenarios) {
        nlohmann::ordered_json s;
        s["label"] = sc.label;
        s["ghi"] = sc.ghi;
        s["temp"] = sc.temp;
        s["demand"] = {{"kind", to_string(sc.demand.kind)},
                       {"annual_total", sc.demand.annual_total},
                       {"shape", sc.demand.shape}};
        doc["scenarios"].push_back(std::move(s));
    }
    return doc;
}

inline ScenarioSet scenario_set_from_json(const nlohmann::ordered_json& doc) {
    ScenarioSet set;
    set.dt = doc.at("dt").get<double>();
    set.weight = doc.at("weight").get<double>();
    set.annualization = doc.at("annualization").get<double>();
    for (const auto& s : doc.at("scenarios")) {
        Scenario sc;
        sc.label = s.at("label").get<std::string>();
        sc.ghi = s.at("ghi").get<std::vector<double>>();
        sc.temp = s.at("temp").get<std::vector<double>>();
        const auto& d = s.at("demand");
        std::string kind = d.at("kind").get<std::string>();
        sc.demand.kind = kind == "constant" ? DemandKind::constant
                       : kind == "variable" ? DemandKind::variable
                                            : DemandKind::ideal;
        sc.demand.annual_total = d.at("annual_total").get<double>();
        sc.demand.shape = d.at("shape").get<std::vector<double>>();
        set.scenarios.push_back(std::move(sc));
    }
    set.check();
    return set;
}

// ---------------------------------------------------------------------------
// Synthetic example data (labeled synthetic; not measurements)

// Sinusoidal seasonal/diurnal irradiance and temperature with deterministic
// hash noise. Calendar-correct timestamps, leap years included.
inline std::string synthetic_weather_csv(int first_year, int n_years,
                                         std::uint64_t seed = 20190101) {
    std::string out = "timestamp,ghi_w_m2,temp_c\n";
    char buf[96];
    for (int y = first_year; y < first_year + n_years; ++y) {
        int hours = hours_in_year(y);
        std::int64_t day0 = days_from_civil(y, 1, 1);
        for (int h = 0; h < hours; ++h) {
            int day = h / 24, hod = h % 24;
            CivilDate cd = civil_from_days(day0 + day);
            double season = std::sin(2.0 * kPi * (day - 80) / 365.25);
            double u1 = hash_unit(seed ^ (std::uint64_t(y) * 131071ull + std::uint64_t(h) * 2ull));
            double u2 = hash_unit(seed ^ (std::uint64_t(y) * 131071ull + std::uint64_t(h) * 2ull + 1ull));
            double ghi = 0.0;
            if (hod >= 6 && hod <= 18) {
                double amp = 600.0 + 250.0 * season + 160.0 * (u1 - 0.5);
                ghi = std::max(0.0, amp * std::sin(kPi * (hod - 6) / 12.0));
            }
            double temp = 12.0 + 9.0 * std::sin(2.0 * kPi * (day - 110) / 365.25) +
                          6.0 * std::sin(2.0 * kPi * (hod - 15) / 24.0) + 6.0 * (u2 - 0.5);
            std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:00,%.1f,%.1f\n", cd.year,
                          cd.month, cd.day, hod, ghi, temp);
            out += buf;
        }
    }
    return out;
}

// Day-peaking diurnal sinusoid, weekday/weekend split, mild seasonal swing.
// Min/max ratio is ~0.33, well below typical reformer min-load bands, which
// makes storage-free variable-demand runs genuinely constraining.
inline std::string synthetic_shape_csv(int year = 2019) {
    std::string out = "hour,weight\n";
    char buf[64];
    std::int64_t day0 = days_from_civil(year, 1, 1);
    for (int h = 0; h < 8760; ++h) {
        int day = h / 24, hod = h % 24;
        int dow = int((day0 + day + 4) % 7);  // 0 = Sunday
        bool weekend = dow == 0 || dow == 6;
        double w = (1.0 + 0.3 * std::sin(2.0 * kPi * (hod - 14) / 24.0)) *
                   (weekend ? 0.75 : 1.0) *
                   (1.0 + 0.1 * std::sin(2.0 * kPi * day / 365.25));
        std::snprintf(buf, sizeof(buf), "%d,%.6f\n", h, w);
        out += buf;
    }
    return out;
}

} // namespace h2sc
