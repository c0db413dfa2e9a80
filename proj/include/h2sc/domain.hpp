#pragma once

// Typed, validated model data: facility parameters, cost book, demand
// profiles, scenario sets, and solution records. All types are immutable
// in practice (constructed once, then shared read-only across threads).

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "h2sc/common.hpp"

namespace h2sc {

// ---------------------------------------------------------------------------
// Facility kinds

enum class ElectrolyzerKind { pem, alkaline };
enum class ReformerKind { atr_cc, smr_cc, smr };
enum class PowerSource { pv, ngcc, grid };

inline constexpr std::array<ElectrolyzerKind, 2> kElectrolyzerKinds{
    ElectrolyzerKind::pem, ElectrolyzerKind::alkaline};
inline constexpr std::array<ReformerKind, 3> kReformerKinds{
    ReformerKind::atr_cc, ReformerKind::smr_cc, ReformerKind::smr};
inline constexpr std::array<PowerSource, 3> kPowerSources{
    PowerSource::pv, PowerSource::ngcc, PowerSource::grid};

inline const char* to_string(ElectrolyzerKind k) {
    return k == ElectrolyzerKind::pem ? "pem" : "alkaline";
}
inline const char* to_string(ReformerKind k) {
    switch (k) {
        case ReformerKind::atr_cc: return "atr_cc";
        case ReformerKind::smr_cc: return "smr_cc";
        default: return "smr";
    }
}
inline const char* to_string(PowerSource s) {
    switch (s) {
        case PowerSource::pv: return "pv";
        case PowerSource::ngcc: return "ngcc";
        default: return "grid";
    }
}

// ---------------------------------------------------------------------------
// Parameter blocks

struct BatteryParams {
    double capex_per_mwh = 0;   // $/MWh of storage capacity
    double omf = 0;             // fixed O&M, fraction of capex per year
    double lifespan_yr = 1;
    double self_discharge = 0;  // fraction of stored energy lost per hour
    double round_trip_leg = 1;  // one-way efficiency; applies to each leg
    double power_ratio = 0.25;  // max (dis)charge per hour, fraction of capacity
    double soc_min = 0.15;      // state-of-charge band, fractions of capacity
    double soc_max = 0.95;
};

struct PvParams {
    double capex_per_kw = 0;    // $/kW installed
    double omf = 0;
    double lifespan_yr = 1;
    double gamma = -0.0037;     // output temperature coefficient, 1/degC
    double noct = 45;           // nominal operating cell temperature, degC
    double t_ref = 25;          // reference cell temperature, degC
};

struct NgccParams {
    double capex_per_mw = 0;    // $/MW installed
    double variable_cost = 0;   // $/MWh generated
    double min_load = 0.6;      // fraction of capacity, unconditional floor
    double fuel_rate = 7.15;    // MMBtu of gas per MWh generated
    double co2_rate = 0.038;    // t CO2 per MWh generated
    double omf = 0;
    double lifespan_yr = 1;
};

struct GridParams {
    double price = 0;           // $/MWh purchased
    double co2_rate = 0;        // t CO2 per MWh purchased
};

struct ElectrolyzerParams {
    ElectrolyzerKind kind = ElectrolyzerKind::pem;
    double capex_per_kw = 0;     // $/kW installed
    double omf = 0;
    double lifespan_yr = 1;
    double min_load = 0;         // fraction of capacity, unconditional floor
    double specific_energy = 1;  // MWh per t H2 produced
};

// One point of an installed-cost curve: capacity (t H2/day) -> total $.
struct CostBreakpoint {
    double capacity_t_day = 0;
    double installed_cost = 0;
};

struct ReformerParams {
    ReformerKind kind = ReformerKind::smr;
    std::vector<CostBreakpoint> cost_curve;  // strictly increasing in both coords
    double omf = 0;
    double lifespan_yr = 1;
    double min_load = 0.6;       // fraction of capacity, unconditional floor
    double ramp_fraction = 0.2;  // max |delta output| per hour, fraction of capacity
    double ng_rate = 1;          // MMBtu per t H2
    double elec_rate = 0;        // MWh per t H2
    double co2_rate = 0;         // t CO2 per t H2
    std::string notes;           // provenance notes (e.g. placeholder cost data)
};

struct TankParams {
    double capex_per_t = 0;      // $/t H2 capacity
    double omf = 0;
    double lifespan_yr = 1;
    double leak = 0;             // fraction of stored H2 lost per hour
    std::string notes;
};

struct TechnologyCatalog {
    PvParams pv;
    BatteryParams battery;
    NgccParams ngcc;
    std::vector<ElectrolyzerParams> electrolyzers;  // pem, alkaline order
    std::vector<ReformerParams> reformers;          // atr_cc, smr_cc, smr order
    TankParams tank;

    const ElectrolyzerParams& electrolyzer(ElectrolyzerKind k) const {
        for (const auto& e : electrolyzers)
            if (e.kind == k) return e;
        fail(std::string("catalog has no electrolyzer: ") + to_string(k));
    }
    const ReformerParams& reformer(ReformerKind k) const {
        for (const auto& r : reformers)
            if (r.kind == k) return r;
        fail(std::string("catalog has no reformer: ") + to_string(k));
    }
};

struct CostBook {
    double ng_price = 0;        // $/MMBtu
    double co2_tax = 0;         // $/t CO2
    double interest = 0.07;     // discount rate, fraction
    int year = 2030;
    GridParams grid;
    double converter_dc = 0.98; // DC/DC efficiency (PV-side)
    double converter_ac = 0.95; // AC<->DC conversion efficiency, per pass
};

// ---------------------------------------------------------------------------
// Demand and scenarios

enum class DemandKind { constant, variable, ideal };

inline const char* to_string(DemandKind k) {
    switch (k) {
        case DemandKind::constant: return "constant";
        case DemandKind::variable: return "variable";
        default: return "ideal";
    }
}

struct DemandProfile {
    DemandKind kind = DemandKind::constant;
    double annual_total = 0;      // t H2 per year
    std::vector<double> shape;    // hourly demand rate, t H2/h

    // Full-year profiles must integrate back to the annual total.
    void validate(double dt = 1.0) const {
        if (annual_total <= 0) fail("demand annual_total must be > 0");
        if (shape.empty()) fail("demand shape is empty");
        double sum = 0;
        for (double v : shape) {
            if (v < 0) fail("demand shape has a negative entry");
            sum += v * dt;
        }
        if (!near_rel(sum, annual_total, 1e-9))
            fail("demand shape does not integrate to annual_total");
    }
};

struct Scenario {
    std::string label;            // e.g. source year "2019"
    std::vector<double> ghi;      // W/m^2
    std::vector<double> temp;     // degC
    DemandProfile demand;         // shape sliced to the scenario horizon
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    double dt = 1.0;              // h per step
    double weight = 1.0;          // per-scenario probability (uniform)
    double annualization = 1.0;   // hours of year represented per modeled hour

    std::size_t horizon() const {
        return scenarios.empty() ? 0 : scenarios.front().ghi.size();
    }
    void check() const {
        if (scenarios.empty()) fail("scenario set is empty");
        std::size_t T = horizon();
        for (const auto& s : scenarios) {
            if (s.ghi.size() != T || s.temp.size() != T || s.demand.shape.size() != T)
                fail("scenario sequences have unequal lengths");
        }
        if (!near_abs(weight * double(scenarios.size()), 1.0, 1e-9))
            fail("scenario weights do not sum to 1");
    }
};

// ---------------------------------------------------------------------------
// Solution records

struct PiecewiseChoice {
    std::vector<double> x;  // segment interpolation weights
    std::vector<double> y;  // breakpoint selectors (binaries)
};

struct Design {
    double X_P = 0;        // PV, MW
    double X_B = 0;        // battery, MWh
    double X_NGCC = 0;     // MW
    std::map<ElectrolyzerKind, double> X_W;             // MW
    std::map<ReformerKind, double> X_NR;                // t H2/day
    std::map<ReformerKind, PiecewiseChoice> segments;   // capex interpolation
    double X_HT = 0;       // tank, t H2
};

struct Dispatch {
    // Indexed [scenario][t].
    std::vector<std::vector<double>> ch, dch, ess;      // MW, MW, MWh
    std::vector<std::vector<double>> ngcc, mg;          // MW
    std::vector<std::vector<double>> d2a, a2d, out;     // MW
    std::map<ElectrolyzerKind, std::vector<std::vector<double>>> p2h;  // MW
    std::map<ReformerKind, std::vector<std::vector<double>>> h_nr;     // t H2/h
    std::vector<std::vector<double>> ht;                // t H2
};

// ---------------------------------------------------------------------------
// Operations

// Capital recovery factor r(1+r)^L / ((1+r)^L - 1), computed in the
// overflow-safe form r / (1 - (1+r)^-L); (1+r)^-L underflowing to 0 at
// large L yields exactly r, the correct limit.
inline double crf(double r, double lifespan_yr) {
    if (!std::isfinite(r) || !std::isfinite(lifespan_yr))
        fail("crf: non-finite input");
    if (r <= 0) fail("crf: interest rate must be > 0");
    if (lifespan_yr < 1) fail("crf: lifespan must be >= 1 year");
    return r / (1.0 - std::pow(1.0 + r, -lifespan_yr));
}

struct Violation {
    std::string field;
    std::string message;
};

// Structural invariant checks. Violations are data, not exceptions.
inline std::vector<Violation> validate_catalog(const TechnologyCatalog& c) {
    std::vector<Violation> v;
    auto check = [&](bool ok, const std::string& field, const std::string& msg) {
        if (!ok) v.push_back({field, msg});
    };

    const auto& b = c.battery;
    check(b.capex_per_mwh >= 0, "battery.capex_per_mwh", "must be >= 0");
    check(b.omf >= 0, "battery.omf", "must be >= 0");
    check(b.self_discharge >= 0 && b.self_discharge < 1, "battery.self_discharge",
          "must satisfy 0 <= sigma < 1");
    check(b.round_trip_leg > 0 && b.round_trip_leg <= 1, "battery.round_trip_leg",
          "must satisfy 0 < eta <= 1");
    check(b.power_ratio > 0 && b.power_ratio <= 1, "battery.power_ratio",
          "must satisfy 0 < ratio <= 1");
    check(b.soc_min >= 0 && b.soc_min < b.soc_max && b.soc_max <= 1, "battery.soc",
          "must satisfy 0 <= soc_min < soc_max <= 1");
    check(b.lifespan_yr >= 1, "battery.lifespan_yr", "must be >= 1");

    check(c.pv.capex_per_kw >= 0, "pv.capex_per_kw", "must be >= 0");
    check(c.pv.omf >= 0, "pv.omf", "must be >= 0");
    check(c.pv.gamma < 0, "pv.gamma", "temperature coefficient must be negative");
    check(c.pv.noct > 20, "pv.noct", "must exceed 20 degC");
    check(c.pv.lifespan_yr >= 1, "pv.lifespan_yr", "must be >= 1");

    const auto& n = c.ngcc;
    check(n.capex_per_mw >= 0, "ngcc.capex_per_mw", "must be >= 0");
    check(n.omf >= 0 && n.variable_cost >= 0, "ngcc.costs", "must be >= 0");
    check(n.min_load >= 0 && n.min_load <= 1, "ngcc.min_load", "must lie in [0,1]");
    check(n.fuel_rate > 0, "ngcc.fuel_rate", "must be > 0");
    check(n.lifespan_yr >= 1, "ngcc.lifespan_yr", "must be >= 1");

    for (const auto& e : c.electrolyzers) {
        std::string p = std::string("electrolyzer.") + to_string(e.kind);
        check(e.capex_per_kw >= 0, p + ".capex_per_kw", "must be >= 0");
        check(e.omf >= 0, p + ".omf", "must be >= 0");
        check(e.min_load >= 0 && e.min_load < 1, p + ".min_load", "must lie in [0,1)");
        check(e.specific_energy > 0, p + ".specific_energy", "must be > 0");
        check(e.lifespan_yr >= 1, p + ".lifespan_yr", "must be >= 1");
    }

    for (const auto& r : c.reformers) {
        std::string p = std::string("reformer.") + to_string(r.kind);
        check(r.cost_curve.size() >= 2, p + ".cost_curve", "needs at least 2 breakpoints");
        for (std::size_t k = 0; k + 1 < r.cost_curve.size(); ++k) {
            const auto& a = r.cost_curve[k];
            const auto& bnext = r.cost_curve[k + 1];
            check(bnext.capacity_t_day > a.capacity_t_day && bnext.installed_cost > a.installed_cost,
                  p + ".cost_curve", "breakpoints must be strictly increasing in both coordinates");
            if (a.capacity_t_day > 0 && bnext.capacity_t_day > 0) {
                check(bnext.installed_cost / bnext.capacity_t_day <=
                          a.installed_cost / a.capacity_t_day + 1e-9,
                      p + ".cost_curve", "per-unit cost must be non-increasing across breakpoints");
            }
        }
        if (!r.cost_curve.empty())
            check(r.cost_curve.front().capacity_t_day > 0 && r.cost_curve.front().installed_cost > 0,
                  p + ".cost_curve", "breakpoints must be positive");
        check(r.min_load >= 0 && r.min_load <= 1, p + ".min_load", "must lie in [0,1]");
        check(r.ramp_fraction > 0 && r.ramp_fraction <= 1, p + ".ramp_fraction",
              "must lie in (0,1]");
        check(r.ng_rate > 0 && r.elec_rate > 0 && r.co2_rate >= 0, p + ".rates",
              "ng_rate and elec_rate must be > 0, co2_rate >= 0");
        check(r.omf >= 0, p + ".omf", "must be >= 0");
        check(r.lifespan_yr >= 1, p + ".lifespan_yr", "must be >= 1");
    }

    check(c.tank.capex_per_t >= 0, "tank.capex_per_t", "must be >= 0");
    check(c.tank.omf >= 0, "tank.omf", "must be >= 0");
    check(c.tank.leak >= 0 && c.tank.leak < 1, "tank.leak", "must satisfy 0 <= leak < 1");
    check(c.tank.lifespan_yr >= 1, "tank.lifespan_yr", "must be >= 1");
    return v;
}

inline std::vector<Violation> validate_cost_book(const CostBook& cb) {
    std::vector<Violation> v;
    auto check = [&](bool ok, const std::string& field, const std::string& msg) {
        if (!ok) v.push_back({field, msg});
    };
    check(cb.interest > 0 && cb.interest < 1, "cost_book.interest", "must lie in (0,1)");
    check(cb.ng_price >= 0, "cost_book.ng_price", "must be >= 0");
    check(cb.co2_tax >= 0, "cost_book.co2_tax", "must be >= 0");
    check(cb.grid.price >= 0, "cost_book.grid.price", "must be >= 0");
    check(cb.grid.co2_rate >= 0, "cost_book.grid.co2_rate", "must be >= 0");
    check(cb.converter_dc > 0 && cb.converter_dc <= 1, "cost_book.converter_dc",
          "must lie in (0,1]");
    check(cb.converter_ac > 0 && cb.converter_ac <= 1, "cost_book.converter_ac",
          "must lie in (0,1]");
    return v;
}

} // namespace h2sc
