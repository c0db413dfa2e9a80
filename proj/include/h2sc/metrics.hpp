#pragma once

// Reporting layer: levelized hydrogen cost split into four buckets that
// partition the annual objective exactly (facility = all annualized capex
// plus fixed and variable O&M; natural_gas = all fuel purchases; co2_tax =
// all taxed emissions; electricity = grid energy purchases), a levelized
// electricity cost over energy delivered to hydrogen production, carbon
// intensities, and the capacity/emission/fuel summary table.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "h2sc/catalog_io.hpp"
#include "h2sc/formulation.hpp"
#include "h2sc/scenario.hpp"

namespace h2sc {

struct CostReport {
    double lcoh_total = 0;        // $/kg H2
    double lcoh_co2_tax = 0;      // $/kg
    double lcoh_electricity = 0;  // $/kg
    double lcoh_natural_gas = 0;  // $/kg
    double lcoh_facility = 0;     // $/kg
    double lcoe = 0;              // $/MWh delivered to hydrogen production
    double carbon_intensity = 0;  // t CO2 / t H2 of the solved mix
    double annual_co2_kt = 0;     // kt CO2 / yr
    double annual_ng_tbtu = 0;    // TBtu NG / yr
    double annual_h2_t = 0;       // t H2 / yr
    double objective = 0;         // $/yr, echo of the model objective
    Design design;
};

namespace metrics_detail {

// Annualized dispatch totals, weighted identically to the objective.
struct Totals {
    double ngcc_mwh = 0;        // generation
    double grid_mwh = 0;        // imports
    double p2h_mwh = 0;         // electrolyzer draw (DC side)
    double reformer_mwh = 0;    // reformer electricity draw (AC side)
    std::array<double, kReformerKinds.size()> h_nr_t{};  // production, t/yr
    double h2_electrolysis_t = 0;
};

inline Totals accumulate(const Formulation& f, const std::vector<double>& x) {
    const auto& scen = f.scenarios();
    const auto& cat = f.catalog();
    const auto& r = f.refs();
    Totals tot;
    int S = int(scen.scenarios.size());
    int T = scen.horizon();
    for (int s = 0; s < S; ++s) {
        double scale = scen.weight * scen.annualization * scen.dt;
        for (int t = 0; t < T; ++t) {
            tot.ngcc_mwh += scale * x[r.ngcc[s][t]];
            tot.grid_mwh += scale * x[r.mg[s][t]];
            for (const auto& e : cat.electrolyzers) {
                double draw = scale * x[r.p2h.at(e.kind)[s][t]];
                tot.p2h_mwh += draw;
                tot.h2_electrolysis_t += draw / e.specific_energy;
            }
            for (std::size_t k = 0; k < cat.reformers.size(); ++k) {
                const auto& n = cat.reformers[k];
                double made = scale * x[r.h_nr.at(n.kind)[s][t]];  // t
                tot.h_nr_t[k] += made;
                tot.reformer_mwh += n.elec_rate * made;
            }
        }
    }
    return tot;
}

inline double round_to(double v, int decimals) {
    double p = std::pow(10.0, decimals);
    double r = std::round(v * p) / p;
    return r == 0.0 ? 0.0 : r;  // normalize -0
}

template <class M, class K>
double map_get(const M& m, const K& k) {
    auto it = m.find(k);
    return it == m.end() ? 0.0 : it->second;
}

} // namespace metrics_detail

inline CostReport lcoh_breakdown(const Formulation& f, const std::vector<double>& x) {
    const auto& cat = f.catalog();
    const auto& book = f.cost_book();
    const auto& scen = f.scenarios();

    CostReport rep;
    rep.design = f.extract_design(x);
    rep.annual_h2_t = annualized_demand(scen);
    if (rep.annual_h2_t <= 0) fail("lcoh: annual hydrogen demand is zero");
    double kg = rep.annual_h2_t * 1000.0;

    metrics_detail::Totals tot = metrics_detail::accumulate(f, x);

    double ng_mmbtu = cat.ngcc.fuel_rate * tot.ngcc_mwh;
    double co2_t = cat.ngcc.co2_rate * tot.ngcc_mwh + book.grid.co2_rate * tot.grid_mwh;
    for (std::size_t k = 0; k < cat.reformers.size(); ++k) {
        ng_mmbtu += cat.reformers[k].ng_rate * tot.h_nr_t[k];
        co2_t += cat.reformers[k].co2_rate * tot.h_nr_t[k];
    }

    double facility = f.annualized_capex(x) + cat.ngcc.variable_cost * tot.ngcc_mwh;
    double natural_gas = book.ng_price * ng_mmbtu;
    double co2_tax = book.co2_tax * co2_t;
    double electricity = book.grid.price * tot.grid_mwh;

    rep.lcoh_facility = facility / kg;
    rep.lcoh_natural_gas = natural_gas / kg;
    rep.lcoh_co2_tax = co2_tax / kg;
    rep.lcoh_electricity = electricity / kg;
    rep.lcoh_total =
        rep.lcoh_facility + rep.lcoh_natural_gas + rep.lcoh_co2_tax + rep.lcoh_electricity;
    rep.objective = facility + natural_gas + co2_tax + electricity;

    rep.annual_ng_tbtu = ng_mmbtu / 1e6;
    rep.annual_co2_kt = co2_t / 1e3;
    rep.carbon_intensity = co2_t / rep.annual_h2_t;

    // Electricity cost over energy delivered to hydrogen production. The
    // numerator covers the power system only: PV, battery, and NGCC capex
    // and O&M, NGCC fuel and variable cost, taxed power-sector emissions,
    // and grid purchases. Hydrogen equipment is excluded.
    double r = book.interest;
    double power_capex =
        (crf(r, cat.pv.lifespan_yr) + cat.pv.omf) * cat.pv.capex_per_kw * 1000.0 *
            rep.design.X_P +
        (crf(r, cat.battery.lifespan_yr) + cat.battery.omf) * cat.battery.capex_per_mwh *
            rep.design.X_B +
        (crf(r, cat.ngcc.lifespan_yr) + cat.ngcc.omf) * cat.ngcc.capex_per_mw *
            rep.design.X_NGCC;
    double power_var = cat.ngcc.variable_cost * tot.ngcc_mwh +
                       cat.ngcc.fuel_rate * book.ng_price * tot.ngcc_mwh;
    double power_tax = book.co2_tax * (cat.ngcc.co2_rate * tot.ngcc_mwh +
                                       book.grid.co2_rate * tot.grid_mwh);
    double power_grid = book.grid.price * tot.grid_mwh;
    double delivered = tot.p2h_mwh + tot.reformer_mwh;
    if (delivered > 0)
        rep.lcoe = (power_capex + power_var + power_tax + power_grid) / delivered;
    else
        rep.lcoe = 0;
    return rep;
}

// Per-MWh carbon intensity of each power source feeding production.
inline double power_source_ci(PowerSource src, const TechnologyCatalog& cat,
                              const CostBook& book) {
    switch (src) {
        case PowerSource::pv: return 0.0;
        case PowerSource::ngcc: return cat.ngcc.co2_rate;
        default: return book.grid.co2_rate;
    }
}

// t CO2 per t H2 for one production technology on one power source:
// process emissions plus electricity use times the source intensity.
inline double carbon_intensity(H2Tech tech, PowerSource src, const TechnologyCatalog& cat,
                               const CostBook& book) {
    double src_ci = power_source_ci(src, cat, book);
    if (is_electrolyzer(tech)) {
        const auto& e = cat.electrolyzer(electrolyzer_of(tech));
        return e.specific_energy * src_ci;
    }
    const auto& n = cat.reformer(reformer_of(tech));
    return n.co2_rate + n.elec_rate * src_ci;
}

// Capacity/emission/fuel summary row. Capacities carry two decimals,
// CO2 one decimal (kt), NG three decimals (TBtu).
struct TableERow {
    double pv_mw = 0, battery_mwh = 0, pem_mw = 0, alkaline_mw = 0, tank_t = 0, ngcc_mw = 0;
    double atr_cc_t_day = 0, smr_cc_t_day = 0, smr_t_day = 0;
    double co2_kt = 0, ng_tbtu = 0;
};

inline TableERow table_e_row(const CostReport& rep) {
    using metrics_detail::map_get;
    using metrics_detail::round_to;
    TableERow row;
    row.pv_mw = round_to(rep.design.X_P, 2);
    row.battery_mwh = round_to(rep.design.X_B, 2);
    row.pem_mw = round_to(map_get(rep.design.X_W, ElectrolyzerKind::pem), 2);
    row.alkaline_mw = round_to(map_get(rep.design.X_W, ElectrolyzerKind::alkaline), 2);
    row.tank_t = round_to(rep.design.X_HT, 2);
    row.ngcc_mw = round_to(rep.design.X_NGCC, 2);
    row.atr_cc_t_day = round_to(map_get(rep.design.X_NR, ReformerKind::atr_cc), 2);
    row.smr_cc_t_day = round_to(map_get(rep.design.X_NR, ReformerKind::smr_cc), 2);
    row.smr_t_day = round_to(map_get(rep.design.X_NR, ReformerKind::smr), 2);
    row.co2_kt = round_to(rep.annual_co2_kt, 1);
    row.ng_tbtu = round_to(rep.annual_ng_tbtu, 3);
    return row;
}

inline std::string table_e_csv_header() {
    return "pv_mw,battery_mwh,pem_mw,alkaline_mw,tank_t,ngcc_mw,"
           "atr_cc_t_day,smr_cc_t_day,smr_t_day,co2_kt,ng_tbtu";
}

namespace metrics_detail {
inline std::string csv_num(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}
} // namespace metrics_detail

inline std::string table_e_csv_line(const TableERow& r) {
    using metrics_detail::csv_num;
    std::string out;
    out += csv_num(r.pv_mw, 2) + ',' + csv_num(r.battery_mwh, 2) + ',' + csv_num(r.pem_mw, 2) +
           ',' + csv_num(r.alkaline_mw, 2) + ',' + csv_num(r.tank_t, 2) + ',' +
           csv_num(r.ngcc_mw, 2) + ',' + csv_num(r.atr_cc_t_day, 2) + ',' +
           csv_num(r.smr_cc_t_day, 2) + ',' + csv_num(r.smr_t_day, 2) + ',' +
           csv_num(r.co2_kt, 1) + ',' + csv_num(r.ng_tbtu, 3);
    return out;
}

inline ojson design_to_json(const Design& d) {
    using metrics_detail::map_get;
    ojson j;
    j["pv_mw"] = d.X_P;
    j["battery_mwh"] = d.X_B;
    j["ngcc_mw"] = d.X_NGCC;
    ojson w;
    for (ElectrolyzerKind k : kElectrolyzerKinds) w[to_string(k)] = map_get(d.X_W, k);
    j["electrolyzer_mw"] = w;
    ojson nr;
    for (ReformerKind k : kReformerKinds) nr[to_string(k)] = map_get(d.X_NR, k);
    j["reformer_t_day"] = nr;
    j["tank_t"] = d.X_HT;
    return j;
}

inline ojson cost_report_to_json(const CostReport& r) {
    ojson j;
    ojson lcoh;
    lcoh["total"] = r.lcoh_total;
    lcoh["facility"] = r.lcoh_facility;
    lcoh["natural_gas"] = r.lcoh_natural_gas;
    lcoh["co2_tax"] = r.lcoh_co2_tax;
    lcoh["electricity"] = r.lcoh_electricity;
    j["lcoh_usd_per_kg"] = lcoh;
    j["lcoe_usd_per_mwh"] = r.lcoe;
    j["carbon_intensity_t_per_t"] = r.carbon_intensity;
    j["annual_co2_kt"] = r.annual_co2_kt;
    j["annual_ng_tbtu"] = r.annual_ng_tbtu;
    j["annual_h2_t"] = r.annual_h2_t;
    j["objective_usd_per_yr"] = r.objective;
    j["design"] = design_to_json(r.design);
    return j;
}

} // namespace h2sc
