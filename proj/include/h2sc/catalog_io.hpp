#pragma once

// Catalog + cost-book JSON schema (documented in README). Strict: unknown
// keys are rejected everywhere. Any numeric leaf may be either a scalar or
// a {"<year>": value} map; loading resolves it against the requested year.

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "h2sc/domain.hpp"

namespace h2sc {

using ojson = nlohmann::ordered_json;

namespace detail {

class JObj {
public:
    JObj(const ojson& j, std::string ctx) : j_(j), ctx_(std::move(ctx)) {
        if (!j_.is_object()) fail(ctx_ + ": expected a JSON object");
    }

    const ojson& raw(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end()) fail(ctx_ + ": missing key \"" + key + "\"");
        seen_.insert(key);
        return *it;
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    // Numeric leaf, resolving {"<year>": value} maps against `year`.
    double num(const std::string& key, int year) {
        const ojson& v = raw(key);
        if (v.is_number()) return v.get<double>();
        if (v.is_object()) {
            std::string y = std::to_string(year);
            auto it = v.find(y);
            if (it == v.end())
                fail(ctx_ + "." + key + ": no value for year " + y);
            if (!it->is_number())
                fail(ctx_ + "." + key + "." + y + ": expected a number");
            return it->get<double>();
        }
        fail(ctx_ + "." + key + ": expected a number or a year map");
    }

    std::string str_or(const std::string& key, const std::string& def) {
        if (!has(key)) return def;
        const ojson& v = raw(key);
        if (!v.is_string()) fail(ctx_ + "." + key + ": expected a string");
        return v.get<std::string>();
    }

    // Every key must have been consumed; anything else is a schema error.
    void done() {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key()))
                fail(ctx_ + ": unknown key \"" + it.key() + "\"");
        }
    }

private:
    const ojson& j_;
    std::string ctx_;
    std::set<std::string> seen_;
};

} // namespace detail

struct CatalogBundle {
    TechnologyCatalog catalog;
    CostBook cost_book;
};

inline CatalogBundle catalog_from_json(const ojson& doc, int year) {
    using detail::JObj;
    CatalogBundle out;
    out.cost_book.year = year;
    JObj root(doc, "catalog");

    {
        JObj o(root.raw("pv"), "pv");
        auto& p = out.catalog.pv;
        p.capex_per_kw = o.num("capex_per_kw", year);
        p.omf = o.num("omf", year);
        p.lifespan_yr = o.num("lifespan_yr", year);
        p.gamma = o.num("gamma_per_c", year);
        p.noct = o.num("noct_c", year);
        p.t_ref = o.num("t_ref_c", year);
        o.done();
    }
    {
        JObj o(root.raw("battery"), "battery");
        auto& b = out.catalog.battery;
        b.capex_per_mwh = o.num("capex_per_mwh", year);
        b.omf = o.num("omf", year);
        b.lifespan_yr = o.num("lifespan_yr", year);
        b.self_discharge = o.num("self_discharge_per_h", year);
        b.round_trip_leg = o.num("round_trip_leg", year);
        b.power_ratio = o.num("power_ratio", year);
        b.soc_min = o.num("soc_min", year);
        b.soc_max = o.num("soc_max", year);
        o.done();
    }
    {
        JObj o(root.raw("ngcc"), "ngcc");
        auto& n = out.catalog.ngcc;
        n.capex_per_mw = o.num("capex_per_mw", year);
        n.variable_cost = o.num("variable_cost_per_mwh", year);
        n.min_load = o.num("min_load", year);
        n.fuel_rate = o.num("fuel_rate_mmbtu_per_mwh", year);
        n.co2_rate = o.num("co2_rate_t_per_mwh", year);
        n.omf = o.num("omf", year);
        n.lifespan_yr = o.num("lifespan_yr", year);
        o.done();
    }
    {
        JObj o(root.raw("electrolyzers"), "electrolyzers");
        for (ElectrolyzerKind k : kElectrolyzerKinds) {
            JObj e(o.raw(to_string(k)), std::string("electrolyzers.") + to_string(k));
            ElectrolyzerParams p;
            p.kind = k;
            p.capex_per_kw = e.num("capex_per_kw", year);
            p.omf = e.num("omf", year);
            p.lifespan_yr = e.num("lifespan_yr", year);
            p.min_load = e.num("min_load", year);
            p.specific_energy = e.num("specific_energy_mwh_per_t", year);
            e.done();
            out.catalog.electrolyzers.push_back(p);
        }
        o.done();
    }
    {
        JObj o(root.raw("reformers"), "reformers");
        for (ReformerKind k : kReformerKinds) {
            std::string ctx = std::string("reformers.") + to_string(k);
            JObj r(o.raw(to_string(k)), ctx);
            ReformerParams p;
            p.kind = k;
            const ojson& curve = r.raw("cost_curve");
            if (!curve.is_array()) fail(ctx + ".cost_curve: expected an array");
            for (std::size_t i = 0; i < curve.size(); ++i) {
                JObj bp(curve[i], ctx + ".cost_curve[" + std::to_string(i) + "]");
                CostBreakpoint cb;
                cb.capacity_t_day = bp.num("capacity_t_day", year);
                cb.installed_cost = bp.num("installed_cost_usd", year);
                bp.done();
                p.cost_curve.push_back(cb);
            }
            p.omf = r.num("omf", year);
            p.lifespan_yr = r.num("lifespan_yr", year);
            p.min_load = r.num("min_load", year);
            p.ramp_fraction = r.num("ramp_fraction", year);
            p.ng_rate = r.num("ng_rate_mmbtu_per_t", year);
            p.elec_rate = r.num("elec_rate_mwh_per_t", year);
            p.co2_rate = r.num("co2_rate_t_per_t", year);
            p.notes = r.str_or("notes", "");
            r.done();
            out.catalog.reformers.push_back(p);
        }
        o.done();
    }
    {
        JObj o(root.raw("tank"), "tank");
        auto& t = out.catalog.tank;
        t.capex_per_t = o.num("capex_per_t", year);
        t.omf = o.num("omf", year);
        t.lifespan_yr = o.num("lifespan_yr", year);
        t.leak = o.num("leak_per_h", year);
        t.notes = o.str_or("notes", "");
        o.done();
    }
    {
        JObj o(root.raw("cost_book"), "cost_book");
        auto& cb = out.cost_book;
        cb.ng_price = o.num("ng_price_per_mmbtu", year);
        cb.co2_tax = o.num("co2_tax_per_t", year);
        cb.interest = o.num("interest", year);
        {
            JObj g(o.raw("grid"), "cost_book.grid");
            cb.grid.price = g.num("price_per_mwh", year);
            cb.grid.co2_rate = g.num("co2_rate_t_per_mwh", year);
            g.done();
        }
        cb.converter_dc = o.num("converter_dc", year);
        cb.converter_ac = o.num("converter_ac", year);
        o.done();
    }
    root.done();
    return out;
}

inline CatalogBundle load_catalog(const std::string& path, int year) {
    ojson doc;
    try {
        doc = ojson::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail("catalog JSON parse error in " + path + ": " + e.what());
    }
    return catalog_from_json(doc, year);
}

// Serializes a resolved (single-year) bundle in canonical key order.
// Round-trip (serialize -> parse -> serialize) is byte-identical.
inline ojson catalog_to_json(const CatalogBundle& b) {
    const auto& c = b.catalog;
    const auto& cb = b.cost_book;
    ojson doc;
    doc["pv"] = {{"capex_per_kw", c.pv.capex_per_kw},
                 {"omf", c.pv.omf},
                 {"lifespan_yr", c.pv.lifespan_yr},
                 {"gamma_per_c", c.pv.gamma},
                 {"noct_c", c.pv.noct},
                 {"t_ref_c", c.pv.t_ref}};
    doc["battery"] = {{"capex_per_mwh", c.battery.capex_per_mwh},
                      {"omf", c.battery.omf},
                      {"lifespan_yr", c.battery.lifespan_yr},
                      {"self_discharge_per_h", c.battery.self_discharge},
                      {"round_trip_leg", c.battery.round_trip_leg},
                      {"power_ratio", c.battery.power_ratio},
                      {"soc_min", c.battery.soc_min},
                      {"soc_max", c.battery.soc_max}};
    doc["ngcc"] = {{"capex_per_mw", c.ngcc.capex_per_mw},
                   {"variable_cost_per_mwh", c.ngcc.variable_cost},
                   {"min_load", c.ngcc.min_load},
                   {"fuel_rate_mmbtu_per_mwh", c.ngcc.fuel_rate},
                   {"co2_rate_t_per_mwh", c.ngcc.co2_rate},
                   {"omf", c.ngcc.omf},
                   {"lifespan_yr", c.ngcc.lifespan_yr}};
    ojson els = ojson::object();
    for (const auto& e : c.electrolyzers) {
        els[to_string(e.kind)] = {{"capex_per_kw", e.capex_per_kw},
                                  {"omf", e.omf},
                                  {"lifespan_yr", e.lifespan_yr},
                                  {"min_load", e.min_load},
                                  {"specific_energy_mwh_per_t", e.specific_energy}};
    }
    doc["electrolyzers"] = els;
    ojson refs = ojson::object();
    for (const auto& r : c.reformers) {
        ojson curve = ojson::array();
        for (const auto& bp : r.cost_curve)
            curve.push_back({{"capacity_t_day", bp.capacity_t_day},
                             {"installed_cost_usd", bp.installed_cost}});
        ojson ro = {{"cost_curve", curve},
                    {"omf", r.omf},
                    {"lifespan_yr", r.lifespan_yr},
                    {"min_load", r.min_load},
                    {"ramp_fraction", r.ramp_fraction},
                    {"ng_rate_mmbtu_per_t", r.ng_rate},
                    {"elec_rate_mwh_per_t", r.elec_rate},
                    {"co2_rate_t_per_t", r.co2_rate}};
        if (!r.notes.empty()) ro["notes"] = r.notes;
        refs[to_string(r.kind)] = ro;
    }
    doc["reformers"] = refs;
    {
        ojson t = {{"capex_per_t", c.tank.capex_per_t},
                   {"omf", c.tank.omf},
                   {"lifespan_yr", c.tank.lifespan_yr},
                   {"leak_per_h", c.tank.leak}};
        if (!c.tank.notes.empty()) t["notes"] = c.tank.notes;
        doc["tank"] = t;
    }
    doc["cost_book"] = {{"ng_price_per_mmbtu", cb.ng_price},
                        {"co2_tax_per_t", cb.co2_tax},
                        {"interest", cb.interest},
                        {"grid", {{"price_per_mwh", cb.grid.price},
                                  {"co2_rate_t_per_mwh", cb.grid.co2_rate}}},
                        {"converter_dc", cb.converter_dc},
                        {"converter_ac", cb.converter_ac}};
    return doc;
}

} // namespace h2sc
