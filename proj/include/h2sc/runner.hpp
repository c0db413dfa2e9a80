#pragma once

// Batch case runner: loads a JSON run config, builds the scenario set,
// solves the requested study (single optimization, technology-pair
// enumeration, tax sweep, ...), and writes three artifacts per run under
// <out_dir>/<case>/<year>/<scale>/: report.json, table_e.csv, and
// model_stats.json. All writes are atomic and all outputs are
// deterministic: re-running an unchanged config reproduces identical bytes.

#include <filesystem>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "h2sc/branch_bound.hpp"
#include "h2sc/catalog_io.hpp"
#include "h2sc/csv.hpp"
#include "h2sc/metrics.hpp"
#include "h2sc/mps.hpp"
#include "h2sc/scenario.hpp"
#include "h2sc/simplex.hpp"

namespace h2sc {

enum class CaseKind { base, unique, no_low_c, expensive_ng, co2_sweep, ideal };

inline const char* to_string(CaseKind c) {
    switch (c) {
        case CaseKind::base: return "base";
        case CaseKind::unique: return "unique";
        case CaseKind::no_low_c: return "no_low_c";
        case CaseKind::expensive_ng: return "expensive_ng";
        case CaseKind::co2_sweep: return "co2_sweep";
        default: return "ideal";
    }
}

inline CaseKind parse_case_kind(const std::string& s) {
    for (CaseKind c : {CaseKind::base, CaseKind::unique, CaseKind::no_low_c,
                       CaseKind::expensive_ng, CaseKind::co2_sweep, CaseKind::ideal})
        if (s == to_string(c)) return c;
    fail("unknown case \"" + s + "\" (expected base, unique, no_low_c, expensive_ng, "
         "co2_sweep, or ideal)");
}

enum class Backend { embedded, mps_export };

inline const char* to_string(Backend b) {
    return b == Backend::embedded ? "embedded" : "mps_export";
}

inline Backend parse_backend(const std::string& s) {
    if (s == "embedded") return Backend::embedded;
    if (s == "mps_export") return Backend::mps_export;
    fail("unknown backend \"" + s + "\" (expected embedded or mps_export)");
}

inline ReductionPolicy parse_reduction(const std::string& s) {
    if (s == "full_year") return ReductionPolicy::full_year();
    auto grab = [&](const std::string& prefix) -> std::optional<int> {
        if (s.rfind(prefix + "(", 0) != 0 || s.back() != ')') return std::nullopt;
        std::string inner = s.substr(prefix.size() + 1, s.size() - prefix.size() - 2);
        try {
            std::size_t used = 0;
            int v = std::stoi(inner, &used);
            if (used != inner.size()) return std::nullopt;
            return v;
        } catch (...) {
            return std::nullopt;
        }
    };
    if (auto k = grab("seasonal_weeks")) return ReductionPolicy::seasonal_weeks(*k);
    if (auto n = grab("first_hours")) return ReductionPolicy::first_hours(*n);
    fail("unknown reduction \"" + s +
         "\" (expected full_year, seasonal_weeks(k), or first_hours(n))");
}

struct RunConfig {
    CaseKind kind = CaseKind::base;
    int year = 2030;
    std::string catalog_path;
    std::string weather_path;
    DemandKind demand_kind = DemandKind::constant;
    double annual_t = 0;
    std::string shape_path;  // required for variable demand
    ReductionPolicy reduction = ReductionPolicy::first_hours(168);
    Backend backend = Backend::embedded;
    std::string out_dir = "results";
    int threads = 0;  // 0 = hardware concurrency
    std::vector<std::string> disabled;  // technologies forced to zero capacity
};

// Maps a technology name from the config's "disable" list onto the
// restriction flags. Unknown names are schema errors.
inline void apply_disable(Restrictions& r, const std::string& name) {
    if (name == "pv") r.pv = false;
    else if (name == "battery") r.battery = false;
    else if (name == "ngcc") r.ngcc = false;
    else if (name == "grid") r.grid = false;
    else if (name == "tank") r.tank = false;
    else if (name == "pem") r.electrolyzer[ElectrolyzerKind::pem] = false;
    else if (name == "alkaline") r.electrolyzer[ElectrolyzerKind::alkaline] = false;
    else if (name == "atr_cc") r.reformer[ReformerKind::atr_cc] = false;
    else if (name == "smr_cc") r.reformer[ReformerKind::smr_cc] = false;
    else if (name == "smr") r.reformer[ReformerKind::smr] = false;
    else fail("disable: unknown technology \"" + name + "\"");
}

// Paths inside the config resolve relative to the config file's directory.
inline RunConfig parse_run_config(const std::string& path) {
    ojson doc;
    try {
        doc = ojson::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(path + ": " + e.what());
    }
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path q(p);
        return q.is_absolute() ? q.string() : (base / q).lexically_normal().string();
    };

    detail::JObj o(doc, path);
    RunConfig cfg;
    cfg.kind = parse_case_kind(o.str_or("case", "base"));
    cfg.year = int(o.num("year", 0));
    cfg.catalog_path = resolve(o.str_or("catalog", "catalog.json"));
    cfg.weather_path = resolve(o.str_or("weather", "weather.csv"));
    {
        detail::JObj d(o.raw("demand"), path + ".demand");
        std::string kind = d.str_or("kind", "constant");
        if (kind == "constant") cfg.demand_kind = DemandKind::constant;
        else if (kind == "variable") cfg.demand_kind = DemandKind::variable;
        else fail(path + ".demand.kind: expected constant or variable");
        cfg.annual_t = d.num("annual_t", 0);
        if (d.has("shape")) cfg.shape_path = resolve(d.str_or("shape", ""));
        d.done();
    }
    if (o.has("reduction")) cfg.reduction = parse_reduction(o.str_or("reduction", "full_year"));
    if (o.has("backend")) cfg.backend = parse_backend(o.str_or("backend", "embedded"));
    if (o.has("out_dir")) cfg.out_dir = o.str_or("out_dir", "results");
    if (o.has("threads")) cfg.threads = int(o.num("threads", 0));
    if (o.has("disable")) {
        const ojson& arr = o.raw("disable");
        if (!arr.is_array()) fail(path + ".disable: expected an array of technology names");
        Restrictions probe;  // validates the names eagerly
        for (const ojson& v : arr) {
            if (!v.is_string()) fail(path + ".disable: expected strings");
            cfg.disabled.push_back(v.get<std::string>());
            apply_disable(probe, cfg.disabled.back());
        }
    }
    o.done();

    if (cfg.demand_kind == DemandKind::variable && cfg.shape_path.empty())
        fail(path + ": variable demand requires demand.shape");
    return cfg;
}

inline std::string scale_label(double annual_t) {
    long long t = llround(annual_t);
    if (t > 0 && t % 1000 == 0) return std::to_string(t / 1000) + "kt";
    return std::to_string(t) + "t";
}

namespace runner_detail {

struct Combo {
    std::string label;
    Restrictions restrictions;
    CostBook book;  // the sweep varies the tax per combination
};

struct Outcome {
    std::string label;
    std::string status;  // optimal | infeasible | exported
    CostReport report;
    long nodes = 0;
    long lp_iterations = 0;
    double gap = 0;
};

inline std::vector<Combo> enumerate_combos(const RunConfig& cfg, const CostBook& book) {
    std::vector<Combo> combos;
    switch (cfg.kind) {
        case CaseKind::unique:
            for (H2Tech tech : kH2Techs)
                for (PowerSource src : kPowerSources)
                    combos.push_back({std::string(to_string(tech)) + "+" + to_string(src),
                                      Restrictions::unique(tech, src), book});
            break;
        case CaseKind::no_low_c: {
            Restrictions r;
            r.ngcc = false;
            combos.push_back({"no_low_c", r, book});
            break;
        }
        case CaseKind::co2_sweep:
            for (double mult : {0.5, 1.0, 1.5}) {
                CostBook b = book;
                b.co2_tax = book.co2_tax * mult;
                char label[32];
                std::snprintf(label, sizeof label, "co2_x%.2f", mult);
                combos.push_back({label, Restrictions{}, b});
            }
            break;
        default:  // base, expensive_ng, ideal: one unrestricted run
            combos.push_back({to_string(cfg.kind), Restrictions{}, book});
            break;
    }
    for (Combo& c : combos)
        for (const std::string& name : cfg.disabled) apply_disable(c.restrictions, name);
    return combos;
}

inline Outcome solve_combo(const Combo& combo, const TechnologyCatalog& cat,
                           const ScenarioSet& scen) {
    Formulation f(cat, combo.book, scen, combo.restrictions);
    f.build();
    MipOptions mo;
    MipSolution sol = solve_mip(f.model(), mo);
    Outcome out;
    out.label = combo.label;
    out.nodes = sol.nodes;
    out.lp_iterations = sol.lp_iterations;
    out.gap = sol.gap;
    if (sol.status == MipStatus::optimal) {
        out.status = "optimal";
        out.report = lcoh_breakdown(f, sol.x);
    } else if (sol.status == MipStatus::infeasible) {
        out.status = "infeasible";
    } else {
        fail("combination '" + combo.label + "' did not solve to optimality: " +
             to_string(sol.status));
    }
    return out;
}

} // namespace runner_detail

struct CaseArtifacts {
    std::string dir;
    ojson report;
    std::string table_csv;
    ojson stats;
    int exit_code = 0;
};

// Runs the whole case in memory; does not touch the filesystem.
inline CaseArtifacts run_case_in_memory(const RunConfig& cfg) {
    using runner_detail::Combo;
    using runner_detail::Outcome;

    CatalogBundle bundle = load_catalog(cfg.catalog_path, cfg.year);
    if (cfg.kind == CaseKind::expensive_ng) bundle.cost_book.ng_price = 10.5;

    std::vector<YearSeries> years = parse_weather_csv(cfg.weather_path);
    std::optional<std::vector<double>> shape;
    if (!cfg.shape_path.empty()) shape = parse_shape_csv(cfg.shape_path);
    DemandProfile demand = make_demand(cfg.demand_kind, cfg.annual_t, shape);
    ScenarioSet scen =
        reduce_periods(years, cfg.reduction, demand, cfg.kind == CaseKind::ideal);

    std::vector<Combo> combos = runner_detail::enumerate_combos(cfg, bundle.cost_book);

    CaseArtifacts art;
    std::string scale = scale_label(cfg.annual_t);
    art.dir = (std::filesystem::path(cfg.out_dir) / to_string(cfg.kind) /
               std::to_string(cfg.year) / scale)
                  .string();

    // Census comes from the unrestricted formulation; restrictions only fix
    // bounds, so every combination shares it.
    ModelStats census;
    {
        Formulation f(bundle.catalog, bundle.cost_book, scen);
        f.build();
        census = f.model().stats();
    }

    std::vector<Outcome> outcomes(combos.size());
    if (cfg.backend == Backend::mps_export) {
        for (std::size_t i = 0; i < combos.size(); ++i) {
            Formulation f(bundle.catalog, combos[i].book, scen, combos[i].restrictions);
            f.build();
            outcomes[i].label = combos[i].label;
            outcomes[i].status = "exported";
            std::filesystem::create_directories(art.dir);
            write_file_atomic(art.dir + "/" + combos[i].label + ".mps",
                              write_mps(f.model(), combos[i].label));
        }
    } else {
        unsigned hw = std::thread::hardware_concurrency();
        std::size_t width = cfg.threads > 0 ? std::size_t(cfg.threads)
                                            : std::size_t(hw > 0 ? hw : 1);
        for (std::size_t start = 0; start < combos.size(); start += width) {
            std::size_t stop = std::min(combos.size(), start + width);
            std::vector<std::future<Outcome>> batch;
            for (std::size_t i = start; i < stop; ++i)
                batch.push_back(std::async(std::launch::async, runner_detail::solve_combo,
                                           std::cref(combos[i]), std::cref(bundle.catalog),
                                           std::cref(scen)));
            for (std::size_t i = start; i < stop; ++i) outcomes[i] = batch[i - start].get();
        }
    }

    // Winner: cheapest hydrogen among solved combinations (enumeration only).
    std::string winner;
    if (cfg.kind == CaseKind::unique) {
        double best = kInf;
        for (const Outcome& oc : outcomes)
            if (oc.status == "optimal" && oc.report.lcoh_total < best) {
                best = oc.report.lcoh_total;
                winner = oc.label;
            }
    }

    bool any_infeasible = false;
    for (const Outcome& oc : outcomes)
        if (oc.status == "infeasible") any_infeasible = true;

    ojson rep;
    rep["case"] = to_string(cfg.kind);
    rep["year"] = cfg.year;
    rep["scale"] = scale;
    ojson dj;
    dj["kind"] = cfg.demand_kind == DemandKind::constant ? "constant" : "variable";
    dj["annual_t"] = cfg.annual_t;
    rep["demand"] = dj;
    rep["reduction"] = cfg.reduction.describe();
    rep["backend"] = to_string(cfg.backend);
    if (!cfg.disabled.empty()) rep["disabled"] = cfg.disabled;
    rep["scenarios"] = scen.scenarios.size();
    rep["horizon_hours"] = scen.horizon();
    if (cfg.kind == CaseKind::unique) rep["winner"] = winner.empty() ? ojson() : ojson(winner);
    ojson combos_json = ojson::array();
    for (const Outcome& oc : outcomes) {
        ojson cj;
        cj["label"] = oc.label;
        cj["status"] = oc.status;
        if (oc.status == "optimal") cj["report"] = cost_report_to_json(oc.report);
        combos_json.push_back(std::move(cj));
    }
    rep["combos"] = std::move(combos_json);
    art.report = std::move(rep);

    std::string csv = "label," + table_e_csv_header() + "\n";
    for (const Outcome& oc : outcomes)
        if (oc.status == "optimal")
            csv += oc.label + "," + table_e_csv_line(table_e_row(oc.report)) + "\n";
    art.table_csv = std::move(csv);

    ojson stats;
    stats["variables"] = census.variables;
    stats["rows"] = census.rows;
    stats["nonzeros"] = census.nonzeros;
    stats["binaries"] = census.binaries;
    ojson solver = ojson::array();
    for (const Outcome& oc : outcomes) {
        ojson sj;
        sj["label"] = oc.label;
        sj["status"] = oc.status;
        if (oc.status != "exported") {
            sj["nodes"] = oc.nodes;
            sj["lp_iterations"] = oc.lp_iterations;
            sj["gap"] = oc.gap;
        }
        solver.push_back(std::move(sj));
    }
    stats["solver"] = std::move(solver);
    art.stats = std::move(stats);

    art.exit_code = any_infeasible ? 2 : 0;
    return art;
}

inline void write_case_artifacts(const CaseArtifacts& art) {
    std::filesystem::create_directories(art.dir);
    write_file_atomic(art.dir + "/report.json", art.report.dump(2) + "\n");
    write_file_atomic(art.dir + "/table_e.csv", art.table_csv);
    write_file_atomic(art.dir + "/model_stats.json", art.stats.dump(2) + "\n");
}

// Full run: parse config, apply command-line overrides, solve, write.
struct RunOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::string> backend;
    std::optional<std::string> reduction;
};

inline RunConfig apply_overrides(RunConfig cfg, const RunOverrides& ov) {
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.backend) cfg.backend = parse_backend(*ov.backend);
    if (ov.reduction) cfg.reduction = parse_reduction(*ov.reduction);
    return cfg;
}

inline int run_case(const RunConfig& cfg) {
    CaseArtifacts art = run_case_in_memory(cfg);
    write_case_artifacts(art);
    return art.exit_code;
}

// Determinism audit: run the case twice and require identical bytes.
struct SeedCheckResult {
    bool identical = true;
    std::vector<std::string> mismatches;
    int exit_code = 0;
};

inline SeedCheckResult seed_check(const RunConfig& cfg) {
    CaseArtifacts a = run_case_in_memory(cfg);
    CaseArtifacts b = run_case_in_memory(cfg);
    SeedCheckResult res;
    res.exit_code = a.exit_code;
    auto cmp = [&](const std::string& what, const std::string& sa, const std::string& sb) {
        if (sa != sb) {
            res.identical = false;
            res.mismatches.push_back(what);
        }
    };
    cmp("report.json", a.report.dump(2), b.report.dump(2));
    cmp("table_e.csv", a.table_csv, b.table_csv);
    cmp("model_stats.json", a.stats.dump(2), b.stats.dump(2));
    write_case_artifacts(a);
    if (!res.identical) res.exit_code = 1;
    return res;
}

// Long-format CSV across every report.json below `reports_dir`, ordered by
// path so the output is reproducible.
inline std::string emit_plots_csv(const std::string& reports_dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(reports_dir)) fail("plots: no such directory: " + reports_dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::recursive_directory_iterator(reports_dir))
        if (entry.is_regular_file() && entry.path().filename() == "report.json")
            paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) fail("plots: no report.json files under " + reports_dir);

    std::string csv = "case,year,scale,label,metric,component,value\n";
    for (const std::string& p : paths) {
        ojson rep = ojson::parse(read_file(p));
        std::string head = rep.at("case").get<std::string>() + "," +
                           std::to_string(rep.at("year").get<long long>()) + "," +
                           rep.at("scale").get<std::string>() + ",";
        for (const ojson& combo : rep.at("combos")) {
            if (combo.at("status").get<std::string>() != "optimal") continue;
            std::string label = combo.at("label").get<std::string>();
            const ojson& r = combo.at("report");
            auto put = [&](const std::string& metric, const std::string& comp, double v) {
                csv += head + label + "," + metric + "," + comp + "," + fmt_double(v) + "\n";
            };
            for (auto it = r.at("lcoh_usd_per_kg").begin(); it != r.at("lcoh_usd_per_kg").end();
                 ++it)
                put("lcoh_usd_per_kg", it.key(), it.value().get<double>());
            put("lcoe_usd_per_mwh", "total", r.at("lcoe_usd_per_mwh").get<double>());
            put("carbon_intensity_t_per_t", "total",
                r.at("carbon_intensity_t_per_t").get<double>());
            put("annual_co2_kt", "total", r.at("annual_co2_kt").get<double>());
            put("annual_ng_tbtu", "total", r.at("annual_ng_tbtu").get<double>());
            const ojson& d = r.at("design");
            put("design", "pv_mw", d.at("pv_mw").get<double>());
            put("design", "battery_mwh", d.at("battery_mwh").get<double>());
            put("design", "ngcc_mw", d.at("ngcc_mw").get<double>());
            for (auto it = d.at("electrolyzer_mw").begin(); it != d.at("electrolyzer_mw").end();
                 ++it)
                put("design", it.key() + "_mw", it.value().get<double>());
            for (auto it = d.at("reformer_t_day").begin(); it != d.at("reformer_t_day").end();
                 ++it)
                put("design", it.key() + "_t_day", it.value().get<double>());
            put("design", "tank_t", d.at("tank_t").get<double>());
        }
    }
    return csv;
}

} // namespace h2sc
