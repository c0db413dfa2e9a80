// Command-line front end: batch case runs, plot-data export, external
// solution import, and synthetic input generation.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "h2sc/runner.hpp"
#include "h2sc/solution_io.hpp"

namespace {

void print_tolerances() {
    h2sc::LpOptions lp;
    h2sc::MipOptions mip;
    std::printf("tolerances (pinned):\n");
    std::printf("  lp.feasibility      %.1e\n", lp.feas_tol);
    std::printf("  lp.optimality       %.1e\n", lp.opt_tol);
    std::printf("  lp.ratio_stretch    %.1e\n", lp.ratio_tol);
    std::printf("  lp.pivot            %.1e\n", lp.pivot_tol);
    std::printf("  mip.integrality     %.1e\n", mip.int_tol);
    std::printf("  mip.gap             %.1e\n", mip.gap_tol);
}

int cmd_run(const std::string& config_path, const h2sc::RunOverrides& ov, bool seed_check_flag,
            bool tolerances_flag) {
    if (tolerances_flag) print_tolerances();
    if (config_path.empty()) {
        if (tolerances_flag) return 0;
        std::cerr << "error: --config is required\n";
        return 1;
    }
    h2sc::RunConfig cfg = h2sc::apply_overrides(h2sc::parse_run_config(config_path), ov);
    if (seed_check_flag) {
        h2sc::SeedCheckResult res = h2sc::seed_check(cfg);
        if (res.identical) {
            std::cout << "seed-check: PASS (two runs byte-identical)\n";
        } else {
            std::cout << "seed-check: FAIL\n";
            for (const std::string& m : res.mismatches)
                std::cout << "  mismatch in " << m << "\n";
        }
        std::cout << "artifacts: " << (std::filesystem::path(cfg.out_dir) /
                                       h2sc::to_string(cfg.kind) / std::to_string(cfg.year) /
                                       h2sc::scale_label(cfg.annual_t))
                                          .string()
                  << "\n";
        return res.exit_code;
    }
    int code = h2sc::run_case(cfg);
    std::cout << "wrote "
              << (std::filesystem::path(cfg.out_dir) / h2sc::to_string(cfg.kind) /
                  std::to_string(cfg.year) / h2sc::scale_label(cfg.annual_t))
                     .string()
              << (code == 2 ? " (some combinations infeasible)" : "") << "\n";
    return code;
}

int cmd_plots(const std::string& reports_dir, const std::string& out_path) {
    std::string csv = h2sc::emit_plots_csv(reports_dir);
    if (out_path.empty() || out_path == "-") {
        std::cout << csv;
    } else {
        h2sc::write_file_atomic(out_path, csv);
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

// Rebuilds the model for one labeled combination of a config and prices an
// externally produced solution (from the mps_export workflow).
int cmd_import(const std::string& config_path, const std::string& label,
               const std::string& solution_path, const std::string& out_path) {
    h2sc::RunConfig cfg = h2sc::parse_run_config(config_path);
    h2sc::CatalogBundle bundle = h2sc::load_catalog(cfg.catalog_path, cfg.year);
    if (cfg.kind == h2sc::CaseKind::expensive_ng) bundle.cost_book.ng_price = 10.5;
    auto years = h2sc::parse_weather_csv(cfg.weather_path);
    std::optional<std::vector<double>> shape;
    if (!cfg.shape_path.empty()) shape = h2sc::parse_shape_csv(cfg.shape_path);
    auto demand = h2sc::make_demand(cfg.demand_kind, cfg.annual_t, shape);
    auto scen = h2sc::reduce_periods(years, cfg.reduction, demand,
                                     cfg.kind == h2sc::CaseKind::ideal);

    auto combos = h2sc::runner_detail::enumerate_combos(cfg, bundle.cost_book);
    const h2sc::runner_detail::Combo* combo = nullptr;
    for (const auto& c : combos)
        if (c.label == label) combo = &c;
    if (!combo) {
        std::cerr << "error: no combination labeled '" << label << "' in this case; have:";
        for (const auto& c : combos) std::cerr << " " << c.label;
        std::cerr << "\n";
        return 1;
    }

    h2sc::Formulation f(bundle.catalog, combo->book, scen, combo->restrictions);
    f.build();
    h2sc::ImportedSolution imp = h2sc::read_solution(f.model(), h2sc::read_file(solution_path));
    for (const std::string& w : imp.warnings)
        std::cerr << "warning: variable " << w << " missing from solution, using 0\n";
    double viol = f.model().max_violation(imp.x);
    std::cerr << "max constraint violation: " << viol << "\n";
    h2sc::CostReport rep = h2sc::lcoh_breakdown(f, imp.x);
    h2sc::ojson j;
    j["label"] = label;
    j["max_violation"] = viol;
    j["report"] = h2sc::cost_report_to_json(rep);
    std::string text = j.dump(2) + "\n";
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        h2sc::write_file_atomic(out_path, text);
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

int cmd_gen_data(const std::string& out_dir, int first_year, int n_years, unsigned long long seed) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::string weather = h2sc::synthetic_weather_csv(first_year, n_years, seed);
    std::string shape = h2sc::synthetic_shape_csv();
    h2sc::write_file_atomic((fs::path(out_dir) / ("weather_" + std::to_string(n_years) + "yr.csv"))
                                .string(),
                            weather);
    h2sc::write_file_atomic((fs::path(out_dir) / "demand_shape.csv").string(), shape);
    std::cout << "wrote weather_" << n_years << "yr.csv and demand_shape.csv under " << out_dir
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hydrogen + electricity supply-chain optimizer"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir_ov, backend_ov, reduction_ov;
    bool seed_check_flag = false, tolerances_flag = false;

    CLI::App* run = app.add_subcommand("run", "Solve a configured case and write reports");
    run->add_option("--config", config_path, "Run configuration JSON");
    run->add_option("--out-dir", out_dir_ov, "Override the output directory");
    run->add_option("--backend", backend_ov, "embedded | mps_export");
    run->add_option("--reduction", reduction_ov,
                    "full_year | seasonal_weeks(k) | first_hours(n)");
    run->add_flag("--seed-check", seed_check_flag, "Run twice; require identical bytes");
    run->add_flag("--tolerances", tolerances_flag, "Print pinned solver tolerances");

    std::string reports_dir = "results", plots_out;
    CLI::App* plots = app.add_subcommand("plots-csv", "Bundle reports into a long-format CSV");
    plots->add_option("--reports-dir", reports_dir, "Directory containing report.json trees");
    plots->add_option("--out", plots_out, "Output CSV path ('-' = stdout)");

    std::string imp_label = "base", imp_solution, imp_out;
    CLI::App* imp = app.add_subcommand("import-solution",
                                       "Price an externally solved model (name value lines)");
    imp->add_option("--config", config_path, "Run configuration JSON")->required();
    imp->add_option("--label", imp_label, "Combination label (default: base)");
    imp->add_option("--solution", imp_solution, "Solution file")->required();
    imp->add_option("--out", imp_out, "Output JSON path ('-' = stdout)");

    std::string gen_dir = "data";
    int gen_first_year = 2019, gen_years = 3;
    unsigned long long gen_seed = 20190101ULL;
    CLI::App* gen = app.add_subcommand("gen-data", "Write synthetic weather/shape CSVs");
    gen->add_option("--out-dir", gen_dir, "Destination directory");
    gen->add_option("--first-year", gen_first_year, "First weather year");
    gen->add_option("--years", gen_years, "Number of consecutive years");
    gen->add_option("--seed", gen_seed, "Noise seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            h2sc::RunOverrides ov;
            if (!out_dir_ov.empty()) ov.out_dir = out_dir_ov;
            if (!backend_ov.empty()) ov.backend = backend_ov;
            if (!reduction_ov.empty()) ov.reduction = reduction_ov;
            return cmd_run(config_path, ov, seed_check_flag, tolerances_flag);
        }
        if (plots->parsed()) return cmd_plots(reports_dir, plots_out);
        if (imp->parsed()) return cmd_import(config_path, imp_label, imp_solution, imp_out);
        if (gen->parsed()) return cmd_gen_data(gen_dir, gen_first_year, gen_years, gen_seed);
        std::cout << app.help();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
