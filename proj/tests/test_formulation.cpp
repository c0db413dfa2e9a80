// Model-compilation tests: variable/row census per block, coefficient-level
// checks of every constraint family, restriction handling, objective
// coefficients, and end-to-end physics on a small solvable instance.

#include "testutil.hpp"

#include "h2sc/branch_bound.hpp"
#include "h2sc/formulation.hpp"

using namespace h2sc;

namespace {

const Row& row_named(const ModelInstance& m, const std::string& name) {
    for (const auto& r : m.rows())
        if (r.name == name) return r;
    FAIL("no row named " + name);
    return m.row(0);
}

double coeff_of(const Row& r, int var) {
    for (const auto& [j, c] : r.coeffs)
        if (j == var) return c;
    return 0.0;
}

} // namespace

TEST_CASE("pv output coefficient at reference conditions") {
    auto bundle = tu::default_bundle(2030);
    const PvParams& pv = bundle.catalog.pv;
    // cell = temp + ghi*(noct-20)/800 - t_ref; v = eta*(1+gamma*cell)*ghi/1000.
    CHECK(pv_output_coeff(pv, 1000.0, 25.0, 0.98) == Catch::Approx(0.8666875).margin(1e-15));
    CHECK(pv_output_coeff(pv, 500.0, 10.0, 0.98) == Catch::Approx(0.488866875).margin(1e-15));
    CHECK(pv_output_coeff(pv, 0.0, 20.0, 0.98) == 0.0);
    // Extreme heat drives the correction negative; output clamps at zero.
    CHECK(pv_output_coeff(pv, 1000.0, 400.0, 0.98) == 0.0);
}

TEST_CASE("variable and row census") {
    auto bundle = tu::default_bundle(2030);
    // 9 capacity vars + 3 reformers x (5 weights + 5 binaries) = 39 first
    // stage; 14 dispatch vars per (scenario, hour). Rows: 14 piecewise rows
    // per reformer + 27 per (scenario, hour).
    for (auto [S, T] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{1, 8}}) {
        ScenarioSet set = tu::flat_set(S, T, 500.0, 15.0, 5.0);
        Formulation f = build(bundle.catalog, bundle.cost_book, set);
        ModelStats st = f.model().stats();
        INFO("S=" << S << " T=" << T);
        CHECK(st.variables == std::size_t(39 + 14 * S * T));
        CHECK(st.binaries == 15);
        CHECK(st.rows == std::size_t(42 + 27 * S * T));
    }
}

TEST_CASE("row counts per construction block") {
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 2, 500.0, 15.0, 5.0);
    Formulation f(bundle.catalog, bundle.cost_book, set);
    ModelInstance& m = f.model();

    f.add_first_stage_vars();
    CHECK(m.stats().variables == 39);
    CHECK(m.stats().rows == 0);

    std::size_t before = 0;
    for (const auto& n : bundle.catalog.reformers) {
        f.add_piecewise_capex(n);
        // def + sum_x + 5 link + sum_y + 6 adjacency = 14 rows per curve.
        CHECK(m.stats().rows == before + 14);
        before = m.stats().rows;
    }

    f.add_scenario_vars(0);
    CHECK(m.stats().variables == std::size_t(39 + 14 * 2));

    f.add_battery(0);
    CHECK(m.stats().rows == before + 5 * 2);  // ch/dch caps, recursion, SOC band
    before = m.stats().rows;
    f.add_ngcc(0);
    CHECK(m.stats().rows == before + 2 * 2);
    before = m.stats().rows;
    for (const auto& e : bundle.catalog.electrolyzers) {
        f.add_electrolyzer(0, e.kind);
        CHECK(m.stats().rows == before + 2 * 2);
        before = m.stats().rows;
    }
    for (const auto& n : bundle.catalog.reformers) {
        f.add_reformer(0, n.kind);
        CHECK(m.stats().rows == before + 4 * 2);  // band + cyclic ramp pair
        before = m.stats().rows;
    }
    f.add_tank(0);
    CHECK(m.stats().rows == before + 2 * 2);
    before = m.stats().rows;
    f.add_bus_balances(0);
    CHECK(m.stats().rows == before + 2 * 2);
}

TEST_CASE("battery block coefficients") {
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 3, 500.0, 15.0, 5.0);
    Formulation f = build(bundle.catalog, bundle.cost_book, set);
    const ModelInstance& m = f.model();
    const VarRefs& r = f.refs();

    // Recursion at t=0 wraps to t=T-1 (cyclic storage year).
    const Row& rec0 = row_named(m, "bat_rec[s0][t0]");
    CHECK(rec0.sense == Sense::eq);
    CHECK(rec0.rhs == 0.0);
    CHECK(coeff_of(rec0, r.ess[0][0]) == 1.0);
    CHECK(coeff_of(rec0, r.ess[0][2]) == Catch::Approx(-(1.0 - 8.3e-05)).margin(1e-15));
    // Charge gains eta = converter * leg; discharge pays 1/eta.
    CHECK(coeff_of(rec0, r.ch[0][0]) == Catch::Approx(-0.931).margin(1e-15));
    CHECK(coeff_of(rec0, r.dch[0][0]) ==
          Catch::Approx(1.0741138560687432868).margin(1e-15));

    // Power caps tie to the energy capacity through the power ratio.
    const Row& cap = row_named(m, "bat_ch[s0][t1]");
    CHECK(coeff_of(cap, r.ch[0][1]) == 1.0);
    CHECK(coeff_of(cap, r.X_B) == Catch::Approx(-0.25).margin(1e-15));

    // State-of-charge band.
    const Row& lo = row_named(m, "bat_soc_lo[s0][t1]");
    CHECK(coeff_of(lo, r.X_B) == Catch::Approx(0.15).margin(1e-15));
    CHECK(coeff_of(lo, r.ess[0][1]) == -1.0);
    const Row& hi = row_named(m, "bat_soc_hi[s0][t1]");
    CHECK(coeff_of(hi, r.X_B) == Catch::Approx(-0.95).margin(1e-15));
}

TEST_CASE("reformer block uses daily capacity with hourly dispatch") {
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 3, 500.0, 15.0, 5.0);
    Formulation f = build(bundle.catalog, bundle.cost_book, set);
    const ModelInstance& m = f.model();
    const VarRefs& r = f.refs();
    int xnr = r.X_NR.at(ReformerKind::smr);
    const auto& h = r.h_nr.at(ReformerKind::smr)[0];

    const Row& hi = row_named(m, "nr[smr][hi][s0][t0]");
    CHECK(coeff_of(hi, h[0]) == 1.0);
    CHECK(coeff_of(hi, xnr) == Catch::Approx(-1.0 / 24.0).margin(1e-18));

    const Row& lo = row_named(m, "nr[smr][lo][s0][t0]");
    CHECK(coeff_of(lo, xnr) == Catch::Approx(0.6 / 24.0).margin(1e-18));
    CHECK(coeff_of(lo, h[0]) == -1.0);

    // Cyclic ramp: t=0 references t=T-1.
    const Row& up = row_named(m, "nr[smr][ramp_up][s0][t0]");
    CHECK(coeff_of(up, h[0]) == 1.0);
    CHECK(coeff_of(up, h[2]) == -1.0);
    CHECK(coeff_of(up, xnr) == Catch::Approx(-0.2 / 24.0).margin(1e-18));
}

TEST_CASE("tank recursion embeds production, demand, and leak") {
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 2, 500.0, 15.0, 5.0);
    Formulation f = build(bundle.catalog, bundle.cost_book, set);
    const ModelInstance& m = f.model();
    const VarRefs& r = f.refs();

    const Row& rec = row_named(m, "ht_rec[s0][t1]");
    CHECK(rec.sense == Sense::eq);
    CHECK(rec.rhs == Catch::Approx(-5.0).margin(1e-15));  // -demand*dt
    CHECK(coeff_of(rec, r.ht[0][1]) == 1.0);
    CHECK(coeff_of(rec, r.ht[0][0]) == Catch::Approx(-(1.0 - 1.04e-4)).margin(1e-15));
    // Electrolyzers convert MW to t/h via specific energy; reformers are t/h.
    CHECK(coeff_of(rec, r.p2h.at(ElectrolyzerKind::pem)[0][1]) ==
          Catch::Approx(-1.0 / 48.0).margin(1e-18));
    CHECK(coeff_of(rec, r.p2h.at(ElectrolyzerKind::alkaline)[0][1]) ==
          Catch::Approx(-1.0 / 50.0).margin(1e-18));
    CHECK(coeff_of(rec, r.h_nr.at(ReformerKind::smr)[0][1]) == -1.0);

    const Row& cap = row_named(m, "ht_cap[s0][t0]");
    CHECK(coeff_of(cap, r.ht[0][0]) == 1.0);
    CHECK(coeff_of(cap, r.X_HT) == -1.0);
}

TEST_CASE("bus balances carry converter losses in both directions") {
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 2, 1000.0, 25.0, 5.0);
    Formulation f = build(bundle.catalog, bundle.cost_book, set);
    const ModelInstance& m = f.model();
    const VarRefs& r = f.refs();

    const Row& dc = row_named(m, "dc_bal[s0][t0]");
    CHECK(dc.sense == Sense::eq);
    CHECK(coeff_of(dc, r.X_P) == Catch::Approx(0.8666875).margin(1e-15));
    CHECK(coeff_of(dc, r.ch[0][0]) == -1.0);
    CHECK(coeff_of(dc, r.dch[0][0]) == 1.0);
    CHECK(coeff_of(dc, r.d2a[0][0]) == -1.0);
    CHECK(coeff_of(dc, r.a2d[0][0]) == Catch::Approx(0.95).margin(1e-15));
    CHECK(coeff_of(dc, r.out[0][0]) == -1.0);
    CHECK(coeff_of(dc, r.p2h.at(ElectrolyzerKind::pem)[0][0]) == -1.0);

    const Row& ac = row_named(m, "ac_bal[s0][t0]");
    CHECK(ac.sense == Sense::eq);
    CHECK(coeff_of(ac, r.ngcc[0][0]) == 1.0);
    CHECK(coeff_of(ac, r.mg[0][0]) == 1.0);
    CHECK(coeff_of(ac, r.d2a[0][0]) == Catch::Approx(0.95).margin(1e-15));
    CHECK(coeff_of(ac, r.a2d[0][0]) == -1.0);
    CHECK(coeff_of(ac, r.h_nr.at(ReformerKind::smr)[0][0]) ==
          Catch::Approx(-0.96).margin(1e-15));
    CHECK(coeff_of(ac, r.h_nr.at(ReformerKind::atr_cc)[0][0]) ==
          Catch::Approx(-3.6).margin(1e-15));
}

TEST_CASE("piecewise capacity selection structure") {
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 2, 500.0, 15.0, 5.0);
    Formulation f = build(bundle.catalog, bundle.cost_book, set);
    const ModelInstance& m = f.model();
    const VarRefs& r = f.refs();

    const Row& def = row_named(m, "pw[smr][def]");
    CHECK(def.sense == Sense::eq);
    CHECK(coeff_of(def, r.X_NR.at(ReformerKind::smr)) == 1.0);
    CHECK(coeff_of(def, r.seg_x.at(ReformerKind::smr)[0]) == -5.0);
    CHECK(coeff_of(def, r.seg_x.at(ReformerKind::smr)[4]) == -1200.0);

    const Row& sx = row_named(m, "pw[smr][sum_x]");
    CHECK(sx.sense == Sense::le);
    CHECK(sx.rhs == 1.0);
    const Row& sy = row_named(m, "pw[smr][sum_y]");
    CHECK(sy.rhs == 2.0);

    // Segment weight is gated by its binary; non-adjacent binaries conflict.
    const Row& link = row_named(m, "pw[smr][link][k3]");
    CHECK(coeff_of(link, r.seg_x.at(ReformerKind::smr)[3]) == 1.0);
    CHECK(coeff_of(link, r.seg_y.at(ReformerKind::smr)[3]) == -1.0);
    const Row& adj = row_named(m, "pw[smr][adj][k0][k2]");
    CHECK(adj.rhs == 1.0);
    // y binaries are flagged for the branch-and-bound layer.
    CHECK(m.var(r.seg_y.at(ReformerKind::smr)[2]).is_binary);
    CHECK_FALSE(m.var(r.seg_x.at(ReformerKind::smr)[2]).is_binary);
}

TEST_CASE("restrictions fix excluded capacities without changing the census") {
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 2, 500.0, 15.0, 5.0);

    Formulation open = build(bundle.catalog, bundle.cost_book, set);
    Formulation pem_pv = build(bundle.catalog, bundle.cost_book, set,
                               Restrictions::unique(H2Tech::pem, PowerSource::pv));
    CHECK(open.model().stats().variables == pem_pv.model().stats().variables);
    CHECK(open.model().stats().rows == pem_pv.model().stats().rows);

    const ModelInstance& m = pem_pv.model();
    const VarRefs& r = pem_pv.refs();
    CHECK(m.var(r.X_P).ub == kInf);
    CHECK(m.var(r.X_B).ub == kInf);  // PV brings the battery
    CHECK(m.var(r.X_NGCC).ub == 0.0);
    CHECK(m.var(r.X_HT).ub == kInf);  // tank always available
    CHECK(m.var(r.X_W.at(ElectrolyzerKind::pem)).ub == kInf);
    CHECK(m.var(r.X_W.at(ElectrolyzerKind::alkaline)).ub == 0.0);
    for (const auto& [k, j] : r.X_NR) CHECK(m.var(j).ub == 0.0);
    for (const auto& [k, xs] : r.seg_x)
        for (int j : xs) CHECK(m.var(j).ub == 0.0);
    // Grid import is shut off at the dispatch level.
    CHECK(m.var(r.mg[0][0]).ub == 0.0);
    CHECK(m.var(r.mg[0][1]).ub == 0.0);

    Formulation smr_grid = build(bundle.catalog, bundle.cost_book, set,
                                 Restrictions::unique(H2Tech::smr, PowerSource::grid));
    const ModelInstance& g = smr_grid.model();
    const VarRefs& rg = smr_grid.refs();
    CHECK(g.var(rg.X_P).ub == 0.0);
    CHECK(g.var(rg.X_B).ub == 0.0);
    CHECK(g.var(rg.X_NR.at(ReformerKind::smr)).ub == kInf);
    CHECK(g.var(rg.X_NR.at(ReformerKind::smr_cc)).ub == 0.0);
    CHECK(g.var(rg.mg[0][0]).ub == kInf);
}

TEST_CASE("objective coefficients (frozen 2030 values)") {
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 2, 500.0, 15.0, 5.0);  // annualization 4380
    Formulation f = build(bundle.catalog, bundle.cost_book, set);
    const ModelInstance& m = f.model();
    const VarRefs& r = f.refs();

    CHECK(m.var(r.X_P).obj == Catch::Approx(73022.703696401441).epsilon(1e-12));
    CHECK(m.var(r.X_B).obj == Catch::Approx(37492.560610929679).epsilon(1e-12));
    CHECK(m.var(r.X_NGCC).obj == Catch::Approx(347431.55166199681).epsilon(1e-12));
    CHECK(m.var(r.X_W.at(ElectrolyzerKind::pem)).obj ==
          Catch::Approx(128115.8496518907).epsilon(1e-12));
    // Piecewise: cost sits on the weights, none on the capacity itself.
    CHECK(m.var(r.X_NR.at(ReformerKind::smr)).obj == 0.0);
    CHECK(m.var(r.seg_x.at(ReformerKind::smr)[0]).obj ==
          Catch::Approx(1292809.8954355121).epsilon(1e-12));
    CHECK(m.var(r.seg_y.at(ReformerKind::smr)[0]).obj == 0.0);

    // Dispatch: fuel + carbon tax + variable cost, scaled by
    // weight * annualization * dt = 4380.
    CHECK(m.var(r.ngcc[0][0]).obj == Catch::Approx(150781.5).epsilon(1e-12));
    CHECK(m.var(r.mg[0][0]).obj == Catch::Approx(1158948.0).epsilon(1e-12));
    CHECK(m.var(r.h_nr.at(ReformerKind::smr)[0][0]).obj ==
          Catch::Approx(5902050.0).epsilon(1e-12));
    // Electrolyzer power is priced through the buses, not directly.
    CHECK(m.var(r.p2h.at(ElectrolyzerKind::pem)[0][0]).obj == 0.0);
    CHECK(m.var(r.ch[0][0]).obj == 0.0);
}

TEST_CASE("linear capex option replaces the piecewise block") {
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 2, 500.0, 15.0, 5.0);
    FormulationOptions opt;
    opt.linear_capex = true;
    Formulation f = build(bundle.catalog, bundle.cost_book, set, Restrictions{}, opt);
    ModelStats st = f.model().stats();
    CHECK(st.variables == std::size_t(9 + 14 * 2));
    CHECK(st.binaries == 0);
    CHECK(st.rows == std::size_t(27 * 2));
    CHECK(f.model().var(f.refs().X_NR.at(ReformerKind::smr)).obj ==
          Catch::Approx(65691.904500912671).epsilon(1e-12));
}

TEST_CASE("grid-powered reformer instance solves to its closed form") {
    // Flat 1 t/h demand, reformer-only + grid. The cheapest design is a
    // 24 t/day unit at full utilization with no tank inventory.
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 24, 0.0, 15.0, 1.0);
    Formulation f = build(bundle.catalog, bundle.cost_book, set,
                          Restrictions::unique(H2Tech::smr, PowerSource::grid));
    MipSolution s = solve_mip(f.model());
    REQUIRE(s.status == MipStatus::optimal);
    CHECK(f.model().max_violation(s.x) <= 1e-6);

    Design d = f.extract_design(s.x);
    CHECK(d.X_NR.at(ReformerKind::smr) == Catch::Approx(24.0).margin(1e-6));
    CHECK(d.X_P == 0.0);
    CHECK(d.X_NGCC == 0.0);
    CHECK(d.X_HT == Catch::Approx(0.0).margin(1e-7));

    Dispatch dis = f.extract_dispatch(s.x);
    for (int t = 0; t < 24; ++t) {
        CHECK(dis.h_nr.at(ReformerKind::smr)[0][t] == Catch::Approx(1.0).margin(1e-7));
        CHECK(dis.mg[0][t] == Catch::Approx(0.96).margin(1e-7));
        CHECK(dis.ht[0][t] == Catch::Approx(0.0).margin(1e-7));
    }
    // First-stage cost splits off exactly.
    double capex = f.annualized_capex(s.x);
    double dispatch_cost = s.objective - capex;
    // 8760 h * 1 t/h * (123 MMBtu/t * 3.5 + 9.17 t/t * 100 + 0.96 MWh/t * 264.6)
    double expect = 8760.0 * (123 * 3.5 + 9.17 * 100 + 0.96 * 264.6);
    CHECK(dispatch_cost == Catch::Approx(expect).epsilon(1e-9));
}

TEST_CASE("electrolyzer instance routes power through the dc bus") {
    // PEM + grid: power comes in on AC, crosses the converter (0.95), and
    // feeds the electrolyzer at 48 MWh/t.
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 24, 0.0, 15.0, 1.0);
    Formulation f = build(bundle.catalog, bundle.cost_book, set,
                          Restrictions::unique(H2Tech::pem, PowerSource::grid));
    MipSolution s = solve_mip(f.model());
    REQUIRE(s.status == MipStatus::optimal);
    Dispatch dis = f.extract_dispatch(s.x);
    for (int t = 0; t < 24; ++t) {
        CHECK(dis.p2h.at(ElectrolyzerKind::pem)[0][t] == Catch::Approx(48.0).margin(1e-6));
        CHECK(dis.mg[0][t] == Catch::Approx(48.0 / 0.95).margin(1e-6));
    }
    Design d = f.extract_design(s.x);
    CHECK(d.X_W.at(ElectrolyzerKind::pem) == Catch::Approx(48.0).margin(1e-6));
}

TEST_CASE("infeasible when demand cannot be tracked without a tank") {
    // Deep demand valley below the reformer minimum-load band, tank
    // disabled: no feasible dispatch exists.
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(1, 24, 0.0, 15.0, 1.0);
    for (int t = 0; t < 24; ++t)
        set.scenarios[0].demand.shape[t] = (t % 2 == 0) ? 1.5 : 0.5;  // ratio 0.33
    Restrictions rest = Restrictions::unique(H2Tech::smr, PowerSource::grid);
    rest.tank = false;
    Formulation f = build(bundle.catalog, bundle.cost_book, set, rest);
    MipSolution s = solve_mip(f.model());
    CHECK(s.status == MipStatus::infeasible);

    // The same demand is fine for the wide-band electrolyzer.
    Restrictions rest2 = Restrictions::unique(H2Tech::pem, PowerSource::grid);
    rest2.tank = false;
    Formulation f2 = build(bundle.catalog, bundle.cost_book, set, rest2);
    MipSolution s2 = solve_mip(f2.model());
    CHECK(s2.status == MipStatus::optimal);
}

TEST_CASE("stochastic scenarios share first-stage capacity") {
    // Two scenarios with different demand levels: capacity must cover the
    // larger one even though it is only half the probability mass. 1.25 t/h
    // keeps the low scenario above the unit's minimum-load band, so both
    // scenarios can track their demand exactly.
    auto bundle = tu::default_bundle(2030);
    ScenarioSet set = tu::flat_set(2, 24, 0.0, 15.0, 1.0);
    for (int t = 0; t < 24; ++t) set.scenarios[1].demand.shape[t] = 1.25;
    set.scenarios[1].demand.annual_total = 1.25 * 8760.0;
    Formulation f = build(bundle.catalog, bundle.cost_book, set,
                          Restrictions::unique(H2Tech::smr, PowerSource::grid));
    MipSolution s = solve_mip(f.model());
    REQUIRE(s.status == MipStatus::optimal);
    Design d = f.extract_design(s.x);
    CHECK(d.X_NR.at(ReformerKind::smr) == Catch::Approx(30.0).margin(1e-6));
    Dispatch dis = f.extract_dispatch(s.x);
    CHECK(dis.h_nr.at(ReformerKind::smr)[0][5] == Catch::Approx(1.0).margin(1e-6));
    CHECK(dis.h_nr.at(ReformerKind::smr)[1][5] == Catch::Approx(1.25).margin(1e-6));
}
