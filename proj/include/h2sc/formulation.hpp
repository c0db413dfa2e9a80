#pragma once

// Compiles catalog + scenarios into the two-stage stochastic MILP:
// first-stage capacities and piecewise-capex segment binaries, second-stage
// hourly dispatch per scenario. Variable/row ordering is deterministic:
// first-stage block first, then per scenario, per hour, a fixed dispatch
// tuple. Restrictions fix excluded capacities to zero but never change the
// census, so model structure is independent of the case being run.

#include <map>
#include <string>
#include <vector>

#include "h2sc/domain.hpp"
#include "h2sc/model.hpp"

namespace h2sc {

// The five hydrogen production technologies.
enum class H2Tech { pem, alkaline, atr_cc, smr_cc, smr };

inline constexpr std::array<H2Tech, 5> kH2Techs{H2Tech::pem, H2Tech::alkaline,
                                                H2Tech::atr_cc, H2Tech::smr_cc, H2Tech::smr};

inline const char* to_string(H2Tech t) {
    switch (t) {
        case H2Tech::pem: return "pem";
        case H2Tech::alkaline: return "alkaline";
        case H2Tech::atr_cc: return "atr_cc";
        case H2Tech::smr_cc: return "smr_cc";
        default: return "smr";
    }
}

inline bool is_electrolyzer(H2Tech t) { return t == H2Tech::pem || t == H2Tech::alkaline; }

inline ElectrolyzerKind electrolyzer_of(H2Tech t) {
    return t == H2Tech::pem ? ElectrolyzerKind::pem : ElectrolyzerKind::alkaline;
}
inline ReformerKind reformer_of(H2Tech t) {
    switch (t) {
        case H2Tech::atr_cc: return ReformerKind::atr_cc;
        case H2Tech::smr_cc: return ReformerKind::smr_cc;
        default: return ReformerKind::smr;
    }
}

// Which technologies may be built. Excluded ones get capacity fixed to 0.
struct Restrictions {
    bool pv = true;
    bool battery = true;
    bool ngcc = true;
    bool grid = true;
    bool tank = true;
    std::map<ElectrolyzerKind, bool> electrolyzer{{ElectrolyzerKind::pem, true},
                                                  {ElectrolyzerKind::alkaline, true}};
    std::map<ReformerKind, bool> reformer{{ReformerKind::atr_cc, true},
                                          {ReformerKind::smr_cc, true},
                                          {ReformerKind::smr, true}};

    // Single production technology + single electricity source. The PV
    // source brings the battery along (PV is unusable at night without it);
    // NGCC and grid sources stand alone. The tank is always available.
    static Restrictions unique(H2Tech tech, PowerSource source) {
        Restrictions r;
        r.pv = source == PowerSource::pv;
        r.battery = source == PowerSource::pv;
        r.ngcc = source == PowerSource::ngcc;
        r.grid = source == PowerSource::grid;
        for (auto& [k, allowed] : r.electrolyzer)
            allowed = is_electrolyzer(tech) && k == electrolyzer_of(tech);
        for (auto& [k, allowed] : r.reformer)
            allowed = !is_electrolyzer(tech) && k == reformer_of(tech);
        return r;
    }
};

struct FormulationOptions {
    // Test-only switch: replace the piecewise capex with a linear curve
    // priced at the top breakpoint's per-unit cost (keeps the optimum
    // positively homogeneous in demand).
    bool linear_capex = false;
};

// PV output per MW installed at one hour: converter efficiency times the
// temperature-corrected irradiance fraction, clamped at zero.
inline double pv_output_coeff(const PvParams& pv, double ghi, double temp, double eta_dc) {
    double cell = temp + ghi * (pv.noct - 20.0) / 800.0 - pv.t_ref;
    double v = eta_dc * (1.0 + pv.gamma * cell) * ghi / 1000.0;
    return v > 0.0 ? v : 0.0;
}

// Indices of every variable the formulation creates.
struct VarRefs {
    int X_P = -1, X_B = -1, X_NGCC = -1, X_HT = -1;
    std::map<ElectrolyzerKind, int> X_W;
    std::map<ReformerKind, int> X_NR;
    std::map<ReformerKind, std::vector<int>> seg_x, seg_y;
    // Dispatch, indexed [scenario][t].
    std::vector<std::vector<int>> ch, dch, ess, ngcc, mg, d2a, a2d, out, ht;
    std::map<ElectrolyzerKind, std::vector<std::vector<int>>> p2h;
    std::map<ReformerKind, std::vector<std::vector<int>>> h_nr;
};

class Formulation {
public:
    Formulation(TechnologyCatalog catalog, CostBook book, ScenarioSet scenarios,
                Restrictions restrictions = {}, FormulationOptions options = {})
        : cat_(std::move(catalog)),
          book_(std::move(book)),
          scen_(std::move(scenarios)),
          rest_(restrictions),
          opt_(options) {
        scen_.check();
        if (scen_.horizon() < 2) fail("formulation requires a horizon of T >= 2");
        T_ = int(scen_.horizon());
        S_ = int(scen_.scenarios.size());
    }

    const TechnologyCatalog& catalog() const { return cat_; }
    const CostBook& cost_book() const { return book_; }
    const ScenarioSet& scenarios() const { return scen_; }
    const Restrictions& restrictions() const { return rest_; }
    ModelInstance& model() { return m_; }
    const ModelInstance& model() const { return m_; }
    const VarRefs& refs() const { return r_; }

    // ---- construction steps (public so tests can count rows per block) ----

    void add_first_stage_vars() {
        r_.X_P = m_.add_var("X_P", 0, rest_.pv ? kInf : 0, 0, Stage::first);
        r_.X_B = m_.add_var("X_B", 0, rest_.battery ? kInf : 0, 0, Stage::first);
        r_.X_NGCC = m_.add_var("X_NGCC", 0, rest_.ngcc ? kInf : 0, 0, Stage::first);
        for (const auto& e : cat_.electrolyzers) {
            bool ok = rest_.electrolyzer.at(e.kind);
            r_.X_W[e.kind] = m_.add_var(std::string("X_W[") + to_string(e.kind) + "]", 0,
                                        ok ? kInf : 0, 0, Stage::first);
        }
        for (const auto& n : cat_.reformers) {
            bool ok = rest_.reformer.at(n.kind);
            r_.X_NR[n.kind] = m_.add_var(std::string("X_NR[") + to_string(n.kind) + "]", 0,
                                         ok ? kInf : 0, 0, Stage::first);
        }
        r_.X_HT = m_.add_var("X_HT", 0, rest_.tank ? kInf : 0, 0, Stage::first);
        if (!opt_.linear_capex) {
            for (const auto& n : cat_.reformers) {
                bool ok = rest_.reformer.at(n.kind);
                auto& xs = r_.seg_x[n.kind];
                auto& ys = r_.seg_y[n.kind];
                for (std::size_t k = 0; k < n.cost_curve.size(); ++k) {
                    xs.push_back(m_.add_var(
                        var_key_k(std::string("x[") + to_string(n.kind) + "]", int(k)), 0,
                        ok ? 1 : 0, 0, Stage::first));
                }
                for (std::size_t k = 0; k < n.cost_curve.size(); ++k) {
                    ys.push_back(m_.add_var(
                        var_key_k(std::string("y[") + to_string(n.kind) + "]", int(k)), 0,
                        ok ? 1 : 0, 0, Stage::first, /*is_binary=*/true));
                }
            }
        }
    }

    // Piecewise installed-cost selection: at most one unit of interpolation
    // weight, spread over at most two adjacent breakpoints.
    void add_piecewise_capex(const ReformerParams& n) {
        if (opt_.linear_capex) return;
        if (n.cost_curve.size() < 2)
            fail(std::string("piecewise capex for ") + to_string(n.kind) +
                 " needs at least 2 breakpoints");
        const auto& xs = r_.seg_x.at(n.kind);
        const auto& ys = r_.seg_y.at(n.kind);
        int K = int(n.cost_curve.size());
        std::string base = std::string("pw[") + to_string(n.kind) + "]";

        std::vector<std::pair<int, double>> def{{r_.X_NR.at(n.kind), 1.0}};
        for (int k = 0; k < K; ++k) def.emplace_back(xs[k], -n.cost_curve[k].capacity_t_day);
        m_.add_row(base + "[def]", std::move(def), Sense::eq, 0);

        std::vector<std::pair<int, double>> sumx;
        for (int k = 0; k < K; ++k) sumx.emplace_back(xs[k], 1.0);
        m_.add_row(base + "[sum_x]", std::move(sumx), Sense::le, 1.0);

        for (int k = 0; k < K; ++k)
            m_.add_row(base + "[link][k" + std::to_string(k) + "]",
                       {{xs[k], 1.0}, {ys[k], -1.0}}, Sense::le, 0);

        std::vector<std::pair<int, double>> sumy;
        for (int k = 0; k < K; ++k) sumy.emplace_back(ys[k], 1.0);
        m_.add_row(base + "[sum_y]", std::move(sumy), Sense::le, 2.0);

        for (int k = 0; k < K; ++k)
            for (int j = k + 2; j < K; ++j)
                m_.add_row(base + "[adj][k" + std::to_string(k) + "][k" + std::to_string(j) + "]",
                           {{ys[k], 1.0}, {ys[j], 1.0}}, Sense::le, 1.0);
    }

    void add_scenario_vars(int s) {
        auto grow = [&](std::vector<std::vector<int>>& v) {
            if (int(v.size()) <= s) v.resize(s + 1);
        };
        grow(r_.ch); grow(r_.dch); grow(r_.ess); grow(r_.ngcc); grow(r_.mg);
        grow(r_.d2a); grow(r_.a2d); grow(r_.out); grow(r_.ht);
        for (const auto& e : cat_.electrolyzers) {
            auto& v = r_.p2h[e.kind];
            if (int(v.size()) <= s) v.resize(s + 1);
        }
        for (const auto& n : cat_.reformers) {
            auto& v = r_.h_nr[n.kind];
            if (int(v.size()) <= s) v.resize(s + 1);
        }
        double mg_ub = rest_.grid ? kInf : 0;
        for (int t = 0; t < T_; ++t) {
            r_.ch[s].push_back(m_.add_var(var_key("ch", s, t), 0, kInf, 0, Stage::second));
            r_.dch[s].push_back(m_.add_var(var_key("dch", s, t), 0, kInf, 0, Stage::second));
            r_.ess[s].push_back(m_.add_var(var_key("ESS", s, t), 0, kInf, 0, Stage::second));
            r_.ngcc[s].push_back(m_.add_var(var_key("NGCC", s, t), 0, kInf, 0, Stage::second));
            r_.mg[s].push_back(m_.add_var(var_key("MG", s, t), 0, mg_ub, 0, Stage::second));
            r_.d2a[s].push_back(m_.add_var(var_key("D2A", s, t), 0, kInf, 0, Stage::second));
            r_.a2d[s].push_back(m_.add_var(var_key("A2D", s, t), 0, kInf, 0, Stage::second));
            r_.out[s].push_back(m_.add_var(var_key("out", s, t), 0, kInf, 0, Stage::second));
            for (const auto& e : cat_.electrolyzers)
                r_.p2h[e.kind][s].push_back(m_.add_var(
                    var_key(std::string("p2h[") + to_string(e.kind) + "]", s, t), 0, kInf, 0,
                    Stage::second));
            for (const auto& n : cat_.reformers)
                r_.h_nr[n.kind][s].push_back(m_.add_var(
                    var_key(std::string("h_nr[") + to_string(n.kind) + "]", s, t), 0, kInf, 0,
                    Stage::second));
            r_.ht[s].push_back(m_.add_var(var_key("HT", s, t), 0, kInf, 0, Stage::second));
        }
    }

    // Charge/discharge power caps, storage recursion, state-of-charge band.
    // The recursion wraps t=0 to t=T-1 (cyclic year; no free stored energy).
    void add_battery(int s) {
        const auto& b = cat_.battery;
        double eta = book_.converter_dc * b.round_trip_leg;
        double dt = scen_.dt;
        for (int t = 0; t < T_; ++t) {
            m_.add_row(row_key("bat_ch", s, t),
                       {{r_.ch[s][t], 1.0}, {r_.X_B, -b.power_ratio}}, Sense::le, 0);
            m_.add_row(row_key("bat_dch", s, t),
                       {{r_.dch[s][t], 1.0}, {r_.X_B, -b.power_ratio}}, Sense::le, 0);
        }
        for (int t = 0; t < T_; ++t) {
            int prev = t == 0 ? T_ - 1 : t - 1;
            m_.add_row(row_key("bat_rec", s, t),
                       {{r_.ess[s][t], 1.0},
                        {r_.ess[s][prev], -(1.0 - b.self_discharge)},
                        {r_.ch[s][t], -eta * dt},
                        {r_.dch[s][t], dt / eta}},
                       Sense::eq, 0);
        }
        for (int t = 0; t < T_; ++t) {
            m_.add_row(row_key("bat_soc_lo", s, t),
                       {{r_.X_B, b.soc_min}, {r_.ess[s][t], -1.0}}, Sense::le, 0);
            m_.add_row(row_key("bat_soc_hi", s, t),
                       {{r_.ess[s][t], 1.0}, {r_.X_B, -b.soc_max}}, Sense::le, 0);
        }
    }

    void add_ngcc(int s) {
        const auto& n = cat_.ngcc;
        for (int t = 0; t < T_; ++t) {
            m_.add_row(row_key("ngcc_hi", s, t), {{r_.ngcc[s][t], 1.0}, {r_.X_NGCC, -1.0}},
                       Sense::le, 0);
            m_.add_row(row_key("ngcc_lo", s, t), {{r_.X_NGCC, n.min_load}, {r_.ngcc[s][t], -1.0}},
                       Sense::le, 0);
        }
    }

    void add_electrolyzer(int s, ElectrolyzerKind kind) {
        const auto& e = cat_.electrolyzer(kind);
        int xw = r_.X_W.at(kind);
        std::string hi = std::string("w_hi[") + to_string(kind) + "]";
        std::string lo = std::string("w_lo[") + to_string(kind) + "]";
        for (int t = 0; t < T_; ++t) {
            m_.add_row(row_key(hi, s, t), {{r_.p2h[kind][s][t], 1.0}, {xw, -1.0}}, Sense::le, 0);
            m_.add_row(row_key(lo, s, t), {{xw, e.min_load}, {r_.p2h[kind][s][t], -1.0}},
                       Sense::le, 0);
        }
    }

    // Output band plus hour-to-hour ramp limits; capacities are t/day
    // externally and t/h internally (divide by 24). Ramp wraps cyclically.
    void add_reformer(int s, ReformerKind kind) {
        const auto& n = cat_.reformer(kind);
        int xnr = r_.X_NR.at(kind);
        const auto& h = r_.h_nr[kind][s];
        double tau = 1.0 / 24.0;
        std::string base = std::string("nr[") + to_string(kind) + "]";
        for (int t = 0; t < T_; ++t) {
            m_.add_row(row_key(base + "[hi]", s, t), {{h[t], 1.0}, {xnr, -tau}}, Sense::le, 0);
            m_.add_row(row_key(base + "[lo]", s, t), {{xnr, n.min_load * tau}, {h[t], -1.0}},
                       Sense::le, 0);
        }
        for (int t = 0; t < T_; ++t) {
            int prev = t == 0 ? T_ - 1 : t - 1;
            m_.add_row(row_key(base + "[ramp_up]", s, t),
                       {{h[t], 1.0}, {h[prev], -1.0}, {xnr, -n.ramp_fraction * tau}}, Sense::le, 0);
            m_.add_row(row_key(base + "[ramp_dn]", s, t),
                       {{h[prev], 1.0}, {h[t], -1.0}, {xnr, -n.ramp_fraction * tau}}, Sense::le, 0);
        }
    }

    // Tank level recursion (cyclic) with leak; demand enters as a sink.
    // HT >= 0 enforces demand satisfaction; HT <= X_HT sizes the tank.
    void add_tank(int s) {
        const auto& tk = cat_.tank;
        double dt = scen_.dt;
        for (int t = 0; t < T_; ++t) {
            int prev = t == 0 ? T_ - 1 : t - 1;
            std::vector<std::pair<int, double>> rec{
                {r_.ht[s][t], 1.0}, {r_.ht[s][prev], -(1.0 - tk.leak)}};
            for (const auto& e : cat_.electrolyzers)
                rec.emplace_back(r_.p2h[e.kind][s][t], -dt / e.specific_energy);
            for (const auto& n : cat_.reformers)
                rec.emplace_back(r_.h_nr[n.kind][s][t], -dt);
            m_.add_row(row_key("ht_rec", s, t), std::move(rec), Sense::eq,
                       -scen_.scenarios[s].demand.shape[t] * dt);
        }
        for (int t = 0; t < T_; ++t)
            m_.add_row(row_key("ht_cap", s, t), {{r_.ht[s][t], 1.0}, {r_.X_HT, -1.0}}, Sense::le,
                       0);
    }

    // DC bus: PV input, battery, converter flows, curtailment, electrolyzer
    // draw. AC bus: generation, grid import, converter flows, reformer draw.
    // Each conversion pass loses (1 - converter_ac).
    void add_bus_balances(int s) {
        const auto& sc = scen_.scenarios[s];
        double eta_ac = book_.converter_ac;
        for (int t = 0; t < T_; ++t) {
            double pv_coef = pv_output_coeff(cat_.pv, sc.ghi[t], sc.temp[t], book_.converter_dc);
            std::vector<std::pair<int, double>> dc{
                {r_.X_P, pv_coef},        {r_.ch[s][t], -1.0}, {r_.dch[s][t], 1.0},
                {r_.d2a[s][t], -1.0},     {r_.a2d[s][t], eta_ac}, {r_.out[s][t], -1.0}};
            for (const auto& e : cat_.electrolyzers) dc.emplace_back(r_.p2h[e.kind][s][t], -1.0);
            m_.add_row(row_key("dc_bal", s, t), std::move(dc), Sense::eq, 0);

            std::vector<std::pair<int, double>> ac{{r_.ngcc[s][t], 1.0},
                                                   {r_.mg[s][t], 1.0},
                                                   {r_.d2a[s][t], eta_ac},
                                                   {r_.a2d[s][t], -1.0}};
            for (const auto& n : cat_.reformers) ac.emplace_back(r_.h_nr[n.kind][s][t], -n.elec_rate);
            m_.add_row(row_key("ac_bal", s, t), std::move(ac), Sense::eq, 0);
        }
    }

    // Annualized capex + fixed O&M on capacities; fuel, tax, and variable
    // cost on dispatch, scaled to $/yr by scenario weight x annualization.
    void set_objective() {
        double r = book_.interest;
        m_.set_objective(r_.X_P, (crf(r, cat_.pv.lifespan_yr) + cat_.pv.omf) *
                                     cat_.pv.capex_per_kw * 1000.0);
        m_.set_objective(r_.X_B, (crf(r, cat_.battery.lifespan_yr) + cat_.battery.omf) *
                                     cat_.battery.capex_per_mwh);
        m_.set_objective(r_.X_NGCC, (crf(r, cat_.ngcc.lifespan_yr) + cat_.ngcc.omf) *
                                        cat_.ngcc.capex_per_mw);
        for (const auto& e : cat_.electrolyzers)
            m_.set_objective(r_.X_W.at(e.kind),
                             (crf(r, e.lifespan_yr) + e.omf) * e.capex_per_kw * 1000.0);
        for (const auto& n : cat_.reformers) {
            double annual = crf(r, n.lifespan_yr) + n.omf;
            if (opt_.linear_capex) {
                const auto& top = n.cost_curve.back();
                m_.set_objective(r_.X_NR.at(n.kind),
                                 annual * top.installed_cost / top.capacity_t_day);
            } else {
                const auto& xs = r_.seg_x.at(n.kind);
                for (std::size_t k = 0; k < n.cost_curve.size(); ++k)
                    m_.set_objective(xs[k], annual * n.cost_curve[k].installed_cost);
            }
        }
        m_.set_objective(r_.X_HT,
                         (crf(r, cat_.tank.lifespan_yr) + cat_.tank.omf) * cat_.tank.capex_per_t);

        double scale = scen_.weight * scen_.annualization * scen_.dt;
        double ngcc_coef = scale * (cat_.ngcc.fuel_rate * book_.ng_price +
                                    cat_.ngcc.co2_rate * book_.co2_tax + cat_.ngcc.variable_cost);
        double mg_coef = scale * (book_.grid.price + book_.grid.co2_rate * book_.co2_tax);
        for (int s = 0; s < S_; ++s) {
            for (int t = 0; t < T_; ++t) {
                m_.set_objective(r_.ngcc[s][t], ngcc_coef);
                m_.set_objective(r_.mg[s][t], mg_coef);
            }
            for (const auto& n : cat_.reformers) {
                double coef = scale * (n.ng_rate * book_.ng_price + n.co2_rate * book_.co2_tax);
                for (int t = 0; t < T_; ++t) m_.set_objective(r_.h_nr[n.kind][s][t], coef);
            }
        }
    }

    Formulation& build() {
        if (built_) return *this;
        add_first_stage_vars();
        for (const auto& n : cat_.reformers) add_piecewise_capex(n);
        for (int s = 0; s < S_; ++s) {
            add_scenario_vars(s);
            add_battery(s);
            add_ngcc(s);
            for (const auto& e : cat_.electrolyzers) add_electrolyzer(s, e.kind);
            for (const auto& n : cat_.reformers) add_reformer(s, n.kind);
            add_tank(s);
            add_bus_balances(s);
        }
        set_objective();
        built_ = true;
        return *this;
    }

    // ---- solution extraction ----

    Design extract_design(const std::vector<double>& x) const {
        Design d;
        d.X_P = x[r_.X_P];
        d.X_B = x[r_.X_B];
        d.X_NGCC = x[r_.X_NGCC];
        for (const auto& [k, j] : r_.X_W) d.X_W[k] = x[j];
        for (const auto& [k, j] : r_.X_NR) d.X_NR[k] = x[j];
        for (const auto& [k, xs] : r_.seg_x) {
            PiecewiseChoice pc;
            for (int j : xs) pc.x.push_back(x[j]);
            for (int j : r_.seg_y.at(k)) pc.y.push_back(x[j]);
            d.segments[k] = std::move(pc);
        }
        d.X_HT = x[r_.X_HT];
        return d;
    }

    Dispatch extract_dispatch(const std::vector<double>& x) const {
        Dispatch d;
        auto grab = [&](const std::vector<std::vector<int>>& ids) {
            std::vector<std::vector<double>> v(ids.size());
            for (std::size_t s = 0; s < ids.size(); ++s)
                for (int j : ids[s]) v[s].push_back(x[j]);
            return v;
        };
        d.ch = grab(r_.ch);
        d.dch = grab(r_.dch);
        d.ess = grab(r_.ess);
        d.ngcc = grab(r_.ngcc);
        d.mg = grab(r_.mg);
        d.d2a = grab(r_.d2a);
        d.a2d = grab(r_.a2d);
        d.out = grab(r_.out);
        for (const auto& [k, ids] : r_.p2h) d.p2h[k] = grab(ids);
        for (const auto& [k, ids] : r_.h_nr) d.h_nr[k] = grab(ids);
        d.ht = grab(r_.ht);
        return d;
    }

    // First-stage annualized capex + fixed O&M at a solution point, $/yr.
    double annualized_capex(const std::vector<double>& x) const {
        double total = 0;
        for (std::size_t j = 0; j < m_.vars().size(); ++j)
            if (m_.var(int(j)).stage == Stage::first) total += m_.var(int(j)).obj * x[j];
        return total;
    }

private:
    TechnologyCatalog cat_;
    CostBook book_;
    ScenarioSet scen_;
    Restrictions rest_;
    FormulationOptions opt_;
    ModelInstance m_;
    VarRefs r_;
    int T_ = 0, S_ = 0;
    bool built_ = false;
};

inline Formulation build(TechnologyCatalog catalog, CostBook book, ScenarioSet scenarios,
                         Restrictions restrictions = {}, FormulationOptions options = {}) {
    Formulation f(std::move(catalog), std::move(book), std::move(scenarios), restrictions,
                  options);
    f.build();
    return f;
}

} // namespace h2sc
