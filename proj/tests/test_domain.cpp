// Parameter-book unit tests: annualization arithmetic, catalog validation,
// and the strict JSON schema round trip.

#include "testutil.hpp"

#include "h2sc/catalog_io.hpp"
#include "h2sc/domain.hpp"

using namespace h2sc;

TEST_CASE("capital recovery factor matches a high-precision oracle") {
    // Frozen reference values computed with 30-digit arithmetic.
    CHECK(crf(0.07, 1) == Catch::Approx(1.07).margin(1e-12));
    CHECK(crf(0.07, 10) == Catch::Approx(0.14237750272736471493).margin(1e-12));
    CHECK(crf(0.07, 25) == Catch::Approx(0.085810517220665620406).margin(1e-12));
    CHECK(crf(0.07, 30) == Catch::Approx(0.080586403511111193415).margin(1e-12));
    CHECK(crf(0.07, 35) == Catch::Approx(0.077233959649003250629).margin(1e-12));
}

TEST_CASE("capital recovery factor equals its textbook form") {
    for (double r : {0.01, 0.07, 0.15}) {
        for (double L : {1.0, 5.0, 25.0, 60.0}) {
            double pow_l = std::pow(1.0 + r, L);
            double textbook = r * pow_l / (pow_l - 1.0);
            CHECK(crf(r, L) == Catch::Approx(textbook).epsilon(1e-14));
        }
    }
}

TEST_CASE("capital recovery factor limits and domain errors") {
    // Very long lifetimes converge to the interest rate instead of
    // overflowing the compounding term.
    CHECK(crf(0.07, 10000) == Catch::Approx(0.07).margin(1e-15));
    CHECK(std::isfinite(crf(0.07, 1e6)));
    CHECK_THROWS_AS(crf(0.0, 25), Error);
    CHECK_THROWS_AS(crf(-0.05, 25), Error);
    CHECK_THROWS_AS(crf(0.07, 0.5), Error);
    CHECK_THROWS_AS(crf(std::nan(""), 25), Error);
}

TEST_CASE("default catalog passes validation") {
    auto bundle = tu::default_bundle(2030);
    CHECK(validate_catalog(bundle.catalog).empty());
    CHECK(validate_cost_book(bundle.cost_book).empty());
    // All three price years resolve.
    CHECK(validate_catalog(tu::default_bundle(2040).catalog).empty());
    CHECK(validate_catalog(tu::default_bundle(2050).catalog).empty());
}

TEST_CASE("year-indexed prices resolve against the requested year") {
    auto b30 = tu::default_bundle(2030);
    auto b40 = tu::default_bundle(2040);
    auto b50 = tu::default_bundle(2050);
    CHECK(b30.catalog.pv.capex_per_kw == 751);
    CHECK(b40.catalog.pv.capex_per_kw == 685);
    CHECK(b50.catalog.pv.capex_per_kw == 618);
    CHECK(b30.cost_book.co2_tax == 100);
    CHECK(b40.cost_book.co2_tax == 150);
    CHECK(b50.cost_book.co2_tax == 200);
    // Scalars (no year map) pass through unchanged.
    CHECK(b30.cost_book.ng_price == 3.5);
    CHECK(b50.cost_book.ng_price == 3.5);
}

TEST_CASE("catalog validation flags broken parameter books") {
    auto bundle = tu::default_bundle(2030);

    SECTION("negative capex") {
        bundle.catalog.pv.capex_per_kw = -1;
        CHECK_FALSE(validate_catalog(bundle.catalog).empty());
    }
    SECTION("state-of-charge band inverted") {
        bundle.catalog.battery.soc_min = 0.97;
        CHECK_FALSE(validate_catalog(bundle.catalog).empty());
    }
    SECTION("breakpoints must increase strictly") {
        auto& curve = bundle.catalog.reformers[0].cost_curve;
        curve[1].capacity_t_day = curve[0].capacity_t_day;
        CHECK_FALSE(validate_catalog(bundle.catalog).empty());
    }
    SECTION("per-unit cost may not increase along the curve") {
        auto& curve = bundle.catalog.reformers[0].cost_curve;
        // Make the last breakpoint pricier per t/day than the one before.
        const auto& prev = curve[curve.size() - 2];
        curve.back().installed_cost =
            prev.installed_cost / prev.capacity_t_day * curve.back().capacity_t_day * 1.1;
        CHECK_FALSE(validate_catalog(bundle.catalog).empty());
    }
    SECTION("min load outside [0,1]") {
        bundle.catalog.ngcc.min_load = 1.4;
        CHECK_FALSE(validate_catalog(bundle.catalog).empty());
    }
    SECTION("converter efficiency outside (0,1]") {
        bundle.cost_book.converter_ac = 0.0;
        CHECK_FALSE(validate_cost_book(bundle.cost_book).empty());
    }
    SECTION("violations carry field names") {
        bundle.catalog.tank.capex_per_t = -5;
        auto v = validate_catalog(bundle.catalog);
        REQUIRE_FALSE(v.empty());
        bool mentions_tank = false;
        for (const auto& viol : v)
            if (viol.field.find("tank") != std::string::npos) mentions_tank = true;
        CHECK(mentions_tank);
    }
}

TEST_CASE("catalog JSON form is canonical and idempotent") {
    ojson doc = ojson::parse(read_file(tu::data_path("catalog.json")));
    CatalogBundle first = catalog_from_json(doc, 2030);
    ojson once = catalog_to_json(first);
    CatalogBundle second = catalog_from_json(once, 2030);
    ojson twice = catalog_to_json(second);
    CHECK(once.dump(2) == twice.dump(2));
    CHECK(first.catalog.pv.capex_per_kw == second.catalog.pv.capex_per_kw);
    CHECK(first.catalog.reformers.size() == second.catalog.reformers.size());
    for (std::size_t i = 0; i < first.catalog.reformers.size(); ++i) {
        const auto& a = first.catalog.reformers[i];
        const auto& b = second.catalog.reformers[i];
        REQUIRE(a.cost_curve.size() == b.cost_curve.size());
        for (std::size_t k = 0; k < a.cost_curve.size(); ++k) {
            CHECK(a.cost_curve[k].capacity_t_day == b.cost_curve[k].capacity_t_day);
            CHECK(a.cost_curve[k].installed_cost == b.cost_curve[k].installed_cost);
        }
    }
}

TEST_CASE("strict schema rejects malformed catalogs") {
    ojson doc = ojson::parse(read_file(tu::data_path("catalog.json")));
    SECTION("unknown key") {
        doc["pv"]["typo_key"] = 1;
        CHECK_THROWS_AS(catalog_from_json(doc, 2030), Error);
    }
    SECTION("missing required key") {
        doc["pv"].erase("capex_per_kw");
        CHECK_THROWS_AS(catalog_from_json(doc, 2030), Error);
    }
    SECTION("year absent from a year map") {
        CHECK_THROWS_AS(catalog_from_json(doc, 2077), Error);
    }
    SECTION("non-numeric leaf") {
        doc["tank"]["capex_per_t"] = "expensive";
        CHECK_THROWS_AS(catalog_from_json(doc, 2030), Error);
    }
}

TEST_CASE("demand profiles integrate to their annual total") {
    DemandProfile p;
    p.kind = DemandKind::constant;
    p.annual_total = 8760.0;
    p.shape.assign(8760, 1.0);
    CHECK_NOTHROW(p.validate());

    SECTION("negative entries rejected") {
        p.shape[17] = -0.5;
        CHECK_THROWS_AS(p.validate(), Error);
    }
    SECTION("integration mismatch rejected") {
        p.shape[0] += 1.0;
        CHECK_THROWS_AS(p.validate(), Error);
    }
    SECTION("zero total rejected") {
        p.annual_total = 0;
        CHECK_THROWS_AS(p.validate(), Error);
    }
}

TEST_CASE("scenario sets enforce rectangular data and unit weights") {
    ScenarioSet set = tu::flat_set(2, 24, 500, 15, 1.0);
    CHECK_NOTHROW(set.check());
    CHECK(set.horizon() == 24);

    SECTION("ragged series rejected") {
        set.scenarios[1].temp.pop_back();
        CHECK_THROWS_AS(set.check(), Error);
    }
    SECTION("weights must sum to one") {
        set.weight = 1.0;  // two scenarios at weight 1 each
        CHECK_THROWS_AS(set.check(), Error);
    }
}

TEST_CASE("enum names are stable") {
    CHECK(std::string(to_string(ElectrolyzerKind::pem)) == "pem");
    CHECK(std::string(to_string(ElectrolyzerKind::alkaline)) == "alkaline");
    CHECK(std::string(to_string(ReformerKind::atr_cc)) == "atr_cc");
    CHECK(std::string(to_string(ReformerKind::smr_cc)) == "smr_cc");
    CHECK(std::string(to_string(ReformerKind::smr)) == "smr");
    CHECK(std::string(to_string(PowerSource::pv)) == "pv");
    CHECK(std::string(to_string(PowerSource::ngcc)) == "ngcc");
    CHECK(std::string(to_string(PowerSource::grid)) == "grid");
}

TEST_CASE("catalog lookups find each technology") {
    auto bundle = tu::default_bundle(2030);
    CHECK(bundle.catalog.electrolyzer(ElectrolyzerKind::pem).specific_energy == 48);
    CHECK(bundle.catalog.electrolyzer(ElectrolyzerKind::alkaline).specific_energy == 50);
    CHECK(bundle.catalog.reformer(ReformerKind::smr).co2_rate == 9.17);
    CHECK(bundle.catalog.reformer(ReformerKind::atr_cc).elec_rate == 3.6);
    CHECK(bundle.catalog.reformer(ReformerKind::smr_cc).ng_rate == 171);
}
