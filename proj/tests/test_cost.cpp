#include "supermag/cost.hpp"
#include "supermag/error.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace supermag;
using namespace supermag::cost;

namespace {

const std::string kData = SUPERMAG_DATA_DIR;

materials::Technology s4(double k = 1.0) { return materials::derive_technology(materials::preset("table_s4"), k); }

CostInputs synthetic(std::size_t n, std::size_t comb, std::size_t dff, std::size_t depth, double off,
                     std::optional<double> events)
{
    CostInputs in;
    in.n_switches = n;
    in.n_comb = comb;
    in.n_dff = dff;
    in.depth = depth;
    in.off_switches = off;
    in.events_per_cycle = events;
    in.tech = s4();
    return in;
}

netlist::Netlist inverter()
{
    return netlist::parse_netlist(R"({"name":"inv","ports":[{"name":"A","dir":"in"},{"name":"Y","dir":"out"}],
        "instances":[{"cell":"inv","id":"u","bind":{"A":"A","Y":"Y"}}]})");
}

} // namespace

TEST_CASE("area is sf_area * w * l per switch")
{
    const auto t = s4();
    const double unit = 4 * t.geometry.w * t.geometry.l;
    CHECK(area(synthetic(0, 0, 0, 0, 0, 0)) == 0.0);
    CHECK(area(synthetic(20, 20, 0, 2, 10, 0)) == doctest::Approx(20 * unit).epsilon(1e-15));
    for (std::size_t a : {1u, 7u, 100u})
        for (std::size_t b : {0u, 3u, 2048u})
            CHECK(area(synthetic(a + b, 0, 0, 0, 0, 0)) ==
                  doctest::Approx(area(synthetic(a, 0, 0, 0, 0, 0)) + area(synthetic(b, 0, 0, 0, 0, 0))).epsilon(1e-14));
    CostInputs ram = synthetic(0, 0, 0, 0, 0, 0);
    ram.ram_cells = 16384;
    CHECK(area(ram) == doctest::Approx(unit * 4 * 16384).epsilon(1e-14));
    CHECK(static_power(ram) == 0.0);
}

TEST_CASE("full adder area from the bundled netlist")
{
    const auto nl = netlist::load_netlist(kData + "/full_adder.smn");
    const CostInputs in = inputs_from_netlist(nl, s4(), {});
    CHECK(in.n_switches == 20);
    CHECK(in.depth == 2);
    CHECK(area(in) == doctest::Approx(4 * 335e-9 * 30e-9 * 20).epsilon(1e-12));
}

TEST_CASE("inverter static power")
{
    const auto t = s4();
    const CostInputs in = inputs_from_netlist(inverter(), t, {});
    CHECK(in.n_comb == 2);
    CHECK(in.off_switches == 1);
    CHECK(static_power(in) ==
          doctest::Approx(t.energy.p_sc_inv + 2 * t.energy.p_sot_fo10 / 10).epsilon(1e-12));
    CHECK(delay(in) == doctest::Approx(t.t_sw));
    CHECK(static_power(synthetic(0, 0, 0, 0, 0, 0)) == 0.0);
}

TEST_CASE("flip-flops count four driven switches")
{
    CostInputs a = synthetic(0, 0, 1, 0, 0, 0);
    CostInputs b = synthetic(0, 4, 0, 0, 0, 0);
    CHECK(static_power(a) == doctest::Approx(static_power(b)));
}

TEST_CASE("clocked scheme never leaks more than level")
{
    for (double off : {0.0, 1.0, 12.0})
        for (std::size_t comb : {0u, 2u, 30u}) {
            CostInputs in = synthetic(comb, comb, 1, 1, off, 0);
            const double level = static_power(in);
            in.scheme = SupplyScheme::Clocked;
            CHECK(static_power(in) <= level);
            CHECK(static_power(in) == doctest::Approx(off * in.tech.energy.p_sc_inv));
        }
}

TEST_CASE("switching power")
{
    CostInputs in = synthetic(2, 2, 0, 1, 1, 10.0);
    in.f_clk = 1e9;
    CHECK(switching_power(in) == doctest::Approx(10 * in.tech.energy.e_sw_unit * 1e9).epsilon(1e-12));
    CHECK(switching_power(in) == doctest::Approx(2.9e-7).epsilon(0.03));
    in.events_per_cycle = 0.0;
    CHECK(switching_power(in) == 0.0);
    in.events_per_cycle.reset();
    CHECK_THROWS_AS(switching_power(in), InputError);
    CHECK_THROWS_AS(evaluate(in), InputError);
    in.events_per_cycle = -1.0;
    CHECK_THROWS_AS(switching_power(in), InputError);
}

TEST_CASE("activity from simulation matches the trace")
{
    const auto nl = netlist::load_netlist(kData + "/full_adder.smn");
    const auto stim = sim::load_stimulus(kData + "/full_adder.stim.json");
    const auto wave = sim::simulate(nl, stim);
    std::size_t changes = wave.steps[0].switch_events;
    for (std::size_t i = 1; i < wave.steps.size(); ++i)
        for (std::size_t s = 0; s < wave.steps[i].switches.size(); ++s)
            changes += wave.steps[i].switches[s] != wave.steps[i - 1].switches[s];
    const CostInputs in = inputs_from_netlist(nl, s4(), {}, &stim);
    REQUIRE(in.events_per_cycle);
    CHECK(*in.events_per_cycle == doctest::Approx(static_cast<double>(changes) / 8.0));
    CHECK(*in.events_per_cycle > 0.0);

    NetlistCostOptions o;
    o.activity = 3.5;
    CHECK(*inputs_from_netlist(nl, s4(), o, &stim).events_per_cycle == 3.5);
}

TEST_CASE("delay and loops")
{
    CHECK(delay(synthetic(0, 0, 0, 0, 0, 0)) == 0.0);
    const auto ring = netlist::parse_netlist(R"({"name":"ring","ports":[{"name":"A","dir":"in"},{"name":"Y","dir":"out"}],
        "instances":[{"cell":"nand","id":"g1","bind":{"A":"A","B":"Y","Y":"n1"}},
                     {"cell":"inv","id":"g2","bind":{"A":"n1","Y":"Y"}}]})");
    CHECK_THROWS_AS(inputs_from_netlist(ring, s4(), {}), LoopError);
}

TEST_CASE("sequential leakage and overrides")
{
    const auto nl = netlist::load_netlist(kData + "/counter4.smn");
    const CostInputs all = inputs_from_netlist(nl, s4(), {});
    NetlistCostOptions o;
    o.count_sequential_leakage = false;
    const CostInputs comb = inputs_from_netlist(nl, s4(), o);
    CHECK(all.n_dff == 4);
    CHECK(comb.off_switches < all.off_switches);
    CHECK(comb.off_switches == 4);
    o.off_switches = 99;
    CHECK(inputs_from_netlist(nl, s4(), o).off_switches == 99);
}

TEST_CASE("PDP consistency")
{
    const CostReport r = evaluate(synthetic(20, 20, 0, 2, 10, 7.25));
    CHECK(r.pdp == (r.p_static + r.p_switching) * r.delay);
    CHECK(r.pdp > 0.0);
}

TEST_CASE("scaling laws at fixed geometry")
{
    const CostInputs base = synthetic(40, 36, 1, 3, 18, 6.0);
    const CostReport b = evaluate(base);
    for (double k : {1.0, 2.0, 5.0, 10.0}) {
        CAPTURE(k);
        const CostInputs s = rescale(base, k);
        const CostReport r = evaluate(s);
        CHECK(r.delay == doctest::Approx(b.delay / k).epsilon(1e-9));
        CHECK(s.tech.energy.e_sw_unit == doctest::Approx(base.tech.energy.e_sw_unit / std::pow(k, 4)).epsilon(1e-9));
        CHECK(s.tech.energy.p_sot_fo10 == doctest::Approx(base.tech.energy.p_sot_fo10 / std::pow(k, 3)).epsilon(1e-9));
        CHECK(s.tech.energy.p_sc_inv == doctest::Approx(base.tech.energy.p_sc_inv / std::pow(k, 5)).epsilon(1e-9));
        CHECK(r.area == b.area);
        CHECK(std::abs(r.pdp - pdp_closed_form(base, k)) <= 1e-9 * r.pdp);
    }
}

TEST_CASE("PDP-match solver recovers a planted k_opt")
{
    const CostInputs base = synthetic(20, 20, 0, 2, 10, 5.0);
    const double target = evaluate(rescale(base, 1.32)).pdp;
    CHECK(solve_kopt_for_pdp(base, target) == doctest::Approx(1.32).epsilon(1e-6));
    CHECK(solve_kopt_for_pdp(base, evaluate(base).pdp) == 1.0);
    CHECK_THROWS_AS(solve_kopt_for_pdp(base, 2 * evaluate(base).pdp), InfeasibleError);
    CHECK_THROWS_AS(solve_kopt_for_pdp(base, 0.0), InputError);
}

TEST_CASE("solver agrees with analytic inversion")
{
    // Clocked, idle design: PDP is a pure k^-6 power law.
    CostInputs base = synthetic(20, 20, 0, 2, 10, 0.0);
    base.scheme = SupplyScheme::Clocked;
    const double p1 = evaluate(base).pdp;
    for (double ratio : {1.5, 10.0, 1e4}) {
        const double analytic = std::pow(ratio, 1.0 / 6.0);
        CHECK(std::abs(solve_kopt_for_pdp(base, p1 / ratio) - analytic) <= 1e-3 * analytic);
    }
}

TEST_CASE("externals parsing")
{
    const auto e = parse_externals(R"({"technologies":{"CMOS":{"area_m2":1e-9,"power_w":2,"delay_s":null,"note":"x"},
                                                      "RSFQ":{}}})");
    REQUIRE(e.technologies.size() == 2);
    CHECK(*e.technologies.at("CMOS").area == 1e-9);
    CHECK_FALSE(e.technologies.at("CMOS").delay);
    CHECK_FALSE(e.technologies.at("CMOS").pdp());
    CHECK_THROWS_AS(parse_externals(R"({"technologies":{"X":{"power_w":0}}})"), InputError);
    CHECK_THROWS_AS(parse_externals(R"({"technologies":{"X":{"power_w":-3}}})"), InputError);
    CHECK_THROWS_AS(parse_externals(R"({"technologies":{"X":{"speed":1}}})"), InputError);
    CHECK_THROWS_AS(parse_externals(R"({"tech":{}})"), InputError);
    CHECK_THROWS_AS(parse_externals("["), InputError);
}

TEST_CASE("template externals carry no numbers")
{
    std::ifstream in(kData + "/externals.template.json");
    std::stringstream ss;
    ss << in.rdbuf();
    for (const auto &[name, m] : parse_externals(ss.str()).technologies) {
        CHECK_FALSE(m.area);
        CHECK_FALSE(m.power);
        CHECK_FALSE(m.delay);
    }
}

TEST_CASE("comparison normalization")
{
    const CostInputs base = synthetic(20, 20, 0, 2, 10, 5.0);
    const CostReport r = evaluate(base);
    ExternalMetrics ext;
    ext.technologies["Twin"] = {r.area, r.p_static + r.p_switching, r.delay};
    const Comparison c = compare(base, ext, {1.0});
    REQUIRE(c.rows.size() == 3);
    for (const auto &row : c.rows) {
        CHECK(*row.normalized.area == doctest::Approx(1.0));
        CHECK(*row.normalized.power == doctest::Approx(1.0));
        CHECK(*row.normalized.delay == doctest::Approx(1.0));
    }
    CHECK(c.pdp_match_kopt.at("Twin") == doctest::Approx(1.0));

    const Comparison d = compare(base, {}, {1.0, 5.0});
    REQUIRE(d.rows.size() == 2);
    CHECK(*d.rows[1].raw.pdp() == doctest::Approx(*d.rows[0].raw.pdp() * pdp_closed_form(base, 5) / r.pdp));
    CHECK(*d.rows[1].normalized.delay == doctest::Approx(0.2));
    CHECK(d.to_csv().rfind("technology,k_opt,area_m2", 0) == 0);
    CHECK_THROWS_AS(compare(base, {}, {}), InputError);

    ExternalMetrics slow;
    slow.technologies["Slow"] = {std::nullopt, 10 * r.p_static, 10 * r.delay};
    CHECK(compare(base, slow, {}).pdp_match_error.count("Slow") == 1);
}

TEST_CASE("report JSON round trip")
{
    CostInputs in = synthetic(20, 20, 0, 2, 10, 5.0);
    in.tech = s4(1.32);
    in.ram_cells = 3;
    in.f_clk = 2e9;
    in.scheme = SupplyScheme::Clocked;
    const std::string text = report_json(evaluate(in), in);
    for (const char *k : {"area_m2", "p_static_w", "p_switching_w", "delay_s", "pdp_j", "n_switches", "n_comb", "n_dff", "depth"})
        CHECK(text.find(std::string("\"") + k + "\"") != std::string::npos);
    const CostInputs back = inputs_from_report_json(text);
    const CostReport a = evaluate(in), b = evaluate(back);
    CHECK(b.area == doctest::Approx(a.area).epsilon(1e-12));
    CHECK(b.pdp == doctest::Approx(a.pdp).epsilon(1e-12));
    CHECK(back.tech.k_opt == 1.32);
    CHECK(back.scheme == SupplyScheme::Clocked);
    CHECK(back.ram_cells == 3);
    CHECK_THROWS_AS(inputs_from_report_json("{}"), InputError);
    CHECK_THROWS_AS(scheme_from_string("pulsed"), InputError);
}
