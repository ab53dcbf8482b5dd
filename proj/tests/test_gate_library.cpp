#include "gate_helpers.hpp"

#include "supermag/error.hpp"
#include "supermag/gate_library.hpp"

#include <doctest.h>

#include <functional>
#include <random>

using namespace supermag;
using namespace supermag::gates;
using testutil::L;
using testutil::row_of;

namespace {

// Checks a single-output table against a boolean function of its inputs.
void check_function(const GateCell &cell, const std::string &out,
                    const std::function<bool(const std::vector<bool> &)> &f)
{
    auto t = truth_table(cell);
    REQUIRE(t.rows.size() == (1U << t.inputs.size()));
    std::size_t col = 0;
    while (t.outputs[col] != out)
        ++col;
    for (const auto &row : t.rows) {
        std::vector<bool> in;
        for (std::size_t i = 0; i < t.inputs.size(); ++i)
            in.push_back(row[i] == Level::One);
        CHECK(row[t.inputs.size() + col] == L(f(in)));
    }
}

} // namespace

TEST_CASE("switch-count ledger")
{
    CHECK(build_inverter().switch_count() == 2);
    CHECK(build_inverter(true).switch_count() == 2);
    CHECK(build_nand().switch_count() == 4);
    CHECK(build_tristate().switch_count() == 1);
    CHECK(build_mux().switch_count() == 2);
    CHECK(build_xor().switch_count() == 6);
    CHECK(build_latch().switch_count() == 3);
    CHECK(build_dff().switch_count() == 6);
    CHECK(build_dff(true).switch_count() == 10);
    CHECK(build_aoi22().switch_count() == 8);
    CHECK(build_full_adder().switch_count() == 20);
    CHECK(build_ram_cell().switch_count() == 4);
}

TEST_CASE("inverter and buffer")
{
    auto t = truth_table(build_inverter());
    CHECK(row_of(t, {{"A", Level::One}})["Y"] == Level::Zero);
    CHECK(row_of(t, {{"A", Level::Zero}})["Y"] == Level::One);
    auto b = truth_table(build_inverter(true));
    CHECK(row_of(b, {{"A", Level::One}})["Y"] == Level::One);
    CHECK(row_of(b, {{"A", Level::Zero}})["Y"] == Level::Zero);

    Engine e(build_inverter().circuit);
    e.set_input("A", Level::One);
    e.settle();
    e.set_input("A", Level::Z);
    e.settle();
    CHECK(e.level("Y") == Level::Zero);
}

TEST_CASE("NAND family")
{
    check_function(build_nand(), "Y", [](const std::vector<bool> &v) -> bool { return !(v[0] && v[1]); });
    check_function(build_and(), "Y", [](const std::vector<bool> &v) -> bool { return v[0] && v[1]; });
    check_function(build_or(), "Y", [](const std::vector<bool> &v) -> bool { return v[0] || v[1]; });
    check_function(build_nor(), "Y", [](const std::vector<bool> &v) -> bool { return !(v[0] || v[1]); });
    check_function(build_aoi22(), "Y", [](const std::vector<bool> &v) -> bool { return !((v[0] && v[1]) || (v[2] && v[3])); });
    check_function(build_ao22(), "Y", [](const std::vector<bool> &v) -> bool { return (v[0] && v[1]) || (v[2] && v[3]); });
}

TEST_CASE("non-dual spec is rejected")
{
    SeriesParallelSpec bad{"bad", SpExpr::series({SpExpr::lit("A"), SpExpr::lit("B")}),
                           SpExpr::series({SpExpr::lit("A"), SpExpr::lit("B")}), false, {}};
    CHECK_THROWS_AS(build_from_spec(bad), InputError);
}

TEST_CASE("tri-state")
{
    auto t = truth_table(build_tristate());
    CHECK(row_of(t, {{"En", Level::One}, {"A", Level::Zero}})["Y"] == Level::Zero);
    CHECK(row_of(t, {{"En", Level::One}, {"A", Level::One}})["Y"] == Level::One);
    CHECK(row_of(t, {{"En", Level::Zero}, {"A", Level::One}})["Y"] == Level::Z);

    Engine e(build_tristate().circuit);
    e.set_input("En", Level::One);
    e.set_input("A", Level::Zero);
    e.settle();
    e.set_input("En", Level::Z);
    e.set_input("A", Level::One);
    e.settle();
    CHECK(e.level("Y") == Level::One);
}

TEST_CASE("MUX: exhaustive and no A-B path")
{
    auto t = truth_table(build_mux());
    CHECK(row_of(t, {{"S", Level::Zero}, {"A", Level::One}, {"B", Level::Zero}})["Y"] == Level::One);
    CHECK(row_of(t, {{"S", Level::One}, {"A", Level::One}, {"B", Level::Zero}})["Y"] == Level::Zero);
    check_function(build_mux(), "Y", [](const std::vector<bool> &v) -> bool { return v[2] ? v[1] : v[0]; });
}

TEST_CASE("XOR internals and output")
{
    auto t = truth_table(build_xor());
    auto r = row_of(t, {{"A", Level::One}, {"B", Level::Zero}});
    CHECK(r["V_C"] == Level::Zero);
    CHECK(r["V_D"] == Level::One);
    CHECK(r["Y"] == Level::One);
    check_function(build_xor(), "Y", [](const std::vector<bool> &v) -> bool { return v[0] != v[1]; });
    check_function(build_xor(), "V_C", [](const std::vector<bool> &v) -> bool { return !v[0]; });
    check_function(build_xor(), "V_D", [](const std::vector<bool> &v) -> bool { return v[0]; });
}

TEST_CASE("full adder")
{
    auto t = truth_table(build_full_adder());
    auto r = row_of(t, {{"A", Level::One}, {"B", Level::One}, {"Cin", Level::Zero}});
    CHECK(r["X"] == Level::Zero);
    CHECK(r["SUM"] == Level::Zero);
    CHECK(r["Cout"] == Level::One);
    check_function(build_full_adder(), "SUM", [](const std::vector<bool> &v) -> bool { return (v[0] + v[1] + v[2]) % 2 == 1; });
    check_function(build_full_adder(), "Cout", [](const std::vector<bool> &v) -> bool { return v[0] + v[1] + v[2] >= 2; });
}

TEST_CASE("latch holds when disabled")
{
    Engine e(build_latch().circuit);
    e.set_input("En", Level::One);
    e.set_input("D", Level::One);
    e.settle();
    CHECK(e.level("Q") == Level::One);
    e.set_input("En", Level::Zero);
    e.settle();
    e.set_input("D", Level::Zero);
    e.settle();
    CHECK(e.level("Q") == Level::One);
    e.set_input("En", Level::One);
    e.settle();
    CHECK(e.level("Q") == Level::Zero);
}

TEST_CASE("DFF captures on the rising edge only")
{
    Engine e(build_dff().circuit);
    auto step = [&](Level d, Level clk) {
        e.set_input("D", d);
        e.set_input("clk", clk);
        e.settle();
        return e.level("Q");
    };
    CHECK(step(Level::One, Level::Zero) == Level::Zero);
    CHECK(step(Level::Zero, Level::Zero) == Level::Zero);
    CHECK(step(Level::One, Level::Zero) == Level::Zero);
    CHECK(step(Level::One, Level::One) == Level::One);
    CHECK(step(Level::Zero, Level::One) == Level::One); // D changes while clk high
    CHECK(step(Level::Zero, Level::Zero) == Level::One);
    CHECK(step(Level::Zero, Level::One) == Level::Zero);
}

TEST_CASE("DFF with reset clears asynchronously")
{
    for (Level clk : {Level::Zero, Level::One}) {
        Engine e(build_dff(true).circuit);
        e.set_input("R", Level::Zero);
        e.set_input("D", Level::One);
        e.set_input("clk", Level::Zero);
        e.settle();
        e.set_input("clk", Level::One);
        e.settle();
        REQUIRE(e.level("Q") == Level::One);
        e.set_input("clk", clk);
        e.settle();
        e.set_input("R", Level::One);
        e.settle();
        CHECK(e.level("Q") == Level::Zero);
        e.set_input("R", Level::Zero);
        e.settle();
        CHECK(e.level("Q") == Level::Zero);
    }
}

TEST_CASE("LUT")
{
    std::vector<Level> x{Level::Zero, Level::One, Level::One, Level::Zero};
    check_function(build_lut(2, x), "Y", [](const std::vector<bool> &v) -> bool { return v[0] != v[1]; });
    CHECK_THROWS_AS(build_lut(2, {Level::One, Level::Zero}), InputError);

    // Reprogram through the config ports, then release them.
    GateCell lut = build_lut(2, {Level::Zero, Level::Zero, Level::Zero, Level::Zero});
    Engine e(lut.circuit);
    for (int i = 0; i < 4; ++i)
        e.set_input("P" + std::to_string(i), x[i]);
    e.settle();
    for (int i = 0; i < 4; ++i)
        e.set_input("P" + std::to_string(i), Level::Z);
    for (int a = 0; a < 4; ++a) {
        e.set_input("I0", L(a & 1));
        e.set_input("I1", L(a & 2));
        e.settle();
        CHECK(e.level("Y") == x[a]);
    }
}

TEST_CASE("LUT with three inputs")
{
    std::mt19937 rng(3);
    std::vector<Level> bits(8);
    for (auto &b : bits)
        b = L(rng() & 1);
    check_function(build_lut(3, bits), "Y", [&](const std::vector<bool> &v) -> bool { return bits[v[0] + 2 * v[1] + 4 * v[2]] == Level::One; });
}

TEST_CASE("crossbar identity routing")
{
    GateCell xb = build_crossbar(3, 3, {{true, false, false}, {false, true, false}, {false, false, true}});
    Engine e(xb.circuit);
    e.set_input("R0", Level::One);
    e.set_input("R1", Level::Zero);
    e.settle();
    CHECK(e.level("C0") == Level::One);
    CHECK(e.level("C1") == Level::Zero);
    CHECK(e.level("C2") == Level::Z);
    CHECK_THROWS_AS(build_crossbar(2, 2, {{true}}), InputError);
}

TEST_CASE("polymorphism: rail swap complements, input reversal permutes")
{
    for (const char *name : {"inv", "buf", "nand", "and", "or", "nor", "aoi22", "ao22", "xor"}) {
        CAPTURE(name);
        GateCell cell = make_cell(name);
        auto base = truth_table(cell);

        GateCell swapped = cell;
        swap_rails(swapped);
        auto ts = truth_table(swapped);
        for (std::size_t r = 0; r < base.rows.size(); ++r)
            for (std::size_t o = base.inputs.size(); o < base.rows[r].size(); ++o)
                CHECK(ts.rows[r][o] == invert(base.rows[r][o]));

        for (std::size_t i = 0; i < base.inputs.size(); ++i) {
            GateCell inv = cell;
            invert_input(inv, base.inputs[i]);
            auto ti = truth_table(inv);
            const std::size_t flip = 1U << (base.inputs.size() - 1 - i);
            for (std::size_t r = 0; r < base.rows.size(); ++r)
                for (std::size_t o = base.inputs.size(); o < base.rows[r].size(); ++o)
                    CHECK(ti.rows[r][o] == base.rows[r ^ flip][o]);
        }
    }
    GateCell mux = build_mux();
    CHECK_THROWS_AS(invert_input(mux, "A"), InputError);
}

TEST_CASE("truth tables: errors")
{
    CHECK_THROWS_AS(truth_table(build_ram_cell()), InputError);
    CHECK_THROWS_AS(make_cell("nand3"), InputError);
    // A cell whose both pull networks conduct shorts.
    GateCell inv = build_inverter();
    invert_input(inv, "A");
    for (auto &sw : inv.circuit.switches)
        sw.orientation = Orientation::Forward;
    CHECK_THROWS_AS(truth_table(inv), ShortCircuitError);
}

TEST_CASE("gate non-volatility: releasing switching-wire inputs keeps every output")
{
    for (const auto &name : cell_names()) {
        if (name == "ram_cell")
            continue;
        CAPTURE(name);
        GateCell cell = make_cell(name);
        std::vector<const Port *> ctl = cell.ports_of(PortKind::Control);
        std::vector<const Port *> dat = cell.ports_of(PortKind::Data);
        std::vector<const Port *> ins = ctl;
        ins.insert(ins.end(), dat.begin(), dat.end());
        for (unsigned v = 0; v < (1U << ins.size()); ++v) {
            Engine e(cell.circuit);
            for (std::size_t i = 0; i < ins.size(); ++i)
                e.set_input(ins[i]->node, L((v >> i) & 1));
            e.settle();
            std::vector<Level> before(e.levels().begin(), e.levels().end());
            for (const Port *p : ctl)
                e.set_input(p->node, Level::Z);
            auto r = e.settle();
            CHECK(r.switch_events == 0);
            for (const Port &p : cell.ports)
                if (p.kind == PortKind::Output)
                    CHECK(e.level(p.node) == before[p.node]);
        }
    }
}

TEST_CASE("complementarity: no output ever reaches both rails")
{
    std::vector<GateCell> cells;
    for (const auto &name : cell_names())
        cells.push_back(make_cell(name));
    cells.push_back(build_lut(2, {Level::Zero, Level::One, Level::One, Level::Zero}));
    for (const auto &cell : cells) {
        CAPTURE(cell.name);
        auto r = testutil::check_complementarity(cell);
        CHECK(r.vectors > 0);
        CHECK(r.violations == 0);
        CHECK(r.shorts == 0);
    }
}
