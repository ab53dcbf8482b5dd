#include "supermag/error.hpp"
#include "supermag/simulator.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace supermag;
using namespace supermag::sim;
using netlist::Netlist;

namespace {

const std::string kData = SUPERMAG_DATA_DIR;

Level L(bool b) { return level_of(b); }

Netlist single(const std::string &cell, const std::vector<std::string> &ins, const std::vector<std::string> &outs)
{
    Netlist nl;
    nl.name = cell;
    netlist::Instance inst{cell, "u", {}, {}, false};
    for (const auto &i : ins) {
        nl.ports.push_back({i, netlist::Direction::In});
        inst.bind[i] = i;
    }
    for (const auto &o : outs) {
        nl.ports.push_back({o, netlist::Direction::Out});
        inst.bind[o] = o;
    }
    nl.instances.push_back(inst);
    netlist::validate(nl);
    return nl;
}

std::size_t counter_value(const Simulator &s)
{
    std::size_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::size_t>(s.level("Q" + std::to_string(i)) == Level::One) << i;
    return v;
}

} // namespace

TEST_CASE("full adder over all vectors")
{
    Netlist fa = netlist::load_netlist(kData + "/full_adder.smn");
    Stimulus st = load_stimulus(kData + "/full_adder.stim.json");
    Waveform w = simulate(fa, st);
    REQUIRE(w.steps.size() == 8);
    for (std::size_t v = 0; v < 8; ++v) {
        unsigned a = (v >> 2) & 1, b = (v >> 1) & 1, c = v & 1;
        CHECK(w.level(v, "SUM") == L((a + b + c) & 1));
        CHECK(w.level(v, "Cout") == L(a + b + c >= 2));
        CHECK(w.level(v, "X") == L(a ^ b));
    }
    CHECK(w.total_shorts() == 0);
    CHECK(w.to_csv().substr(0, 26) == "A,B,Cin,SUM,Cout,X,#shorts");
}

TEST_CASE("all-Z step after a settled step keeps every net")
{
    Netlist fa = netlist::load_netlist(kData + "/full_adder.smn");
    for (unsigned v = 0; v < 8; ++v) {
        Simulator s(fa);
        s.step({{"A", L(v & 4)}, {"B", L(v & 2)}, {"Cin", L(v & 1)}});
        auto before = s.waveform().steps.back().nets;
        const auto &z = s.step({{"A", Level::Z}, {"B", Level::Z}, {"Cin", Level::Z}});
        CHECK(z.switch_events == 0);
        for (std::size_t i = 0; i < before.size(); ++i)
            if (s.waveform().nets[i] != "A" && s.waveform().nets[i] != "B" && s.waveform().nets[i] != "Cin")
                CHECK(z.nets[i] == before[i]);
    }
}

TEST_CASE("4-bit counter wraps after 16 cycles")
{
    Netlist c = netlist::load_netlist(kData + "/counter4.smn");
    for (bool clocked : {false, true}) {
        CAPTURE(clocked);
        Simulator s(c, {clocked, true});
        s.step({{"clk", Level::Zero}}, false);
        std::size_t start = 0;
        for (int cycle = 1; cycle <= 16; ++cycle) {
            s.step({{"clk", Level::One}}, true);
            CHECK(counter_value(s) == (start + cycle) % 16);
            s.step({{"clk", Level::Zero}}, false);
            if (!clocked)
                CHECK(counter_value(s) == (start + cycle) % 16);
        }
        s.step({{"clk", Level::One}}, true);
        CHECK(counter_value(s) == 1);
    }
}

TEST_CASE("clocked supplies: outputs float off-phase, state persists")
{
    Netlist c = netlist::load_netlist(kData + "/counter4.smn");
    Waveform w = simulate(c, load_stimulus(kData + "/counter4.stim.json"), {true, true});
    REQUIRE(w.steps.size() == 34);
    CHECK(w.level(0, "Q0") == Level::Z);
    CHECK_FALSE(w.steps[0].evaluate_phase);
    CHECK(w.steps[1].evaluate_phase);
    // Rising edge k lands on step 2k - 1; edge 15 shows 1111, edge 16 wraps.
    for (const char *q : {"Q0", "Q1", "Q2", "Q3"}) {
        CHECK(w.level(29, q) == Level::One);
        CHECK(w.level(31, q) == Level::Zero);
    }
}

TEST_CASE("DFF: randomized 200-step run against a behavioral model")
{
    Netlist nl = single("dff", {"D", "clk"}, {"Q"});
    std::mt19937 rng(2024);
    for (int run = 0; run < 5; ++run) {
        Simulator s(nl);
        bool d = false, clk = false, q = false;
        s.step({{"D", L(d)}, {"clk", L(clk)}});
        for (int i = 0; i < 200; ++i) {
            bool prev_clk = clk;
            // One input changes per step (setup/hold respected).
            if (rng() % 2)
                d = rng() % 2;
            else
                clk = rng() % 2;
            s.step({{"D", L(d)}, {"clk", L(clk)}});
            if (!prev_clk && clk)
                q = d;
            CHECK(s.level("Q") == L(q));
        }
    }
}

TEST_CASE("DFF with reset: randomized run, asynchronous clear")
{
    Netlist nl = single("dff_r", {"D", "clk", "R"}, {"Q"});
    std::mt19937 rng(77);
    Simulator s(nl);
    bool d = false, clk = false, r = false, m = false, q = false;
    s.step({{"D", L(d)}, {"clk", L(clk)}, {"R", L(r)}});
    for (int i = 0; i < 200; ++i) {
        switch (rng() % 5) {
        case 0: case 1: d = rng() % 2; break;
        case 2: case 3: clk = rng() % 2; break;
        default: r = rng() % 2; break;
        }
        s.step({{"D", L(d)}, {"clk", L(clk)}, {"R", L(r)}});
        if (r) {
            m = q = false;
        } else {
            if (!clk)
                m = d;
            else
                q = m;
        }
        CHECK(s.level("Q") == L(q));
        if (r)
            CHECK(s.level("Q") == Level::Zero);
    }
}

TEST_CASE("shorts name instances; can be recorded instead")
{
    Netlist bus = netlist::parse_netlist(R"({"name": "bus", "ports": [{"name": "a", "dir": "in"}, {"name": "b", "dir": "in"},
        {"name": "s", "dir": "in"}, {"name": "y", "dir": "out"}], "instances": [
        {"cell": "tristate", "id": "t1", "bind": {"A": "a", "En": "s", "Y": "y"}},
        {"cell": "tristate", "id": "t2", "bind": {"A": "b", "En": "s", "Y": "y"}}]})");
    Stimulus st;
    st.steps = {{{"a", Level::One}, {"b", Level::Zero}, {"s", Level::Zero}}, {{"s", Level::One}}};
    try {
        simulate(bus, st);
        FAIL("expected a SHORT");
    } catch (const ShortCircuitError &e) {
        CHECK(std::string(e.what()).find("t1") != std::string::npos);
        CHECK(std::string(e.what()).find("t2") != std::string::npos);
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
    Waveform w = simulate(bus, st, {false, false});
    CHECK(w.steps[0].shorts == 0);
    CHECK(w.steps[1].shorts == 1);
    CHECK(w.level(1, "y") == Level::Z);
}

TEST_CASE("combinational loop is reported with its instances")
{
    Netlist ring = netlist::parse_netlist(R"({"name": "ring", "ports": [{"name": "y", "dir": "out"}], "instances": [
        {"cell": "inv", "id": "r0", "bind": {"A": "y", "Y": "n1"}},
        {"cell": "inv", "id": "r1", "bind": {"A": "n1", "Y": "n2"}},
        {"cell": "inv", "id": "r2", "bind": {"A": "n2", "Y": "y"}}]})");
    Stimulus st;
    st.steps = {{}};
    try {
        simulate(ring, st);
        FAIL("expected a loop");
    } catch (const LoopError &e) {
        auto c = e.cycle();
        std::sort(c.begin(), c.end());
        CHECK(c == std::vector<std::string>{"r0", "r1", "r2"});
    }
}

TEST_CASE("stimulus parsing")
{
    Stimulus s = parse_stimulus(R"({"clock": "clk", "steps": [{"clk": 0, "a": "1"}, {"a": "Z", "b": null}]})");
    CHECK(*s.clock == "clk");
    CHECK(s.steps[0].at("a") == Level::One);
    CHECK(s.steps[1].at("a") == Level::Z);
    CHECK(s.steps[1].at("b") == Level::Z);
    CHECK_THROWS_AS(parse_stimulus(R"({"steps": []})"), InputError);
    CHECK_THROWS_AS(parse_stimulus(R"({"steps": [{"a": 2}]})"), InputError);
    CHECK_THROWS_AS(parse_stimulus(R"({"steps": [{"a": "x"}]})"), InputError);
    CHECK_THROWS_AS(parse_stimulus("[1, 2"), InputError);

    Netlist fa = netlist::load_netlist(kData + "/full_adder.smn");
    CHECK_THROWS_AS(simulate(fa, parse_stimulus(R"({"steps": [{"Q": 1}]})")), InputError);
    CHECK_THROWS_AS(simulate(fa, parse_stimulus(R"({"steps": [{"SUM": 1}]})")), InputError);
    CHECK_THROWS_AS(simulate(fa, parse_stimulus(R"({"clock": "clk", "steps": [{"A": 1}]})")), InputError);
}

TEST_CASE("results do not depend on instance or chain order")
{
    for (const char *file : {"/full_adder.smn", "/counter4.smn"}) {
        Netlist nl = netlist::load_netlist(kData + file);
        Stimulus st;
        std::mt19937 rng(5);
        for (int i = 0; i < 60; ++i) {
            StepInputs in;
            for (const auto &p : nl.inputs())
                in[p] = L(rng() & 1);
            st.steps.push_back(in);
        }
        Waveform ref = simulate(nl, st);
        for (int perm = 0; perm < 5; ++perm) {
            Netlist shuffled = nl;
            std::shuffle(shuffled.instances.begin(), shuffled.instances.end(), rng);
            Waveform w = simulate(shuffled, st);
            for (std::size_t i = 0; i < st.steps.size(); ++i)
                for (const auto &net : nl.nets())
                    CHECK(w.level(i, net) == ref.level(i, net));
        }
    }
}

TEST_CASE("determinism and init overrides")
{
    Netlist nl = single("dff", {"D", "clk"}, {"Q"});
    Stimulus st;
    st.steps = {{{"D", Level::Z}, {"clk", Level::Z}}};
    CHECK(simulate(nl, st).level(0, "Q") == Level::Zero);
    CHECK(simulate(nl, st).to_csv() == simulate(nl, st).to_csv());

    // Preload the slave latch with a ONE.
    nl.init["u/slave.buf.up"] = SwitchState::Closed;
    nl.init["u/slave.buf.dn"] = SwitchState::Open;
    netlist::validate(nl);
    CHECK(simulate(nl, st).level(0, "Q") == Level::One);
}

TEST_CASE("activity is the mean number of switch events per step")
{
    Netlist fa = netlist::load_netlist(kData + "/full_adder.smn");
    Waveform w = simulate(fa, load_stimulus(kData + "/full_adder.stim.json"));
    // Oracle: count switch state changes between consecutive recorded steps.
    std::size_t changes = 0;
    std::vector<SwitchState> prev = netlist::elaborate(fa).circuit.states();
    for (const auto &s : w.steps) {
        for (std::size_t i = 0; i < prev.size(); ++i)
            changes += s.switches[i] != prev[i];
        prev = s.switches;
    }
    CHECK(w.total_switch_events() == changes);
    CHECK(w.events_per_step() == doctest::Approx(changes / 8.0));
}
