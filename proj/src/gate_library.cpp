#include "supermag/gate_library.hpp"

#include "supermag/error.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>

namespace supermag::gates {

namespace {

constexpr auto kFwd = Orientation::Forward;
constexpr auto kRev = Orientation::Reversed;

class CellBuilder {
public:
    explicit CellBuilder(std::string name) { cell_.name = std::move(name); }

    std::size_t control(const std::string &name) { return port(name, PortKind::Control, TerminalKind::Driven); }
    std::size_t data(const std::string &name) { return port(name, PortKind::Data, TerminalKind::Driven); }
    std::size_t config(const std::string &name) { return port(name, PortKind::Config, TerminalKind::Driven); }
    std::size_t output(const std::string &name, bool may_float = false)
    {
        std::size_t n = port(name, PortKind::Output, TerminalKind::Output);
        cell_.ports.back().may_float = may_float;
        return n;
    }
    std::size_t internal(const std::string &name)
    {
        return cell_.circuit.network.add_node(name, TerminalKind::Internal);
    }

    std::size_t vp()
    {
        if (!vp_)
            vp_ = cell_.circuit.network.add_node("V+", TerminalKind::SupplyP);
        return *vp_;
    }
    std::size_t vn()
    {
        if (!vn_)
            vn_ = cell_.circuit.network.add_node("V-", TerminalKind::SupplyN);
        return *vn_;
    }

    std::size_t sw(const std::string &id, Orientation o, std::size_t driver, std::size_t a, std::size_t b)
    {
        return cell_.circuit.add_transmission(id, o, driver, a, b);
    }

    /// Complementary buffer: V+ on a ONE drive, V- on ZERO.
    void buffer(const std::string &prefix, std::size_t in, std::size_t out)
    {
        sw(prefix + ".up", kFwd, in, vp(), out);
        sw(prefix + ".dn", kRev, in, vn(), out);
    }

    Circuit &circuit() { return cell_.circuit; }
    GateCell &cell() { return cell_; }

    GateCell finish(bool sequential = false, std::vector<std::string> probes = {})
    {
        cell_.sequential = sequential;
        cell_.probes = std::move(probes);
        return std::move(cell_);
    }

private:
    std::size_t port(const std::string &name, PortKind kind, TerminalKind tk)
    {
        std::size_t n = cell_.circuit.network.add_node(name, tk);
        cell_.ports.push_back({name, kind, n, false});
        return n;
    }

    GateCell cell_;
    std::optional<std::size_t> vp_, vn_;
};

bool is_port_node(const GateCell &cell, std::size_t node)
{
    return std::any_of(cell.ports.begin(), cell.ports.end(), [&](const Port &p) { return p.node == node; });
}

std::string row_text(const TruthTable &t, unsigned row_bits, std::size_t n)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < n; ++i)
        os << (i ? " " : "") << t.inputs[i] << "=" << ((row_bits >> (n - 1 - i)) & 1U);
    return os.str();
}

} // namespace

const Port &GateCell::port(std::string_view n) const
{
    for (const Port &p : ports)
        if (p.name == n)
            return p;
    throw InputError("cell " + name + " has no port \"" + std::string(n) + "\"");
}

std::vector<const Port *> GateCell::ports_of(PortKind kind) const
{
    std::vector<const Port *> out;
    for (const Port &p : ports)
        if (p.kind == kind)
            out.push_back(&p);
    return out;
}

std::size_t GateCell::complementary_pairs() const
{
    std::size_t pairs = 0;
    for (const Chain &c : circuit.chains) {
        std::size_t fwd = 0, rev = 0;
        for (std::size_t sw : c.switches)
            (circuit.switches[sw].orientation == kFwd ? fwd : rev)++;
        pairs += std::min(fwd, rev);
    }
    return pairs;
}

std::vector<std::size_t> GateCell::state_chains() const
{
    std::vector<std::size_t> out;
    if (!sequential)
        return out;
    for (std::size_t i = 0; i < circuit.chains.size(); ++i)
        if (!is_port_node(*this, circuit.chains[i].driver))
            out.push_back(i);
    return out;
}

SpExpr SpExpr::lit(std::string name)
{
    SpExpr e;
    e.kind = Kind::Literal;
    e.literal = std::move(name);
    return e;
}

SpExpr SpExpr::series(std::vector<SpExpr> children)
{
    SpExpr e;
    e.kind = Kind::Series;
    e.children = std::move(children);
    return e;
}

SpExpr SpExpr::parallel(std::vector<SpExpr> children)
{
    SpExpr e;
    e.kind = Kind::Parallel;
    e.children = std::move(children);
    return e;
}

bool SpExpr::conducts(const std::vector<std::string> &inputs, unsigned assignment, bool complemented) const
{
    switch (kind) {
    case Kind::Literal: {
        auto it = std::find(inputs.begin(), inputs.end(), literal);
        auto bit = static_cast<unsigned>(it - inputs.begin());
        bool value = (assignment >> bit) & 1U;
        return complemented ? !value : value;
    }
    case Kind::Series:
        return std::all_of(children.begin(), children.end(),
                           [&](const SpExpr &c) { return c.conducts(inputs, assignment, complemented); });
    case Kind::Parallel:
        return std::any_of(children.begin(), children.end(),
                           [&](const SpExpr &c) { return c.conducts(inputs, assignment, complemented); });
    }
    return false;
}

void SpExpr::literals(std::vector<std::string> &out) const
{
    if (kind == Kind::Literal) {
        if (std::find(out.begin(), out.end(), literal) == out.end())
            out.push_back(literal);
        return;
    }
    for (const SpExpr &c : children)
        c.literals(out);
}

GateCell build_from_spec(const SeriesParallelSpec &spec)
{
    std::vector<std::string> inputs;
    spec.pull_down.literals(inputs);
    spec.pull_up.literals(inputs);
    if (inputs.empty())
        throw InputError("series/parallel spec " + spec.name + " has no inputs");
    if (inputs.size() > 16)
        throw InputError("series/parallel spec " + spec.name + " has too many inputs");
    for (const std::string &inv : spec.invert_inputs)
        if (std::find(inputs.begin(), inputs.end(), inv) == inputs.end())
            throw InputError("spec " + spec.name + " inverts unknown input " + inv);

    // Pull-up switches close on 0, so the pull-up conducts on the complement.
    for (unsigned a = 0; a < (1U << inputs.size()); ++a) {
        bool down = spec.pull_down.conducts(inputs, a, false);
        bool up = spec.pull_up.conducts(inputs, a, true);
        if (down == up)
            throw InputError("spec " + spec.name + ": pull-up and pull-down are not duals");
    }

    CellBuilder b(spec.name);
    std::map<std::string, std::size_t> in_nodes;
    for (const std::string &in : inputs)
        in_nodes[in] = b.control(in);
    std::size_t y = b.output("Y");

    std::map<std::string, unsigned> occurrence;
    unsigned mid = 0;
    std::function<void(const SpExpr &, std::size_t, std::size_t, bool)> emit =
        [&](const SpExpr &e, std::size_t from, std::size_t to, bool up) {
            switch (e.kind) {
            case SpExpr::Kind::Literal: {
                unsigned k = occurrence[e.literal + (up ? "u" : "d")]++;
                std::string id = e.literal + (up ? ".up" : ".dn") + std::to_string(k);
                b.sw(id, up ? kRev : kFwd, in_nodes.at(e.literal), from, to);
                break;
            }
            case SpExpr::Kind::Series: {
                std::size_t prev = from;
                for (std::size_t i = 0; i < e.children.size(); ++i) {
                    std::size_t next = i + 1 == e.children.size() ? to : b.internal("n" + std::to_string(mid++));
                    emit(e.children[i], prev, next, up);
                    prev = next;
                }
                break;
            }
            case SpExpr::Kind::Parallel:
                for (const SpExpr &c : e.children)
                    emit(c, from, to, up);
                break;
            }
        };
    emit(spec.pull_up, b.vp(), y, true);
    emit(spec.pull_down, b.vn(), y, false);

    GateCell cell = b.finish();
    for (const std::string &inv : spec.invert_inputs)
        invert_input(cell, inv);
    if (spec.invert_output)
        swap_rails(cell);
    return cell;
}

void swap_rails(GateCell &cell)
{
    for (Terminal &t : cell.circuit.network.nodes) {
        if (t.kind == TerminalKind::SupplyP)
            t.kind = TerminalKind::SupplyN;
        else if (t.kind == TerminalKind::SupplyN)
            t.kind = TerminalKind::SupplyP;
    }
}

void invert_input(GateCell &cell, std::string_view port_name)
{
    const Port &p = cell.port(port_name);
    if (p.kind != PortKind::Control && p.kind != PortKind::Config)
        throw InputError("port " + p.name + " of " + cell.name + " is not a switching-wire input");
    for (const Chain &c : cell.circuit.chains) {
        if (c.driver != p.node)
            continue;
        for (std::size_t sw : c.switches) {
            SwitchInstance &s = cell.circuit.switches[sw];
            bool was_default = s.state == zero_storing_state(s.orientation);
            s.orientation = s.orientation == kFwd ? kRev : kFwd;
            if (was_default)
                s.state = zero_storing_state(s.orientation);
        }
    }
}

GateCell build_inverter(bool buffer)
{
    SeriesParallelSpec spec{buffer ? "buf" : "inv", SpExpr::lit("A"), SpExpr::lit("A"), buffer, {}};
    return build_from_spec(spec);
}

namespace {

SeriesParallelSpec nand_spec(std::string name)
{
    return {std::move(name), SpExpr::parallel({SpExpr::lit("A"), SpExpr::lit("B")}),
            SpExpr::series({SpExpr::lit("A"), SpExpr::lit("B")}), false, {}};
}

SeriesParallelSpec aoi22_spec(std::string name)
{
    using E = SpExpr;
    return {std::move(name),
            E::series({E::parallel({E::lit("A"), E::lit("B")}), E::parallel({E::lit("C"), E::lit("D")})}),
            E::parallel({E::series({E::lit("A"), E::lit("B")}), E::series({E::lit("C"), E::lit("D")})}),
            false,
            {}};
}

} // namespace

GateCell build_nand() { return build_from_spec(nand_spec("nand")); }

GateCell build_and()
{
    auto s = nand_spec("and");
    s.invert_output = true;
    return build_from_spec(s);
}

GateCell build_or()
{
    auto s = nand_spec("or");
    s.invert_inputs = {"A", "B"};
    return build_from_spec(s);
}

GateCell build_nor()
{
    auto s = nand_spec("nor");
    s.invert_inputs = {"A", "B"};
    s.invert_output = true;
    return build_from_spec(s);
}

GateCell build_aoi22() { return build_from_spec(aoi22_spec("aoi22")); }

GateCell build_ao22()
{
    auto s = aoi22_spec("ao22");
    s.invert_output = true;
    return build_from_spec(s);
}

GateCell build_tristate()
{
    CellBuilder b("tristate");
    std::size_t a = b.data("A");
    std::size_t en = b.control("En");
    std::size_t y = b.output("Y", true);
    b.sw("alpha", kFwd, en, a, y);
    return b.finish();
}

GateCell build_mux()
{
    CellBuilder b("mux");
    std::size_t a = b.data("A");
    std::size_t bb = b.data("B");
    std::size_t s = b.control("S");
    std::size_t y = b.output("Y", true);
    b.sw("S1", kRev, s, a, y);
    b.sw("S2", kFwd, s, bb, y);
    return b.finish();
}

GateCell build_xor()
{
    CellBuilder b("xor");
    std::size_t a = b.control("A");
    std::size_t bb = b.control("B");
    std::size_t y = b.output("Y");
    std::size_t vc = b.internal("V_C");
    std::size_t vd = b.internal("V_D");
    // V_C = NOT A, V_D = A.
    b.sw("A.c_up", kRev, a, b.vp(), vc);
    b.sw("A.c_dn", kFwd, a, b.vn(), vc);
    b.sw("A.d_up", kFwd, a, b.vp(), vd);
    b.sw("A.d_dn", kRev, a, b.vn(), vd);
    // B selects V_D on 0 and V_C on 1.
    b.sw("B.d", kRev, bb, vd, y);
    b.sw("B.c", kFwd, bb, vc, y);
    return b.finish(false, {"V_C", "V_D"});
}

void instantiate(Circuit &target, const GateCell &cell, std::string_view prefix,
                 const std::map<std::string, std::size_t> &port_nodes)
{
    const std::string pre = std::string(prefix) + "/";
    std::vector<std::size_t> map(cell.circuit.network.nodes.size());
    for (std::size_t i = 0; i < cell.circuit.network.nodes.size(); ++i) {
        const Terminal &t = cell.circuit.network.nodes[i];
        auto port = std::find_if(cell.ports.begin(), cell.ports.end(), [&](const Port &p) { return p.node == i; });
        if (port != cell.ports.end()) {
            auto it = port_nodes.find(port->name);
            if (it == port_nodes.end())
                throw InputError("instance " + std::string(prefix) + ": port " + port->name + " is unbound");
            map[i] = it->second;
        } else {
            map[i] = target.network.add_node(pre + t.id, t.kind, t.level);
        }
    }
    std::vector<std::size_t> sw_map(cell.circuit.switches.size());
    for (const Chain &c : cell.circuit.chains) {
        for (std::size_t sw : c.switches) {
            const SwitchInstance &s = cell.circuit.switches[sw];
            sw_map[sw] = target.add_switch(pre + s.id, s.orientation, map[c.driver]);
            target.switches[sw_map[sw]].state = s.state;
        }
    }
    for (const Channel &ch : cell.circuit.network.channels) {
        std::optional<std::size_t> s;
        if (ch.switch_index)
            s = sw_map[*ch.switch_index];
        target.network.add_channel(map[ch.a], map[ch.b], s);
    }
}

GateCell build_full_adder()
{
    CellBuilder b("adder");
    std::size_t a = b.control("A");
    std::size_t bb = b.control("B");
    std::size_t cin = b.control("Cin");
    std::size_t sum = b.output("SUM");
    std::size_t cout = b.output("Cout");
    std::size_t x = b.internal("X");

    GateCell xor_cell = build_xor();
    GateCell ao22 = build_ao22();
    Circuit &c = b.circuit();
    instantiate(c, xor_cell, "x1", {{"A", a}, {"B", bb}, {"Y", x}});
    instantiate(c, xor_cell, "x2", {{"A", x}, {"B", cin}, {"Y", sum}});
    instantiate(c, ao22, "c1", {{"A", a}, {"B", bb}, {"C", x}, {"D", cin}, {"Y", cout}});
    return b.finish(false, {"X"});
}

GateCell build_latch()
{
    CellBuilder b("latch");
    std::size_t d = b.data("D");
    std::size_t en = b.control("En");
    std::size_t q = b.output("Q");
    std::size_t n = b.internal("N");
    b.sw("alpha", kFwd, en, d, n);
    b.buffer("buf", n, q);
    return b.finish(true);
}

GateCell build_dff(bool with_reset)
{
    CellBuilder b(with_reset ? "dff_r" : "dff");
    std::size_t d = b.data("D");
    std::size_t clk = b.control("clk");
    std::optional<std::size_t> r;
    if (with_reset)
        r = b.control("R");
    std::size_t q = b.output("Q");
    std::size_t n1 = b.internal("N1");
    std::size_t m = b.internal("M");
    std::size_t n2 = b.internal("N2");

    // Master is transparent while clk = 0 (reversed enable), slave while clk = 1.
    if (with_reset) {
        std::size_t p1 = b.internal("P1");
        std::size_t p2 = b.internal("P2");
        b.sw("master.en", kRev, clk, d, p1);
        b.sw("master.rst_pass", kRev, *r, p1, n1);
        b.sw("master.rst_clr", kFwd, *r, b.vn(), n1);
        b.buffer("master.buf", n1, m);
        b.sw("slave.en", kFwd, clk, m, p2);
        b.sw("slave.rst_pass", kRev, *r, p2, n2);
        b.sw("slave.rst_clr", kFwd, *r, b.vn(), n2);
        b.buffer("slave.buf", n2, q);
    } else {
        b.sw("master.en", kRev, clk, d, n1);
        b.buffer("master.buf", n1, m);
        b.sw("slave.en", kFwd, clk, m, n2);
        b.buffer("slave.buf", n2, q);
    }
    return b.finish(true, {"M"});
}

GateCell build_lut(std::size_t k, const std::vector<Level> &bits)
{
    if (k == 0 || k > 8)
        throw InputError("LUT input count must be in 1..8");
    if (bits.size() != (std::size_t{1} << k))
        throw InputError("LUT with " + std::to_string(k) + " inputs needs " + std::to_string(1U << k) +
                         " bits, got " + std::to_string(bits.size()));
    CellBuilder b("lut" + std::to_string(k));
    std::vector<std::size_t> sel;
    for (std::size_t j = 0; j < k; ++j)
        sel.push_back(b.control("I" + std::to_string(j)));
    std::vector<std::size_t> prog;
    for (std::size_t i = 0; i < bits.size(); ++i)
        prog.push_back(b.config("P" + std::to_string(i)));
    std::size_t y = b.output("Y");

    std::vector<std::size_t> layer;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == Level::Z)
            throw InputError("LUT bits must be 0 or 1");
        std::size_t l = b.internal("L" + std::to_string(i));
        b.buffer("buf" + std::to_string(i), prog[i], l);
        // Preload the stored bit.
        for (std::size_t sw : b.circuit().chains.back().switches) {
            SwitchInstance &s = b.circuit().switches[sw];
            s.state = driven_state(s.orientation, bits[i], s.state);
        }
        layer.push_back(l);
    }
    // Address bit j selects within pairs at tree level j.
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::size_t> next;
        for (std::size_t m = 0; m < layer.size() / 2; ++m) {
            std::string tag = "mux" + std::to_string(j) + "_" + std::to_string(m);
            std::size_t out = layer.size() == 2 ? y : b.internal(tag);
            b.sw(tag + ".S1", kRev, sel[j], layer[2 * m], out);
            b.sw(tag + ".S2", kFwd, sel[j], layer[2 * m + 1], out);
            next.push_back(out);
        }
        layer = std::move(next);
    }
    return b.finish();
}

GateCell build_crossbar(std::size_t rows, std::size_t cols, const std::vector<std::vector<bool>> &config)
{
    if (rows == 0 || cols == 0)
        throw InputError("crossbar needs at least one row and column");
    if (config.size() != rows || std::any_of(config.begin(), config.end(), [&](const auto &r) { return r.size() != cols; }))
        throw InputError("crossbar configuration must be rows x cols");
    CellBuilder b("crossbar");
    std::vector<std::size_t> r, c;
    for (std::size_t i = 0; i < rows; ++i)
        r.push_back(b.data("R" + std::to_string(i)));
    for (std::size_t j = 0; j < cols; ++j)
        c.push_back(b.output("C" + std::to_string(j), true));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            std::string tag = std::to_string(i) + "_" + std::to_string(j);
            std::size_t cfg = b.config("X" + tag);
            std::size_t sw = b.sw("x" + tag, kFwd, cfg, r[i], c[j]);
            b.circuit().switches[sw].state = config[i][j] ? SwitchState::Closed : SwitchState::Open;
        }
    }
    return b.finish();
}

GateCell build_ram_cell()
{
    CellBuilder b("ram_cell");
    std::size_t wwl = b.control("WWL");
    std::size_t rwl = b.control("RWL");
    std::size_t bl = b.data("BL");
    std::size_t w = b.internal("W");
    std::size_t vcell = b.internal("V_cell");
    b.sw("alpha", kFwd, wwl, bl, w);   // write access
    b.sw("gamma", kFwd, w, b.vp(), vcell);
    b.sw("delta", kRev, w, b.vn(), vcell);
    b.sw("beta", kFwd, rwl, vcell, bl); // read access
    GateCell cell = b.finish(true, {"V_cell"});
    for (Port &p : cell.ports)
        if (p.name == "BL")
            p.inout = true;
    return cell;
}

GateCell make_cell(std::string_view name)
{
    if (name == "inv") return build_inverter(false);
    if (name == "buf") return build_inverter(true);
    if (name == "nand") return build_nand();
    if (name == "and") return build_and();
    if (name == "or") return build_or();
    if (name == "nor") return build_nor();
    if (name == "aoi22") return build_aoi22();
    if (name == "ao22") return build_ao22();
    if (name == "xor") return build_xor();
    if (name == "mux") return build_mux();
    if (name == "tristate") return build_tristate();
    if (name == "adder") return build_full_adder();
    if (name == "latch") return build_latch();
    if (name == "dff") return build_dff(false);
    if (name == "dff_r") return build_dff(true);
    if (name == "ram_cell") return build_ram_cell();
    throw InputError("unknown cell \"" + std::string(name) + "\"");
}

std::vector<std::string> cell_names()
{
    return {"inv", "buf", "nand", "and", "or", "nor", "aoi22", "ao22", "xor",
            "mux", "tristate", "adder", "latch", "dff", "dff_r", "ram_cell"};
}

std::string TruthTable::to_csv() const
{
    std::ostringstream os;
    bool first = true;
    for (const auto &c : inputs) {
        os << (first ? "" : ",") << c;
        first = false;
    }
    for (const auto &c : outputs)
        os << "," << c;
    os << "\n";
    for (const auto &row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << to_char(row[i]);
        os << "\n";
    }
    return os.str();
}

TruthTable truth_table(const GateCell &cell)
{
    TruthTable t;
    std::vector<std::size_t> in_nodes;
    for (const Port &p : cell.ports)
        if (p.inout)
            throw InputError("cell " + cell.name + " has bidirectional port " + p.name +
                             "; it has no stand-alone truth table");
    for (const Port &p : cell.ports) {
        if (p.kind == PortKind::Control || p.kind == PortKind::Data) {
            t.inputs.push_back(p.name);
            in_nodes.push_back(p.node);
        }
    }
    std::vector<std::size_t> state_chains = cell.state_chains();
    for (std::size_t c : state_chains)
        t.inputs.push_back("state:" + cell.circuit.network.nodes[cell.circuit.chains[c].driver].id);

    std::vector<std::size_t> out_nodes;
    for (const Port &p : cell.ports) {
        if (p.kind == PortKind::Output) {
            t.outputs.push_back(p.name);
            out_nodes.push_back(p.node);
        }
    }
    for (const std::string &probe : cell.probes) {
        t.outputs.push_back(probe);
        out_nodes.push_back(cell.circuit.node(probe));
    }

    const std::size_t n = t.inputs.size();
    if (n > 16)
        throw InputError("truth table of " + cell.name + " would have 2^" + std::to_string(n) + " rows");

    for (unsigned row = 0; row < (1U << n); ++row) {
        Engine eng(cell.circuit);
        auto bit = [&](std::size_t col) { return level_of((row >> (n - 1 - col)) & 1U); };
        for (std::size_t s = 0; s < state_chains.size(); ++s)
            eng.force_chain(state_chains[s], bit(in_nodes.size() + s));
        for (std::size_t i = 0; i < in_nodes.size(); ++i)
            eng.set_input(in_nodes[i], bit(i));
        SettleResult r = eng.settle();
        if (!r.shorts.empty()) {
            std::vector<std::string> names;
            for (std::size_t node : r.shorts.front().nodes)
                names.push_back(cell.circuit.network.nodes[node].id);
            throw ShortCircuitError("SHORT in " + cell.name + " at row " + row_text(t, row, n), names);
        }
        std::vector<Level> values;
        for (std::size_t i = 0; i < n; ++i)
            values.push_back(bit(i));
        for (std::size_t node : out_nodes)
            values.push_back(eng.level(node));
        t.rows.push_back(std::move(values));
    }
    return t;
}

} // namespace supermag::gates
