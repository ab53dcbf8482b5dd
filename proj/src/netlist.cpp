#include "supermag/netlist.hpp"

#include "supermag/error.hpp"
#include "supermag/gate_library.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace supermag::netlist {

using json = nlohmann::ordered_json;

namespace {

std::string line_col(std::string_view text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return std::to_string(line) + ":" + std::to_string(col);
}

void check_keys(const json &obj, std::initializer_list<std::string_view> allowed, const std::string &where)
{
    for (const auto &[key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw InputError(where + ": unknown key \"" + key + "\"");
    }
}

const std::string &get_string(const json &obj, const char *key, const std::string &where)
{
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw InputError(where + ": \"" + key + "\" must be a string");
    return it->get_ref<const std::string &>();
}

/// Library cells are immutable, build each once per validation pass.
class CellCache {
public:
    const gates::GateCell &get(const std::string &name)
    {
        auto it = cells_.find(name);
        if (it == cells_.end())
            it = cells_.emplace(name, gates::make_cell(name)).first;
        return it->second;
    }

private:
    std::map<std::string, gates::GateCell> cells_;
};

bool is_flip_flop(std::string_view cell) { return cell == "dff" || cell == "dff_r"; }

} // namespace

std::vector<std::string> Netlist::nets() const
{
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const PortDecl &p : ports)
        if (seen.insert(p.name).second)
            out.push_back(p.name);
    for (const Instance &inst : instances)
        for (const auto &[port, net] : inst.bind)
            if (seen.insert(net).second)
                out.push_back(net);
    return out;
}

std::vector<std::string> Netlist::inputs() const
{
    std::vector<std::string> out;
    for (const PortDecl &p : ports)
        if (p.dir == Direction::In)
            out.push_back(p.name);
    return out;
}

std::vector<std::string> Netlist::outputs() const
{
    std::vector<std::string> out;
    for (const PortDecl &p : ports)
        if (p.dir == Direction::Out)
            out.push_back(p.name);
    return out;
}

Netlist parse_netlist(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw InputError("netlist syntax error at " + line_col(text, e.byte) + ": " + e.what());
    }
    if (!j.is_object())
        throw InputError("netlist must be a JSON object");
    check_keys(j, {"name", "ports", "instances", "init", "max_fanout"}, "netlist");

    Netlist nl;
    nl.name = get_string(j, "name", "netlist");

    auto ports = j.find("ports");
    if (ports == j.end() || !ports->is_array())
        throw InputError("netlist: \"ports\" must be an array");
    for (const json &p : *ports) {
        if (!p.is_object())
            throw InputError("netlist: port entries must be objects");
        check_keys(p, {"name", "dir"}, "port");
        PortDecl decl;
        decl.name = get_string(p, "name", "port");
        const std::string &dir = get_string(p, "dir", "port " + decl.name);
        if (dir == "in")
            decl.dir = Direction::In;
        else if (dir == "out")
            decl.dir = Direction::Out;
        else
            throw InputError("port " + decl.name + ": dir must be \"in\" or \"out\"");
        nl.ports.push_back(std::move(decl));
    }

    if (auto insts = j.find("instances"); insts != j.end()) {
        if (!insts->is_array())
            throw InputError("netlist: \"instances\" must be an array");
        for (const json &ij : *insts) {
            if (!ij.is_object())
                throw InputError("netlist: instance entries must be objects");
            check_keys(ij, {"cell", "id", "bind", "invert_in", "swap_rails"}, "instance");
            Instance inst;
            inst.id = get_string(ij, "id", "instance");
            const std::string where = "instance " + inst.id;
            inst.cell = get_string(ij, "cell", where);
            auto bind = ij.find("bind");
            if (bind == ij.end() || !bind->is_object())
                throw InputError(where + ": \"bind\" must be an object");
            for (const auto &[port, net] : bind->items()) {
                if (!net.is_string())
                    throw InputError(where + ": binding of " + port + " must be a net name");
                inst.bind[port] = net.get<std::string>();
            }
            if (auto inv = ij.find("invert_in"); inv != ij.end()) {
                if (!inv->is_array())
                    throw InputError(where + ": \"invert_in\" must be an array");
                for (const json &p : *inv) {
                    if (!p.is_string())
                        throw InputError(where + ": \"invert_in\" entries must be port names");
                    inst.invert_in.push_back(p.get<std::string>());
                }
            }
            if (auto sr = ij.find("swap_rails"); sr != ij.end()) {
                if (!sr->is_boolean())
                    throw InputError(where + ": \"swap_rails\" must be a boolean");
                inst.swap_rails = sr->get<bool>();
            }
            nl.instances.push_back(std::move(inst));
        }
    }

    if (auto init = j.find("init"); init != j.end()) {
        if (!init->is_object())
            throw InputError("netlist: \"init\" must be an object");
        for (const auto &[sw, state] : init->items()) {
            if (!state.is_string())
                throw InputError("init " + sw + ": state must be \"open\" or \"closed\"");
            nl.init[sw] = switch_state_from_string(state.get<std::string>());
        }
    }

    if (auto mf = j.find("max_fanout"); mf != j.end()) {
        if (!mf->is_number_unsigned() || mf->get<std::size_t>() == 0)
            throw InputError("netlist: \"max_fanout\" must be a positive integer");
        nl.max_fanout = mf->get<std::size_t>();
    }

    validate(nl);
    return nl;
}

Netlist load_netlist(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open netlist " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_netlist(ss.str());
    } catch (const InputError &e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string to_json(const Netlist &nl)
{
    json j;
    j["name"] = nl.name;
    j["ports"] = json::array();
    for (const PortDecl &p : nl.ports)
        j["ports"].push_back({{"name", p.name}, {"dir", p.dir == Direction::In ? "in" : "out"}});
    j["instances"] = json::array();
    for (const Instance &inst : nl.instances) {
        json ij;
        ij["cell"] = inst.cell;
        ij["id"] = inst.id;
        ij["bind"] = json::object();
        for (const auto &[port, net] : inst.bind)
            ij["bind"][port] = net;
        if (!inst.invert_in.empty())
            ij["invert_in"] = inst.invert_in;
        if (inst.swap_rails)
            ij["swap_rails"] = true;
        j["instances"].push_back(std::move(ij));
    }
    if (!nl.init.empty()) {
        j["init"] = json::object();
        for (const auto &[sw, st] : nl.init)
            j["init"][sw] = std::string(to_string(st));
    }
    if (nl.max_fanout != kDefaultMaxFanout)
        j["max_fanout"] = nl.max_fanout;
    return j.dump(2) + "\n";
}

std::map<std::string, std::size_t> fanout_switches(const Netlist &nl)
{
    CellCache cache;
    std::map<std::string, std::size_t> out;
    for (const Instance &inst : nl.instances) {
        const gates::GateCell &cell = cache.get(inst.cell);
        for (const Chain &c : cell.circuit.chains) {
            for (const gates::Port &p : cell.ports) {
                if (p.node != c.driver)
                    continue;
                if (auto it = inst.bind.find(p.name); it != inst.bind.end())
                    out[it->second] += c.switches.size();
            }
        }
    }
    return out;
}

void validate(const Netlist &nl)
{
    std::set<std::string> port_names;
    std::set<std::string> inputs;
    for (const PortDecl &p : nl.ports) {
        if (p.name.empty())
            throw InputError("port with empty name");
        if (!port_names.insert(p.name).second)
            throw InputError("duplicate port " + p.name);
        if (p.dir == Direction::In)
            inputs.insert(p.name);
    }

    CellCache cache;
    std::set<std::string> ids;
    std::map<std::string, std::vector<std::string>> hard_drivers; // net -> instance.port
    std::map<std::string, bool> sourced;                            // net -> has any source
    std::map<std::string, std::string> controls;                    // net -> first control load
    for (const std::string &in : inputs)
        sourced[in] = true;

    for (const Instance &inst : nl.instances) {
        const std::string where = "instance " + inst.id;
        if (inst.id.empty() || inst.id.find('/') != std::string::npos)
            throw InputError("instance id \"" + inst.id + "\" must be non-empty and contain no '/'");
        if (!ids.insert(inst.id).second)
            throw InputError("duplicate instance id " + inst.id);
        const gates::GateCell *cell = nullptr;
        try {
            cell = &cache.get(inst.cell);
        } catch (const InputError &) {
            throw InputError(where + ": unknown cell \"" + inst.cell + "\"");
        }
        for (const auto &[port, net] : inst.bind) {
            if (std::none_of(cell->ports.begin(), cell->ports.end(), [&](const gates::Port &p) { return p.name == port; }))
                throw InputError(where + ": cell " + inst.cell + " has no port " + port);
            if (net.empty())
                throw InputError(where + ": port " + port + " bound to an empty net name");
        }
        for (const gates::Port &p : cell->ports) {
            auto it = inst.bind.find(p.name);
            if (it == inst.bind.end())
                throw InputError(where + ": unbound port " + p.name + " of cell " + inst.cell);
            const std::string &net = it->second;
            switch (p.kind) {
            case gates::PortKind::Output:
                if (inputs.count(net))
                    throw InputError(where + ": output " + p.name + " drives input port " + net);
                if (!p.may_float)
                    hard_drivers[net].push_back(inst.id + "." + p.name);
                sourced[net] = true;
                break;
            case gates::PortKind::Data:
                sourced[net] = true;
                break;
            default:
                controls.emplace(net, inst.id + "." + p.name);
                break;
            }
        }
        for (const std::string &inv : inst.invert_in) {
            const gates::Port &p = cell->port(inv);
            if (p.kind != gates::PortKind::Control)
                throw InputError(where + ": invert_in port " + inv + " is not a switching-wire input");
        }
    }

    for (const auto &[net, drivers] : hard_drivers) {
        if (drivers.size() > 1) {
            std::string msg = "multiple drivers on net " + net + ":";
            for (const auto &d : drivers)
                msg += " " + d;
            throw InputError(msg);
        }
    }
    for (const auto &[net, load] : controls)
        if (!sourced[net])
            throw InputError("net " + net + " (input of " + load + ") has no driver");

    for (const auto &[net, switches] : fanout_switches(nl)) {
        if (inputs.count(net) || !hard_drivers.count(net))
            continue;
        if (switches > nl.max_fanout)
            throw InputError("fan-out limit exceeded on net " + net + ": " + std::to_string(switches) +
                             " switches > " + std::to_string(nl.max_fanout));
    }

    for (const auto &[sw, state] : nl.init) {
        auto slash = sw.find('/');
        std::string inst_id = sw.substr(0, slash);
        auto it = std::find_if(nl.instances.begin(), nl.instances.end(),
                               [&](const Instance &i) { return i.id == inst_id; });
        if (slash == std::string::npos || it == nl.instances.end())
            throw InputError("init: unknown switch " + sw);
        cache.get(it->cell).circuit.find_switch(sw.substr(slash + 1));
    }
}

Elaborated elaborate(const Netlist &nl)
{
    Elaborated e;
    e.nets = nl.nets();
    std::set<std::string> inputs;
    for (const std::string &in : nl.inputs())
        inputs.insert(in);
    std::set<std::string> outputs;
    for (const std::string &out : nl.outputs())
        outputs.insert(out);

    std::map<std::string, std::size_t> net_node;
    for (const std::string &net : e.nets) {
        TerminalKind kind = inputs.count(net) ? TerminalKind::Driven
                            : outputs.count(net) ? TerminalKind::Output
                                                 : TerminalKind::Internal;
        std::size_t n = e.circuit.network.add_node(net, kind);
        net_node[net] = n;
        e.net_nodes.push_back(n);
        if (kind == TerminalKind::Driven)
            e.inputs[net] = n;
    }

    CellCache cache;
    for (const Instance &inst : nl.instances) {
        gates::GateCell cell = cache.get(inst.cell);
        for (const std::string &inv : inst.invert_in)
            gates::invert_input(cell, inv);
        if (inst.swap_rails)
            gates::swap_rails(cell);
        std::map<std::string, std::size_t> ports;
        for (const auto &[port, net] : inst.bind)
            ports[port] = net_node.at(net);
        gates::instantiate(e.circuit, cell, inst.id, ports);
    }
    for (const auto &[sw, state] : nl.init)
        e.circuit.switches[e.circuit.find_switch(sw)].state = state;
    return e;
}

std::size_t stage_depth(const Netlist &nl)
{
    CellCache cache;
    const std::size_t n = nl.instances.size();
    std::vector<bool> comb(n);
    std::map<std::string, std::vector<std::size_t>> driven_by; // net -> comb instances with an output on it
    for (std::size_t i = 0; i < n; ++i) {
        const gates::GateCell &cell = cache.get(nl.instances[i].cell);
        comb[i] = !cell.sequential;
        if (!comb[i])
            continue;
        for (const gates::Port &p : cell.ports)
            if (p.kind == gates::PortKind::Output)
                driven_by[nl.instances[i].bind.at(p.name)].push_back(i);
    }

    std::vector<std::vector<std::size_t>> fanin(n); // comb predecessors
    for (std::size_t i = 0; i < n; ++i) {
        if (!comb[i])
            continue;
        const gates::GateCell &cell = cache.get(nl.instances[i].cell);
        for (const gates::Port &p : cell.ports) {
            if (p.kind == gates::PortKind::Output)
                continue;
            auto it = driven_by.find(nl.instances[i].bind.at(p.name));
            if (it != driven_by.end())
                for (std::size_t pred : it->second)
                    fanin[i].push_back(pred);
        }
    }

    enum class Mark : std::uint8_t { None, Active, Done };
    std::vector<Mark> mark(n, Mark::None);
    std::vector<std::size_t> depth(n, 0), stack;
    std::function<std::size_t(std::size_t)> visit = [&](std::size_t i) -> std::size_t {
        if (mark[i] == Mark::Done)
            return depth[i];
        if (mark[i] == Mark::Active) {
            auto from = std::find(stack.begin(), stack.end(), i);
            std::vector<std::string> cycle;
            for (auto it = from; it != stack.end(); ++it)
                cycle.push_back(nl.instances[*it].id);
            std::string msg = "LOOP: combinational cycle through";
            for (const auto &c : cycle)
                msg += " " + c;
            throw LoopError(msg, std::move(cycle));
        }
        mark[i] = Mark::Active;
        stack.push_back(i);
        std::size_t best = 0;
        for (std::size_t pred : fanin[i])
            best = std::max(best, visit(pred));
        stack.pop_back();
        mark[i] = Mark::Done;
        return depth[i] = best + 1;
    };

    std::size_t longest = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (comb[i])
            longest = std::max(longest, visit(i));
    return longest;
}

NetlistStats analyze(const Netlist &nl)
{
    CellCache cache;
    NetlistStats s;
    for (const Instance &inst : nl.instances) {
        const gates::GateCell &cell = cache.get(inst.cell);
        ++s.n_cells;
        s.n_switches += cell.switch_count();
        if (!cell.sequential)
            s.n_comb += cell.switch_count();
        if (is_flip_flop(inst.cell))
            ++s.n_dff;
        std::size_t pairs = cell.complementary_pairs();
        s.off_switches += pairs;
        if (cell.sequential)
            s.sequential_off_switches += pairs;
    }
    s.depth = stage_depth(nl);
    return s;
}

} // namespace supermag::netlist
