#include "supermag/simulator.hpp"

#include "supermag/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace supermag::sim {

using json = nlohmann::json;

namespace {

Level level_from_json(const json &v, const std::string &where)
{
    if (v.is_null())
        return Level::Z;
    if (v.is_string())
        return level_from_string(v.get<std::string>());
    if (v.is_number_integer()) {
        auto i = v.get<long long>();
        if (i == 0 || i == 1)
            return level_of(i == 1);
    }
    throw InputError(where + ": level must be 0, 1 or \"Z\"");
}

std::string instance_of(const std::string &id)
{
    auto slash = id.find('/');
    return slash == std::string::npos ? id : id.substr(0, slash);
}

} // namespace

Stimulus parse_stimulus(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw InputError(std::string("stimulus syntax error: ") + e.what());
    }
    if (!j.is_object())
        throw InputError("stimulus must be a JSON object");
    Stimulus s;
    if (auto c = j.find("clock"); c != j.end() && !c->is_null()) {
        if (!c->is_string())
            throw InputError("stimulus: \"clock\" must be a port name");
        s.clock = c->get<std::string>();
    }
    auto steps = j.find("steps");
    if (steps == j.end() || !steps->is_array())
        throw InputError("stimulus: \"steps\" must be an array");
    for (std::size_t i = 0; i < steps->size(); ++i) {
        const json &st = (*steps)[i];
        if (!st.is_object())
            throw InputError("stimulus step " + std::to_string(i) + " must be an object");
        StepInputs in;
        for (const auto &[port, v] : st.items())
            in[port] = level_from_json(v, "stimulus step " + std::to_string(i) + " port " + port);
        s.steps.push_back(std::move(in));
    }
    if (s.steps.empty())
        throw InputError("stimulus has no steps");
    return s;
}

Stimulus load_stimulus(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open stimulus " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_stimulus(ss.str());
}

Level Waveform::level(std::size_t step, std::string_view net) const
{
    for (std::size_t i = 0; i < nets.size(); ++i)
        if (nets[i] == net)
            return steps.at(step).nets[i];
    throw InputError("waveform has no net \"" + std::string(net) + "\"");
}

std::size_t Waveform::total_switch_events() const
{
    std::size_t n = 0;
    for (const WaveStep &s : steps)
        n += s.switch_events;
    return n;
}

std::size_t Waveform::total_shorts() const
{
    std::size_t n = 0;
    for (const WaveStep &s : steps)
        n += s.shorts;
    return n;
}

double Waveform::events_per_step() const
{
    return steps.empty() ? 0.0 : static_cast<double>(total_switch_events()) / static_cast<double>(steps.size());
}

std::string Waveform::to_csv() const
{
    std::ostringstream os;
    for (const std::string &n : nets)
        os << n << ",";
    os << "#shorts\n";
    for (const WaveStep &s : steps) {
        for (Level l : s.nets)
            os << to_char(l) << ",";
        os << s.shorts << "\n";
    }
    return os.str();
}

Simulator::Simulator(const netlist::Netlist &nl, SimOptions options)
    : elab_(netlist::elaborate(nl)), engine_(elab_.circuit), options_(options)
{
    waveform_.nets = elab_.nets;
    for (const SwitchInstance &sw : elab_.circuit.switches)
        waveform_.switch_ids.push_back(sw.id);
    for (const auto &[name, node] : elab_.inputs)
        drives_[name] = Level::Z;
}

const WaveStep &Simulator::step(const StepInputs &inputs, bool evaluate_phase)
{
    for (const auto &[name, level] : inputs) {
        auto it = elab_.inputs.find(name);
        if (it == elab_.inputs.end())
            throw InputError("\"" + name + "\" is not an input port");
        drives_[name] = level;
        engine_.set_input(it->second, level);
    }

    bool rails = !options_.clocked_supplies || evaluate_phase;
    SettleResult r = engine_.settle(rails);

    WaveStep ws;
    ws.evaluate_phase = rails;
    ws.switch_events = r.switch_events;
    ws.shorts = r.shorts.size();
    for (std::size_t node : elab_.net_nodes)
        ws.nets.push_back(engine_.level(node));
    ws.switches.assign(engine_.states().begin(), engine_.states().end());

    if (!r.shorts.empty() && options_.stop_on_short) {
        const Circuit &c = elab_.circuit;
        const auto &nodes = r.shorts.front().nodes;
        std::vector<std::string> names;
        std::set<std::string> instances;
        for (std::size_t node : nodes) {
            const std::string &id = c.network.nodes[node].id;
            names.push_back(id);
            if (id.find('/') != std::string::npos)
                instances.insert(instance_of(id));
        }
        // Closed switches inside the shorted component belong to the culprits.
        std::set<std::size_t> in_short(nodes.begin(), nodes.end());
        for (const Channel &ch : c.network.channels)
            if (ch.switch_index && engine_.states()[*ch.switch_index] == SwitchState::Closed &&
                in_short.count(ch.a))
                instances.insert(instance_of(c.switches[*ch.switch_index].id));
        std::string msg = "SHORT at step " + std::to_string(waveform_.steps.size()) + " involving instance(s)";
        for (const auto &i : instances)
            msg += " " + i;
        msg += "; nodes:";
        for (const auto &n : names)
            msg += " " + n;
        throw ShortCircuitError(msg, std::move(names));
    }
    waveform_.steps.push_back(std::move(ws));
    return waveform_.steps.back();
}

Level Simulator::level(std::string_view net) const
{
    for (std::size_t i = 0; i < elab_.nets.size(); ++i)
        if (elab_.nets[i] == net)
            return engine_.level(elab_.net_nodes[i]);
    throw InputError("no net \"" + std::string(net) + "\"");
}

Waveform simulate(const netlist::Netlist &nl, const Stimulus &stimulus, SimOptions options)
{
    if (stimulus.steps.empty())
        throw InputError("stimulus has no steps");
    const auto inputs = nl.inputs();
    if (stimulus.clock && std::find(inputs.begin(), inputs.end(), *stimulus.clock) == inputs.end())
        throw InputError("clock \"" + *stimulus.clock + "\" is not an input port");

    Simulator sim(nl, options);
    Level clock = Level::Z;
    for (std::size_t i = 0; i < stimulus.steps.size(); ++i) {
        const StepInputs &in = stimulus.steps[i];
        if (stimulus.clock)
            if (auto it = in.find(*stimulus.clock); it != in.end())
                clock = it->second;
        bool evaluate = !stimulus.clock || clock == Level::One;
        try {
            sim.step(in, evaluate);
        } catch (const LoopError &e) {
            // Prefer the structural cycle when there is one.
            netlist::stage_depth(nl);
            std::set<std::string> instances;
            for (const std::string &sw : e.cycle())
                instances.insert(instance_of(sw));
            std::vector<std::string> cycle(instances.begin(), instances.end());
            std::string msg = "LOOP at step " + std::to_string(i) + " through instance(s)";
            for (const auto &c : cycle)
                msg += " " + c;
            throw LoopError(msg, std::move(cycle));
        }
    }
    return sim.waveform();
}

} // namespace supermag::sim
