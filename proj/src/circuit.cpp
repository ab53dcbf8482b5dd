#include "supermag/circuit.hpp"

#include "supermag/error.hpp"

#include <algorithm>
#include <set>

namespace supermag {

std::size_t Circuit::add_switch(std::string id, Orientation orientation, std::size_t driver)
{
    if (driver >= network.nodes.size())
        throw InputError("chain driver node out of range");
    switches.push_back({std::move(id), orientation, zero_storing_state(orientation)});
    std::size_t index = switches.size() - 1;
    auto it = std::find_if(chains.begin(), chains.end(), [&](const Chain &c) { return c.driver == driver; });
    if (it == chains.end())
        chains.push_back({driver, {index}});
    else
        it->switches.push_back(index);
    return index;
}

std::size_t Circuit::add_transmission(std::string id, Orientation orientation, std::size_t driver,
                                      std::size_t a, std::size_t b)
{
    std::size_t sw = add_switch(std::move(id), orientation, driver);
    network.add_channel(a, b, sw);
    return sw;
}

std::vector<SwitchState> Circuit::states() const
{
    std::vector<SwitchState> out;
    out.reserve(switches.size());
    for (const auto &sw : switches)
        out.push_back(sw.state);
    return out;
}

std::size_t Circuit::find_switch(std::string_view id) const
{
    for (std::size_t i = 0; i < switches.size(); ++i)
        if (switches[i].id == id)
            return i;
    throw InputError("unknown switch \"" + std::string(id) + "\"");
}

std::size_t Circuit::node(std::string_view id) const
{
    if (auto n = network.find(id))
        return *n;
    throw InputError("unknown node \"" + std::string(id) + "\"");
}

Engine::Engine(Circuit circuit)
    : circuit_(std::move(circuit)), states_(circuit_.states()), levels_(circuit_.network.nodes.size(), Level::Z)
{
}

void Engine::set_input(std::size_t node, Level level)
{
    Terminal &t = circuit_.network.nodes.at(node);
    if (t.kind != TerminalKind::Driven)
        throw InputError("node \"" + t.id + "\" is not an input");
    t.level = level;
}

void Engine::set_input(std::string_view node, Level level)
{
    set_input(circuit_.node(node), level);
}

Level Engine::level(std::string_view node) const
{
    return levels_.at(circuit_.node(node));
}

void Engine::force_chain(std::size_t chain, Level level)
{
    const Chain &c = circuit_.chains.at(chain);
    for (std::size_t sw : c.switches)
        states_[sw] = driven_state(circuit_.switches[sw].orientation, level, states_[sw]);
}

SettleResult Engine::settle(bool rails_active, std::size_t max_iterations)
{
    if (max_iterations == 0)
        max_iterations = circuit_.chains.size() + 2;

    SettleResult result;
    std::vector<std::size_t> toggled;
    for (std::size_t iter = 0; iter <= max_iterations; ++iter) {
        Resolution res = resolve_levels(circuit_.network, states_, rails_active);
        toggled.clear();
        // Every chain sees the same resolution: all switches move together.
        for (const Chain &chain : circuit_.chains) {
            Level in = res.levels[chain.driver];
            for (std::size_t sw : chain.switches) {
                SwitchState next = driven_state(circuit_.switches[sw].orientation, in, states_[sw]);
                if (next != states_[sw]) {
                    states_[sw] = next;
                    toggled.push_back(sw);
                }
            }
        }
        if (toggled.empty()) {
            levels_ = std::move(res.levels);
            result.shorts = std::move(res.shorts);
            result.iterations = iter + 1;
            return result;
        }
        result.switch_events += toggled.size();
    }

    std::set<std::string> names;
    for (std::size_t sw : toggled)
        names.insert(circuit_.switches[sw].id);
    std::vector<std::string> cycle(names.begin(), names.end());
    std::string msg = "LOOP: switching wires did not settle within " + std::to_string(max_iterations) +
                      " iterations; still toggling: ";
    for (std::size_t i = 0; i < cycle.size(); ++i)
        msg += (i ? ", " : "") + cycle[i];
    throw LoopError(msg, std::move(cycle));
}

} // namespace supermag
