#include "supermag/switch_core.hpp"

#include "supermag/error.hpp"

#include <algorithm>
#include <numeric>

namespace supermag {

char to_char(Level level)
{
    switch (level) {
    case Level::Zero: return '0';
    case Level::One: return '1';
    default: return 'Z';
    }
}

Level level_from_char(char c)
{
    switch (c) {
    case '0': return Level::Zero;
    case '1': return Level::One;
    case 'z':
    case 'Z': return Level::Z;
    default: throw InputError(std::string("invalid logic level '") + c + "'");
    }
}

Level level_from_string(std::string_view s)
{
    if (s.size() != 1)
        throw InputError("invalid logic level \"" + std::string(s) + "\"");
    return level_from_char(s[0]);
}

std::string_view to_string(SwitchState state)
{
    return state == SwitchState::Closed ? "closed" : "open";
}

SwitchState switch_state_from_string(std::string_view s)
{
    if (s == "closed" || s == "CLOSED")
        return SwitchState::Closed;
    if (s == "open" || s == "OPEN")
        return SwitchState::Open;
    throw InputError("invalid switch state \"" + std::string(s) + "\" (expected open/closed)");
}

SwitchState driven_state(Orientation orientation, Level input, SwitchState current)
{
    if (input == Level::Z)
        return current;
    bool closes = (input == Level::One) == (orientation == Orientation::Forward);
    return closes ? SwitchState::Closed : SwitchState::Open;
}

SwitchInstance drive_switch(SwitchInstance sw, Level input)
{
    sw.state = driven_state(sw.orientation, input, sw.state);
    return sw;
}

std::size_t OutputNetwork::add_node(std::string id, TerminalKind kind, Level level)
{
    nodes.push_back({std::move(id), kind, level});
    return nodes.size() - 1;
}

void OutputNetwork::add_channel(std::size_t a, std::size_t b, std::optional<std::size_t> switch_index)
{
    if (a >= nodes.size() || b >= nodes.size())
        throw InputError("channel endpoint out of range");
    channels.push_back({a, b, switch_index});
}

std::optional<std::size_t> OutputNetwork::find(std::string_view id) const
{
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id)
            return i;
    return std::nullopt;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_size_(n, 1)
{
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x)
{
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b)
{
    a = find(a);
    b = find(b);
    if (a == b)
        return false;
    if (rank_size_[a] < rank_size_[b])
        std::swap(a, b);
    parent_[b] = a;
    rank_size_[a] += rank_size_[b];
    return true;
}

Resolution resolve_levels(const OutputNetwork &net, std::span<const SwitchState> states, bool rails_active)
{
    const std::size_t n = net.nodes.size();
    UnionFind uf(n);
    for (const Channel &ch : net.channels) {
        if (ch.switch_index) {
            if (*ch.switch_index >= states.size())
                throw InputError("channel references unknown switch");
            if (states[*ch.switch_index] != SwitchState::Closed)
                continue;
        }
        uf.unite(ch.a, ch.b);
    }

    // Per root: which levels are driven into the component.
    std::vector<std::uint8_t> drive(n, 0);
    constexpr std::uint8_t kOne = 1, kZero = 2;
    for (std::size_t i = 0; i < n; ++i) {
        const Terminal &t = net.nodes[i];
        std::uint8_t d = 0;
        switch (t.kind) {
        case TerminalKind::SupplyP: d = rails_active ? kOne : 0; break;
        case TerminalKind::SupplyN: d = rails_active ? kZero : 0; break;
        case TerminalKind::Driven:
            d = t.level == Level::One ? kOne : t.level == Level::Zero ? kZero : 0;
            break;
        default: break;
        }
        drive[uf.find(i)] |= d;
    }

    Resolution res;
    res.levels.assign(n, Level::Z);
    std::vector<std::size_t> short_slot(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = uf.find(i);
        switch (drive[r]) {
        case kOne: res.levels[i] = Level::One; break;
        case kZero: res.levels[i] = Level::Zero; break;
        case kOne | kZero:
            if (short_slot[r] == SIZE_MAX) {
                short_slot[r] = res.shorts.size();
                res.shorts.emplace_back();
            }
            res.shorts[short_slot[r]].nodes.push_back(i);
            break;
        default: break;
        }
    }
    return res;
}

std::map<std::string, Level> resolve_output(const OutputNetwork &net, std::span<const SwitchState> states)
{
    Resolution res = resolve_levels(net, states);
    if (!res.shorts.empty()) {
        std::vector<std::string> names;
        for (std::size_t i : res.shorts.front().nodes)
            names.push_back(net.nodes[i].id);
        std::sort(names.begin(), names.end());
        std::string msg = "SHORT: opposing drivers joined in component {";
        for (std::size_t i = 0; i < names.size(); ++i)
            msg += (i ? ", " : "") + names[i];
        msg += "}";
        throw ShortCircuitError(msg, std::move(names));
    }
    std::map<std::string, Level> out;
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
        if (net.nodes[i].kind == TerminalKind::Output)
            out[net.nodes[i].id] = res.levels[i];
    return out;
}

} // namespace supermag
