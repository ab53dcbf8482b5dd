#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace supermag {

/// Current direction relative to a port arrow: with it (One), against it
/// (Zero), or no current at all (Z).
enum class Level : std::uint8_t { Zero, One, Z };

/// Which way the switching wire threads a switch. Reversed swaps the input
/// port and ground, i.e. the switch sees the complement of its input.
enum class Orientation : std::uint8_t { Forward, Reversed };

enum class SwitchState : std::uint8_t { Open, Closed };

char to_char(Level level);
Level level_from_char(char c);
Level level_from_string(std::string_view s);
std::string_view to_string(SwitchState state);
SwitchState switch_state_from_string(std::string_view s);

inline Level level_of(bool bit) { return bit ? Level::One : Level::Zero; }
inline Level invert(Level level)
{
    switch (level) {
    case Level::Zero: return Level::One;
    case Level::One: return Level::Zero;
    default: return Level::Z;
    }
}

struct SwitchInstance {
    std::string id;
    Orientation orientation = Orientation::Forward;
    SwitchState state = SwitchState::Open;
};

/// New state of a switch after its switching wire carries `input`.
/// Z leaves the (non-volatile) state unchanged.
SwitchState driven_state(Orientation orientation, Level input, SwitchState current);

SwitchInstance drive_switch(SwitchInstance sw, Level input);

/// Power-on default: the state the switch holds after a ZERO drive.
inline SwitchState zero_storing_state(Orientation orientation)
{
    return orientation == Orientation::Forward ? SwitchState::Open : SwitchState::Closed;
}

enum class TerminalKind : std::uint8_t { SupplyP, SupplyN, Driven, Output, Internal };

struct Terminal {
    std::string id;
    TerminalKind kind = TerminalKind::Internal;
    Level level = Level::Z; ///< only read for Driven terminals
};

/// One segment of output wire. Without a switch it is a plain 0-ohm wire;
/// with one it is 0 ohm when the switch is closed and R_off when open.
struct Channel {
    std::size_t a = 0;
    std::size_t b = 0;
    std::optional<std::size_t> switch_index;
};

/// Resistive graph of output wires.
struct OutputNetwork {
    std::vector<Terminal> nodes;
    std::vector<Channel> channels;

    std::size_t add_node(std::string id, TerminalKind kind, Level level = Level::Z);
    void add_channel(std::size_t a, std::size_t b, std::optional<std::size_t> switch_index = std::nullopt);
    std::optional<std::size_t> find(std::string_view id) const;
};

/// A set of nodes that are mutually connected at 0 ohm but carry opposing
/// drivers.
struct Short {
    std::vector<std::size_t> nodes;
};

struct Resolution {
    std::vector<Level> levels;  ///< per node; Z for undriven and shorted components
    std::vector<Short> shorts;
};

/// Union-find over 0-ohm channels. A component takes the level of its
/// drivers (supplies and Driven terminals); high-resistance paths never
/// drive. `rails_active` = false treats both supplies as switched off.
Resolution resolve_levels(const OutputNetwork &net, std::span<const SwitchState> states, bool rails_active = true);

/// Levels of the Output terminals. Throws ShortCircuitError naming the
/// nodes of the first conflicting component.
std::map<std::string, Level> resolve_output(const OutputNetwork &net, std::span<const SwitchState> states);

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n);

    std::size_t find(std::size_t x);
    bool unite(std::size_t a, std::size_t b);
    std::size_t size() const { return parent_.size(); }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_size_;
};

} // namespace supermag
