#pragma once

// A switch-level circuit: an output-wire network, the switches whose
// channels live in it, and the switching-wire chains that drive them.
// Library cells and elaborated netlists share this representation.

#include "supermag/switch_core.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace supermag {

/// Series switching wire: every switch on it sees the level of `driver`.
struct Chain {
    std::size_t driver = 0;
    std::vector<std::size_t> switches;
};

struct Circuit {
    OutputNetwork network;
    std::vector<SwitchInstance> switches;
    std::vector<Chain> chains;

    /// Adds a switch in its zero-storing power-on state and threads it onto
    /// the chain driven by `driver`, creating that chain if needed.
    std::size_t add_switch(std::string id, Orientation orientation, std::size_t driver);

    /// Adds a switch whose channel joins `a` and `b`.
    std::size_t add_transmission(std::string id, Orientation orientation, std::size_t driver,
                                 std::size_t a, std::size_t b);

    std::vector<SwitchState> states() const;
    std::size_t find_switch(std::string_view id) const;   // throws InputError
    std::size_t node(std::string_view id) const;          // throws InputError
};

struct SettleResult {
    std::size_t iterations = 0;
    std::size_t switch_events = 0; ///< switch state changes during the settle
    std::vector<Short> shorts;
};

/// Evaluates a circuit to a fixpoint. Within one settle every chain is
/// re-driven from the previous resolution (all chains at once), the
/// network is re-resolved, and this repeats until no switch changes.
class Engine {
public:
    explicit Engine(Circuit circuit);

    const Circuit &circuit() const { return circuit_; }

    void set_input(std::size_t node, Level level);
    void set_input(std::string_view node, Level level);

    /// Throws LoopError if no fixpoint is reached within `max_iterations`
    /// (default: number of chains + 2).
    SettleResult settle(bool rails_active = true, std::size_t max_iterations = 0);

    Level level(std::size_t node) const { return levels_.at(node); }
    Level level(std::string_view node) const;
    std::span<const Level> levels() const { return levels_; }

    std::span<const SwitchState> states() const { return states_; }
    void set_state(std::size_t sw, SwitchState state) { states_.at(sw) = state; }

    /// Re-drives only the given chain with `level` (used to preload stored
    /// state in tables).
    void force_chain(std::size_t chain, Level level);

private:
    Circuit circuit_;
    std::vector<SwitchState> states_;
    std::vector<Level> levels_;
};

} // namespace supermag
