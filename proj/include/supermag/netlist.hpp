#pragma once

// Structural netlists over library cells (.smn files, JSON). See
// docs/netlist_format.md for the schema.

#include "supermag/circuit.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace supermag::netlist {

inline constexpr std::size_t kDefaultMaxFanout = 10;

enum class Direction : std::uint8_t { In, Out };

struct PortDecl {
    std::string name;
    Direction dir = Direction::In;
};

struct Instance {
    std::string cell;
    std::string id;
    std::map<std::string, std::string> bind; ///< cell port -> net
    std::vector<std::string> invert_in;
    bool swap_rails = false;
};

struct Netlist {
    std::string name;
    std::vector<PortDecl> ports;
    std::vector<Instance> instances;
    std::map<std::string, SwitchState> init; ///< "<instance>/<switch>" -> state
    std::size_t max_fanout = kDefaultMaxFanout;

    /// Ports first (declaration order), then internal nets in order of
    /// first appearance.
    std::vector<std::string> nets() const;
    std::vector<std::string> inputs() const;
    std::vector<std::string> outputs() const;
};

/// Parses and validates. Errors (InputError) carry line:column for syntax
/// problems and name the offending instance/net otherwise.
Netlist parse_netlist(std::string_view text);
Netlist load_netlist(const std::string &path);
std::string to_json(const Netlist &netlist);

/// Checks cell names, port bindings, inversion flags, the driver rule (at
/// most one non-floating cell output per net, none on an input port) and
/// the fan-out limit (switches driven by each cell-driven net).
void validate(const Netlist &netlist);

/// Number of switches on the switching wire driven by each net.
std::map<std::string, std::size_t> fanout_switches(const Netlist &netlist);

struct Elaborated {
    Circuit circuit;
    std::vector<std::string> nets;          ///< same order as Netlist::nets()
    std::vector<std::size_t> net_nodes;     ///< node index per net
    std::map<std::string, std::size_t> inputs; ///< primary input -> node
};

/// Flattens instances into one switch-level circuit. Instance-local nodes
/// and switches are named "<instance>/<name>"; each net gets a single
/// series chain holding every load's switches in instance order.
Elaborated elaborate(const Netlist &netlist);

struct NetlistStats {
    std::size_t n_cells = 0;
    std::size_t n_switches = 0;
    std::size_t n_comb = 0;        ///< switches in combinational cells
    std::size_t n_dff = 0;         ///< flip-flop cells
    std::size_t off_switches = 0;  ///< complementary pairs in all cells
    std::size_t sequential_off_switches = 0; ///< of which inside sequential cells
    std::size_t depth = 0;         ///< longest combinational path, in cells
};

/// Throws LoopError on a combinational cycle.
NetlistStats analyze(const Netlist &netlist);

/// Longest chain of combinational cells between sequential boundaries or
/// ports. Throws LoopError naming the instances of a combinational cycle.
std::size_t stage_depth(const Netlist &netlist);

} // namespace supermag::netlist
