#pragma once

#include "supermag/circuit.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace supermag::gates {

enum class PortKind : std::uint8_t {
    Control, ///< drives a switching-wire chain
    Data,    ///< connects to the output wire (transmission-gate input, bit line)
    Output,
    Config,  ///< programming input; held at Z during normal evaluation
};

struct Port {
    std::string name;
    PortKind kind = PortKind::Control;
    std::size_t node = 0;
    /// Output passes through transmission gates only and may float.
    bool may_float = false;
    /// Data port that the cell also drives (bit line).
    bool inout = false;
};

struct GateCell {
    std::string name;
    Circuit circuit;
    std::vector<Port> ports;
    /// Named internal nodes worth reporting (V_C/V_D of the XOR, X of the adder).
    std::vector<std::string> probes;
    /// Stored-state cell: some chain is driven from an internal node.
    bool sequential = false;

    const Port &port(std::string_view name) const;
    std::vector<const Port *> ports_of(PortKind kind) const;
    std::size_t switch_count() const { return circuit.switches.size(); }

    /// Pairs of opposite-orientation switches sharing a chain; in steady
    /// state one of each pair is open and leaks through the output wire.
    std::size_t complementary_pairs() const;

    /// Chains whose driver is not a port (latch/flip-flop storage).
    std::vector<std::size_t> state_chains() const;
};

/// Series/parallel expression over input literals.
struct SpExpr {
    enum class Kind : std::uint8_t { Literal, Series, Parallel };
    Kind kind = Kind::Literal;
    std::string literal;
    std::vector<SpExpr> children;

    static SpExpr lit(std::string name);
    static SpExpr series(std::vector<SpExpr> children);
    static SpExpr parallel(std::vector<SpExpr> children);

    /// Conduction when every literal's switch closes on the literal's value.
    bool conducts(const std::vector<std::string> &inputs, unsigned assignment, bool complemented) const;
    void literals(std::vector<std::string> &out) const;
};

struct SeriesParallelSpec {
    std::string name;
    SpExpr pull_up;   ///< network from V+ to the output; switches close on 0
    SpExpr pull_down; ///< network from V- to the output; switches close on 1
    bool invert_output = false;          ///< implemented by swapping the rails
    std::set<std::string> invert_inputs; ///< implemented by reversing the chain
};

/// Throws InputError when pull_up and pull_down are not duals.
GateCell build_from_spec(const SeriesParallelSpec &spec);

GateCell build_inverter(bool buffer = false);
GateCell build_nand();
GateCell build_and();
GateCell build_or();
GateCell build_nor();
GateCell build_aoi22();
GateCell build_ao22();
GateCell build_tristate();
GateCell build_mux();
GateCell build_xor();
GateCell build_full_adder();
GateCell build_latch();
GateCell build_dff(bool with_reset = false);
GateCell build_lut(std::size_t k, const std::vector<Level> &bits);
GateCell build_crossbar(std::size_t rows, std::size_t cols, const std::vector<std::vector<bool>> &config);
GateCell build_ram_cell();

/// Exchanges V+ and V- (complements every rail-driven output).
void swap_rails(GateCell &cell);
/// Reverses the switching wire of a control port (complements that input).
void invert_input(GateCell &cell, std::string_view port);

/// Copies `cell` into `target`. Port nodes are replaced by the nodes in
/// `port_nodes` (every port must be bound); internal nodes, rails and
/// switches are added under "<prefix>/". Chains driven by a bound node are
/// appended to that node's chain in `target`.
void instantiate(Circuit &target, const GateCell &cell, std::string_view prefix,
                 const std::map<std::string, std::size_t> &port_nodes);

/// Cells available to netlists, by name.
GateCell make_cell(std::string_view name);
std::vector<std::string> cell_names();

struct TruthTable {
    std::vector<std::string> inputs;  ///< enumerated columns (incl. "state:" columns)
    std::vector<std::string> outputs; ///< outputs followed by probes
    std::vector<std::vector<Level>> rows;

    std::string to_csv() const;
};

/// Exhaustive enumeration over {ONE, ZERO} for every control and data port
/// (config ports held at Z). For sequential cells the stored state of each
/// storage chain is enumerated as an extra "state:<node>" column. Each row
/// starts from the cell's power-on state. A SHORT aborts with the offending
/// row in the message. Cells with bidirectional ports are rejected.
TruthTable truth_table(const GateCell &cell);

} // namespace supermag::gates
