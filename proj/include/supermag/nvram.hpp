#pragma once

// Non-volatile RAM built from four-switch bit cells, a tri-state write
// driver and a latching read buffer per column.

#include "supermag/simulator.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace supermag::ram {

struct RamGeometry {
    std::size_t words = 1;
    std::size_t bits = 1; ///< word width, at most 64

    void validate() const;
    std::size_t cells() const { return words * bits; }
    static constexpr std::size_t kSwitchesPerCell = 4;
};

/// Netlist with ports WWL<i>, RWL<i> (per word), D<j>, Q<j> (per bit),
/// Wr_En and Rd_En; BL<j> are internal bit lines.
netlist::Netlist build_nvram(const RamGeometry &geom);

enum class OpKind : std::uint8_t { Write, Read, PowerCycle };

struct RamOp {
    OpKind kind = OpKind::Read;
    std::size_t word = 0;
    std::uint64_t data = 0;
};

/// Parses {"ops": [{"op":"write","word":0,"data":"1010"}, {"op":"read","word":0}, {"op":"power_cycle"}]}.
/// Data strings are MSB first; integers are also accepted.
std::vector<RamOp> parse_script(std::string_view json_text, const RamGeometry &geom);

class RamState {
public:
    explicit RamState(RamGeometry geom);

    const RamGeometry &geometry() const { return geom_; }

    /// WWL=1, Wr_En=1; assert D; lower WWL, Wr_En and release D.
    void write(std::size_t word, std::uint64_t data);
    /// Rd_En=1, RWL=1; lower both; Q holds the word.
    std::uint64_t read(std::size_t word);
    /// Drops every input to Z for a step, then resumes.
    void power_cycle();

    /// Stored bit read directly from the memory switches.
    bool stored_bit(std::size_t word, std::size_t bit) const;
    std::uint64_t read_buffer() const;

    const sim::Waveform &trace() const { return sim_.waveform(); }
    /// Protocol warnings, e.g. Wr_En and Rd_En asserted together.
    const std::vector<std::string> &warnings() const { return warnings_; }

    /// Raw step for protocol experiments; records a warning on Wr_En/Rd_En overlap.
    void apply(const sim::StepInputs &inputs);

private:
    void check_word(std::size_t word) const;

    RamGeometry geom_;
    sim::Simulator sim_;
    std::vector<std::string> warnings_;
    std::map<std::string, Level> current_;
};

RamState ram_write(RamState state, std::size_t word, std::uint64_t data);
std::uint64_t ram_read(RamState &state, std::size_t word);

} // namespace supermag::ram
