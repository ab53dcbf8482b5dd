#pragma once

#include "supermag/netlist.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace supermag::sim {

using StepInputs = std::map<std::string, Level>;

struct Stimulus {
    /// Inputs missing from a step keep their previous drive; the first step
    /// starts from all inputs at Z.
    std::vector<StepInputs> steps;
    std::optional<std::string> clock;
};

Stimulus parse_stimulus(std::string_view json_text);
Stimulus load_stimulus(const std::string &path);

struct SimOptions {
    /// V+/V- only drive during evaluate phases (clock ONE, or every step
    /// when the stimulus names no clock).
    bool clocked_supplies = false;
    /// Throw ShortCircuitError at the first shorted step instead of
    /// recording it.
    bool stop_on_short = true;
};

struct WaveStep {
    std::vector<Level> nets;
    std::vector<SwitchState> switches;
    std::size_t switch_events = 0;
    std::size_t shorts = 0;
    bool evaluate_phase = true;
};

struct Waveform {
    std::vector<std::string> nets;
    std::vector<std::string> switch_ids;
    std::vector<WaveStep> steps;

    Level level(std::size_t step, std::string_view net) const;
    std::size_t total_switch_events() const;
    std::size_t total_shorts() const;
    double events_per_step() const;
    /// One row per step, one column per net, then "#shorts".
    std::string to_csv() const;
};

class Simulator {
public:
    explicit Simulator(const netlist::Netlist &netlist, SimOptions options = {});

    /// Applies explicit input changes, settles, and records the step.
    const WaveStep &step(const StepInputs &inputs, bool evaluate_phase = true);

    Level level(std::string_view net) const;
    const Waveform &waveform() const { return waveform_; }
    const netlist::Elaborated &elaborated() const { return elab_; }
    std::span<const SwitchState> states() const { return engine_.states(); }

private:
    netlist::Elaborated elab_;
    Engine engine_;
    SimOptions options_;
    Waveform waveform_;
    std::map<std::string, Level> drives_;
};

/// Runs the whole stimulus. Deterministic in (netlist, stimulus, init).
Waveform simulate(const netlist::Netlist &netlist, const Stimulus &stimulus, SimOptions options = {});

} // namespace supermag::sim
