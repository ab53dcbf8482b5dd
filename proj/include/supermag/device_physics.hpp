#pragma once

// Quasi-static model of the SC/I/FM stack: a ferromagnet with coercive
// field b_sw proximity-couples a field +-b_fm into a superconductor whose
// critical field is b_cr. Units are tesla and ohm throughout.

#include <span>
#include <vector>

namespace supermag::device {

struct DeviceParams {
    double b_fm = 0.0;     ///< proximity exchange field magnitude [T]
    double b_cr = 0.0;     ///< SC critical field [T]
    double b_sw = 0.0;     ///< FM coercive field [T]
    double r_normal = 0.0; ///< SC normal-state resistance [ohm]

    /// Throws InputError unless every field is finite and strictly positive.
    void validate() const;
};

struct DeviceState {
    int m_fm = -1;      ///< magnetization sign, -1 or +1
    double r_sc = 0.0;  ///< 0 (superconducting) or r_normal
};

struct SweepSample {
    double b_ext = 0.0;
    int m_fm = -1;
    double b_total = 0.0;
    double r_sc = 0.0;

    bool operator==(const SweepSample &) const = default;
};

using SweepCurve = std::vector<SweepSample>;

/// Applies one external field value. The magnet flips first (strictly
/// beyond b_sw), then the superconductor is evaluated against b_cr.
DeviceState step_field(const DeviceState &state, const DeviceParams &params, double b_ext);

/// Total field seen by the superconductor for a given magnetization.
inline double total_field(int m_fm, const DeviceParams &params, double b_ext)
{
    return b_ext + m_fm * params.b_fm;
}

SweepCurve hysteresis_sweep(const DeviceParams &params, std::span<const double> schedule, int initial_m);

/// Builds a piecewise-linear schedule through `corners` with `step` spacing
/// (corners are always included).
std::vector<double> linear_schedule(std::span<const double> corners, double step);

struct BiasWindow {
    double lo = 0.0; ///< b_cr - b_fm, may be negative
    double hi = 0.0; ///< b_sw
};

/// Raw (b_cr - b_fm, b_sw) window. Throws InfeasibleError when lo >= hi.
BiasWindow bias_window(const DeviceParams &params);

struct OperatingVerdict {
    bool on_state_superconducting = false; // |b_bias - b_fm| < b_cr
    bool off_state_resistive = false;      // b_bias + b_fm > b_cr
    bool fm_undisturbed = false;           // |b_bias| < b_sw

    bool ok() const { return on_state_superconducting && off_state_resistive && fm_undisturbed; }
};

OperatingVerdict validate_operating_point(const DeviceParams &params, double b_bias);

} // namespace supermag::device
