#include "supermag/device_physics.hpp"

#include "supermag/error.hpp"

#include <cmath>
#include <sstream>

namespace supermag::device {

namespace {

void require_positive(double v, const char *name)
{
    if (!std::isfinite(v) || v <= 0.0) {
        std::ostringstream os;
        os << "device parameter " << name << " must be finite and > 0 (got " << v << ")";
        throw InputError(os.str());
    }
}

void require_sign(int m)
{
    if (m != -1 && m != 1)
        throw InputError("magnetization sign must be -1 or +1");
}

} // namespace

void DeviceParams::validate() const
{
    require_positive(b_fm, "b_fm");
    require_positive(b_cr, "b_cr");
    require_positive(b_sw, "b_sw");
    require_positive(r_normal, "r_normal");
}

DeviceState step_field(const DeviceState &state, const DeviceParams &params, double b_ext)
{
    params.validate();
    if (!std::isfinite(b_ext))
        throw InputError("external field must be finite");
    require_sign(state.m_fm);

    DeviceState next = state;
    if (std::abs(b_ext) > params.b_sw) {
        int sign = b_ext > 0.0 ? 1 : -1;
        if (sign != next.m_fm)
            next.m_fm = sign;
    }
    double b_total = total_field(next.m_fm, params, b_ext);
    next.r_sc = std::abs(b_total) > params.b_cr ? params.r_normal : 0.0;
    return next;
}

SweepCurve hysteresis_sweep(const DeviceParams &params, std::span<const double> schedule, int initial_m)
{
    params.validate();
    require_sign(initial_m);
    if (schedule.empty())
        throw InputError("field schedule is empty");

    SweepCurve curve;
    curve.reserve(schedule.size());
    DeviceState state{initial_m, 0.0};
    for (double b : schedule) {
        state = step_field(state, params, b);
        curve.push_back({b, state.m_fm, total_field(state.m_fm, params, b), state.r_sc});
    }
    return curve;
}

std::vector<double> linear_schedule(std::span<const double> corners, double step)
{
    if (corners.empty())
        throw InputError("schedule needs at least one corner");
    if (!(step > 0.0) || !std::isfinite(step))
        throw InputError("schedule step must be > 0");

    std::vector<double> out{corners.front()};
    for (std::size_t i = 1; i < corners.size(); ++i) {
        double from = corners[i - 1];
        double to = corners[i];
        auto n = static_cast<std::size_t>(std::ceil(std::abs(to - from) / step - 1e-9));
        for (std::size_t k = 1; k <= n; ++k) {
            // Index-based so the grid does not accumulate rounding.
            double v = k == n ? to : from + (to > from ? 1.0 : -1.0) * step * static_cast<double>(k);
            out.push_back(v);
        }
    }
    return out;
}

BiasWindow bias_window(const DeviceParams &params)
{
    params.validate();
    BiasWindow w{params.b_cr - params.b_fm, params.b_sw};
    if (w.lo >= w.hi) {
        std::ostringstream os;
        os << "no operating window: b_cr - b_fm = " << w.lo << " >= b_sw = " << w.hi;
        throw InfeasibleError(os.str());
    }
    return w;
}

OperatingVerdict validate_operating_point(const DeviceParams &params, double b_bias)
{
    params.validate();
    OperatingVerdict v;
    v.on_state_superconducting = std::abs(b_bias - params.b_fm) < params.b_cr;
    v.off_state_resistive = b_bias + params.b_fm > params.b_cr;
    v.fm_undisturbed = std::abs(b_bias) < params.b_sw;
    return v;
}

} // namespace supermag::device
