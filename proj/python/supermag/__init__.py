"""SuperMag switch-level simulator and technology analysis."""

import json

from ._core import (
    DeviceParams,
    Error,
    InfeasibleError,
    InputError,
    LoopError,
    Netlist,
    Ram,
    RankRow,
    ShortCircuitError,
    Waveform,
    bias_window,
    cell_names,
    compare,
    cost_report,
    derive_technology,
    hysteresis_sweep,
    linear_schedule,
    load_netlist,
    parse_netlist,
    preset_names,
    rank_materials,
    simulate,
    solve_kopt_for_pdp,
    truth_table,
)

__all__ = [
    "DeviceParams", "Error", "InfeasibleError", "InputError", "LoopError", "Netlist", "Ram", "RankRow",
    "ShortCircuitError", "Waveform", "bias_window", "cell_names", "compare", "cost_report", "derive_technology",
    "hysteresis_sweep", "linear_schedule", "load_netlist", "parse_netlist", "preset_names", "rank_materials",
    "simulate", "solve_kopt_for_pdp", "truth_table", "technology", "cost",
]


def technology(preset="table_s4", k_opt=1.0):
    """Derived technology point as a dict."""
    return json.loads(derive_technology(preset, k_opt))


def cost(netlist, **kwargs):
    """Cost report of a netlist as a dict (see cost_report for options)."""
    return json.loads(cost_report(netlist, **kwargs))
