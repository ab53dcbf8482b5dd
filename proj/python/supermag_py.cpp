#include "supermag/cost.hpp"
#include "supermag/device_physics.hpp"
#include "supermag/error.hpp"
#include "supermag/gate_library.hpp"
#include "supermag/materials.hpp"
#include "supermag/netlist.hpp"
#include "supermag/nvram.hpp"
#include "supermag/simulator.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace supermag;

namespace {

// Python-friendly level conversions: 0, 1 or None.
py::object level_obj(Level l)
{
    if (l == Level::Z)
        return py::none();
    return py::int_(l == Level::One ? 1 : 0);
}

Level level_arg(const py::handle &h)
{
    if (h.is_none())
        return Level::Z;
    if (py::isinstance<py::str>(h))
        return level_from_string(h.cast<std::string>());
    const long v = h.cast<long>();
    if (v != 0 && v != 1)
        throw InputError("level must be 0, 1 or None");
    return level_of(v == 1);
}

sim::StepInputs step_arg(const py::dict &d)
{
    sim::StepInputs in;
    for (auto [k, v] : d)
        in[k.cast<std::string>()] = level_arg(v);
    return in;
}

py::list levels(const std::vector<Level> &ls)
{
    py::list out;
    for (Level l : ls)
        out.append(level_obj(l));
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "SuperMag switch-level simulator and technology analysis";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
    py::register_exception<ShortCircuitError>(m, "ShortCircuitError", base.ptr());
    py::register_exception<LoopError>(m, "LoopError", base.ptr());

    // device
    py::class_<device::DeviceParams>(m, "DeviceParams")
        .def(py::init([](double b_fm, double b_cr, double b_sw, double r_normal) {
                 return device::DeviceParams{b_fm, b_cr, b_sw, r_normal};
             }),
             py::arg("b_fm"), py::arg("b_cr"), py::arg("b_sw"), py::arg("r_normal") = 1.0)
        .def_readwrite("b_fm", &device::DeviceParams::b_fm)
        .def_readwrite("b_cr", &device::DeviceParams::b_cr)
        .def_readwrite("b_sw", &device::DeviceParams::b_sw)
        .def_readwrite("r_normal", &device::DeviceParams::r_normal);

    m.def(
        "hysteresis_sweep",
        [](const device::DeviceParams &p, const std::vector<double> &schedule, int initial_m) {
            py::list rows;
            for (const auto &s : device::hysteresis_sweep(p, schedule, initial_m))
                rows.append(py::dict(py::arg("b_ext") = s.b_ext, py::arg("m_fm") = s.m_fm,
                                     py::arg("b_total") = s.b_total, py::arg("r_sc") = s.r_sc));
            return rows;
        },
        py::arg("params"), py::arg("schedule"), py::arg("initial_m") = -1);
    m.def("linear_schedule", &device::linear_schedule, py::arg("corners"), py::arg("step"));
    m.def(
        "bias_window",
        [](const device::DeviceParams &p) {
            auto w = device::bias_window(p);
            return py::make_tuple(w.lo, w.hi);
        },
        py::arg("params"));

    // gates
    m.def("cell_names", &gates::cell_names);
    m.def(
        "truth_table",
        [](const std::string &cell) {
            const auto t = gates::truth_table(gates::make_cell(cell));
            py::list rows;
            for (const auto &r : t.rows) {
                py::dict d;
                for (std::size_t i = 0; i < r.size(); ++i) {
                    const auto &col = i < t.inputs.size() ? t.inputs[i] : t.outputs[i - t.inputs.size()];
                    d[py::str(col)] = level_obj(r[i]);
                }
                rows.append(d);
            }
            return rows;
        },
        py::arg("cell"), "Exhaustive truth table as a list of {column: 0/1/None} rows.");

    // netlists and simulation
    py::class_<netlist::Netlist>(m, "Netlist")
        .def_readonly("name", &netlist::Netlist::name)
        .def_property_readonly("inputs", &netlist::Netlist::inputs)
        .def_property_readonly("outputs", &netlist::Netlist::outputs)
        .def_property_readonly("nets", &netlist::Netlist::nets)
        .def("to_json", [](const netlist::Netlist &n) { return netlist::to_json(n); });
    m.def("parse_netlist", [](const std::string &text) { return netlist::parse_netlist(text); }, py::arg("text"));
    m.def("load_netlist", &netlist::load_netlist, py::arg("path"));

    py::class_<sim::Waveform>(m, "Waveform")
        .def_readonly("nets", &sim::Waveform::nets)
        .def_readonly("switch_ids", &sim::Waveform::switch_ids)
        .def_property_readonly("num_steps", [](const sim::Waveform &w) { return w.steps.size(); })
        .def("level", [](const sim::Waveform &w, std::size_t step, const std::string &net) {
            return level_obj(w.level(step, net));
        })
        .def("step_levels", [](const sim::Waveform &w, std::size_t step) { return levels(w.steps.at(step).nets); })
        .def("shorts", [](const sim::Waveform &w, std::size_t step) { return w.steps.at(step).shorts; })
        .def_property_readonly("total_switch_events", &sim::Waveform::total_switch_events)
        .def_property_readonly("events_per_step", &sim::Waveform::events_per_step)
        .def("to_csv", &sim::Waveform::to_csv);

    m.def(
        "simulate",
        [](const netlist::Netlist &nl, const py::list &steps, std::optional<std::string> clock,
           bool clocked_supplies, bool stop_on_short) {
            sim::Stimulus st;
            st.clock = std::move(clock);
            for (const auto &s : steps)
                st.steps.push_back(step_arg(s.cast<py::dict>()));
            return sim::simulate(nl, st, {clocked_supplies, stop_on_short});
        },
        py::arg("netlist"), py::arg("steps"), py::arg("clock") = py::none(), py::arg("clocked_supplies") = false,
        py::arg("stop_on_short") = true, "Steps are dicts {port: 0, 1 or None}.");

    // nvRAM
    py::class_<ram::RamState>(m, "Ram")
        .def(py::init([](std::size_t words, std::size_t bits) { return ram::RamState({words, bits}); }),
             py::arg("words"), py::arg("bits"))
        .def("write", &ram::RamState::write, py::arg("word"), py::arg("data"))
        .def("read", &ram::RamState::read, py::arg("word"))
        .def("power_cycle", &ram::RamState::power_cycle)
        .def("stored_bit", &ram::RamState::stored_bit, py::arg("word"), py::arg("bit"))
        .def_property_readonly("warnings", &ram::RamState::warnings);

    // materials
    py::class_<materials::RankRow>(m, "RankRow")
        .def_property_readonly("label", [](const materials::RankRow &r) { return r.pair.label(); })
        .def_readonly("k", &materials::RankRow::k)
        .def_property_readonly("min_w_over_l", [](const materials::RankRow &r) { return r.ratios.min_w_over_l; })
        .def_property_readonly("min_thsc_over_thsot",
                               [](const materials::RankRow &r) { return r.ratios.min_thsc_over_thsot; })
        .def_readonly("feasible", &materials::RankRow::feasible);
    m.def(
        "rank_materials",
        [](std::optional<std::string> db) {
            return materials::rank_materials(db ? materials::load_material_db(*db) : materials::builtin_db());
        },
        py::arg("db") = py::none());
    m.def("preset_names", &materials::preset_names);
    m.def(
        "derive_technology",
        [](const std::string &preset, double k_opt) {
            return materials::to_json(materials::derive_technology(materials::preset(preset), k_opt));
        },
        py::arg("preset") = "table_s4", py::arg("k_opt") = 1.0, "Technology point as a JSON string.");

    // cost
    m.def(
        "cost_report",
        [](const netlist::Netlist &nl, std::optional<std::string> params, double f_clk, const std::string &scheme,
           std::optional<double> activity) {
            const auto tech = params ? materials::technology_from_json(*params)
                                     : materials::derive_technology(materials::preset("table_s4"));
            cost::NetlistCostOptions o;
            o.f_clk = f_clk;
            o.scheme = cost::scheme_from_string(scheme);
            o.activity = activity;
            const auto in = cost::inputs_from_netlist(nl, tech, o);
            return cost::report_json(cost::evaluate(in), in);
        },
        py::arg("netlist"), py::arg("params") = py::none(), py::arg("f_clk") = 1e9, py::arg("scheme") = "level",
        py::arg("activity") = py::none(), "Cost report as a JSON string.");
    m.def(
        "solve_kopt_for_pdp",
        [](const std::string &report, double target) {
            return cost::solve_kopt_for_pdp(cost::inputs_from_report_json(report), target);
        },
        py::arg("report"), py::arg("target_pdp"));
    m.def(
        "compare",
        [](const std::string &report, std::optional<std::string> externals, const std::vector<double> &k_opts) {
            const auto ext = externals ? cost::parse_externals(*externals) : cost::ExternalMetrics{};
            return cost::compare(cost::inputs_from_report_json(report), ext, k_opts).to_csv();
        },
        py::arg("report"), py::arg("externals") = py::none(), py::arg("k_opts") = std::vector<double>{},
        "Comparison table as CSV.");
}
