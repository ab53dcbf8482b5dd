#include "supermag/cost.hpp"
#include "supermag/device_physics.hpp"
#include "supermag/error.hpp"
#include "supermag/gate_library.hpp"
#include "supermag/materials.hpp"
#include "supermag/netlist.hpp"
#include "supermag/nvram.hpp"
#include "supermag/simulator.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace supermag;

std::string read_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string &path, const std::string &text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path);
    out << text;
}

std::vector<double> parse_numbers(const std::string &text, const std::string &what)
{
    std::vector<double> out;
    std::string token;
    std::istringstream in(text);
    auto flush = [&] {
        if (token.empty())
            return;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != token.size())
            throw InputError(what + ": \"" + token + "\" is not a number");
        out.push_back(v);
        token.clear();
    };
    char c;
    while (in.get(c)) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c)))
            flush();
        else
            token += c;
    }
    flush();
    return out;
}

// Either a file of numbers, an inline list "0,0.5,1", or a ramp "0,2,0@0.1".
std::vector<double> parse_schedule(const std::string &spec)
{
    if (std::filesystem::is_regular_file(spec))
        return parse_numbers(read_file(spec), spec);
    if (auto at = spec.find('@'); at != std::string::npos) {
        auto corners = parse_numbers(spec.substr(0, at), "schedule");
        auto step = parse_numbers(spec.substr(at + 1), "schedule step");
        if (step.size() != 1)
            throw InputError("schedule ramp needs exactly one step after '@'");
        return device::linear_schedule(corners, step.front());
    }
    return parse_numbers(spec, "schedule");
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

void run_sweep(const device::DeviceParams &p, const std::string &schedule, int initial_m, const std::string &out)
{
    auto sched = parse_schedule(schedule);
    auto curve = device::hysteresis_sweep(p, sched, initial_m);
    std::ostringstream os;
    os << "b_ext,m_fm,b_total,r_sc\n";
    for (const auto &s : curve)
        os << fmt(s.b_ext) << ',' << s.m_fm << ',' << fmt(s.b_total) << ',' << fmt(s.r_sc) << '\n';
    write_output(out, os.str());
}

void run_truth_table(const std::string &gate, const std::string &lut_bits, const std::string &out)
{
    gates::GateCell cell;
    if (gate == "lut") {
        if (lut_bits.empty())
            throw InputError("--lut-bits is required for the lut gate");
        std::vector<Level> bits;
        for (char c : lut_bits)
            bits.push_back(level_from_char(c));
        std::size_t k = 0;
        while ((std::size_t{1} << k) < bits.size())
            ++k;
        if ((std::size_t{1} << k) != bits.size() || k == 0)
            throw InputError("--lut-bits length must be a power of two >= 2");
        cell = gates::build_lut(k, bits);
    } else {
        cell = gates::make_cell(gate);
    }
    write_output(out, gates::truth_table(cell).to_csv());
}

void run_simulate(const std::string &netlist_path, const std::string &stim_path, bool clocked, bool keep_going,
                  const std::string &out)
{
    auto nl = netlist::load_netlist(netlist_path);
    auto stim = sim::load_stimulus(stim_path);
    sim::SimOptions opts;
    opts.clocked_supplies = clocked;
    opts.stop_on_short = !keep_going;
    auto wave = sim::simulate(nl, stim, opts);
    write_output(out, wave.to_csv());
    std::cerr << wave.steps.size() << " steps, " << wave.total_switch_events() << " switch events, "
              << wave.total_shorts() << " shorts\n";
    if (wave.total_shorts() > 0)
        throw ShortCircuitError("SHORT recorded in " + std::to_string(wave.total_shorts()) + " step(s)", {});
}

std::string bits_string(std::uint64_t v, std::size_t bits)
{
    std::string s;
    for (std::size_t b = bits; b-- > 0;)
        s += ((v >> b) & 1U) ? '1' : '0';
    return s;
}

void run_ram(std::size_t words, std::size_t bits, const std::string &script, const std::string &out)
{
    ram::RamGeometry geom{words, bits};
    geom.validate();
    auto ops = ram::parse_script(read_file(script), geom);
    ram::RamState state(geom);
    std::ostringstream os;
    os << "index,op,word,data,q,steps\n";
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const auto &op = ops[i];
        std::string name, word, data, q;
        switch (op.kind) {
        case ram::OpKind::Write:
            state.write(op.word, op.data);
            name = "write";
            word = std::to_string(op.word);
            data = bits_string(op.data, bits);
            break;
        case ram::OpKind::Read:
            name = "read";
            word = std::to_string(op.word);
            q = bits_string(state.read(op.word), bits);
            std::cout << "read " << op.word << " = " << q << '\n';
            break;
        case ram::OpKind::PowerCycle:
            state.power_cycle();
            name = "power_cycle";
            break;
        }
        os << i << ',' << name << ',' << word << ',' << data << ',' << q << ',' << state.trace().steps.size()
           << '\n';
    }
    for (const auto &w : state.warnings())
        std::cerr << "warning: " << w << '\n';
    write_output(out, os.str());
}

materials::MaterialDb db_or_builtin(const std::string &path)
{
    return path.empty() ? materials::builtin_db() : materials::load_material_db(path);
}

void run_rank(const std::string &db_path, const std::string &out)
{
    write_output(out, materials::rank_csv(materials::rank_materials(db_or_builtin(db_path))));
}

void run_derive(const std::string &preset, const std::string &db_path, const std::string &sot,
                const std::string &sc, double t_sw, double k_opt, const std::string &out)
{
    materials::Technology t;
    if (!sot.empty() || !sc.empty()) {
        if (sot.empty() || sc.empty() || t_sw <= 0.0)
            throw InputError("custom derivation needs --sot, --sc and --t-sw");
        auto db = db_or_builtin(db_path);
        materials::MaterialPair pair{materials::find_sot(db, sot), materials::find_superconductor(db, sc)};
        if (auto f = materials::feasibility(pair); !f.pass)
            throw InfeasibleError(pair.label() + " has k_SuperMag = " + fmt(f.k) + "; a switch needs k < " +
                                  fmt(f.limit));
        t = materials::derive_technology(pair, materials::GeometryParams{}, t_sw, k_opt, "custom");
    } else {
        auto p = materials::preset(preset);
        if (t_sw > 0.0)
            p.t_sw = t_sw;
        t = materials::derive_technology(p, k_opt);
    }
    write_output(out, materials::to_json(t) + "\n");
}

struct CostArgs {
    std::string netlist, params, scheme = "level", stimulus, out;
    double f_clk = 1e9;
    std::optional<double> activity;
    std::optional<std::size_t> off_switches;
    std::size_t ram_cells = 0;
    bool exclude_seq_leakage = false;
};

void run_cost(const CostArgs &a)
{
    auto nl = netlist::load_netlist(a.netlist);
    auto tech = a.params.empty() ? materials::derive_technology(materials::preset("table_s4"))
                                 : materials::technology_from_json(read_file(a.params));
    cost::NetlistCostOptions opts;
    opts.f_clk = a.f_clk;
    opts.scheme = cost::scheme_from_string(a.scheme);
    opts.activity = a.activity;
    opts.off_switches = a.off_switches;
    opts.count_sequential_leakage = !a.exclude_seq_leakage;
    opts.ram_cells = a.ram_cells;
    std::optional<sim::Stimulus> stim;
    if (!a.stimulus.empty())
        stim = sim::load_stimulus(a.stimulus);
    auto in = cost::inputs_from_netlist(nl, tech, opts, stim ? &*stim : nullptr);
    write_output(a.out, cost::report_json(cost::evaluate(in), in) + "\n");
}

void run_compare(const std::string &report, const std::string &externals, const std::string &k_list,
                 const std::string &out)
{
    auto base = cost::inputs_from_report_json(read_file(report));
    cost::ExternalMetrics ext;
    if (!externals.empty())
        ext = cost::parse_externals(read_file(externals));
    std::vector<double> ks = k_list.empty() ? std::vector<double>{} : parse_numbers(k_list, "--k-opt");
    auto cmp = cost::compare(base, ext, ks);
    for (const auto &[name, k] : cmp.pdp_match_kopt)
        std::cerr << "PDP match " << name << ": k_opt = " << fmt(k) << '\n';
    for (const auto &[name, err] : cmp.pdp_match_error)
        std::cerr << "PDP match " << name << ": " << err << '\n';
    write_output(out, cmp.to_csv());
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"SuperMag switch-level simulator and technology analysis"};
    app.require_subcommand(1);

    // sweep
    auto *sweep = app.add_subcommand("sweep", "Hysteresis sweep of a single device");
    device::DeviceParams dp;
    std::string schedule, sweep_out;
    int initial_m = -1;
    sweep->add_option("--b-fm", dp.b_fm, "Proximity field [T]")->required();
    sweep->add_option("--b-cr", dp.b_cr, "Critical field [T]")->required();
    sweep->add_option("--b-sw", dp.b_sw, "Coercive field [T]")->required();
    sweep->add_option("--r-normal", dp.r_normal, "Normal-state resistance [ohm]")->default_val(1.0);
    sweep->add_option("--schedule", schedule, "File of fields, inline list, or ramp a,b,c@step")->required();
    sweep->add_option("--initial-m", initial_m, "Initial magnetization")->check(CLI::IsMember({-1, 1}));
    sweep->add_option("--out", sweep_out, "Output CSV (default stdout)");

    // truth-table
    auto *tt = app.add_subcommand("truth-table", "Exhaustive truth table of a library cell");
    std::string gate, lut_bits, tt_out;
    std::vector<std::string> gate_names;
    for (const auto &name : gates::cell_names())
        if (name != "ram_cell")
            gate_names.push_back(name);
    gate_names.push_back("lut");
    tt->add_option("--gate", gate, "Cell name")->required()->check(CLI::IsMember(gate_names));
    tt->add_option("--lut-bits", lut_bits, "LUT contents, address 0 first (e.g. 0110)");
    tt->add_option("--out", tt_out, "Output CSV (default stdout)");

    // simulate
    auto *simc = app.add_subcommand("simulate", "Simulate a netlist over a stimulus");
    std::string sim_netlist, sim_stim, sim_out;
    bool clocked = false, keep_going = false;
    simc->add_option("--netlist", sim_netlist, "Netlist (.smn JSON)")->required();
    simc->add_option("--stimulus", sim_stim, "Stimulus JSON")->required();
    simc->add_flag("--clocked-supplies", clocked, "Rails drive only while the clock is ONE");
    simc->add_flag("--keep-going", keep_going, "Record SHORTs instead of stopping");
    simc->add_option("--out", sim_out, "Waveform CSV (default stdout)");

    // ram
    auto *ramc = app.add_subcommand("ram", "Run a read/write script on an nvRAM array");
    std::size_t words = 0, bits = 0;
    std::string script, ram_out;
    ramc->add_option("--words", words)->required();
    ramc->add_option("--bits", bits)->required();
    ramc->add_option("--script", script, "Operations JSON")->required();
    ramc->add_option("--out", ram_out, "Trace CSV (default stdout)");

    // materials
    auto *mat = app.add_subcommand("materials", "Material ranking and design-point derivation");
    mat->require_subcommand(1);
    auto *rank = mat->add_subcommand("rank", "Rank every SC x SOT pair by k_SuperMag");
    std::string db_path, rank_out;
    rank->add_option("--db", db_path, "Material database (default: built-in tables)");
    rank->add_option("--out", rank_out, "Output CSV (default stdout)");
    auto *derive = mat->add_subcommand("derive", "Derive switch geometry and energy figures");
    std::string preset = "table_s4", derive_db, sot, sc, derive_out;
    double t_sw = 0.0, k_opt = 1.0;
    derive->add_option("--preset", preset)->check(CLI::IsMember(materials::preset_names()));
    derive->add_option("--db", derive_db, "Material database for --sot/--sc");
    derive->add_option("--sot", sot, "SOT stack name");
    derive->add_option("--sc", sc, "Superconductor name");
    derive->add_option("--t-sw", t_sw, "Switching time [s]");
    derive->add_option("--k-opt", k_opt, "Material improvement factor (>= 1)");
    derive->add_option("--out", derive_out, "Output JSON (default stdout)");

    // cost
    auto *costc = app.add_subcommand("cost", "Area, power, delay and PDP of a netlist");
    CostArgs ca;
    costc->add_option("--netlist", ca.netlist)->required();
    costc->add_option("--params", ca.params, "Technology JSON from `materials derive` (default table_s4)");
    costc->add_option("--fclk", ca.f_clk, "Clock frequency [Hz]");
    costc->add_option("--scheme", ca.scheme)->check(CLI::IsMember({"level", "clocked"}));
    auto *act = costc->add_option("--activity", ca.activity, "Switching events per cycle");
    costc->add_option("--stimulus", ca.stimulus, "Stimulus used to measure activity")->excludes(act);
    costc->add_option("--off-switches", ca.off_switches, "Override the leaking switch count");
    costc->add_option("--ram-cells", ca.ram_cells, "Extra nvRAM bit cells");
    costc->add_flag("--exclude-sequential-leakage", ca.exclude_seq_leakage);
    costc->add_option("--out", ca.out, "Report JSON (default stdout)");

    // compare
    auto *cmp = app.add_subcommand("compare", "Normalized comparison against external technologies");
    std::string report, externals, k_list, cmp_out;
    cmp->add_option("--report", report, "Report JSON from `cost`")->required();
    cmp->add_option("--externals", externals, "External metrics JSON");
    cmp->add_option("--k-opt", k_list, "Comma-separated k_opt values");
    cmp->add_option("--out", cmp_out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sweep)
            run_sweep(dp, schedule, initial_m, sweep_out);
        else if (*tt)
            run_truth_table(gate, lut_bits, tt_out);
        else if (*simc)
            run_simulate(sim_netlist, sim_stim, clocked, keep_going, sim_out);
        else if (*ramc)
            run_ram(words, bits, script, ram_out);
        else if (*rank)
            run_rank(db_path, rank_out);
        else if (*derive)
            run_derive(preset, derive_db, sot, sc, t_sw, k_opt, derive_out);
        else if (*costc)
            run_cost(ca);
        else if (*cmp)
            run_compare(report, externals, k_list, cmp_out);
    } catch (const InputError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InfeasibleError &e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 3;
    } catch (const ShortCircuitError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const LoopError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
