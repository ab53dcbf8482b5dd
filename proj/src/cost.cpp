#include "supermag/cost.hpp"

#include "supermag/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace supermag::cost {

using json = nlohmann::ordered_json;

SupplyScheme scheme_from_string(std::string_view s)
{
    if (s == "level")
        return SupplyScheme::Level;
    if (s == "clocked")
        return SupplyScheme::Clocked;
    throw InputError("unknown supply scheme \"" + std::string(s) + "\" (level, clocked)");
}

std::string_view to_string(SupplyScheme s) { return s == SupplyScheme::Level ? "level" : "clocked"; }

namespace {

constexpr double kSwitchesPerRamCell = 4.0;

double sc_power(const CostInputs &in) { return in.off_switches * in.tech.energy.p_sc_inv; }

double sot_power(const CostInputs &in)
{
    if (in.scheme == SupplyScheme::Clocked)
        return 0.0;
    const double driven = static_cast<double>(in.n_comb) + 4.0 * static_cast<double>(in.n_dff);
    return driven * in.tech.energy.p_sot_fo10 / in.tech.geometry.fanout;
}

void check(const CostInputs &in)
{
    if (!(in.off_switches >= 0.0) || (in.events_per_cycle && !(*in.events_per_cycle >= 0.0)))
        throw InputError("activity counts must be non-negative");
    if (!std::isfinite(in.f_clk) || in.f_clk <= 0.0)
        throw InputError("clock frequency must be positive");
}

} // namespace

double area(const CostInputs &in)
{
    const auto &g = in.tech.geometry;
    const double n = static_cast<double>(in.n_switches) + kSwitchesPerRamCell * static_cast<double>(in.ram_cells);
    return g.sf_area * g.w * g.l * n;
}

double static_power(const CostInputs &in)
{
    check(in);
    return sc_power(in) + sot_power(in);
}

double switching_power(const CostInputs &in)
{
    check(in);
    if (!in.events_per_cycle)
        throw InputError("switching power needs an activity factor or a simulation stimulus");
    return *in.events_per_cycle * in.tech.energy.e_sw_unit * in.f_clk;
}

double delay(const CostInputs &in) { return static_cast<double>(in.depth) * in.tech.t_sw; }

CostReport evaluate(const CostInputs &in)
{
    CostReport r;
    r.area = area(in);
    r.p_static = static_power(in);
    r.p_switching = switching_power(in);
    r.delay = delay(in);
    r.pdp = (r.p_static + r.p_switching) * r.delay;
    return r;
}

CostInputs inputs_from_netlist(const netlist::Netlist &nl, const materials::Technology &tech,
                               const NetlistCostOptions &opts, const sim::Stimulus *stimulus)
{
    const netlist::NetlistStats st = netlist::analyze(nl);
    CostInputs in;
    in.n_switches = st.n_switches;
    in.n_comb = st.n_comb;
    in.n_dff = st.n_dff;
    in.depth = st.depth;
    in.off_switches = static_cast<double>(st.off_switches);
    if (!opts.count_sequential_leakage)
        in.off_switches -= static_cast<double>(st.sequential_off_switches);
    if (opts.off_switches)
        in.off_switches = static_cast<double>(*opts.off_switches);
    in.ram_cells = opts.ram_cells;
    in.f_clk = opts.f_clk;
    in.scheme = opts.scheme;
    in.tech = tech;

    if (opts.activity) {
        in.events_per_cycle = *opts.activity;
    } else if (stimulus) {
        sim::SimOptions so;
        so.clocked_supplies = opts.scheme == SupplyScheme::Clocked && stimulus->clock.has_value();
        in.events_per_cycle = sim::simulate(nl, *stimulus, so).events_per_step();
    }
    check(in);
    return in;
}

CostInputs rescale(const CostInputs &in, double k_opt)
{
    CostInputs out = in;
    out.tech = materials::rescale(in.tech, k_opt);
    return out;
}

double pdp_closed_form(const CostInputs &base, double k_opt)
{
    if (!std::isfinite(k_opt) || k_opt <= 0.0)
        throw InputError("k_opt must be positive");
    const double r = k_opt / base.tech.k_opt;
    const double p = sc_power(base) * std::pow(r, -5) + sot_power(base) * std::pow(r, -3) +
                     switching_power(base) * std::pow(r, -4);
    return p * delay(base) / r;
}

double solve_kopt_for_pdp(const CostInputs &base, double target_pdp, double tol)
{
    if (!std::isfinite(target_pdp) || target_pdp <= 0.0)
        throw InputError("target PDP must be positive");
    auto pdp_at = [&](double k) { return evaluate(rescale(base, k)).pdp; };

    const double at_one = pdp_at(1.0);
    if (target_pdp > at_one * (1.0 + 1e-12))
        throw InfeasibleError("target PDP exceeds SuperMag PDP at k_opt = 1; no k_opt >= 1 matches");
    if (target_pdp >= at_one)
        return 1.0;

    double lo = 1.0;
    double hi = 2.0;
    while (pdp_at(hi) > target_pdp) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9)
            throw InfeasibleError("target PDP is not reachable for any k_opt <= 1e9");
    }
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (pdp_at(mid) > target_pdp ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string report_json(const CostReport &r, const CostInputs &in)
{
    json j;
    j["area_m2"] = r.area;
    j["p_static_w"] = r.p_static;
    j["p_switching_w"] = r.p_switching;
    j["delay_s"] = r.delay;
    j["pdp_j"] = r.pdp;
    j["n_switches"] = in.n_switches;
    j["n_comb"] = in.n_comb;
    j["n_dff"] = in.n_dff;
    j["depth"] = in.depth;
    json inputs;
    inputs["off_switches"] = in.off_switches;
    inputs["events_per_cycle"] = in.events_per_cycle ? json(*in.events_per_cycle) : json(nullptr);
    inputs["ram_cells"] = in.ram_cells;
    inputs["f_clk_hz"] = in.f_clk;
    inputs["scheme"] = std::string(to_string(in.scheme));
    inputs["technology"] = json::parse(materials::to_json(in.tech));
    j["inputs"] = std::move(inputs);
    return j.dump(2);
}

CostInputs inputs_from_report_json(std::string_view text)
{
    try {
        const json j = json::parse(text);
        CostInputs in;
        in.n_switches = j.at("n_switches").get<std::size_t>();
        in.n_comb = j.at("n_comb").get<std::size_t>();
        in.n_dff = j.at("n_dff").get<std::size_t>();
        in.depth = j.at("depth").get<std::size_t>();
        const json &i = j.at("inputs");
        in.off_switches = i.at("off_switches").get<double>();
        if (!i.at("events_per_cycle").is_null())
            in.events_per_cycle = i.at("events_per_cycle").get<double>();
        in.ram_cells = i.at("ram_cells").get<std::size_t>();
        in.f_clk = i.at("f_clk_hz").get<double>();
        in.scheme = scheme_from_string(i.at("scheme").get<std::string>());
        in.tech = materials::technology_from_json(i.at("technology").dump());
        check(in);
        return in;
    } catch (const json::exception &e) {
        throw InputError(std::string("cost report: ") + e.what());
    }
}

std::optional<double> Metrics::pdp() const
{
    if (power && delay)
        return *power * *delay;
    return std::nullopt;
}

ExternalMetrics parse_externals(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw InputError(std::string("externals syntax error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("technologies") || !j["technologies"].is_object())
        throw InputError("externals must be {\"technologies\": {...}}");
    ExternalMetrics ext;
    for (const auto &[name, v] : j["technologies"].items()) {
        if (!v.is_object())
            throw InputError("externals: \"" + name + "\" must be an object");
        Metrics m;
        auto field = [&](const char *key) -> std::optional<double> {
            auto it = v.find(key);
            if (it == v.end() || it->is_null())
                return std::nullopt;
            if (!it->is_number() || !(it->get<double>() > 0.0) || !std::isfinite(it->get<double>()))
                throw InputError("externals: " + name + "." + key + " must be a positive number");
            return it->get<double>();
        };
        for (const auto &[key, _] : v.items())
            if (key != "area_m2" && key != "power_w" && key != "delay_s" && key != "note")
                throw InputError("externals: unknown field " + name + "." + key);
        m.area = field("area_m2");
        m.power = field("power_w");
        m.delay = field("delay_s");
        ext.technologies[name] = m;
    }
    return ext;
}

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string kopt_label(double k) { return "SuperMag (k_opt=" + fmt(k) + ")"; }

Metrics supermag_metrics(const CostInputs &in)
{
    const CostReport r = evaluate(in);
    return {r.area, r.p_static + r.p_switching, r.delay};
}

} // namespace

Comparison compare(const CostInputs &base, const ExternalMetrics &externals, const std::vector<double> &k_opts)
{
    if (externals.technologies.empty() && k_opts.empty())
        throw InputError("compare needs at least one external technology or k_opt value");
    Comparison c;
    for (double k : k_opts) {
        ComparisonRow row{kopt_label(k), supermag_metrics(rescale(base, k)), {}, k};
        c.rows.push_back(row);
    }
    for (const auto &[name, m] : externals.technologies) {
        c.rows.push_back({name, m, {}, std::nullopt});
        auto pdp = m.pdp();
        if (!pdp)
            continue;
        try {
            double k = solve_kopt_for_pdp(base, *pdp);
            c.pdp_match_kopt[name] = k;
            c.rows.push_back({"SuperMag (PDP match " + name + ")", supermag_metrics(rescale(base, k)), {}, k});
        } catch (const InfeasibleError &e) {
            c.pdp_match_error[name] = e.what();
        }
    }

    auto normalize = [&](auto get, auto set) {
        double mx = 0.0;
        for (const auto &r : c.rows)
            if (auto v = get(r.raw))
                mx = std::max(mx, *v);
        for (auto &r : c.rows)
            if (auto v = get(r.raw); v && mx > 0.0)
                set(r.normalized, *v / mx);
    };
    normalize([](const Metrics &m) { return m.area; }, [](Metrics &m, double v) { m.area = v; });
    normalize([](const Metrics &m) { return m.power; }, [](Metrics &m, double v) { m.power = v; });
    normalize([](const Metrics &m) { return m.delay; }, [](Metrics &m, double v) { m.delay = v; });
    return c;
}

std::string Comparison::to_csv() const
{
    double max_pdp = 0.0;
    for (const auto &r : rows)
        if (auto p = r.raw.pdp())
            max_pdp = std::max(max_pdp, *p);

    auto cell = [](const std::optional<double> &v) { return v ? fmt(*v) : std::string(); };
    std::ostringstream os;
    os << "technology,k_opt,area_m2,power_w,delay_s,pdp_j,area_norm,power_norm,delay_norm,pdp_norm\n";
    for (const auto &r : rows) {
        auto pdp = r.raw.pdp();
        std::optional<double> pdp_norm;
        if (pdp && max_pdp > 0.0)
            pdp_norm = *pdp / max_pdp;
        os << '"' << r.technology << "\"," << cell(r.k_opt) << ',' << cell(r.raw.area) << ','
           << cell(r.raw.power) << ',' << cell(r.raw.delay) << ',' << cell(pdp) << ',' << cell(r.normalized.area)
           << ',' << cell(r.normalized.power) << ',' << cell(r.normalized.delay) << ',' << cell(pdp_norm) << '\n';
    }
    return os.str();
}

} // namespace supermag::cost
