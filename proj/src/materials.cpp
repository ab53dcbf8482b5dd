#include "supermag/materials.hpp"

#include "supermag/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace supermag::materials {

using json = nlohmann::ordered_json;

namespace {

void require_positive(double v, const std::string &what)
{
    if (!std::isfinite(v) || v <= 0.0)
        throw InputError(what + " must be positive and finite");
}

std::string trim(std::string_view s)
{
    const auto *ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

void MaterialPair::validate() const
{
    require_positive(sot.j_sot, sot.name + " J_sot");
    require_positive(sot.rho_sot, sot.name + " rho_sot");
    require_positive(sc.j_c, sc.name + " J_c");
    require_positive(sc.rho_sc, sc.name + " rho_sc");
}

void GeometryParams::validate() const
{
    require_positive(l_min, "l_min");
    require_positive(w_min, "w_min");
    require_positive(th_sot, "th_sot");
    require_positive(th_sc_min, "th_sc_min");
    require_positive(sf_area, "sf_area");
    require_positive(fanout, "fanout");
    if (!(f_wl >= 1.0) || !(f_th >= 1.0) || !std::isfinite(f_wl) || !std::isfinite(f_th))
        throw InputError("margin factors f_wl and f_th must be >= 1");
}

double k_supermag(const MaterialPair &pair)
{
    pair.validate();
    return (pair.sot.j_sot * pair.sot.rho_sot) / (pair.sc.j_c * pair.sc.rho_sc);
}

MinRatios min_ratios(const MaterialPair &pair)
{
    const double k = k_supermag(pair);
    return {k, k * pair.sot.j_sot / pair.sc.j_c};
}

Feasibility feasibility(const MaterialPair &pair, double limit)
{
    require_positive(limit, "feasibility limit");
    Feasibility f;
    f.k = k_supermag(pair);
    f.limit = limit;
    f.pass = f.k < limit;
    f.margin = limit / f.k;
    return f;
}

DerivedGeometry evaluate_geometry(const MaterialPair &pair, const DerivedGeometry &dims)
{
    pair.validate();
    require_positive(dims.w, "w");
    require_positive(dims.l, "l");
    require_positive(dims.th_sc, "th_sc");
    require_positive(dims.th_sot, "th_sot");
    require_positive(dims.fanout, "fanout");

    DerivedGeometry g = dims;
    g.k_supermag = k_supermag(pair);
    g.i_sot = pair.sot.j_sot * g.w * g.th_sot;
    g.i_c = pair.sc.j_c * g.l * g.th_sc;
    g.r_sot = pair.sot.rho_sot * g.l / (g.w * g.th_sot);
    g.r_sc = pair.sc.rho_sc * g.w / (g.l * g.th_sc);
    g.v_dd = g.fanout * pair.sot.j_sot * pair.sot.rho_sot * g.l;
    g.vol_sot = g.w * g.l * g.th_sot;
    return g;
}

DerivedGeometry derive_geometry(const MaterialPair &pair, const GeometryParams &geo)
{
    geo.validate();
    const MinRatios r = min_ratios(pair);
    DerivedGeometry d;
    d.l = geo.l_min;
    d.w = std::max(geo.w_min, geo.f_wl * r.min_w_over_l * d.l);
    d.th_sot = geo.th_sot;
    d.th_sc = std::max(geo.th_sc_min, geo.f_th * r.min_thsc_over_thsot * geo.th_sot);
    d.sf_area = geo.sf_area;
    d.fanout = geo.fanout;
    d = evaluate_geometry(pair, d);
    // Tight margins make I_c == I_sot analytically; allow rounding noise.
    if (d.i_c < d.i_sot * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "infeasible geometry for " << pair.label() << ": I_c = " << d.i_c << " A < I_sot = " << d.i_sot
           << " A";
        throw InfeasibleError(os.str());
    }
    return d;
}

double unit_switching_energy(const SotStackEntry &sot, double vol_sot, double t_sw)
{
    require_positive(vol_sot, "Vol_sot");
    require_positive(t_sw, "t_sw");
    return sot.j_sot * sot.j_sot * sot.rho_sot * vol_sot * t_sw;
}

EnergyReport energy_model(const DerivedGeometry &g, const MaterialPair &pair, double t_sw)
{
    pair.validate();
    require_positive(t_sw, "t_sw");
    EnergyReport e;
    e.t_sw = t_sw;
    e.e_sw_unit = unit_switching_energy(pair.sot, g.vol_sot, t_sw);
    e.p_sot_fo10 = g.fanout * pair.sot.j_sot * pair.sot.j_sot * pair.sot.rho_sot * g.vol_sot;
    // Rails span 2*V_dd across the off switch of an inverter.
    const double v_span = 2.0 * g.fanout * pair.sot.j_sot * pair.sot.rho_sot * g.l;
    const double r_sc = pair.sc.rho_sc * g.w / (g.l * g.th_sc);
    e.p_sc_inv = v_span * v_span / r_sc;
    return e;
}

double p_sc_bound(const DerivedGeometry &g, const MaterialPair &pair)
{
    return 400.0 * pair.sot.j_sot * pair.sot.j_sot * pair.sot.rho_sot * g.vol_sot;
}

double total_energy(const EnergyReport &report, const ActivityCounts &counts)
{
    if (counts.switch_events < 0.0 || counts.off_switches < 0.0)
        throw InputError("activity counts must be non-negative");
    return counts.switch_events * report.e_sw_unit + counts.off_switches * report.p_sc_inv * report.t_sw;
}

MaterialDb parse_material_db(std::string_view text)
{
    MaterialDb db;
    enum class Section { None, Sc, Sot } section = Section::None;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;

    auto fail = [&](const std::string &msg) -> void {
        throw InputError("material db line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        bool in_quotes = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"')
                in_quotes = !in_quotes;
            else if (line[i] == '#' && !in_quotes) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty())
            continue;
        if (line == "[[superconductor]]") {
            section = Section::Sc;
            db.superconductors.emplace_back();
            continue;
        }
        if (line == "[[sot]]") {
            section = Section::Sot;
            db.sot_stacks.emplace_back();
            continue;
        }
        if (line.front() == '[')
            fail("unknown section " + line);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail("expected key = value");
        if (section == Section::None)
            fail("key outside a [[superconductor]] or [[sot]] record");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));

        auto as_string = [&]() {
            if (value.size() < 2 || value.front() != '"' || value.back() != '"')
                fail("value of \"" + key + "\" must be a quoted string");
            return value.substr(1, value.size() - 2);
        };
        auto as_number = [&]() {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(value, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used != value.size() || !std::isfinite(v) || v <= 0.0)
                fail("value of \"" + key + "\" must be a positive number");
            return v;
        };
        auto as_bool = [&]() {
            if (value != "true" && value != "false")
                fail("value of \"" + key + "\" must be true or false");
            return value == "true";
        };

        if (section == Section::Sc) {
            auto &e = db.superconductors.back();
            if (key == "name")
                e.name = as_string();
            else if (key == "j_c")
                e.j_c = as_number();
            else if (key == "rho_sc")
                e.rho_sc = as_number();
            else if (key == "source")
                e.source = as_string();
            else if (key == "uncertain")
                e.uncertain = as_bool();
            else
                fail("unknown superconductor key \"" + key + "\"");
        } else {
            auto &e = db.sot_stacks.back();
            if (key == "name")
                e.name = as_string();
            else if (key == "j_sot")
                e.j_sot = as_number();
            else if (key == "rho_sot")
                e.rho_sot = as_number();
            else if (key == "source")
                e.source = as_string();
            else if (key == "uncertain")
                e.uncertain = as_bool();
            else
                fail("unknown sot key \"" + key + "\"");
        }
    }

    for (const auto &e : db.superconductors)
        if (e.name.empty() || e.j_c <= 0.0 || e.rho_sc <= 0.0)
            throw InputError("material db: superconductor record needs name, j_c and rho_sc");
    for (const auto &e : db.sot_stacks)
        if (e.name.empty() || e.j_sot <= 0.0 || e.rho_sot <= 0.0)
            throw InputError("material db: sot record needs name, j_sot and rho_sot");
    return db;
}

MaterialDb load_material_db(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open material db " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_material_db(ss.str());
    } catch (const InputError &e) {
        throw InputError(path + ": " + e.what());
    }
}

MaterialDb builtin_db()
{
    MaterialDb db;
    db.superconductors = {
        {"Al", 1.1e10, 1e-7, "this work", false},
        {"Pb", 2e10, 1e-7, "sc_pb", false},
        {"Nb", 4e10, 6e-7, "sc_nb", false},
        {"NbN", 2.5e10, 3e-6, "SOT", false},
    };
    db.sot_stacks = {
        {"Pt/CoFeB", 5e11, 3.4e-7, "sot4", false},
        {"[Pt/Co]x/CoFeB", 3.7e11, 3e-7, "sot-ptco", false},
        {"Bi3Sb2/CoPt", 1.5e10, 6.7e-6, "sot-bisb", false},
        {"PtHf/CoFeB", 7.5e10, 8e-7, "SOT", false},
        {"Ta/CoFeB", 4e12, 1.3e-7, "sot2 (rho_sot estimated)", true},
    };
    return db;
}

const SuperconductorEntry &find_superconductor(const MaterialDb &db, std::string_view name)
{
    for (const auto &e : db.superconductors)
        if (e.name == name)
            return e;
    throw InputError("unknown superconductor \"" + std::string(name) + "\"");
}

const SotStackEntry &find_sot(const MaterialDb &db, std::string_view name)
{
    for (const auto &e : db.sot_stacks)
        if (e.name == name)
            return e;
    throw InputError("unknown SOT stack \"" + std::string(name) + "\"");
}

std::vector<RankRow> rank_materials(const MaterialDb &db)
{
    if (db.superconductors.empty() || db.sot_stacks.empty())
        throw InputError("material db needs at least one superconductor and one SOT stack");
    std::vector<RankRow> rows;
    for (const auto &sc : db.superconductors)
        for (const auto &sot : db.sot_stacks) {
            RankRow r;
            r.pair = {sot, sc};
            r.ratios = min_ratios(r.pair);
            r.k = r.ratios.min_w_over_l;
            r.feasible = feasibility(r.pair).pass;
            rows.push_back(std::move(r));
        }
    std::sort(rows.begin(), rows.end(), [](const RankRow &a, const RankRow &b) {
        if (a.k != b.k)
            return a.k < b.k;
        return a.pair.label() < b.pair.label();
    });
    return rows;
}

std::string rank_csv(const std::vector<RankRow> &rows)
{
    std::ostringstream os;
    os << std::setprecision(6);
    os << "sot,superconductor,k_supermag,min_w_over_l,min_thsc_over_thsot,j_sot_rho_sot,j_c_rho_sc,feasible,uncertain\n";
    for (const auto &r : rows) {
        os << '"' << r.pair.sot.name << "\",\"" << r.pair.sc.name << "\"," << r.k << ',' << r.ratios.min_w_over_l
           << ',' << r.ratios.min_thsc_over_thsot << ',' << r.pair.sot.j_sot * r.pair.sot.rho_sot << ','
           << r.pair.sc.j_c * r.pair.sc.rho_sc << ',' << (r.feasible ? "yes" : "no") << ','
           << (r.pair.sot.uncertain || r.pair.sc.uncertain ? "yes" : "no") << '\n';
    }
    return os.str();
}

ScaledMaterials apply_kopt(const MaterialPair &pair, double t_sw, double k_opt)
{
    if (!std::isfinite(k_opt) || k_opt < 1.0)
        throw InputError("k_opt must be >= 1");
    ScaledMaterials s{pair, t_sw / k_opt};
    s.pair.sc.j_c *= k_opt;
    s.pair.sc.rho_sc *= k_opt;
    s.pair.sot.j_sot /= k_opt;
    s.pair.sot.rho_sot /= k_opt;
    return s;
}

Preset preset(std::string_view name)
{
    const MaterialDb db = builtin_db();
    Preset p;
    p.name = std::string(name);
    p.pair.sot = find_sot(db, "Bi3Sb2/CoPt");
    p.pair.sc = find_superconductor(db, "NbN");
    if (name == "table_s4") {
        p.pair.sc.rho_sc = 3.6e-6;
        p.pair.sc.source = "SOT (rho_sc as used for the derived design point)";
        p.t_sw = 0.19e-9;
    } else if (name == "note_s4") {
        p.t_sw = 2e-9;
    } else {
        throw InputError("unknown preset \"" + std::string(name) + "\" (table_s4, note_s4)");
    }
    return p;
}

std::vector<std::string> preset_names() { return {"table_s4", "note_s4"}; }

Technology derive_technology(const MaterialPair &pair, const GeometryParams &geo, double t_sw, double k_opt,
                             std::string preset_name)
{
    require_positive(t_sw, "t_sw");
    Technology t;
    t.preset = std::move(preset_name);
    t.k_opt = k_opt;
    t.base_pair = pair;
    t.base_t_sw = t_sw;
    t.geo = geo;
    const DerivedGeometry base = derive_geometry(pair, geo);
    const ScaledMaterials s = apply_kopt(pair, t_sw, k_opt);
    t.pair = s.pair;
    t.t_sw = s.t_sw;
    t.geometry = evaluate_geometry(s.pair, base);
    t.energy = energy_model(t.geometry, s.pair, s.t_sw);
    return t;
}

Technology derive_technology(const Preset &p, double k_opt)
{
    return derive_technology(p.pair, p.geo, p.t_sw, k_opt, p.name);
}

Technology rescale(const Technology &tech, double k_opt)
{
    return derive_technology(tech.base_pair, tech.geo, tech.base_t_sw, k_opt, tech.preset);
}

namespace {

json pair_json(const MaterialPair &p)
{
    return {{"sot", {{"name", p.sot.name}, {"j_sot", p.sot.j_sot}, {"rho_sot", p.sot.rho_sot},
                     {"source", p.sot.source}, {"uncertain", p.sot.uncertain}}},
            {"sc", {{"name", p.sc.name}, {"j_c", p.sc.j_c}, {"rho_sc", p.sc.rho_sc},
                    {"source", p.sc.source}, {"uncertain", p.sc.uncertain}}}};
}

MaterialPair pair_from_json(const json &j)
{
    MaterialPair p;
    const json &sot = j.at("sot");
    const json &sc = j.at("sc");
    p.sot.name = sot.at("name").get<std::string>();
    p.sot.j_sot = sot.at("j_sot").get<double>();
    p.sot.rho_sot = sot.at("rho_sot").get<double>();
    p.sot.source = sot.value("source", "");
    p.sot.uncertain = sot.value("uncertain", false);
    p.sc.name = sc.at("name").get<std::string>();
    p.sc.j_c = sc.at("j_c").get<double>();
    p.sc.rho_sc = sc.at("rho_sc").get<double>();
    p.sc.source = sc.value("source", "");
    p.sc.uncertain = sc.value("uncertain", false);
    return p;
}

} // namespace

std::string to_json(const Technology &t)
{
    const DerivedGeometry &g = t.geometry;
    json j;
    j["preset"] = t.preset;
    j["k_opt"] = t.k_opt;
    j["base"] = {{"pair", pair_json(t.base_pair)}, {"t_sw_s", t.base_t_sw}};
    j["design_rules"] = {{"l_min_m", t.geo.l_min},   {"w_min_m", t.geo.w_min}, {"th_sot_m", t.geo.th_sot},
                         {"th_sc_min_m", t.geo.th_sc_min}, {"f_wl", t.geo.f_wl},  {"f_th", t.geo.f_th},
                         {"sf_area", t.geo.sf_area}, {"fanout", t.geo.fanout}};
    j["materials"] = pair_json(t.pair);
    j["t_sw_s"] = t.t_sw;
    j["geometry"] = {{"k_supermag", g.k_supermag}, {"w_m", g.w},         {"l_m", g.l},
                     {"th_sc_m", g.th_sc},         {"th_sot_m", g.th_sot}, {"v_dd_v", g.v_dd},
                     {"i_c_a", g.i_c},             {"i_sot_a", g.i_sot}, {"r_sc_ohm", g.r_sc},
                     {"r_sot_ohm", g.r_sot},       {"vol_sot_m3", g.vol_sot}, {"switch_area_m2", g.sf_area * g.w * g.l}};
    j["energy"] = {{"e_sw_unit_j", t.energy.e_sw_unit},
                   {"p_sot_fo10_w", t.energy.p_sot_fo10},
                   {"p_sc_inv_w", t.energy.p_sc_inv},
                   {"p_sc_bound_w", p_sc_bound(g, t.pair)}};
    return j.dump(2);
}

Technology technology_from_json(std::string_view text)
{
    try {
        const json j = json::parse(text);
        GeometryParams geo;
        const json &dr = j.at("design_rules");
        geo.l_min = dr.at("l_min_m").get<double>();
        geo.w_min = dr.at("w_min_m").get<double>();
        geo.th_sot = dr.at("th_sot_m").get<double>();
        geo.th_sc_min = dr.at("th_sc_min_m").get<double>();
        geo.f_wl = dr.at("f_wl").get<double>();
        geo.f_th = dr.at("f_th").get<double>();
        geo.sf_area = dr.at("sf_area").get<double>();
        geo.fanout = dr.at("fanout").get<double>();
        const json &base = j.at("base");
        return derive_technology(pair_from_json(base.at("pair")), geo, base.at("t_sw_s").get<double>(),
                                 j.at("k_opt").get<double>(), j.value("preset", ""));
    } catch (const json::exception &e) {
        throw InputError(std::string("technology parameters: ") + e.what());
    }
}

} // namespace supermag::materials
