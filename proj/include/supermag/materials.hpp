#pragma once

// Material figures of merit, switch geometry derivation and the
// dissipation model of a SuperMag switch. SI units throughout (A/m^2,
// ohm*m, m, V, A, ohm, J, W, s).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace supermag::materials {

struct SuperconductorEntry {
    std::string name;
    double j_c = 0.0;    ///< critical current density [A/m^2]
    double rho_sc = 0.0; ///< normal-state resistivity [ohm*m]
    std::string source;
    bool uncertain = false;
};

struct SotStackEntry {
    std::string name;
    double j_sot = 0.0;   ///< switching current density [A/m^2]
    double rho_sot = 0.0; ///< SOT layer resistivity [ohm*m]
    std::string source;
    bool uncertain = false;
};

struct MaterialPair {
    SotStackEntry sot;
    SuperconductorEntry sc;

    std::string label() const { return sot.name + "/" + sc.name; }
    void validate() const;
};

struct GeometryParams {
    double l_min = 30e-9;
    double w_min = 30e-9;
    double th_sot = 10e-9;
    double th_sc_min = 5e-9;
    double f_wl = 10.0;    ///< margin on w/l >> k
    double f_th = 10.0;    ///< margin on th_sc/th_sot >> k*J_sot/J_c
    double sf_area = 4.0;  ///< footprint factor, A_switch = sf_area*w*l
    double fanout = 10.0;  ///< switches one output drives; sets V_dd

    void validate() const;
};

struct DerivedGeometry {
    double w = 0.0, l = 0.0, th_sc = 0.0, th_sot = 0.0;
    double k_supermag = 0.0;
    double v_dd = 0.0;
    double i_c = 0.0, i_sot = 0.0;
    double r_sc = 0.0, r_sot = 0.0;
    double vol_sot = 0.0;
    double sf_area = 4.0;
    double fanout = 10.0;
};

struct EnergyReport {
    double e_sw_unit = 0.0;  ///< J per switching event
    double p_sot_fo10 = 0.0; ///< W, V_dd * I_sot through a full fan-out chain
    double p_sc_inv = 0.0;   ///< W, leakage through the off switch of an inverter
    double t_sw = 0.0;       ///< s
};

/// (J_sot*rho_sot)/(J_c*rho_sc).
double k_supermag(const MaterialPair &pair);

struct MinRatios {
    double min_w_over_l = 0.0;
    double min_thsc_over_thsot = 0.0;
};

MinRatios min_ratios(const MaterialPair &pair);

struct Feasibility {
    bool pass = false;
    double k = 0.0;
    double limit = 10.0;
    double margin = 0.0; ///< limit / k; > 1 when passing
};

/// Passes iff k < limit (strict).
Feasibility feasibility(const MaterialPair &pair, double limit = 10.0);

/// Smallest geometry meeting both strong inequalities with margins, then
/// its electrical values. Throws InfeasibleError if I_c < I_sot.
DerivedGeometry derive_geometry(const MaterialPair &pair, const GeometryParams &geo);

/// Electrical values of fixed dimensions (w, l, th_sc, th_sot) with `pair`.
DerivedGeometry evaluate_geometry(const MaterialPair &pair, const DerivedGeometry &dims);

/// J_sot^2 * rho_sot * Vol_sot * t_sw.
double unit_switching_energy(const SotStackEntry &sot, double vol_sot, double t_sw);

EnergyReport energy_model(const DerivedGeometry &geom, const MaterialPair &pair, double t_sw);

/// Loose upper bound 400 * J_sot^2 * rho_sot * Vol_sot on P_sc,inv.
double p_sc_bound(const DerivedGeometry &geom, const MaterialPair &pair);

struct ActivityCounts {
    double switch_events = 0.0;
    double off_switches = 0.0;
};

/// Energy per cycle under a clocked supply: events*E_sw + off*P_sc*t_sw.
double total_energy(const EnergyReport &report, const ActivityCounts &counts);

struct MaterialDb {
    std::vector<SuperconductorEntry> superconductors;
    std::vector<SotStackEntry> sot_stacks;
};

/// Parses the key/value database format (see data/materials.txt).
MaterialDb parse_material_db(std::string_view text);
MaterialDb load_material_db(const std::string &path);
/// The superconductor and SOT/FM stack tables shipped with the library.
MaterialDb builtin_db();

const SuperconductorEntry &find_superconductor(const MaterialDb &db, std::string_view name);
const SotStackEntry &find_sot(const MaterialDb &db, std::string_view name);

struct RankRow {
    MaterialPair pair;
    double k = 0.0;
    MinRatios ratios;
    bool feasible = false;
};

/// Every SC x SOT pair, ascending k (ties by label).
std::vector<RankRow> rank_materials(const MaterialDb &db);
std::string rank_csv(const std::vector<RankRow> &rows);

struct ScaledMaterials {
    MaterialPair pair;
    double t_sw = 0.0;
};

/// J_c, rho_sc multiplied and J_sot, rho_sot, t_sw divided by k_opt >= 1.
ScaledMaterials apply_kopt(const MaterialPair &pair, double t_sw, double k_opt);

struct Preset {
    std::string name;
    MaterialPair pair;
    GeometryParams geo;
    double t_sw = 0.0;
};

/// "table_s4": NbN (rho_sc 3.6e-6) + Bi3Sb2/CoPt, t_sw 0.19 ns.
/// "note_s4":  NbN (rho_sc 3e-6, database value) + Bi3Sb2/CoPt, t_sw 2 ns.
Preset preset(std::string_view name);
std::vector<std::string> preset_names();

/// A derived technology point. Geometry is always derived from the
/// unscaled pair; k_opt then rescales materials at fixed dimensions.
struct Technology {
    std::string preset;
    double k_opt = 1.0;
    MaterialPair base_pair;
    double base_t_sw = 0.0;
    GeometryParams geo;
    MaterialPair pair;
    double t_sw = 0.0;
    DerivedGeometry geometry;
    EnergyReport energy;
};

Technology derive_technology(const MaterialPair &pair, const GeometryParams &geo, double t_sw,
                             double k_opt = 1.0, std::string preset_name = {});
Technology derive_technology(const Preset &p, double k_opt = 1.0);
/// Same base point, different k_opt.
Technology rescale(const Technology &tech, double k_opt);

std::string to_json(const Technology &tech);
Technology technology_from_json(std::string_view text);

} // namespace supermag::materials
