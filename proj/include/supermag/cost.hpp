#pragma once

#include "supermag/materials.hpp"
#include "supermag/simulator.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace supermag::cost {

enum class SupplyScheme : std::uint8_t { Level, Clocked };

SupplyScheme scheme_from_string(std::string_view s);
std::string_view to_string(SupplyScheme s);

struct CostInputs {
    std::size_t n_switches = 0;
    std::size_t n_comb = 0;
    std::size_t n_dff = 0;
    std::size_t depth = 0;
    double off_switches = 0.0;
    std::optional<double> events_per_cycle;
    std::size_t ram_cells = 0; ///< nvRAM bit cells (4 switches each)
    double f_clk = 1e9;
    SupplyScheme scheme = SupplyScheme::Level;
    materials::Technology tech;
};

struct CostReport {
    double area = 0.0;        ///< m^2
    double p_static = 0.0;    ///< W
    double p_switching = 0.0; ///< W
    double delay = 0.0;       ///< s
    double pdp = 0.0;         ///< J
};

/// sf_area * w * l * (N_switches + 4 * ram_cells).
double area(const CostInputs &in);
/// off * P_sc,inv, plus (N_comb + 4 N_DFF) * P_sot,fo10 / fanout under the
/// level scheme. RAM arrays add nothing.
double static_power(const CostInputs &in);
/// events/cycle * E_sw,unit * f_clk. Throws InputError without activity.
double switching_power(const CostInputs &in);
/// depth * t_sw.
double delay(const CostInputs &in);
CostReport evaluate(const CostInputs &in);

struct NetlistCostOptions {
    double f_clk = 1e9;
    SupplyScheme scheme = SupplyScheme::Level;
    std::optional<double> activity;          ///< switching events per cycle
    std::optional<std::size_t> off_switches; ///< overrides the pair count
    bool count_sequential_leakage = true;
    std::size_t ram_cells = 0;
};

/// Netlist statistics plus activity. With a stimulus (and no explicit
/// activity) the netlist is simulated and events/cycle is the mean switch
/// state changes per stimulus step.
CostInputs inputs_from_netlist(const netlist::Netlist &nl, const materials::Technology &tech,
                               const NetlistCostOptions &opts, const sim::Stimulus *stimulus = nullptr);

/// Same design at a different k_opt (fixed geometry).
CostInputs rescale(const CostInputs &in, double k_opt);

/// Closed-form PDP at k_opt from the k_opt = 1 terms:
/// (P_sc k^-5 + P_sot k^-3 + P_sw k^-4) * delay k^-1.
double pdp_closed_form(const CostInputs &base, double k_opt);

/// Bisection for the k_opt >= 1 at which PDP equals target_pdp.
/// Throws InfeasibleError when target exceeds PDP(1) or is unreachable.
double solve_kopt_for_pdp(const CostInputs &base, double target_pdp, double tol = 1e-10);

std::string report_json(const CostReport &report, const CostInputs &in);
/// Reconstructs the inputs stored by report_json.
CostInputs inputs_from_report_json(std::string_view text);

struct Metrics {
    std::optional<double> area;
    std::optional<double> power;
    std::optional<double> delay;

    std::optional<double> pdp() const;
};

struct ExternalMetrics {
    std::map<std::string, Metrics> technologies;
};

/// {"technologies": {"CMOS": {"area_m2": .., "power_w": .., "delay_s": ..}}};
/// null/missing values are absent, non-positive values are rejected.
ExternalMetrics parse_externals(std::string_view text);

struct ComparisonRow {
    std::string technology;
    Metrics raw;
    Metrics normalized;
    std::optional<double> k_opt; ///< SuperMag rows
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::map<std::string, double> pdp_match_kopt; ///< external -> k_opt
    std::map<std::string, std::string> pdp_match_error;

    std::string to_csv() const;
};

/// Normalizes each metric column to its maximum over all rows.
Comparison compare(const CostInputs &base, const ExternalMetrics &externals, const std::vector<double> &k_opts);

} // namespace supermag::cost
