#pragma once

#include "dispersim/dispersion.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace dispersim {

// One parsed `key = value` line; the line number feeds validation messages.
struct ConfigEntry {
    std::string value;
    int line = 0;
};
using ConfigMap = std::map<std::string, ConfigEntry>;

// Parses the key=value text format: one `key = value` per line, `#` comments,
// blank lines ignored.  Duplicate keys and malformed lines are errors that
// name the offending line.
ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config(const std::string& path);

// A batch-run description.  Every field maps to one config key of the same
// name; `scenario_from_config` validates types, ranges, and key spelling
// (unknown keys are errors), and `serialize_scenario` writes the canonical
// form that parses back to an identical Scenario.
struct Scenario {
    int config_version = 1;

    std::string symbol = "nls";  // preset name

    std::string cubic_kind = "constant";  // constant | windowed
    double cubic_q0 = 1.0;
    double cubic_xi_cut = 4.0;  // windowed: coefficient support half-width

    // Initial data (for `waveop` runs this describes the target profile W(v)
    // instead of u(t0)); data_eps is the size under data_normalize.
    std::string data_kind = "gaussian";  // gaussian | band_limited | none
    double data_eps = 0.1;
    double data_width = 1.0;    // envelope width
    double data_x0 = 0.0;       // envelope center
    double data_xi0 = 0.0;      // gaussian: carrier frequency
    double data_band_lo = -1.0;  // band_limited: frequency support
    double data_band_hi = 1.0;
    std::string data_normalize = "profile";  // xnorm | l2 | profile

    long grid_n = 2048;
    double grid_l = 400.0;

    double t_start = 1.0;
    double t_final = 100.0;
    double dt = 1e-2;
    double snapshot_ratio = 1.15;

    bool diag_norms = true;
    bool diag_packets = false;
    bool diag_residuals = false;
    bool diag_waveop = false;

    // Profile sampling used by the packet/residual diagnostics.
    double profile_v_lo = -0.8;
    double profile_v_hi = 0.8;
    long profile_v_count = 33;
    double profile_h_rel = 0.25;
    double profile_t_min = 100.0;     // scattering extraction window start
    double profile_drift_tol = 0.02;  // allowed extraction drift per doubling

    std::string exponents = "auto";  // auto | explicit
    double exponent_s0 = 0.0;        // explicit only
    double exponent_s1 = 0.0;
    double exponent_delta = 0.1;  // margin used by the auto rule

    std::string outdir = "out";
    std::uint64_t seed = 0;
};

Scenario scenario_from_config(const ConfigMap& cfg);
Scenario parse_scenario_text(const std::string& text);
std::string serialize_scenario(const Scenario& s);

// Resolves the (s0, s1) norm exponents: the auto rule derives them from the
// symbol's growth tag and the configured margin.
ExponentChoice scenario_exponents(const Scenario& s, const DispersionSymbol& sym);

}  // namespace dispersim
