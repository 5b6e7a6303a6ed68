#pragma once

#include "dispersim/config.hpp"
#include "dispersim/cubic.hpp"
#include "dispersim/dispersion.hpp"
#include "dispersim/fit.hpp"
#include "dispersim/grid.hpp"
#include "dispersim/scattering.hpp"
#include "dispersim/solver.hpp"
#include "dispersim/wave_packet.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace dispersim {

// Everything a run needs, resolved from a validated Scenario: the grid, the
// dispersion symbol, the interaction symbol, the norm exponents, the initial
// state (stamped at t_start), and the profile-sampling velocity grid with the
// diagonal interaction coefficient q(xi_v, xi_v, xi_v) per node.
struct ScenarioSetup {
    Grid grid;
    DispersionSymbol sym;
    CubicSymbol cubic;
    ExponentChoice exponents;
    State initial;
    rvec v_nodes;
    rvec coeff;
    std::vector<char> coeff_valid;  // 0 where v falls outside the velocity range
    bool waveop = false;  // initial state produced by the backward wave operator
    cvec w_target;        // the profile the round trip must recover
};
ScenarioSetup prepare_scenario(const Scenario& cfg);

// One named pass/fail gate evaluated by a run (mass drift, norm growth,
// amplitude flatness, ...).  `gated` distinguishes hard gates from recorded
// informational measurements.
struct CheckOutcome {
    std::string name;
    bool gated = true;
    bool passed = true;
    nlohmann::json details;
};

struct ScenarioResult {
    std::string outdir;
    bool passed = true;
    EvolveResult evolution;
    ProfileRecord record;  // populated when diag_packets is on
    rvec recon_t, recon_sup, recon_l2;
    std::vector<FitReport> fits;
    std::vector<CheckOutcome> checks;
    nlohmann::json summary;
};

// Runs the configured evolution with all enabled diagnostics, writes the
// artifact files (config.txt, norms.csv, profile.csv, recon.csv,
// residual_sup.csv, scattering.csv/json, waveop.csv, state_*.csv,
// summary.json) under cfg.outdir, and evaluates the built-in gates.  Fully
// deterministic for a given config: a rerun reproduces the artifacts byte for
// byte.
ScenarioResult run_scenario(const Scenario& cfg);

// Re-reads the artifacts of a previous run, recomputes every fit and gate
// from them, and rewrites summary.json.
ScenarioResult refit_artifacts(const std::string& outdir);

// -- artifact I/O helpers (shared by the CLI and the acceptance harness) --

// Numeric CSV with a header line; cells must parse as doubles ("nan" allowed).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<rvec> columns;

    int rows() const { return columns.empty() ? 0 : static_cast<int>(columns[0].size()); }
    const rvec& col(const std::string& name) const;
    bool has(const std::string& name) const;
};
CsvTable load_csv(const std::string& path);
void save_csv(const std::string& path, const std::vector<std::string>& header,
              const std::vector<rvec>& columns);

void save_profile_record(const std::string& path, const ProfileRecord& rec);
ProfileRecord load_profile_record(const std::string& path);

nlohmann::json load_json(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& j);

// Build identity baked in at compile time (git describe).
std::string build_identity();

}  // namespace dispersim
