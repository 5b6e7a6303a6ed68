#include "dispersim/config.hpp"

#include "doctest.h"

#include <string>

using namespace dispersim;
using doctest::Contains;

TEST_CASE("config text parses keys, comments, and blank lines") {
    const std::string text =
        "# scenario\n"
        "config_version = 1\n"
        "\n"
        "symbol = klein_gordon\n"
        "  data_eps =  0.25  \n"
        "seed = 42\n";
    const ConfigMap cfg = parse_config_text(text);
    CHECK(cfg.size() == 4);
    CHECK(cfg.at("symbol").value == "klein_gordon");
    CHECK(cfg.at("symbol").line == 4);
    CHECK(cfg.at("data_eps").value == "0.25");

    const Scenario s = scenario_from_config(cfg);
    CHECK(s.symbol == "klein_gordon");
    CHECK(s.data_eps == 0.25);
    CHECK(s.seed == 42);
    CHECK(s.grid_n == 2048);  // defaults survive
    CHECK(s.diag_norms);
}

TEST_CASE("config rejects malformed lines with line numbers") {
    CHECK_THROWS_WITH_AS((void)parse_config_text("config_version = 1\nbogus line\n"),
                         Contains("line 2"), DispersimError);
    CHECK_THROWS_WITH_AS((void)parse_config_text("Symbol = nls\n"),
                         Contains("invalid key"), DispersimError);
    CHECK_THROWS_WITH_AS((void)parse_config_text("symbol =\n"),
                         Contains("missing value"), DispersimError);
    CHECK_THROWS_WITH_AS(
        (void)parse_config_text("seed = 1\nseed = 2\n"),
        Contains("duplicate key 'seed' (first set on line 1)"), DispersimError);
}

TEST_CASE("scenario validation names unknown keys and bad values") {
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text("config_version = 1\ngrid_m = 4\n"),
        Contains("unknown config key(s): 'grid_m' (line 2)"), DispersimError);
    CHECK_THROWS_WITH_AS((void)parse_scenario_text("symbol = nls\n"),
                         Contains("missing 'config_version'"), DispersimError);
    CHECK_THROWS_WITH_AS((void)parse_scenario_text("config_version = 2\n"),
                         Contains("unsupported config_version"), DispersimError);
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text("config_version = 1\ngrid_n = 1000\n"),
        Contains("power of two"), DispersimError);
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text("config_version = 1\ndata_eps = tiny\n"),
        Contains("expected a number for 'data_eps'"), DispersimError);
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text("config_version = 1\ndiag_norms = maybe\n"),
        Contains("expected on/off"), DispersimError);
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text("config_version = 1\nseed = -3\n"),
        Contains("non-negative integer"), DispersimError);
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text("config_version = 1\nsymbol = airy\n"),
        Contains("airy"), DispersimError);
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text("config_version = 1\nt_start = 5\nt_final = 2\n"),
        Contains("t_final"), DispersimError);
    CHECK_THROWS_WITH_AS(
        (void)parse_scenario_text("config_version = 1\ndata_normalize = sup\n"),
        Contains("data_normalize"), DispersimError);
}

TEST_CASE("scenario serialization round trips exactly") {
    Scenario s;
    s.symbol = "kdv_like";
    s.cubic_kind = "windowed";
    s.cubic_q0 = -0.7;
    s.cubic_xi_cut = 3.25;
    s.data_kind = "band_limited";
    s.data_eps = 0.1;  // not exactly representable; %.17g must round trip
    s.data_band_lo = -1.5;
    s.data_band_hi = 1.5;
    s.data_normalize = "l2";
    s.grid_n = 8192;
    s.grid_l = 2600.0;
    s.t_start = 1.0;
    s.t_final = 1000.0;
    s.dt = 0.05;
    s.snapshot_ratio = 1.25;
    s.diag_packets = true;
    s.diag_residuals = true;
    s.profile_v_lo = -0.45;
    s.profile_v_hi = 0.45;
    s.profile_v_count = 19;
    s.profile_drift_tol = 0.03;
    s.exponents = "explicit";
    s.exponent_s0 = 1.1;
    s.exponent_s1 = 2.2;
    s.outdir = "runs/modelcase";
    s.seed = 123456789012345ull;

    const std::string text = serialize_scenario(s);
    const Scenario back = parse_scenario_text(text);
    CHECK(back.symbol == s.symbol);
    CHECK(back.cubic_kind == s.cubic_kind);
    CHECK(back.cubic_q0 == s.cubic_q0);
    CHECK(back.cubic_xi_cut == s.cubic_xi_cut);
    CHECK(back.data_kind == s.data_kind);
    CHECK(back.data_eps == s.data_eps);
    CHECK(back.data_width == s.data_width);
    CHECK(back.data_x0 == s.data_x0);
    CHECK(back.data_xi0 == s.data_xi0);
    CHECK(back.data_band_lo == s.data_band_lo);
    CHECK(back.data_band_hi == s.data_band_hi);
    CHECK(back.data_normalize == s.data_normalize);
    CHECK(back.grid_n == s.grid_n);
    CHECK(back.grid_l == s.grid_l);
    CHECK(back.t_start == s.t_start);
    CHECK(back.t_final == s.t_final);
    CHECK(back.dt == s.dt);
    CHECK(back.snapshot_ratio == s.snapshot_ratio);
    CHECK(back.diag_norms == s.diag_norms);
    CHECK(back.diag_packets == s.diag_packets);
    CHECK(back.diag_residuals == s.diag_residuals);
    CHECK(back.diag_waveop == s.diag_waveop);
    CHECK(back.profile_v_lo == s.profile_v_lo);
    CHECK(back.profile_v_hi == s.profile_v_hi);
    CHECK(back.profile_v_count == s.profile_v_count);
    CHECK(back.profile_h_rel == s.profile_h_rel);
    CHECK(back.profile_t_min == s.profile_t_min);
    CHECK(back.profile_drift_tol == s.profile_drift_tol);
    CHECK(back.exponents == s.exponents);
    CHECK(back.exponent_s0 == s.exponent_s0);
    CHECK(back.exponent_s1 == s.exponent_s1);
    CHECK(back.exponent_delta == s.exponent_delta);
    CHECK(back.outdir == s.outdir);
    CHECK(back.seed == s.seed);
    // serialize -> parse -> serialize is byte identical
    CHECK(serialize_scenario(back) == text);
}

TEST_CASE("exponent choice honors the auto rule and explicit overrides") {
    const auto kg = make_preset("klein_gordon");
    Scenario s;
    s.symbol = "klein_gordon";
    s.exponent_delta = 0.1;
    const ExponentChoice autoc = scenario_exponents(s, kg);
    const ExponentChoice rule = choose_exponents(kg.sigma, 0.1);
    CHECK(autoc.s0 == rule.s0);
    CHECK(autoc.s1 == rule.s1);

    s.exponents = "explicit";
    s.exponent_s0 = 3.0;
    s.exponent_s1 = 4.5;
    const ExponentChoice ex = scenario_exponents(s, kg);
    CHECK(ex.s0 == 3.0);
    CHECK(ex.s1 == 4.5);
}
