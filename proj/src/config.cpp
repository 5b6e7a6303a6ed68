#include "dispersim/config.hpp"

#include "dispersim/common.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dispersim {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    }
    return true;
}

[[noreturn]] void fail_line(int line, const std::string& what) {
    throw DispersimError("config line " + std::to_string(line) + ": " + what);
}

// Typed readers.  Each consumes its key from the pending set so that the
// caller can report whatever is left over as unknown.
struct Reader {
    const ConfigMap& cfg;
    std::set<std::string> pending;

    explicit Reader(const ConfigMap& c) : cfg(c) {
        for (const auto& kv : cfg) pending.insert(kv.first);
    }

    const ConfigEntry* take(const std::string& key) {
        auto it = cfg.find(key);
        if (it == cfg.end()) return nullptr;
        pending.erase(key);
        return &it->second;
    }

    void str(const std::string& key, std::string& out) {
        if (const ConfigEntry* e = take(key)) out = e->value;
    }
    void num(const std::string& key, double& out) {
        if (const ConfigEntry* e = take(key)) {
            const char* s = e->value.c_str();
            char* end = nullptr;
            const double v = std::strtod(s, &end);
            if (end == s || *end != '\0')
                fail_line(e->line, "expected a number for '" + key + "', got '" +
                                       e->value + "'");
            out = v;
        }
    }
    void integer(const std::string& key, long& out) {
        if (const ConfigEntry* e = take(key)) {
            const char* s = e->value.c_str();
            char* end = nullptr;
            const long v = std::strtol(s, &end, 10);
            if (end == s || *end != '\0')
                fail_line(e->line, "expected an integer for '" + key + "', got '" +
                                       e->value + "'");
            out = v;
        }
    }
    void uint64(const std::string& key, std::uint64_t& out) {
        if (const ConfigEntry* e = take(key)) {
            const char* s = e->value.c_str();
            char* end = nullptr;
            const unsigned long long v = std::strtoull(s, &end, 10);
            if (end == s || *end != '\0' || e->value[0] == '-')
                fail_line(e->line, "expected a non-negative integer for '" + key +
                                       "', got '" + e->value + "'");
            out = v;
        }
    }
    void boolean(const std::string& key, bool& out) {
        if (const ConfigEntry* e = take(key)) {
            if (e->value == "on" || e->value == "true" || e->value == "1")
                out = true;
            else if (e->value == "off" || e->value == "false" || e->value == "0")
                out = false;
            else
                fail_line(e->line, "expected on/off for '" + key + "', got '" +
                                       e->value + "'");
        }
    }

    int line_of(const std::string& key) const {
        auto it = cfg.find(key);
        return it == cfg.end() ? 0 : it->second.line;
    }
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            fail_line(line, "expected 'key = value', got '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (!valid_key(key))
            fail_line(line, "invalid key '" + key +
                                "' (lowercase letters, digits, '_' only)");
        if (value.empty()) fail_line(line, "missing value for '" + key + "'");
        auto [it, inserted] = out.emplace(key, ConfigEntry{value, line});
        if (!inserted)
            fail_line(line, "duplicate key '" + key + "' (first set on line " +
                                std::to_string(it->second.line) + ")");
    }
    return out;
}

ConfigMap load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

Scenario scenario_from_config(const ConfigMap& cfg) {
    Reader r(cfg);
    Scenario s;

    long version = -1;
    r.integer("config_version", version);
    require(version != -1, "config is missing 'config_version'");
    if (version != 1)
        fail_line(r.line_of("config_version"),
                  "unsupported config_version " + std::to_string(version) +
                      " (this build reads version 1)");
    s.config_version = static_cast<int>(version);

    r.str("symbol", s.symbol);
    r.str("cubic_kind", s.cubic_kind);
    r.num("cubic_q0", s.cubic_q0);
    r.num("cubic_xi_cut", s.cubic_xi_cut);
    r.str("data_kind", s.data_kind);
    r.num("data_eps", s.data_eps);
    r.num("data_width", s.data_width);
    r.num("data_x0", s.data_x0);
    r.num("data_xi0", s.data_xi0);
    r.num("data_band_lo", s.data_band_lo);
    r.num("data_band_hi", s.data_band_hi);
    r.str("data_normalize", s.data_normalize);
    r.integer("grid_n", s.grid_n);
    r.num("grid_l", s.grid_l);
    r.num("t_start", s.t_start);
    r.num("t_final", s.t_final);
    r.num("dt", s.dt);
    r.num("snapshot_ratio", s.snapshot_ratio);
    r.boolean("diag_norms", s.diag_norms);
    r.boolean("diag_packets", s.diag_packets);
    r.boolean("diag_residuals", s.diag_residuals);
    r.boolean("diag_waveop", s.diag_waveop);
    r.num("profile_v_lo", s.profile_v_lo);
    r.num("profile_v_hi", s.profile_v_hi);
    r.integer("profile_v_count", s.profile_v_count);
    r.num("profile_h_rel", s.profile_h_rel);
    r.num("profile_t_min", s.profile_t_min);
    r.num("profile_drift_tol", s.profile_drift_tol);
    r.str("exponents", s.exponents);
    r.num("exponent_s0", s.exponent_s0);
    r.num("exponent_s1", s.exponent_s1);
    r.num("exponent_delta", s.exponent_delta);
    r.str("outdir", s.outdir);
    r.uint64("seed", s.seed);

    if (!r.pending.empty()) {
        std::string msg = "unknown config key(s):";
        for (const auto& k : r.pending)
            msg += " '" + k + "' (line " + std::to_string(r.line_of(k)) + ")";
        throw DispersimError(msg);
    }

    // Cross-field validation.
    (void)make_preset(s.symbol);  // throws for unknown presets
    require(s.cubic_kind == "constant" || s.cubic_kind == "windowed",
            "cubic_kind must be 'constant' or 'windowed'");
    require(s.cubic_xi_cut > 0.0, "cubic_xi_cut must be positive");
    require(s.data_kind == "gaussian" || s.data_kind == "band_limited" ||
                s.data_kind == "none",
            "data_kind must be 'gaussian', 'band_limited', or 'none'");
    require(s.data_eps >= 0.0, "data_eps must be non-negative");
    require(s.data_width > 0.0, "data_width must be positive");
    require(s.data_band_hi > s.data_band_lo,
            "data_band_hi must exceed data_band_lo");
    require(s.data_normalize == "xnorm" || s.data_normalize == "l2" ||
                s.data_normalize == "profile",
            "data_normalize must be 'xnorm', 'l2', or 'profile'");
    require(s.grid_n >= 16 && (s.grid_n & (s.grid_n - 1)) == 0,
            "grid_n must be a power of two, at least 16");
    require(s.grid_l > 0.0, "grid_l must be positive");
    require(s.t_start > 0.0, "t_start must be positive");
    require(s.t_final > s.t_start, "t_final must exceed t_start");
    require(s.dt > 0.0, "dt must be positive");
    require(s.snapshot_ratio > 1.0, "snapshot_ratio must exceed 1");
    require(s.profile_v_hi > s.profile_v_lo,
            "profile_v_hi must exceed profile_v_lo");
    require(s.profile_v_count >= 2, "profile_v_count must be at least 2");
    require(s.profile_h_rel > 0.0 && s.profile_h_rel <= 0.5,
            "profile_h_rel must lie in (0, 0.5]");
    require(s.profile_t_min >= 1.0, "profile_t_min must be at least 1");
    require(s.profile_drift_tol > 0.0 && s.profile_drift_tol <= 1.0,
            "profile_drift_tol must lie in (0, 1]");
    require(s.exponents == "auto" || s.exponents == "explicit",
            "exponents must be 'auto' or 'explicit'");
    require(s.exponent_delta > 0.0 && s.exponent_delta <= 0.25,
            "exponent_delta must lie in (0, 0.25]");
    require(!s.outdir.empty(), "outdir must not be empty");
    return s;
}

Scenario parse_scenario_text(const std::string& text) {
    return scenario_from_config(parse_config_text(text));
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "config_version = " << s.config_version << "\n";
    out << "symbol = " << s.symbol << "\n";
    out << "cubic_kind = " << s.cubic_kind << "\n";
    out << "cubic_q0 = " << fmt_double(s.cubic_q0) << "\n";
    out << "cubic_xi_cut = " << fmt_double(s.cubic_xi_cut) << "\n";
    out << "data_kind = " << s.data_kind << "\n";
    out << "data_eps = " << fmt_double(s.data_eps) << "\n";
    out << "data_width = " << fmt_double(s.data_width) << "\n";
    out << "data_x0 = " << fmt_double(s.data_x0) << "\n";
    out << "data_xi0 = " << fmt_double(s.data_xi0) << "\n";
    out << "data_band_lo = " << fmt_double(s.data_band_lo) << "\n";
    out << "data_band_hi = " << fmt_double(s.data_band_hi) << "\n";
    out << "data_normalize = " << s.data_normalize << "\n";
    out << "grid_n = " << s.grid_n << "\n";
    out << "grid_l = " << fmt_double(s.grid_l) << "\n";
    out << "t_start = " << fmt_double(s.t_start) << "\n";
    out << "t_final = " << fmt_double(s.t_final) << "\n";
    out << "dt = " << fmt_double(s.dt) << "\n";
    out << "snapshot_ratio = " << fmt_double(s.snapshot_ratio) << "\n";
    out << "diag_norms = " << (s.diag_norms ? "on" : "off") << "\n";
    out << "diag_packets = " << (s.diag_packets ? "on" : "off") << "\n";
    out << "diag_residuals = " << (s.diag_residuals ? "on" : "off") << "\n";
    out << "diag_waveop = " << (s.diag_waveop ? "on" : "off") << "\n";
    out << "profile_v_lo = " << fmt_double(s.profile_v_lo) << "\n";
    out << "profile_v_hi = " << fmt_double(s.profile_v_hi) << "\n";
    out << "profile_v_count = " << s.profile_v_count << "\n";
    out << "profile_h_rel = " << fmt_double(s.profile_h_rel) << "\n";
    out << "profile_t_min = " << fmt_double(s.profile_t_min) << "\n";
    out << "profile_drift_tol = " << fmt_double(s.profile_drift_tol) << "\n";
    out << "exponents = " << s.exponents << "\n";
    out << "exponent_s0 = " << fmt_double(s.exponent_s0) << "\n";
    out << "exponent_s1 = " << fmt_double(s.exponent_s1) << "\n";
    out << "exponent_delta = " << fmt_double(s.exponent_delta) << "\n";
    out << "outdir = " << s.outdir << "\n";
    out << "seed = " << s.seed << "\n";
    return out.str();
}

ExponentChoice scenario_exponents(const Scenario& s, const DispersionSymbol& sym) {
    if (s.exponents == "auto") return choose_exponents(sym.sigma, s.exponent_delta);
    ExponentChoice e;
    e.s0 = s.exponent_s0;
    e.s1 = s.exponent_s1;
    e.delta = s.exponent_delta;
    return e;
}

}  // namespace dispersim
