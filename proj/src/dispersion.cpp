#include "dispersim/dispersion.hpp"

#include "dispersim/interp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace dispersim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DispersionSymbol preset_nls() {
    DispersionSymbol s;
    s.name = "nls";
    s.sigma = 0.0;
    s.a = [](double xi) { return 0.5 * xi * xi; };
    s.a1 = [](double xi) { return xi; };
    s.a2 = [](double) { return 1.0; };
    s.a3 = [](double) { return 0.0; };
    s.inverse_seed = [](double v) { return v; };
    return s;
}

DispersionSymbol preset_klein_gordon() {
    DispersionSymbol s;
    s.name = "klein_gordon";
    s.sigma = -3.0;
    s.a = [](double xi) { return jbracket(xi); };
    s.a1 = [](double xi) { return xi / jbracket(xi); };
    s.a2 = [](double xi) { return std::pow(jbracket(xi), -3.0); };
    s.a3 = [](double xi) { return -3.0 * xi * std::pow(jbracket(xi), -5.0); };
    s.v_min = -1.0;
    s.v_max = 1.0;
    s.inverse_seed = [](double v) { return v / std::sqrt(1.0 - v * v); };
    return s;
}

DispersionSymbol preset_sqg_like() {
    DispersionSymbol s;
    s.name = "sqg_like";
    s.sigma = -1.0;
    s.a = [](double xi) { return xi * std::asinh(xi) - jbracket(xi) + 1.0; };
    s.a1 = [](double xi) { return std::asinh(xi); };
    s.a2 = [](double xi) { return 1.0 / jbracket(xi); };
    s.a3 = [](double xi) { return -xi * std::pow(jbracket(xi), -3.0); };
    s.inverse_seed = [](double v) { return std::sinh(v); };
    return s;
}

DispersionSymbol preset_kdv_like() {
    DispersionSymbol s;
    s.name = "kdv_like";
    s.sigma = 1.0;
    s.a = [](double xi) {
        const double w = jbracket(xi);
        return (w * w * w - 1.0) / 3.0;
    };
    s.a1 = [](double xi) { return xi * jbracket(xi); };
    s.a2 = [](double xi) { return (1.0 + 2.0 * xi * xi) / jbracket(xi); };
    s.a3 = [](double xi) {
        return xi * (3.0 + 2.0 * xi * xi) * std::pow(jbracket(xi), -3.0);
    };
    s.inverse_seed = [](double v) {
        const double r = std::sqrt(std::max(0.0, -1.0 + std::sqrt(1.0 + 4.0 * v * v)) / 2.0);
        return v >= 0.0 ? r : -r;
    };
    return s;
}

DispersionSymbol preset_gravity_like() {
    DispersionSymbol s;
    s.name = "gravity_like";
    s.sigma = -1.5;
    s.a = [](double xi) {
        const double p = 1.0 + xi * xi;
        return std::sqrt(p) - std::pow(p, 0.25);
    };
    s.a1 = [](double xi) {
        const double p = 1.0 + xi * xi;
        return xi * std::pow(p, -0.5) - 0.5 * xi * std::pow(p, -0.75);
    };
    s.a2 = [](double xi) {
        const double p = 1.0 + xi * xi;
        return std::pow(p, -1.5) + 0.25 * (xi * xi - 2.0) * std::pow(p, -1.75);
    };
    s.a3 = [](double xi) {
        const double p = 1.0 + xi * xi;
        return -3.0 * xi * std::pow(p, -2.5) + 0.5 * xi * std::pow(p, -1.75) +
               (1.75 * xi - 0.875 * xi * xi * xi) * std::pow(p, -2.75);
    };
    s.v_min = -1.0;
    s.v_max = 1.0;
    return s;
}

// distance-to-boundary guard; phase curvature degenerates at the endpoints
void check_velocity(const DispersionSymbol& sym, double v) {
    require(std::isfinite(v), "velocity must be finite");
    if (!sym.v_bounded()) return;
    const double margin = 1e-3 * (sym.v_max - sym.v_min);
    require(v - sym.v_min > margin && sym.v_max - v > margin,
            sym.name + ": velocity " + std::to_string(v) +
                " outside the admissible range (" + std::to_string(sym.v_min) + ", " +
                std::to_string(sym.v_max) + ") with margin " + std::to_string(margin));
}

}  // namespace

DispersionSymbol make_preset(const std::string& name) {
    if (name == "nls") return preset_nls();
    if (name == "klein_gordon") return preset_klein_gordon();
    if (name == "sqg_like") return preset_sqg_like();
    if (name == "kdv_like") return preset_kdv_like();
    if (name == "gravity_like") return preset_gravity_like();
    fail("unknown dispersion preset '" + name +
         "' (expected nls, klein_gordon, sqg_like, kdv_like, gravity_like)");
}

DispersionSymbol make_tabulated(const std::string& name, const rvec& xi, const rvec& a,
                                const rvec& a1, const rvec& a2, double sigma) {
    const size_t n = xi.size();
    require(n >= 8, "tabulated symbol needs at least 8 samples");
    require(a.size() == n && a1.size() == n && a2.size() == n,
            "tabulated symbol columns must have equal length");
    for (size_t i = 0; i < n; ++i) {
        require(std::isfinite(xi[i]) && std::isfinite(a[i]) && std::isfinite(a1[i]) &&
                    std::isfinite(a2[i]),
                "tabulated symbol samples must be finite");
        require(a2[i] > 0.0, "tabulated symbol must be convex: a2 > 0 at every sample");
        if (i > 0) {
            require(xi[i] > xi[i - 1], "tabulated frequencies must be strictly increasing");
            require(a1[i] > a1[i - 1], "tabulated a1 must be strictly increasing");
        }
    }

    auto sa = std::make_shared<CubicSpline>(xi, a);
    auto sa1 = std::make_shared<CubicSpline>(xi, a1);
    auto sa2 = std::make_shared<CubicSpline>(xi, a2);

    // cross-column sanity: the value spline's slope must track the a1 column
    double a1_scale = 1.0;
    for (double t : a1) a1_scale = std::max(a1_scale, std::abs(t));
    for (size_t i = 1; i + 1 < n; ++i)
        require(std::abs(sa->derivative(xi[i]) - a1[i]) <= 0.05 * a1_scale,
                "tabulated a1 column is inconsistent with the a column");

    DispersionSymbol s;
    s.name = name;
    s.sigma = sigma;
    s.a = [sa](double t) { return sa->value(t); };
    s.a1 = [sa1](double t) { return sa1->value(t); };
    s.a2 = [sa2](double t) { return sa2->value(t); };
    s.a3 = [sa2](double t) { return sa2->derivative(t); };
    s.xi_min = xi.front();
    s.xi_max = xi.back();
    s.v_min = a1.front();
    s.v_max = a1.back();
    return s;
}

DispersionSymbol load_tabulated(const std::string& path, double sigma) {
    std::ifstream in(path);
    require(in.good(), "cannot open tabulated symbol file: " + path);
    rvec xi, a, a1, a2;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        for (auto& c : line)
            if (c == ',' || c == ';') c = ' ';
        std::istringstream row(line);
        double c0, c1, c2, c3;
        if (!(row >> c0 >> c1 >> c2 >> c3)) {
            if (xi.empty()) continue;  // header line
            fail("malformed row in tabulated symbol file: " + line);
        }
        xi.push_back(c0);
        a.push_back(c1);
        a1.push_back(c2);
        a2.push_back(c3);
    }
    std::string stem = path;
    const auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    return make_tabulated("tabulated:" + stem, xi, a, a1, a2, sigma);
}

double invert_group_velocity(const DispersionSymbol& sym, double v) {
    check_velocity(sym, v);
    const double tol = 1e-12 * std::max(1.0, std::abs(v));

    // bracket the root of f(xi) = a1(xi) - v
    double lo, hi;
    if (std::isfinite(sym.xi_min)) {
        lo = sym.xi_min;
        hi = sym.xi_max;
    } else {
        double g = sym.inverse_seed ? sym.inverse_seed(v) : 0.0;
        if (!std::isfinite(g)) g = 0.0;
        double step = std::max(1.0, 1e-3 * std::abs(g));
        lo = g;
        hi = g;
        for (int k = 0; k < 200 && sym.a1(lo) > v; ++k) {
            lo -= step;
            step *= 2.0;
        }
        step = std::max(1.0, 1e-3 * std::abs(g));
        for (int k = 0; k < 200 && sym.a1(hi) < v; ++k) {
            hi += step;
            step *= 2.0;
        }
        require(sym.a1(lo) <= v && sym.a1(hi) >= v,
                sym.name + ": failed to bracket the group-velocity inversion");
    }

    double x = sym.inverse_seed ? std::clamp(sym.inverse_seed(v), lo, hi) : 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = sym.a1(x) - v;
        if (std::abs(f) <= tol) return x;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double d = sym.a2(x);
        double next = (d > 0.0) ? x - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) next = 0.5 * (lo + hi);  // no representable progress
        x = next;
    }
    fail(sym.name + ": group-velocity inversion did not converge at v=" + std::to_string(v) +
         " (symbol ill-conditioned near the range boundary)");
}

PhasePoint legendre_phase(const DispersionSymbol& sym, double v) {
    const double xi_v = invert_group_velocity(sym, v);
    PhasePoint p;
    p.phi = v * xi_v - sym.a(xi_v);
    p.dphi = xi_v;
    const double curv = sym.a2(xi_v);
    require(curv > 0.0, sym.name + ": nonconvex point in phase evaluation");
    p.d2phi = 1.0 / curv;
    // self-check: a(dphi) = v*dphi - phi must hold identically
    const double res = sym.a(p.dphi) - (v * p.dphi - p.phi);
    require(std::abs(res) <= 1e-10 * std::max(1.0, std::abs(sym.a(xi_v))),
            sym.name + ": phase/stationary-frequency consistency check failed");
    return p;
}

ExponentChoice choose_exponents(double sigma, double delta) {
    require(delta > 0.0 && delta <= 0.25, "delta must lie in (0, 0.25]");
    ExponentChoice e;
    e.delta = delta;
    if (sigma < -3.0) {
        e.s0 = -sigma - 2.0;
        e.s1 = -sigma - 1.0;
    } else if (sigma < -2.0) {
        e.s0 = 1.0 + delta;
        e.s1 = -sigma - 1.0;
    } else if (sigma < -1.0) {
        e.s0 = -sigma - 1.0 + delta;
        e.s1 = 1.0;
    } else if (sigma <= 1.0) {
        e.s0 = -0.5 * (sigma + 1.0) + delta;
        e.s1 = -0.5 * (sigma - 1.0);
    } else {
        e.s0 = -1.0;
        e.s1 = 0.0;
    }
    require(e.s0 + e.s1 >= -sigma - 1e-12, "exponent choice violates s0 + s1 >= -sigma");
    require(e.s1 <= e.s0 + 1.0 + 1e-12, "exponent choice violates s1 <= s0 + 1");
    return e;
}

}  // namespace dispersim
