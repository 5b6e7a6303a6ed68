#include "dispersim/stationary_phase.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dispersim {

namespace {

// C^inf smoothstep: 0 for y <= 0, 1 for y >= 1, strictly monotone between
double smoothstep(double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / y);
    const double b = std::exp(-1.0 / (1.0 - y));
    return a / (a + b);
}

struct BandTable {
    rvec xi, a, w;  // nodes, symbol samples, window samples
    double dxi = 0.0;
};

constexpr int kMaxNodes = 1 << 22;

}  // namespace

KernelReport stationary_phase_compare(const DispersionSymbol& sym, const rvec& t_list,
                                      const rvec& v_list) {
    require(!t_list.empty() && !v_list.empty(), "kernel check needs times and rays");
    for (double t : t_list) require(t > 0.0, "kernel check times must be positive");

    // cone test with the same margin the frequency inversion uses
    double vlo = sym.v_min, vhi = sym.v_max;
    if (sym.v_bounded()) {
        const double m = 1e-3 * (vhi - vlo);
        vlo += m;
        vhi -= m;
    }
    auto in_cone = [&](double v) { return v > vlo && v < vhi; };

    // plateau covering every requested carrier frequency, ramps beyond
    double xi_min_req = 0.0, xi_max_req = 0.0;
    bool have = false;
    for (double v : v_list) {
        if (!in_cone(v)) continue;
        const double xi = invert_group_velocity(sym, v);
        xi_min_req = have ? std::min(xi_min_req, xi) : xi;
        xi_max_req = have ? std::max(xi_max_req, xi) : xi;
        have = true;
    }
    if (!have) {
        const bool finite =
            std::isfinite(sym.xi_min) && std::isfinite(sym.xi_max);
        const double mid = finite ? 0.5 * (sym.xi_min + sym.xi_max) : 0.0;
        xi_min_req = mid;
        xi_max_req = mid;
    }
    const double pad = std::max(1.0, 0.25 * (xi_max_req - xi_min_req));
    KernelReport rep;
    rep.plateau_lo = xi_min_req - pad;
    rep.plateau_hi = xi_max_req + pad;
    rep.band_lo = std::max(rep.plateau_lo - pad, sym.xi_min);
    rep.band_hi = std::min(rep.plateau_hi + pad, sym.xi_max);
    require(rep.band_lo < rep.plateau_lo && rep.plateau_hi < rep.band_hi,
            "frequency band cannot fit the window ramps inside the symbol's domain");
    const double width = rep.band_hi - rep.band_lo;
    const double ramp_lo = rep.plateau_lo - rep.band_lo;
    const double ramp_hi = rep.band_hi - rep.plateau_hi;

    std::map<int, BandTable> tables;
    auto table = [&](int n) -> const BandTable& {
        auto it = tables.find(n);
        if (it != tables.end()) return it->second;
        BandTable tb;
        tb.dxi = width / n;
        tb.xi.resize(n + 1);
        tb.a.resize(n + 1);
        tb.w.resize(n + 1);
        for (int j = 0; j <= n; ++j) {
            const double xi = rep.band_lo + j * tb.dxi;
            tb.xi[j] = xi;
            tb.a[j] = sym.a(xi);
            tb.w[j] = smoothstep((xi - rep.band_lo) / ramp_lo) *
                      smoothstep((rep.band_hi - xi) / ramp_hi);
        }
        return tables.emplace(n, std::move(tb)).first->second;
    };

    auto quadrature = [&](int n, double t, double v) -> cplx {
        const BandTable& tb = table(n);
        cplx acc = 0.0;
        for (int j = 1; j < n; ++j) {  // window vanishes at the endpoints
            if (tb.w[j] == 0.0) continue;
            acc += tb.w[j] * std::exp(kI * (t * (v * tb.xi[j] - tb.a[j])));
        }
        return acc * tb.dxi / (2.0 * kPi);
    };

    // worst phase speed across the band sets the starting resolution
    auto start_nodes = [&](double t, double v) {
        double m = 0.0;
        for (double xi : {rep.band_lo, rep.band_hi, xi_min_req, xi_max_req})
            m = std::max(m, std::abs(v - sym.a1(xi)));
        const double osc = t * m * width / (2.0 * kPi);
        int n = 4096;
        while (n < 16.0 * osc && n < kMaxNodes) n *= 2;
        return n;
    };

    for (double t : t_list) {
        rep.t.push_back(t);
        double worst = 0.0;
        std::vector<KernelPoint> batch;
        double scale = 0.0;
        for (double v : v_list) {
            KernelPoint pt;
            pt.t = t;
            pt.v = v;
            pt.in_cone = in_cone(v);
            int n = start_nodes(t, v);
            require(n < kMaxNodes,
                    "band-limited quadrature cannot resolve the phase; reduce t");
            cplx prev = quadrature(n / 2, t, v);
            cplx cur = quadrature(n, t, v);
            const double floor = 1e-10 / std::sqrt(2.0 * kPi * t);
            while (std::abs(cur - prev) > 1e-8 * std::abs(cur) + floor) {
                n *= 2;
                require(n <= kMaxNodes,
                        "band-limited quadrature did not converge under refinement");
                prev = cur;
                cur = quadrature(n, t, v);
            }
            pt.direct = cur;
            if (pt.in_cone) {
                const double xi = invert_group_velocity(sym, v);
                require(xi > rep.plateau_lo && xi < rep.plateau_hi,
                        "carrier frequency fell outside the window plateau");
                const PhasePoint ph = legendre_phase(sym, v);  // d2phi = 1/a''
                pt.predicted = std::exp(kI * (t * ph.phi - kPi / 4.0)) /
                               std::sqrt(2.0 * kPi * t / ph.d2phi);
                pt.rel_error = std::abs(pt.direct - pt.predicted) / std::abs(pt.predicted);
                scale = std::max(scale, std::abs(pt.predicted));
                worst = std::max(worst, pt.rel_error);
            }
            batch.push_back(pt);
        }
        for (KernelPoint& pt : batch) {
            if (!pt.in_cone) pt.rel_error = std::abs(pt.direct) / (scale > 0.0 ? scale : 1.0);
            rep.points.push_back(pt);
        }
        rep.max_rel.push_back(worst);
    }

    if (rep.t.size() >= 5) {
        bool positive = true;
        for (double r : rep.max_rel) positive = positive && r > 0.0;
        const auto [lo, hi] = std::minmax_element(rep.t.begin(), rep.t.end());
        if (positive)
            rep.decay = fit_exponent("kernel_rel_error", rep.t, rep.max_rel, *lo, *hi);
    }
    return rep;
}

}  // namespace dispersim
