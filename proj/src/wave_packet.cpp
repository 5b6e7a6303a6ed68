#include "dispersim/wave_packet.hpp"

#include "dispersim/vector_field.hpp"

#include <algorithm>
#include <cmath>

namespace dispersim {

namespace {

double bump_mass() {
    // trapezoid is superalgebraically accurate here: all derivatives vanish
    // at the endpoints
    static const double i0 = [] {
        const int n = 1 << 14;
        const double h = 2.0 / n;
        double s = 0.0;
        for (int i = 1; i < n; ++i) {
            const double y = -1.0 + i * h;
            s += std::exp(-1.0 / (1.0 - y * y));
        }
        return s * h;
    }();
    return i0;
}

constexpr double kGaussRadius = 8.0;

// admissible open velocity interval, shrunk by the inversion margin
void velocity_window(const DispersionSymbol& sym, double& lo, double& hi) {
    lo = sym.v_min;
    hi = sym.v_max;
    if (sym.v_bounded()) {
        const double margin = 1e-3 * (hi - lo);
        lo += margin;
        hi -= margin;
    }
}

bool velocity_admissible(const DispersionSymbol& sym, double v) {
    double lo, hi;
    velocity_window(sym, lo, hi);
    return v > lo && v < hi;
}

// dispersive-time domain rule: frequencies with strongly decaying curvature
// only carry a meaningful profile after t >= (xi^2 a2(xi))^{-1}
bool profile_time_valid(const DispersionSymbol& sym, double t, double xi_v) {
    if (sym.sigma >= -2.0) return true;
    return t * xi_v * xi_v * sym.a2(xi_v) >= 1.0;
}

struct PacketFrame {
    double xi_v, phi_v, a2_v, scale, radius, vlo, vhi;
};
PacketFrame packet_frame(const DispersionSymbol& sym, double t, double v,
                         EnvelopeKind kind) {
    require(t >= 1.0, "wave packets are defined for t >= 1");
    require(velocity_admissible(sym, v), "velocity is outside the admissible range");
    PacketFrame f;
    const PhasePoint pp = legendre_phase(sym, v);
    f.xi_v = pp.dphi;
    f.phi_v = pp.phi;
    f.a2_v = 1.0 / pp.d2phi;
    f.scale = std::sqrt(t * f.a2_v);
    f.radius = envelope_radius(kind);
    velocity_window(sym, f.vlo, f.vhi);
    return f;
}

// amp * chi_fn(y) e^{it phi(x/t)} over the envelope support, zero where x/t
// leaves the admissible range
template <class Chi>
cvec modulated_envelope(const Grid& g, const DispersionSymbol& sym, const PacketFrame& f,
                        double t, double v, double amp, Chi&& chi_fn) {
    cvec out(g.n, 0.0);
    const double x_lo = v * t - f.radius * f.scale;
    const double x_hi = v * t + f.radius * f.scale;
    for (int j = 0; j < g.n; ++j) {
        if (g.x[j] <= x_lo || g.x[j] >= x_hi) continue;
        const double vn = g.x[j] / t;
        if (!(vn > f.vlo && vn < f.vhi)) continue;
        const double y = (g.x[j] - v * t) / f.scale;
        out[j] = amp * chi_fn(y) * std::exp(kI * t * legendre_phase(sym, vn).phi);
    }
    return out;
}

void check_support_fits(const Grid& g, double t, double v, const PacketFrame& f) {
    const double reach = std::abs(v) * t + f.radius * f.scale;
    require(reach <= 0.45 * g.length,
            "packet support escapes the confinement window; enlarge the domain");
}

cplx quadrature_inner(const Grid& g, const cvec& u, const cvec& w) {
    cplx acc = 0.0;
    for (int j = 0; j < g.n; ++j) acc += u[j] * std::conj(w[j]);
    return acc * g.dx;
}

}  // namespace

EnvelopeKind envelope_from_string(const std::string& name) {
    if (name == "bump") return EnvelopeKind::bump;
    if (name == "gaussian") return EnvelopeKind::gaussian;
    fail("unknown envelope kind: " + name);
}

double envelope_radius(EnvelopeKind kind) {
    return kind == EnvelopeKind::bump ? 1.0 : kGaussRadius;
}

double envelope_chi(EnvelopeKind kind, double y) {
    if (kind == EnvelopeKind::bump) {
        if (std::abs(y) >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - y * y)) / bump_mass();
    }
    if (std::abs(y) >= kGaussRadius) return 0.0;
    return std::exp(-0.5 * y * y) / std::sqrt(2.0 * kPi);
}

double envelope_chi_prime(EnvelopeKind kind, double y) {
    if (kind == EnvelopeKind::bump) {
        if (std::abs(y) >= 1.0) return 0.0;
        const double d = 1.0 - y * y;
        return envelope_chi(kind, y) * (-2.0 * y / (d * d));
    }
    return -y * envelope_chi(kind, y);
}

WavePacket build_packet(const Grid& g, const DispersionSymbol& sym, double t, double v,
                        EnvelopeKind kind) {
    const PacketFrame f = packet_frame(sym, t, v, kind);
    check_support_fits(g, t, v, f);
    WavePacket p;
    p.v = v;
    p.t = t;
    p.xi_v = f.xi_v;
    p.phi_v = f.phi_v;
    p.a2_v = f.a2_v;
    p.scale = f.scale;
    p.envelope = kind;
    const double amp = 1.0 / std::sqrt(f.a2_v);
    p.values = modulated_envelope(g, sym, f, t, v, amp,
                                  [kind](double y) { return envelope_chi(kind, y); });
    return p;
}

ProfileRow test_profile(const Grid& g, const DispersionSymbol& sym, const State& s,
                        const rvec& v_grid, EnvelopeKind kind, double confinement_tol) {
    require(static_cast<int>(s.values.size()) == g.n, "state size does not match the grid");
    require(s.t >= 1.0, "profile extraction is defined for t >= 1");
    require(!v_grid.empty(), "empty velocity grid");
    if (confinement_tol > 0.0 && s.boundary_mass > confinement_tol)
        fail("state is not confined; profile quadrature would see wrapped mass");

    ProfileRow row;
    row.t = s.t;
    row.v = v_grid;
    row.gamma.assign(v_grid.size(), 0.0);
    row.valid.assign(v_grid.size(), 0);
    for (size_t i = 0; i < v_grid.size(); ++i) {
        const double v = v_grid[i];
        if (!velocity_admissible(sym, v)) continue;
        const PacketFrame f = packet_frame(sym, s.t, v, kind);
        if (!profile_time_valid(sym, s.t, f.xi_v)) continue;
        check_support_fits(g, s.t, v, f);
        const cvec pk = modulated_envelope(
            g, sym, f, s.t, v, 1.0 / std::sqrt(f.a2_v),
            [kind](double y) { return envelope_chi(kind, y); });
        row.gamma[i] = quadrature_inner(g, s.values, pk);
        row.valid[i] = 1;
    }
    return row;
}

void ProfileRecord::append(const ProfileRow& row) {
    if (v_samples.empty() && t_samples.empty()) v_samples = row.v;
    require(row.v == v_samples, "profile row has a mismatched velocity grid");
    t_samples.push_back(row.t);
    gamma.push_back(row.gamma);
    valid.push_back(row.valid);
}

PacketResidual packet_residual(const Grid& g, const DispersionSymbol& sym, double t,
                               double v, EnvelopeKind kind, double h_rel) {
    require(h_rel > 0.0 && h_rel < 1.0, "relative time step must be in (0,1)");
    const PacketFrame f = packet_frame(sym, t, v, kind);
    check_support_fits(g, t, v, f);

    auto packet_at = [&](double tt) { return build_packet(g, sym, tt, v, kind).values; };
    auto diff = [&](double h) {
        cvec plus = packet_at(t + h), minus = packet_at(t - h);
        for (int j = 0; j < g.n; ++j) plus[j] = (plus[j] - minus[j]) / (2.0 * h);
        return plus;
    };
    const double h = h_rel * t;
    const cvec d1 = diff(h);
    const cvec d2 = diff(0.5 * h);
    cvec dt(g.n);
    double mismatch = 0.0, scale = 0.0;
    for (int j = 0; j < g.n; ++j) {
        dt[j] = (4.0 * d2[j] - d1[j]) / 3.0;  // Richardson-extrapolated derivative
        mismatch += std::norm(d2[j] - d1[j]);
        scale += std::norm(dt[j]);
    }
    require(mismatch <= 0.01 * scale,
            "time step too coarse for the packet derivative; reduce h_rel");

    const WavePacket p = build_packet(g, sym, t, v, kind);
    cvec spec;
    to_spectrum(g, p.values, spec);
    for (int k = 0; k < g.n; ++k) spec[k] *= sym.a(g.xi[k]);
    cvec au;
    to_values(g, spec, au);

    cvec raw(g.n);
    for (int j = 0; j < g.n; ++j) raw[j] = kI * dt[j] - au[j];

    // first-order correction u^I = -i/(2 a2) (chi' + i y chi) e^{it phi}
    const cvec ui = modulated_envelope(
        g, sym, f, t, v, 1.0 / f.a2_v, [kind](double y) -> cplx {
            return -0.5 * kI * (envelope_chi_prime(kind, y) + kI * y * envelope_chi(kind, y));
        });
    const cvec lui = apply_L(g, sym, state_from_values(g, t, ui));

    PacketResidual res;
    res.packet_l2 = l2_norm_values(g, p.values);
    res.raw = l2_norm_values(g, raw);
    const double tfac = std::pow(t, -1.5);
    for (int j = 0; j < g.n; ++j) raw[j] -= tfac * lui[j];
    res.structured = l2_norm_values(g, raw);
    return res;
}

DvRow dv_profile(const Grid& g, const DispersionSymbol& sym, const State& s,
                 const rvec& v_grid, EnvelopeKind kind) {
    require(v_grid.size() >= 3, "velocity grid too small for differences");
    for (size_t i = 1; i < v_grid.size(); ++i)
        require(v_grid[i] > v_grid[i - 1], "velocity grid must be increasing");
    const ProfileRow row = test_profile(g, sym, s, v_grid, kind);

    const int n = static_cast<int>(v_grid.size());
    DvRow out;
    out.t = row.t;
    out.v = v_grid;
    out.dgamma.assign(n, 0.0);
    out.valid.assign(n, 0);
    auto slope = [&](int a, int b) {
        return (row.gamma[b] - row.gamma[a]) / (row.v[b] - row.v[a]);
    };
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
        const int a = std::max(0, i - 1), b = std::min(n - 1, i + 1);
        if (!row.valid[a] || !row.valid[b]) continue;
        out.dgamma[i] = slope(a, b);
        out.valid[i] = 1;
        dmax = std::max(dmax, std::abs(out.dgamma[i]));
    }
    // stencil-doubling consistency: a grid too coarse to represent the
    // derivative it reports disagrees with itself at double spacing
    double worst = 0.0;
    for (int i = 2; i + 2 < n; ++i) {
        if (!out.valid[i] || !row.valid[i - 2] || !row.valid[i + 2]) continue;
        const cplx wide = slope(i - 2, i + 2);
        const double denom = std::max(std::abs(out.dgamma[i]), std::abs(wide));
        if (denom > 1e-3 * dmax)
            worst = std::max(worst, std::abs(wide - out.dgamma[i]) / denom);
    }
    require(worst <= 0.5, "velocity grid too coarse to resolve the profile derivative");
    return out;
}

cplx dv_profile_via_L(const Grid& g, const DispersionSymbol& sym, const State& s,
                      double v, EnvelopeKind kind) {
    const PacketFrame f = packet_frame(sym, s.t, v, kind);
    check_support_fits(g, s.t, v, f);
    const double amp = std::pow(f.a2_v, -1.5);
    const cvec uii = modulated_envelope(
        g, sym, f, s.t, v, 1.0,
        [kind, amp](double y) -> cplx { return kI * amp * envelope_chi(kind, y); });
    const cvec lu = apply_L(g, sym, s, 1e-6);
    return quadrature_inner(g, lu, uii);
}

namespace {

Reconstruction reconstruct_impl(const Grid& g, const DispersionSymbol& sym,
                                const ProfileRow& row, const State* s) {
    require(!row.v.empty() && row.v.size() == row.gamma.size() &&
                row.v.size() == row.valid.size(),
            "malformed profile row");
    require(row.t > 0.0, "reconstruction needs a positive time");
    if (s) {
        require(s->t == row.t, "state and profile row are at different times");
        require(static_cast<int>(s->values.size()) == g.n,
                "state size does not match the grid");
    }
    double vlo, vhi;
    velocity_window(sym, vlo, vhi);

    Reconstruction rec;
    rec.field.assign(g.n, 0.0);
    const double amp = 1.0 / std::sqrt(row.t);
    for (int j = 0; j < g.n; ++j) {
        const double v = g.x[j] / row.t;
        if (!(v > vlo && v < vhi)) continue;
        if (v < row.v.front() || v > row.v.back()) continue;
        const auto it = std::upper_bound(row.v.begin(), row.v.end(), v);
        size_t hi = std::min<size_t>(it - row.v.begin(), row.v.size() - 1);
        const size_t lo = hi == 0 ? 0 : hi - 1;
        if (!row.valid[lo] || !row.valid[hi]) continue;
        cplx gv = row.gamma[lo];
        if (hi != lo) {
            const double w = (v - row.v[lo]) / (row.v[hi] - row.v[lo]);
            gv += w * (row.gamma[hi] - row.gamma[lo]);
        }
        rec.field[j] = amp * gv * std::exp(kI * row.t * legendre_phase(sym, v).phi);
    }
    if (s) {
        rec.residual.resize(g.n);
        for (int j = 0; j < g.n; ++j) rec.residual[j] = s->values[j] - rec.field[j];
        rec.r_l2 = l2_norm_values(g, rec.residual);
        rec.r_sup = sup_norm(rec.residual);
    }
    return rec;
}

}  // namespace

Reconstruction reconstruct(const Grid& g, const DispersionSymbol& sym,
                           const ProfileRow& row) {
    return reconstruct_impl(g, sym, row, nullptr);
}

Reconstruction reconstruct(const Grid& g, const DispersionSymbol& sym,
                           const ProfileRow& row, const State& s) {
    return reconstruct_impl(g, sym, row, &s);
}

}  // namespace dispersim
