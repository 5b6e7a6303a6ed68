#include "dispersim/vector_field.hpp"

#include <algorithm>
#include <cmath>

namespace dispersim {

namespace {

void check_confined(const State& s, double tol) {
    if (tol > 0.0 && s.boundary_mass > tol)
        fail("state is not confined: boundary mass fraction " +
             std::to_string(s.boundary_mass) + " exceeds tolerance " + std::to_string(tol));
}

// inf a2 and sup |a3| over [lo, hi], sampled uniformly plus the grid
// frequencies falling inside the band
struct BandCurvature {
    double r = 0.0;  // inf a2
    double m = 0.0;  // sup |a3| / inf a2
};
BandCurvature band_curvature(const Grid& g, const DispersionSymbol& sym, double lo, double hi) {
    require(lo < hi, "frequency band is empty");
    double inf_a2 = std::numeric_limits<double>::infinity();
    double sup_a3 = 0.0;
    auto visit = [&](double xi) {
        inf_a2 = std::min(inf_a2, sym.a2(xi));
        sup_a3 = std::max(sup_a3, std::abs(sym.a3(xi)));
    };
    const int samples = 2001;
    for (int i = 0; i < samples; ++i) visit(lo + (hi - lo) * i / (samples - 1));
    for (int k = 0; k < g.n; ++k)
        if (g.xi[k] >= lo && g.xi[k] <= hi) visit(g.xi[k]);
    require(inf_a2 > 0.0, "dispersion is not convex on the requested band");
    return {inf_a2, sup_a3 / inf_a2};
}

double weighted_spectrum_norm(const Grid& g, const cvec& spec, double s) {
    double acc = 0.0;
    for (int k = 0; k < g.n; ++k) acc += std::pow(jbracket(g.xi[k]), 2.0 * s) * std::norm(spec[k]);
    return std::sqrt(g.length * acc);
}

}  // namespace

cvec apply_L(const Grid& g, const DispersionSymbol& sym, const State& s,
             double confinement_tol) {
    require(static_cast<int>(s.values.size()) == g.n, "state size does not match the grid");
    check_confined(s, confinement_tol);
    cvec out(g.n);
    if (s.t == 0.0) {
        for (int j = 0; j < g.n; ++j) out[j] = g.x[j] * s.values[j];
        return out;
    }
    cvec spec = s.spectrum;
    for (int k = 0; k < g.n; ++k)
        if (spec[k] != 0.0) spec[k] *= sym.a1(g.xi[k]);
    cvec transport;
    to_values(g, spec, transport);
    for (int j = 0; j < g.n; ++j) out[j] = g.x[j] * s.values[j] - s.t * transport[j];
    return out;
}

FrameDerivative apply_Ltilde(const Grid& g, const DispersionSymbol& sym, const State& s) {
    require(static_cast<int>(s.values.size()) == g.n, "state size does not match the grid");
    require(s.t > 0.0, "the moving-frame derivative needs a positive time");
    double lo = sym.v_min, hi = sym.v_max;
    if (sym.v_bounded()) {
        const double margin = 1e-3 * (hi - lo);
        lo += margin;
        hi -= margin;
    }

    cvec spec = s.spectrum;
    for (int k = 0; k < g.n; ++k) spec[k] *= kI * g.xi[k];
    cvec deriv;
    to_values(g, spec, deriv);

    FrameDerivative out;
    out.values.assign(g.n, 0.0);
    out.mask.assign(g.n, 0);
    double total = 0.0, inside = 0.0;
    for (int j = 0; j < g.n; ++j) {
        total += std::norm(s.values[j]);
        const double v = g.x[j] / s.t;
        if (!(v > lo && v < hi)) continue;
        const double dphi = invert_group_velocity(sym, v);
        out.values[j] = s.t * (deriv[j] - kI * dphi * s.values[j]);
        out.mask[j] = 1;
        ++out.valid;
        inside += std::norm(s.values[j]);
    }
    require(out.valid > 0, "no grid nodes have velocity inside the admissible range");
    if (total > 0.0)
        require(inside > 1e-8 * total,
                "state mass lies outside the velocity cone; the moving-frame "
                "derivative does not see it");
    return out;
}

XNorms x_norm(const Grid& g, const DispersionSymbol& sym, const State& s,
              const ExponentChoice& exps, double confinement_tol) {
    XNorms out;
    out.h_s0 = weighted_spectrum_norm(g, s.spectrum, exps.s0);
    const cvec lu = apply_L(g, sym, s, confinement_tol);
    cvec lspec;
    to_spectrum(g, lu, lspec);
    out.lh_s1 = weighted_spectrum_norm(g, lspec, exps.s1);
    out.x = std::hypot(out.h_s0, out.lh_s1);
    return out;
}

KSReport klainerman_sobolev_check(const Grid& g, const DispersionSymbol& sym,
                                  const State& s, double band_lo, double band_hi,
                                  double localization_tol, double confinement_tol) {
    require(s.t > 0.0, "the decay inequality needs a positive time");
    const BandCurvature bc = band_curvature(g, sym, band_lo, band_hi);

    double total = 0.0, outside = 0.0;
    for (int k = 0; k < g.n; ++k) {
        const double m = std::norm(s.spectrum[k]);
        total += m;
        if (g.xi[k] < band_lo || g.xi[k] > band_hi) outside += m;
    }
    if (total > 0.0)
        require(outside <= localization_tol * total,
                "state is not frequency-localized to the band");

    KSReport rep;
    rep.t = s.t;
    rep.R = bc.r;
    rep.M = bc.m;
    const double u_l2 = l2_norm_values(g, s.values);
    const double lu_l2 = l2_norm_values(g, apply_L(g, sym, s, confinement_tol));
    const double peak = sup_norm(s.values);
    rep.lhs = peak * peak;
    rep.rhs = (u_l2 * lu_l2 + rep.M * u_l2 * u_l2) / (s.t * rep.R);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

TailReport elliptic_tail_check(const Grid& g, const DispersionSymbol& sym,
                               const State& s, double xi0,
                               double localization_tol, double confinement_tol) {
    require(s.t > 0.0, "the tail bound needs a positive time");

    double total = 0.0, above = 0.0, peak = 0.0;
    for (int k = 0; k < g.n; ++k) {
        const double m = std::norm(s.spectrum[k]);
        total += m;
        if (g.xi[k] >= xi0) above += m;
        peak = std::max(peak, std::abs(s.spectrum[k]));
    }
    if (total > 0.0)
        require(above <= localization_tol * total,
                "state has spectral mass at or above the cutoff frequency");

    TailReport rep;
    rep.x0 = s.t * sym.a1(xi0);
    if (peak == 0.0) return rep;

    // curvature over the occupied band below the cutoff
    double occ_lo = xi0;
    for (int k = 0; k < g.n; ++k)
        if (std::abs(s.spectrum[k]) > 1e-8 * peak) occ_lo = std::min(occ_lo, g.xi[k]);
    const BandCurvature bc = band_curvature(g, sym, occ_lo, xi0);
    rep.R = bc.r;
    rep.M = bc.m;

    const double u_l2 = l2_norm_values(g, s.values);
    const double lu_l2 = l2_norm_values(g, apply_L(g, sym, s, confinement_tol));
    const double denom = (lu_l2 + rep.M * u_l2) * (lu_l2 + rep.M * u_l2);
    const double start = rep.x0 + std::sqrt(rep.R * s.t);
    for (int j = 0; j < g.n; ++j) {
        if (g.x[j] <= start) continue;
        ++rep.sampled;
        if (denom > 0.0) {
            const double r =
                std::norm(s.values[j]) * (g.x[j] - rep.x0) * rep.R * s.t / denom;
            rep.worst_ratio = std::max(rep.worst_ratio, r);
        }
    }
    return rep;
}

}  // namespace dispersim
