#pragma once

#include "dispersim/common.hpp"
#include "dispersim/dispersion.hpp"
#include "dispersim/grid.hpp"
#include "dispersim/solver.hpp"

#include <string>
#include <vector>

namespace dispersim {

// Envelope chi: smooth, unit integral. The default is the compactly supported
// bump c*exp(-1/(1-y^2)) on [-1,1]; a Gaussian alternative (radius truncated
// at |y| = 8) is available for smoothness experiments.
enum class EnvelopeKind { bump, gaussian };
EnvelopeKind envelope_from_string(const std::string& name);
double envelope_radius(EnvelopeKind kind);  // support half-width in y
double envelope_chi(EnvelopeKind kind, double y);
double envelope_chi_prime(EnvelopeKind kind, double y);

// Testing packet along the ray x = v t:
//   u_v = a2(xi_v)^{-1/2} chi(y) e^{i t phi(x/t)},  y = (x - v t) / scale,
// with scale = sqrt(t * a2(xi_v)). The normalization makes the profile
// extraction below exact on the modulated ansatz.
struct WavePacket {
    double v = 0.0, t = 0.0;
    double xi_v = 0.0, phi_v = 0.0, a2_v = 0.0;  // cached dispersion data
    double scale = 0.0;
    EnvelopeKind envelope = EnvelopeKind::bump;
    cvec values;
};

// pre: t >= 1, v strictly inside the group-velocity range, envelope support
// inside the confinement window |x| <= 0.45 L. The carrier phase is evaluated
// only at nodes with x/t inside the range; the envelope is forced to zero
// elsewhere.
WavePacket build_packet(const Grid& g, const DispersionSymbol& sym, double t, double v,
                        EnvelopeKind kind = EnvelopeKind::bump);

// gamma(t, v) = <u, u_v> = dx sum u conj(u_v) for each v in the grid.
// Entries are masked invalid when v leaves the admissible range, or -- for
// strongly decaying curvature (sigma < -2) -- before the dispersive time of
// the carrier, t xi_v^2 a2(xi_v) >= 1. Masked entries hold gamma = 0.
struct ProfileRow {
    double t = 0.0;
    rvec v;
    cvec gamma;
    std::vector<char> valid;
};
ProfileRow test_profile(const Grid& g, const DispersionSymbol& sym, const State& s,
                        const rvec& v_grid, EnvelopeKind kind = EnvelopeKind::bump,
                        double confinement_tol = 1e-6);

// time series of rows on a fixed v grid
struct ProfileRecord {
    rvec t_samples;
    rvec v_samples;
    std::vector<cvec> gamma;
    std::vector<std::vector<char>> valid;
    void append(const ProfileRow& row);  // requires a matching v grid
};

// Residual of the packet as an approximate solution:
//   raw        = || (i d/dt - A(D)) u_v ||_{L2}
//   structured = || (i d/dt - A(D)) u_v - t^{-3/2} L u_v^I ||_{L2}
// with the first-order correction u_v^I = -i/(2 a2) (chi'(y) + i y chi(y))
// e^{it phi}. The time derivative uses centered differences with step
// h_rel * t and one Richardson halving; a step too large to resolve the
// carrier is reported as an error.
struct PacketResidual {
    double raw = 0.0;
    double structured = 0.0;
    double packet_l2 = 0.0;
};
PacketResidual packet_residual(const Grid& g, const DispersionSymbol& sym, double t,
                               double v, EnvelopeKind kind = EnvelopeKind::bump,
                               double h_rel = 1e-3);

// d/dv of the profile by centered differences on the v grid (one-sided at the
// ends). Neighboring-stencil disagreement beyond 50% flags the grid as too
// coarse. Cross-validate against dv_profile_via_L on smooth states.
struct DvRow {
    double t = 0.0;
    rvec v;
    cvec dgamma;
    std::vector<char> valid;
};
DvRow dv_profile(const Grid& g, const DispersionSymbol& sym, const State& s,
                 const rvec& v_grid, EnvelopeKind kind = EnvelopeKind::bump);

// <L u, u_v^II> with u_v^II = +i a2(xi_v)^{-3/2} chi(y) e^{it phi}; equals
// d/dv gamma up to the packet remainder.
cplx dv_profile_via_L(const Grid& g, const DispersionSymbol& sym, const State& s,
                      double v, EnvelopeKind kind = EnvelopeKind::bump);

// u_rec = t^{-1/2} gamma(t, x/t) e^{i t phi(x/t)}, zero outside the admissible
// cone and outside the row's v coverage; gamma is interpolated linearly
// between consecutive valid nodes. With a state (same t required) also
// returns the residual r = u - u_rec and its norms.
struct Reconstruction {
    cvec field;
    cvec residual;
    double r_l2 = 0.0;
    double r_sup = 0.0;
};
Reconstruction reconstruct(const Grid& g, const DispersionSymbol& sym,
                           const ProfileRow& row);
Reconstruction reconstruct(const Grid& g, const DispersionSymbol& sym,
                           const ProfileRow& row, const State& s);

}  // namespace dispersim
