#pragma once

#include "dispersim/common.hpp"
#include "dispersim/cubic.hpp"
#include "dispersim/dispersion.hpp"
#include "dispersim/solver.hpp"
#include "dispersim/wave_packet.hpp"

#include <vector>

namespace dispersim {

// Asymptotic profile dynamics. Along the cubic flow the extracted profile
// obeys, per velocity node,
//     i d/dt gamma = s_dir * t^{-1} * coeff * gamma |gamma|^2 + f(t,v),
// with coeff = mu(xi_v) the calibrated diagonal coefficient (real under the
// real-on-diagonal hypothesis) and f a lower-order residual. The exact ODE
// preserves |gamma| and drifts the phase logarithmically; s_dir in {+1,-1}
// is resolved empirically from the data because published sign conventions
// for this phase differ between sources.
struct AsymptoticState {
    double t = 1.0;
    rvec v;      // velocity grid
    cvec gamma;  // profile samples
    rvec coeff;  // mu(xi_v) per node
};

// Closed-form update gamma *= exp(-i s_dir coeff |gamma|^2 ln(t_target/t)).
// Moduli are preserved to round-off. Requires t, t_target >= 1.
AsymptoticState integrate_asymptotic(const AsymptoticState& a, double t_target,
                                     int s_dir = +1);

// Residual f(t,v) of the asymptotic equation on a recorded profile history.
// d/dt gamma is estimated by a quadratic least-squares fit in s = ln t over
// up to five neighbouring snapshots (three at run edges), per velocity node,
// using the longest contiguous valid tail. Entries without three consecutive
// valid samples are masked.
struct AsymptoticResidual {
    rvec t;                                // snapshot times (all record rows)
    rvec v;                                // velocity grid
    std::vector<cvec> f;                   // per row: residual per node
    std::vector<std::vector<char>> valid;  // per row/node: derivative defined
    rvec slope;                            // per node: ln|f| vs ln t fit
    std::vector<char> slope_valid;         // >= 3 positive samples available
    rvec sup_f;                            // per row: max_v |f| over valid
};
AsymptoticResidual asymptotic_residual(const ProfileRecord& record, const rvec& coeff,
                                       int s_dir = +1);

// Scattering profile: the logarithmic phase is unwound so W is t-independent
// up to the residual drift, reported per node.
struct ScatteringProfile {
    rvec v;
    rvec xi;                  // carrier frequency xi_v per node
    cvec W;
    rvec coeff;               // mu(xi_v) per node
    std::vector<char> valid;  // node had a usable late-time sample
    int sign = +1;            // resolved s_dir
    bool sign_consistent = true;  // every informative node prefers `sign`
    double t_extracted = 0.0;     // latest sample time used
    rvec drift;  // per node: |W(t_n) - W(t_{n-1})| / |W(t_n)| over the tail
};

struct ExtractOptions {
    double t_min = 100.0;    // earliest admissible extraction time
    double drift_tol = 0.02; // relative drift allowed per doubling of t
    int sign_override = 0;   // 0 = resolve from data, else forced +1/-1
};

// W = gamma(T,v) exp(+i s_dir coeff |gamma|^2 ln T) at the last valid T per
// node. Throws if no samples reach t_min or if informative nodes still drift
// faster than drift_tol per doubling.
ScatteringProfile extract_W(const DispersionSymbol& sym, const ProfileRecord& record,
                            const rvec& coeff, const ExtractOptions& opts = {});

// u(t,x) = t^{-1/2} W(v) exp(-i s_dir coeff |W|^2 ln t) e^{it phi(v)} at
// v = x/t, linearly interpolated on the profile's grid, zero outside the
// velocity range and outside the profile's coverage. Requires t >= 1.
cvec asymptotic_solution(const Grid& g, const DispersionSymbol& sym,
                         const ScatteringProfile& W, double t);

// Modified wave operator: place asymptotic_solution(W, t_start) on the grid
// and evolve backward to t = 1. Throws if the backward run inflates the
// L2 norm more than tenfold (start time too small or data too large).
State modified_wave_operator(const Grid& g, const DispersionSymbol& sym,
                             const CubicSymbol& q, const ScatteringProfile& W,
                             double t_start, const EvolveControls& controls = {});

}  // namespace dispersim
