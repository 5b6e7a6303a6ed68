#pragma once

#include "dispersim/common.hpp"
#include "dispersim/dispersion.hpp"
#include "dispersim/fit.hpp"

#include <vector>

namespace dispersim {

// Fundamental-solution check along rays x = vt: the band-limited kernel
//   K(t, vt) = (1/2pi) Integral w(xi) e^{i t (v xi - a(xi))} dxi
// is quadratured directly and compared with the leading stationary-phase
// value (2 pi t a''(xi_v))^{-1/2} e^{it phi(v)} e^{-i pi/4} on the window's
// plateau. Rays outside the velocity range have no stationary point in the
// band and decay rapidly; they are reported against the in-cone scale.
struct KernelPoint {
    double t = 0.0;
    double v = 0.0;
    bool in_cone = false;
    cplx direct;        // quadrature value
    cplx predicted;     // leading-order formula, 0 outside the cone
    double rel_error = 0.0;
};

struct KernelReport {
    double band_lo = 0.0, band_hi = 0.0;        // window support
    double plateau_lo = 0.0, plateau_hi = 0.0;  // where the window is exactly 1
    std::vector<KernelPoint> points;            // t-major, v-minor order
    rvec t;        // the distinct requested times, in order
    rvec max_rel;  // per time: worst in-cone relative error
    FitReport decay;  // ln(max_rel) vs ln(t) when >= 5 times; else quantity ""
};

// Requires positive times and a nonempty v list. Each quadrature is refined
// by doubling until two resolutions agree; failure to converge within the
// refinement cap is an error.
KernelReport stationary_phase_compare(const DispersionSymbol& sym, const rvec& t_list,
                                      const rvec& v_list);

}  // namespace dispersim
