#pragma once

#include "dispersim/common.hpp"

#include <string>

namespace dispersim {

// Power-law fit ln(value) ~ intercept + slope * ln(t) over a declared time
// window, by least squares. The points kept inside the window are recorded
// with the window endpoints so reports are reproducible.
struct FitReport {
    std::string quantity;
    rvec t;      // points inside the window, in input order
    rvec value;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;  // 1 when the residual is zero (including constant data)
};

// Requires >= 5 in-window points, strictly positive values, t_lo < t_hi.
FitReport fit_exponent(const std::string& quantity, const rvec& t, const rvec& value,
                       double t_lo, double t_hi);

// Plain least squares y ~ intercept + slope * x (n >= 2, non-constant x).
struct FitLine {
    double intercept = 0.0;
    double slope = 0.0;
};
FitLine fit_line(const rvec& x, const rvec& y);

// Derivative at s0 of the quadratic least-squares fit through (s_i, y_i).
// Exact for polynomials of degree <= 2; needs >= 3 distinct abscissae.
cplx quadratic_ls_derivative(const rvec& s, const cvec& y, double s0);

}  // namespace dispersim
