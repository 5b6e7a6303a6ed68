#pragma once

#include "dispersim/common.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace dispersim {

// Convex dispersion relation a(xi) with derivatives a1, a2, a3, an admissible
// group-velocity range (v_min, v_max) = a1(R), and a growth tag sigma with
// a2(xi) comparable to <xi>^sigma.
struct DispersionSymbol {
    std::string name;
    double sigma = 0.0;
    std::function<double(double)> a, a1, a2, a3;
    double v_min = -std::numeric_limits<double>::infinity();
    double v_max = std::numeric_limits<double>::infinity();
    // evaluation domain; finite only for tabulated symbols
    double xi_min = -std::numeric_limits<double>::infinity();
    double xi_max = std::numeric_limits<double>::infinity();
    // optional closed-form seed xi(v) for the group-velocity inversion
    std::function<double(double)> inverse_seed;

    bool v_bounded() const { return std::isfinite(v_min) && std::isfinite(v_max); }
};

// Built-in families: nls, klein_gordon, sqg_like, kdv_like, gravity_like.
DispersionSymbol make_preset(const std::string& name);

// Symbol from samples (xi, a, a1, a2) on a strictly increasing grid; derivatives
// are evaluated from natural cubic splines, a3 by differentiating the a2 spline.
DispersionSymbol make_tabulated(const std::string& name, const rvec& xi, const rvec& a,
                                const rvec& a1, const rvec& a2, double sigma);

// CSV loader for make_tabulated: columns xi,a,a1,a2; '#' comments and an
// optional header line allowed.
DispersionSymbol load_tabulated(const std::string& path, double sigma);

// Solves a1(xi_v) = v for v strictly inside the admissible range (for bounded
// ranges, at distance > 1e-3 * |range| from the endpoints).
double invert_group_velocity(const DispersionSymbol& sym, double v);

// Phase of the oscillatory factor along the ray x = v t and its derivatives:
// phi(v) = v xi_v - a(xi_v), dphi = xi_v, d2phi = 1 / a2(xi_v).
struct PhasePoint {
    double phi = 0.0;
    double dphi = 0.0;
    double d2phi = 0.0;
};
PhasePoint legendre_phase(const DispersionSymbol& sym, double v);

// Norm exponents (s0 for the plain Sobolev index, s1 for the weighted one)
// as a function of the growth tag sigma, with margin delta in (0, 0.25].
struct ExponentChoice {
    double s0 = 0.0;
    double s1 = 0.0;
    double delta = 0.0;
};
ExponentChoice choose_exponents(double sigma, double delta);

}  // namespace dispersim
