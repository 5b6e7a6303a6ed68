#pragma once

#include "dispersim/common.hpp"
#include "dispersim/cubic.hpp"
#include "dispersim/dispersion.hpp"
#include "dispersim/grid.hpp"
#include "dispersim/partition.hpp"

namespace dispersim {

// Ratio c = [a1(xi1) - a1(xi2) + a1(xi3) - a1(xi4)] / [a(xi1) - a(xi2) + a(xi3) - a(xi4)]
// with xi4 = xi1 - xi2 + xi3, evaluated through second-order divided differences
// so the double zero at {xi1,xi3} = {xi4,xi2} is removable; on the full diagonal
// the value is a3(xi)/a2(xi). Total function, continuous, even under xi1<->xi3.
double normal_form_c(const DispersionSymbol& sym, double xi1, double xi2, double xi3);

// t * C(u, conj u, u) where C carries the symbol c * q restricted to balanced
// frequency quadruples (magnitude levels within 4 of each other). Dense symbols
// use the exact per-quadruple path (N <= 256); constant/separable symbols use
// block fields with c frozen at block centers (O(mu_ratio) relative error,
// documented), the core block subdivided to keep that error uniform.
cvec apply_correction(const Grid& g, const DispersionSymbol& sym, const CubicSymbol& q,
                      const cvec& uhat, double t, const DyadicPartition& part);

}  // namespace dispersim
