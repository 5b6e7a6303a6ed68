#pragma once

#include "dispersim/common.hpp"
#include "dispersim/dispersion.hpp"
#include "dispersim/grid.hpp"
#include "dispersim/solver.hpp"

#include <string>
#include <vector>

namespace dispersim {

struct DataParams {
    double epsilon = 0.1;  // target size under the chosen normalization
    double x0 = 0.0;       // envelope center (gaussian)
    double xi0 = 0.0;      // carrier frequency (gaussian)
    double width = 1.0;    // envelope width
    double band_lo = 1.0, band_hi = 2.0;  // support of the frequency bump kind
    std::string normalize = "xnorm";      // xnorm | l2 | profile
    double delta = 0.1;                   // exponent-table parameter for xnorm
    std::vector<double> velocities;       // packet_superposition carriers
    std::vector<double> centers;          // per-packet centers (defaults to 0)
};

struct InitialData {
    State state;  // t = 0
    double l2 = 0.0;
    // sqrt(||<D>^s0 u||^2 + ||<D>^s1 (x u)||^2) with the exponent-table pair
    double x_norm = 0.0;
    // sup over modes of |uhat(xi)| L / sqrt(2 pi) / sqrt(a2(xi)): the height a
    // dispersive profile of this size reaches relative to t^{-1/2}
    double profile_amp = 0.0;
    ExponentChoice exponents;
};

// kind in {gaussian, frequency_localized_bump, packet_superposition}; the
// state is scaled so the metric named by params.normalize equals epsilon.
InitialData make_data(const std::string& kind, const DataParams& params, const Grid& g,
                      const DispersionSymbol& sym);

}  // namespace dispersim
