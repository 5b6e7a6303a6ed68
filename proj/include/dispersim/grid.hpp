#pragma once

#include "dispersim/common.hpp"

namespace dispersim {

// Periodic grid of N nodes on (-L/2, L/2], x_j = -L/2 + (j+1) dx, and the dual
// frequency grid xi_k = 2 pi k~ / L with signed mode k~ in [-N/2, N/2) stored
// in FFT index order (k~ = i for i < N/2, i - N otherwise).
//
// The spectrum holds true trigonometric-polynomial coefficients:
//   u(x_j) = sum_k spectrum[k] e^{i xi_k x_j},
//   spectrum[k] = (1/N) sum_j u(x_j) e^{-i xi_k x_j}.
// With this convention a cubic convolution of spectra is exactly the spectrum
// of the pointwise cubic, and Parseval reads (1/N) sum|values|^2 = sum|spec|^2,
// i.e. ||u||_{L2}^2 = dx sum|values|^2 = L sum|spectrum|^2.
struct Grid {
  int n = 0;
  double length = 0.0;
  double dx = 0.0;
  double dxi = 0.0;
  rvec x;              // nodes, ascending
  rvec xi;             // frequency per spectral index (FFT order)
  std::vector<int> kmode;  // signed mode number per spectral index
  std::vector<char> dealias_keep;  // 1 where |k~| <= N/4 (top half zeroed)
  cvec fwd_phase;      // e^{-i xi_k x_0} / N
  cvec bwd_phase;      // e^{+i xi_k x_0}

  static Grid make(int n, double length);
};

void to_spectrum(const Grid& g, const cvec& values, cvec& spectrum);
void to_values(const Grid& g, const cvec& spectrum, cvec& values);

double l2_norm_values(const Grid& g, const cvec& values);      // sqrt(dx sum|.|^2)
double l2_norm_spectrum(const Grid& g, const cvec& spectrum);  // sqrt(L sum|.|^2)
double sup_norm(const cvec& values);

// Fraction of L2 mass in the outer 10% of the domain (5% per end).
double boundary_mass_fraction(const Grid& g, const cvec& values);

// Spectral index of the mode nearest to frequency xi (error if off-grid by
// more than half a mode spacing times `snap_tol_modes`).
int mode_index(const Grid& g, double xi, double snap_tol_modes = 0.5);

}  // namespace dispersim
