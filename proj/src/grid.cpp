#include "dispersim/grid.hpp"

#include <cmath>

#include "dispersim/fft.hpp"

namespace dispersim {

Grid Grid::make(int n, double length) {
  require(n >= 4 && (n & (n - 1)) == 0, "grid size must be a power of two >= 4");
  require(length > 0, "grid length must be positive");
  Grid g;
  g.n = n;
  g.length = length;
  g.dx = length / n;
  g.dxi = 2.0 * kPi / length;
  g.x.resize(n);
  g.xi.resize(n);
  g.kmode.resize(n);
  g.dealias_keep.resize(n);
  g.fwd_phase.resize(n);
  g.bwd_phase.resize(n);
  for (int j = 0; j < n; ++j) g.x[j] = -0.5 * length + (j + 1) * g.dx;
  const double x0 = g.x[0];
  for (int i = 0; i < n; ++i) {
    const int k = (i < n / 2) ? i : i - n;
    g.kmode[i] = k;
    g.xi[i] = g.dxi * k;
    g.dealias_keep[i] = (std::abs(k) <= n / 4) ? 1 : 0;
    g.fwd_phase[i] = std::exp(cplx(0.0, -g.xi[i] * x0)) / static_cast<double>(n);
    g.bwd_phase[i] = std::exp(cplx(0.0, g.xi[i] * x0));
  }
  return g;
}

void to_spectrum(const Grid& g, const cvec& values, cvec& spectrum) {
  require(static_cast<int>(values.size()) == g.n, "to_spectrum: size mismatch");
  spectrum = values;
  fft_forward(spectrum);
  for (int i = 0; i < g.n; ++i) spectrum[i] *= g.fwd_phase[i];
}

void to_values(const Grid& g, const cvec& spectrum, cvec& values) {
  require(static_cast<int>(spectrum.size()) == g.n, "to_values: size mismatch");
  values.resize(g.n);
  for (int i = 0; i < g.n; ++i) values[i] = spectrum[i] * g.bwd_phase[i];
  fft_backward(values);
}

double l2_norm_values(const Grid& g, const cvec& values) {
  double s = 0;
  for (const cplx& z : values) s += std::norm(z);
  return std::sqrt(s * g.dx);
}

double l2_norm_spectrum(const Grid& g, const cvec& spectrum) {
  double s = 0;
  for (const cplx& z : spectrum) s += std::norm(z);
  return std::sqrt(s * g.length);
}

double sup_norm(const cvec& values) {
  double m = 0;
  for (const cplx& z : values) m = std::max(m, std::abs(z));
  return m;
}

double boundary_mass_fraction(const Grid& g, const cvec& values) {
  double total = 0, outer = 0;
  const double edge = 0.45 * g.length;
  for (int j = 0; j < g.n; ++j) {
    const double m = std::norm(values[j]);
    total += m;
    if (std::abs(g.x[j]) > edge) outer += m;
  }
  return total > 0 ? outer / total : 0.0;
}

int mode_index(const Grid& g, double xi, double snap_tol_modes) {
  const double kf = xi / g.dxi;
  const int k = static_cast<int>(std::lround(kf));
  require(std::abs(kf - k) <= snap_tol_modes,
          "frequency " + std::to_string(xi) + " is not a grid mode");
  require(k >= -g.n / 2 && k < g.n / 2, "frequency outside resolved range");
  return (k >= 0) ? k : k + g.n;
}

}  // namespace dispersim
