#include <doctest.h>

#include <cmath>
#include <random>

#include "dispersim/grid.hpp"

using namespace dispersim;

namespace {
cvec random_state(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  cvec u(n);
  for (auto& z : u) z = cplx(gauss(rng), gauss(rng));
  return u;
}
}  // namespace

TEST_CASE("grid node layout") {
  Grid g = Grid::make(8, 16.0);
  CHECK(g.dx == doctest::Approx(2.0));
  // x in (-L/2, L/2]: first node one spacing above -L/2, last node exactly L/2.
  CHECK(g.x.front() == doctest::Approx(-6.0));
  CHECK(g.x.back() == doctest::Approx(8.0));
  CHECK(g.xi[1] == doctest::Approx(2.0 * kPi / 16.0));
  CHECK(g.xi[7] == doctest::Approx(-2.0 * kPi / 16.0));
  CHECK(g.kmode[4] == -4);
  // dealias keeps |k| <= N/4 = 2: indices 0,1,2 and -1,-2.
  int kept = 0;
  for (char c : g.dealias_keep) kept += c;
  CHECK(kept == 5);
  CHECK_THROWS(Grid::make(12, 16.0));
  CHECK_THROWS(Grid::make(8, -1.0));
}

TEST_CASE("transform round trip is identity to 1e-13") {
  Grid g = Grid::make(256, 50.0);
  cvec u = random_state(g.n, 7u);
  cvec sp, back;
  to_spectrum(g, u, sp);
  to_values(g, sp, back);
  double err = 0;
  for (int j = 0; j < g.n; ++j) err = std::max(err, std::abs(back[j] - u[j]));
  CHECK(err <= 1e-13 * sup_norm(u) * 10);
}

TEST_CASE("plane wave on a commensurate grid maps to one coefficient") {
  Grid g = Grid::make(128, 32.0);
  const double xi0 = 5 * g.dxi;  // commensurate mode k=5
  cvec u(g.n);
  for (int j = 0; j < g.n; ++j) u[j] = std::exp(cplx(0.0, xi0 * g.x[j]));
  cvec sp;
  to_spectrum(g, u, sp);
  const int k = mode_index(g, xi0);
  CHECK(std::abs(sp[k] - 1.0) <= 1e-12);
  double off = 0;
  for (int i = 0; i < g.n; ++i)
    if (i != k) off = std::max(off, std::abs(sp[i]));
  CHECK(off <= 1e-12);
}

TEST_CASE("Parseval under the chosen normalization to 1e-12") {
  Grid g = Grid::make(512, 77.0);
  cvec u = random_state(g.n, 21u);
  cvec sp;
  to_spectrum(g, u, sp);
  double sv = 0, ss = 0;
  for (const cplx& z : u) sv += std::norm(z);
  for (const cplx& z : sp) ss += std::norm(z);
  CHECK(sv / g.n == doctest::Approx(ss).epsilon(1e-12));
  CHECK(l2_norm_values(g, u) == doctest::Approx(l2_norm_spectrum(g, sp)).epsilon(1e-12));
}

TEST_CASE("boundary mass fraction sees only the outer 10%") {
  Grid g = Grid::make(256, 100.0);
  cvec center(g.n, cplx(0, 0)), edge(g.n, cplx(0, 0));
  for (int j = 0; j < g.n; ++j) {
    if (std::abs(g.x[j]) < 10.0) center[j] = 1.0;
    if (std::abs(g.x[j]) > 47.0) edge[j] = 1.0;
  }
  CHECK(boundary_mass_fraction(g, center) == doctest::Approx(0.0));
  CHECK(boundary_mass_fraction(g, edge) == doctest::Approx(1.0));
}

TEST_CASE("mode_index snaps and rejects off-grid frequencies") {
  Grid g = Grid::make(64, 16.0);
  CHECK(mode_index(g, 3 * g.dxi) == 3);
  CHECK(mode_index(g, -2 * g.dxi) == 62);
  CHECK_THROWS(mode_index(g, 2.7 * g.dxi, 0.25));
  CHECK_THROWS(mode_index(g, g.dxi * (g.n / 2 + 1)));
}
