#include "doctest.h"

#include "dispersim/dispersion.hpp"
#include "dispersim/grid.hpp"
#include "dispersim/initial_data.hpp"

#include <cmath>

using namespace dispersim;

TEST_CASE("gaussian data lands on the requested L2 size with the closed-form peak") {
    const Grid g = Grid::make(1024, 80.0);
    const auto nls = make_preset("nls");
    DataParams p;
    p.epsilon = 0.25;
    p.width = 1.3;
    p.normalize = "l2";
    const InitialData d = make_data("gaussian", p, g, nls);
    CHECK(d.state.t == 0.0);
    CHECK(d.l2 == doctest::Approx(0.25).epsilon(1e-12));
    // ||A e^{-x^2/(2w^2)}||_2 = A pi^{1/4} sqrt(w)
    const double amp = 0.25 / (std::pow(kPi, 0.25) * std::sqrt(1.3));
    double peak = 0.0;
    for (const auto& v : d.state.values) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(amp).epsilon(1e-3));
    CHECK(d.state.boundary_mass <= 1e-12);
}

TEST_CASE("gaussian weighted norm matches continuum quadrature") {
    const Grid g = Grid::make(1024, 80.0);
    const auto nls = make_preset("nls");
    DataParams p;
    p.epsilon = 0.1;
    p.width = 1.0;
    p.delta = 0.1;
    p.normalize = "xnorm";
    const InitialData d = make_data("gaussian", p, g, nls);
    CHECK(d.x_norm == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d.exponents.s0 == doctest::Approx(-0.4));
    CHECK(d.exponents.s1 == doctest::Approx(0.5));

    // continuum: uhat(xi) = A w e^{-w^2 xi^2/2} (unitary), FT(x u) = i d/dxi uhat
    // and the grid coefficient relates by spectrum = uhat * sqrt(2 pi) / L
    double peak = 0.0;
    for (const auto& v : d.state.values) peak = std::max(peak, std::abs(v));
    const double A = peak, w = 1.0;
    auto quad = [&](auto f) {
        double s = 0.0;
        const double h = 0.005;
        for (double xi = -30.0; xi <= 30.0; xi += h) s += f(xi) * h;
        return s;
    };
    const double n0sq = quad([&](double xi) {
        const double uh = A * w * std::exp(-0.5 * w * w * xi * xi);
        return std::pow(1.0 + xi * xi, -0.4) * uh * uh;
    });
    const double n1sq = quad([&](double xi) {
        const double duh = A * w * w * w * xi * std::exp(-0.5 * w * w * xi * xi);
        return std::pow(1.0 + xi * xi, 0.5) * duh * duh;
    });
    CHECK(d.x_norm == doctest::Approx(std::sqrt(n0sq + n1sq)).epsilon(1e-5));
}

TEST_CASE("frequency bump data is exactly band-limited") {
    const Grid g = Grid::make(256, 40.0);
    const auto kg = make_preset("klein_gordon");
    DataParams p;
    p.epsilon = 0.2;
    p.band_lo = 1.0;
    p.band_hi = 2.0;
    p.normalize = "l2";
    const InitialData d = make_data("frequency_localized_bump", p, g, kg);
    CHECK(d.l2 == doctest::Approx(0.2).epsilon(1e-12));
    double inside = 0.0;
    for (int i = 0; i < g.n; ++i) {
        if (g.xi[i] <= 1.0 || g.xi[i] >= 2.0)
            CHECK(d.state.spectrum[i] == cplx(0.0));
        else
            inside += std::norm(d.state.spectrum[i]);
    }
    CHECK(inside > 0.0);

    DataParams far = p;
    far.band_lo = 11.0;  // beyond the dealiased band of this grid
    far.band_hi = 12.0;
    CHECK_THROWS_AS(make_data("frequency_localized_bump", far, g, kg), DispersimError);
    DataParams flipped = p;
    flipped.band_lo = 2.0;
    flipped.band_hi = 1.0;
    CHECK_THROWS_AS(make_data("frequency_localized_bump", flipped, g, kg),
                    DispersimError);
}

TEST_CASE("packet superposition carries the requested carrier frequencies") {
    const Grid g = Grid::make(1024, 80.0);
    const auto kg = make_preset("klein_gordon");
    DataParams p;
    p.epsilon = 0.1;
    p.width = 2.0;
    p.velocities = {-0.5, 0.6};
    p.centers = {-15.0, 10.0};
    p.normalize = "l2";
    const InitialData d = make_data("packet_superposition", p, g, kg);
    CHECK(d.l2 == doctest::Approx(0.1).epsilon(1e-12));
    for (double v : p.velocities) {
        const double xiv = v / std::sqrt(1.0 - v * v);
        double best = 0.0, best_xi = 0.0;
        for (int i = 0; i < g.n; ++i) {
            if (std::abs(g.xi[i] - xiv) > 0.4) continue;
            if (std::abs(d.state.spectrum[i]) > best) {
                best = std::abs(d.state.spectrum[i]);
                best_xi = g.xi[i];
            }
        }
        CHECK(best > 0.0);
        CHECK(std::abs(best_xi - xiv) <= 2.0 * g.dxi);
    }

    DataParams bad = p;
    bad.velocities = {1.5};  // outside the group-velocity range of this symbol
    bad.centers.clear();
    CHECK_THROWS_AS(make_data("packet_superposition", bad, g, kg), DispersimError);
    DataParams mismatched = p;
    mismatched.centers = {1.0};
    CHECK_THROWS_AS(make_data("packet_superposition", mismatched, g, kg),
                    DispersimError);
}

TEST_CASE("zero amplitude and unknown kinds are handled") {
    const Grid g = Grid::make(128, 40.0);
    const auto nls = make_preset("nls");
    DataParams p;
    p.epsilon = 0.0;
    const InitialData d = make_data("gaussian", p, g, nls);
    for (const auto& v : d.state.spectrum) CHECK(v == cplx(0.0));
    CHECK(d.l2 == 0.0);
    CHECK(d.x_norm == 0.0);
    CHECK_THROWS_AS(make_data("squarewave", p, g, nls), DispersimError);
    DataParams nn = p;
    nn.normalize = "h1";
    nn.epsilon = 0.1;
    CHECK_THROWS_AS(make_data("gaussian", nn, g, nls), DispersimError);
}

TEST_CASE("profile normalization pins the dispersive peak height") {
    const Grid g = Grid::make(512, 80.0);
    const auto nls = make_preset("nls");
    DataParams p;
    p.epsilon = 0.05;
    p.xi0 = 0.8;
    p.width = 2.0;
    p.normalize = "profile";
    const InitialData d = make_data("gaussian", p, g, nls);
    CHECK(d.profile_amp == doctest::Approx(0.05).epsilon(1e-12));
    // for the quadratic symbol a2 = 1, so the peak unitary transform is 0.05
    double peak = 0.0;
    for (int i = 0; i < g.n; ++i)
        peak = std::max(peak, std::abs(d.state.spectrum[i]) * g.length /
                                  std::sqrt(2.0 * kPi));
    CHECK(peak == doctest::Approx(0.05).epsilon(1e-12));
}
