#include "doctest.h"

#include "dispersim/cubic.hpp"
#include "dispersim/dispersion.hpp"
#include "dispersim/grid.hpp"
#include "dispersim/solver.hpp"

#include <cmath>
#include <random>

using namespace dispersim;

namespace {

cvec random_band_spectrum(const Grid& g, unsigned seed, int band) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    cvec u(g.n, cplx(0.0));
    for (int i = 0; i < g.n; ++i)
        if (std::abs(g.kmode[i]) <= band) u[i] = cplx(N(rng), N(rng));
    return u;
}

double rel_l2(const Grid& g, const cvec& a, const cvec& b) {
    cvec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return l2_norm_spectrum(g, d) / l2_norm_spectrum(g, b);
}

State gaussian_state(const Grid& g, double amp, double width) {
    cvec vals(g.n);
    for (int i = 0; i < g.n; ++i)
        vals[i] = amp * std::exp(-0.5 * g.x[i] * g.x[i] / (width * width));
    return state_from_values(g, 0.0, std::move(vals));
}

}  // namespace

TEST_CASE("states keep physical and spectral representations consistent") {
    const Grid g = Grid::make(256, 80.0);
    const State s = state_from_spectrum(g, 2.0, random_band_spectrum(g, 3, 100));
    CHECK(l2_norm_values(g, s.values) ==
          doctest::Approx(l2_norm_spectrum(g, s.spectrum)).epsilon(1e-12));
    const State r = state_from_values(g, 2.0, s.values);
    CHECK(rel_l2(g, r.spectrum, s.spectrum) <= 1e-13);
    CHECK(s.t == 2.0);
    cvec bad(g.n + 3);
    CHECK_THROWS_AS(state_from_spectrum(g, 0.0, bad), DispersimError);
}

TEST_CASE("linear flow matches the free gaussian closed form") {
    const Grid g = Grid::make(1024, 80.0);
    const auto nls = make_preset("nls");
    const State s0 = gaussian_state(g, 1.0, 1.0);
    const State s5 = linear_propagate(g, nls, s0, 5.0);
    CHECK(s5.t == 5.0);
    const double peak = std::pow(26.0, -0.25);
    for (int i = 0; i < g.n; i += 7) {
        const double want = peak * std::exp(-g.x[i] * g.x[i] / 52.0);
        CHECK(std::abs(std::abs(s5.values[i]) - want) <= 1e-10);
    }
    // unitarity
    CHECK(l2_norm_spectrum(g, s5.spectrum) ==
          doctest::Approx(l2_norm_spectrum(g, s0.spectrum)).epsilon(1e-12));
    // identity at dt = 0 and the two-step composition property
    const State same = linear_propagate(g, nls, s0, 0.0);
    CHECK(rel_l2(g, same.spectrum, s0.spectrum) == 0.0);
    const State a = linear_propagate(g, nls, linear_propagate(g, nls, s0, 2.5), 1.5);
    const State b = linear_propagate(g, nls, s0, 4.0);
    CHECK(rel_l2(g, a.spectrum, b.spectrum) <= 1e-13);
}

TEST_CASE("nonlinear step reduces to the linear flow when the symbol vanishes") {
    const Grid g = Grid::make(256, 60.0);
    const auto kg = make_preset("klein_gordon");
    const State s0 = state_from_spectrum(g, 0.0, random_band_spectrum(g, 9, g.n / 4));
    const State a = step_nonlinear(g, kg, CubicSymbol::constant(0.0), s0, 0.37);
    const State b = linear_propagate(g, kg, s0, 0.37);
    CHECK(rel_l2(g, a.spectrum, b.spectrum) <= 1e-13);
}

TEST_CASE("time stepper converges at fourth order") {
    const Grid g = Grid::make(256, 40.0);
    const auto nls = make_preset("nls");
    const CubicSymbol q = CubicSymbol::constant(1.0);
    State s0 = gaussian_state(g, 0.5, 1.0);
    apply_dealias(g, s0.spectrum);
    s0 = state_from_spectrum(g, 0.0, s0.spectrum);

    auto integrate = [&](double dt) {
        State s = s0;
        const int steps = static_cast<int>(std::round(1.0 / dt));
        for (int i = 0; i < steps; ++i) s = step_nonlinear(g, nls, q, s, dt);
        return s;
    };
    const State ref = integrate(1.0 / 512.0);
    rvec logdt, logerr;
    for (int denom : {16, 32, 64}) {
        const double err = rel_l2(g, integrate(1.0 / denom).spectrum, ref.spectrum);
        logdt.push_back(std::log(1.0 / denom));
        logerr.push_back(std::log(err));
    }
    // least-squares slope over the three refinements
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logdt.size(); ++i) {
        sx += logdt[i];
        sy += logerr[i];
        sxx += logdt[i] * logdt[i];
        sxy += logdt[i] * logerr[i];
    }
    const double m = static_cast<double>(logdt.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope == doctest::Approx(4.0).epsilon(0.075));
}

TEST_CASE("cubic flow with a real constant symbol conserves mass") {
    const Grid g = Grid::make(256, 60.0);
    const auto nls = make_preset("nls");
    const CubicSymbol q = CubicSymbol::constant(1.0);
    State s = gaussian_state(g, 0.3, 1.0);
    apply_dealias(g, s.spectrum);
    s = state_from_spectrum(g, 0.0, s.spectrum);
    const double m0 = l2_norm_spectrum(g, s.spectrum);
    const double T = 10.0;
    for (int i = 0; i < 1000; ++i) s = step_nonlinear(g, nls, q, s, T / 1000.0);
    const double drift = std::abs(l2_norm_spectrum(g, s.spectrum) - m0) / m0 / T;
    CHECK(drift <= 1e-10);
}

TEST_CASE("evolution samples geometric snapshot times and lands exactly") {
    const Grid g = Grid::make(128, 400.0);
    const auto kg = make_preset("klein_gordon");
    const CubicSymbol q0 = CubicSymbol::constant(0.0);
    State s = gaussian_state(g, 0.1, 12.0);  // resolved well inside the kept band
    apply_dealias(g, s.spectrum);            // so the round trip compares like for like
    s = state_from_spectrum(g, 1.0, s.spectrum);

    EvolveControls c;
    c.dt = 0.05;
    c.snapshot_ratio = 1.2;
    const EvolveResult r = evolve(g, kg, q0, s, 100.0, c);
    CHECK(r.snapshots.size() == 26);
    CHECK(r.snapshots.front().t == 1.0);
    for (std::size_t k = 0; k < r.snapshots.size(); ++k)
        CHECK(r.snapshots[k].t ==
              doctest::Approx(std::pow(1.2, static_cast<double>(k))).epsilon(1e-12));
    CHECK(r.final_state.t == 100.0);

    // reversibility of the unitary flow
    const EvolveResult back = evolve(g, kg, q0, r.final_state, 1.0, c);
    CHECK(back.snapshots.size() == 1);  // backward: initial sample only
    CHECK(rel_l2(g, back.final_state.spectrum, s.spectrum) <= 1e-12);

    CHECK_THROWS_AS(evolve(g, kg, q0, s, s.t, c), DispersimError);
}

TEST_CASE("cubic evolution is reversible to stepper accuracy") {
    const Grid g = Grid::make(128, 60.0);
    const auto nls = make_preset("nls");
    const CubicSymbol q = CubicSymbol::constant(1.0);
    State s = gaussian_state(g, 0.1, 1.0);
    apply_dealias(g, s.spectrum);
    s = state_from_spectrum(g, 0.0, s.spectrum);

    EvolveControls c;
    c.dt = 1e-3;
    c.confinement_tol = 0.0;  // wrap-around is irrelevant for the round trip
    const EvolveResult fwd = evolve(g, nls, q, s, 10.0, c);
    const EvolveResult rt = evolve(g, nls, q, fwd.final_state, 0.0, c);
    CHECK(rel_l2(g, rt.final_state.spectrum, s.spectrum) <= 1e-6);
}

TEST_CASE("instability and confinement violations are reported") {
    const Grid g = Grid::make(128, 40.0);
    const auto nls = make_preset("nls");
    EvolveControls c;
    c.dt = 0.5;
    c.confinement_tol = 0.0;
    State wild = gaussian_state(g, 50.0, 1.0);
    CHECK_THROWS_AS(evolve(g, nls, CubicSymbol::constant(1.0), wild, 5.0, c),
                    DispersimError);

    State leaking;
    {
        cvec vals(g.n);
        for (int i = 0; i < g.n; ++i) {
            const double y = (g.x[i] - 0.45 * g.length) / 2.0;
            vals[i] = 0.1 * std::exp(-0.5 * y * y);
        }
        leaking = state_from_values(g, 1.0, std::move(vals));
    }
    EvolveControls strict;
    strict.dt = 0.05;
    strict.confinement_tol = 1e-8;
    CHECK_THROWS_AS(evolve(g, nls, CubicSymbol::constant(0.0), leaking, 2.0, strict),
                    DispersimError);
}

TEST_CASE("dealiased band stays exactly empty across steps") {
    const Grid g = Grid::make(128, 40.0);
    const auto nls = make_preset("nls");
    const CubicSymbol q = CubicSymbol::constant(1.0);
    cvec small = random_band_spectrum(g, 21, g.n / 2);
    for (auto& v : small) v *= 0.01;  // keep the cubic term mild for stability
    State s = state_from_spectrum(g, 0.0, std::move(small));
    State masked = s;
    for (int i = 0; i < 5; ++i) masked = step_nonlinear(g, nls, q, masked, 0.01, true);
    for (int i = 0; i < g.n; ++i)
        if (!g.dealias_keep[i]) CHECK(masked.spectrum[i] == cplx(0.0));
    State open = s;
    open = step_nonlinear(g, nls, q, open, 0.01, false);
    double outside = 0.0;
    for (int i = 0; i < g.n; ++i)
        if (!g.dealias_keep[i]) outside += std::norm(open.spectrum[i]);
    CHECK(outside > 0.0);
}
