#include "doctest.h"

#include "dispersim/cubic.hpp"

#include <cmath>
#include <random>

using namespace dispersim;

namespace {

cvec random_state(const Grid& g, unsigned seed, int band = 0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    cvec u(g.n, cplx(0.0));
    for (int i = 0; i < g.n; ++i) {
        if (band > 0 && std::abs(g.kmode[i]) > band) continue;
        u[i] = cplx(dist(rng), dist(rng));
    }
    return u;
}

double rel_diff(const Grid& g, const cvec& a, const cvec& b) {
    cvec d(a.size());
    for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double nb = l2_norm_spectrum(g, b);
    return l2_norm_spectrum(g, d) / (nb > 0 ? nb : 1.0);
}

}  // namespace

TEST_CASE("constant symbol on a plane wave is the identity times q0") {
    auto g = Grid::make(64, 20.0);
    for (double q0 : {1.0, -2.0}) {
        auto q = CubicSymbol::constant(q0);
        cvec wave(g.n, cplx(0.0));
        const int i0 = 5;
        wave[i0] = 1.0;
        auto out = apply_cubic(g, q, wave);
        CHECK(std::abs(out[i0] - cplx(q0)) <= 1e-13);
        for (int i = 0; i < g.n; ++i)
            if (i != i0) CHECK(std::abs(out[i]) <= 1e-13);
    }
}

TEST_CASE("constant symbol equals the pointwise cubic for band-limited data") {
    auto g = Grid::make(128, 40.0);
    auto u = random_state(g, 11, g.n / 6);  // narrow band: no wrap anywhere
    auto q = CubicSymbol::constant(0.7);

    cvec vals, w(g.n), what;
    to_values(g, u, vals);
    for (int j = 0; j < g.n; ++j) w[j] = 0.7 * std::norm(vals[j]) * vals[j];
    to_spectrum(g, w, what);

    auto out = apply_cubic(g, q, u);
    CHECK(rel_diff(g, out, what) <= 1e-13);
}

TEST_CASE("fast paths match the dense triple sum on random states") {
    for (int n : {32, 64}) {
        auto g = Grid::make(n, 15.0);
        auto q_const = CubicSymbol::constant(1.0);
        auto q_dense =
            CubicSymbol::dense([](double, double, double) { return cplx(1.0); }, true);
        SeparableTerm ones;  // all factors absent = 1
        auto q_sep = CubicSymbol::separable({ones});
        for (unsigned seed = 0; seed < 10; ++seed) {
            auto u = random_state(g, 100 + seed);
            auto ref = apply_cubic(g, q_dense, u);
            CHECK(rel_diff(g, apply_cubic(g, q_const, u), ref) <= 1e-11);
            CHECK(rel_diff(g, apply_cubic(g, q_sep, u), ref) <= 1e-11);
        }
    }
}

TEST_CASE("separable factors match the equivalent dense symbol") {
    auto g = Grid::make(64, 15.0);
    SeparableTerm t;
    t.f1 = [](double xi) { return xi; };
    t.f2 = [](double xi) { return std::exp(-0.1 * xi * xi); };
    t.f4 = [](double xi) { return 1.0 + 0.5 * xi; };
    auto q_sep = CubicSymbol::separable({t});
    auto q_dense = CubicSymbol::dense(
        [](double x1, double x2, double x3) {
            return cplx(x1 * std::exp(-0.1 * x2 * x2) * (1.0 + 0.5 * (x1 - x2 + x3)));
        },
        true);
    for (unsigned seed = 0; seed < 5; ++seed) {
        auto u = random_state(g, 200 + seed);
        CHECK(rel_diff(g, apply_cubic(g, q_sep, u), apply_cubic(g, q_dense, u)) <= 1e-11);
    }
}

TEST_CASE("diagonal coefficient evaluates the symbol on the diagonal") {
    CHECK(diagonal_coefficient(CubicSymbol::constant(1.0), 3.3) == cplx(1.0));
    auto qd = CubicSymbol::dense(
        [](double x1, double x2, double x3) { return cplx(x1 - x2 + x3); }, true);
    CHECK(std::abs(diagonal_coefficient(qd, 2.0) - cplx(2.0)) <= 1e-14);

    SeparableTerm t;
    t.f1 = [](double xi) { return xi; };
    t.f2 = [](double xi) { return 1.0 + xi * xi; };
    t.f3 = [](double xi) { return std::cos(xi); };
    t.f4 = [](double) { return 2.0; };
    auto qs = CubicSymbol::separable({t});
    const double xi = 0.8;
    const double want = xi * (1.0 + xi * xi) * std::cos(xi) * 2.0;
    CHECK(std::abs(diagonal_coefficient(qs, xi) - cplx(want)) <= 1e-14);
}

TEST_CASE("plane-wave calibration recovers the diagonal value") {
    auto g = Grid::make(64, 20.0);
    CHECK(calibrate_diagonal(CubicSymbol::constant(1.0), g, g.xi[3]) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(calibrate_diagonal(CubicSymbol::constant(-2.0), g, g.xi[3]) ==
          doctest::Approx(-2.0).epsilon(1e-12));

    auto qd = CubicSymbol::dense(
        [](double x1, double x2, double x3) {
            return cplx(std::exp(-(x1 * x1 + x2 * x2 + x3 * x3) / 10.0));
        },
        true);
    const double xi = g.xi[4];
    CHECK(std::abs(calibrate_diagonal(qd, g, xi) - std::exp(-3.0 * xi * xi / 10.0)) <=
          1e-10);

    CHECK_THROWS_AS(calibrate_diagonal(CubicSymbol::constant(1.0), g, 0.123),
                    DispersimError);  // off-grid frequency
}

TEST_CASE("real constant symbol conserves mass flux") {
    auto g = Grid::make(128, 40.0);
    auto q = CubicSymbol::constant(0.9);
    for (unsigned seed = 0; seed < 5; ++seed) {
        auto u = random_state(g, 300 + seed);
        auto out = apply_cubic(g, q, u);
        cplx flux(0.0);
        for (int i = 0; i < g.n; ++i) flux += out[i] * std::conj(u[i]);
        flux *= g.length;
        double scale = l2_norm_spectrum(g, u);
        CHECK(std::abs(flux.imag()) <= 1e-11 * std::max(1.0, std::pow(scale, 4)));
    }
}

TEST_CASE("balanced split: single-block data is entirely balanced") {
    auto g = Grid::make(128, 64.0);
    auto part = build_dyadic(g, 0.25);
    auto q = CubicSymbol::constant(1.0);

    // occupy only magnitude level 5: |xi| in (1.25^4, 1.25^5]
    cvec u(g.n, cplx(0.0));
    int filled = 0;
    for (int i = 0; i < g.n; ++i) {
        const double r = std::abs(g.xi[i]);
        if (r > 2.45 && r < 3.0 && g.xi[i] > 0) {
            u[i] = cplx(0.3, -0.1 * i);
            ++filled;
        }
    }
    REQUIRE(filled > 2);
    for (int i = 0; i < g.n; ++i)
        if (u[i] != cplx(0.0)) CHECK(part.magnitude_index(g.xi[i]) == 5);

    auto split = split_balanced(g, q, u, part);
    const double qn = l2_norm_spectrum(g, split.balanced);
    CHECK(l2_norm_spectrum(g, split.unbalanced) <= 1e-14 * std::max(1.0, qn));
}

TEST_CASE("balanced split: far-separated packets produce unbalanced output") {
    auto g = Grid::make(128, 64.0);  // dxi ~ 0.098
    auto part = build_dyadic(g, 0.25);
    auto q = CubicSymbol::constant(1.0);

    cvec u(g.n, cplx(0.0));
    for (int i = 0; i < g.n; ++i) {
        const double xi = g.xi[i];
        u[i] += 0.5 * std::exp(-8.0 * (xi - 0.5) * (xi - 0.5));   // level 0
        u[i] += 0.5 * std::exp(-8.0 * (xi - 4.5) * (xi - 4.5));   // level 7
    }
    CHECK(part.magnitude_index(4.5) - part.magnitude_index(0.5) > 4);

    auto split = split_balanced(g, q, u, part);
    auto full = apply_cubic(g, q, u);
    CHECK(l2_norm_spectrum(g, split.unbalanced) > 1e-3 * l2_norm_spectrum(g, full));

    // additivity to round-off
    cvec sum(g.n);
    for (int i = 0; i < g.n; ++i) sum[i] = split.balanced[i] + split.unbalanced[i];
    CHECK(rel_diff(g, sum, full) <= 1e-12);
}

TEST_CASE("balanced split fast path agrees with the dense classification") {
    auto g = Grid::make(128, 64.0);
    auto part = build_dyadic(g, 0.25);
    auto q_const = CubicSymbol::constant(1.0);
    auto q_dense =
        CubicSymbol::dense([](double, double, double) { return cplx(1.0); }, true);

    for (unsigned seed = 0; seed < 3; ++seed) {
        auto u = random_state(g, 400 + seed, g.n / 4);
        auto fast = split_balanced(g, q_const, u, part);
        auto dense = split_balanced(g, q_dense, u, part);
        CHECK(rel_diff(g, fast.balanced, dense.balanced) <= 1e-11);
        CHECK(rel_diff(g, fast.unbalanced, dense.unbalanced) <= 1e-11);
    }
}

TEST_CASE("cubic input validation") {
    auto g = Grid::make(64, 20.0);
    auto q = CubicSymbol::constant(1.0);
    cvec wrong(32, cplx(0.0));
    CHECK_THROWS_AS(apply_cubic(g, q, wrong), DispersimError);

    auto big = Grid::make(512, 100.0);
    auto qd = CubicSymbol::dense([](double, double, double) { return cplx(1.0); }, true);
    cvec u(big.n, cplx(0.0));
    CHECK_THROWS_AS(apply_cubic(big, qd, u), DispersimError);
}
