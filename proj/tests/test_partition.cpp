#include "doctest.h"

#include "dispersim/partition.hpp"

#include <cmath>
#include <random>

using namespace dispersim;

TEST_CASE("dyadic blocks cover the grid and classify sharply") {
    auto g = Grid::make(512, 200.0);  // dxi ~ 0.0314
    auto p = build_dyadic(g, 0.25);

    CHECK(p.blocks.size() == 1 + 2 * (p.levels - 1));
    CHECK(std::pow(1.25, p.levels - 1) >= 0.5 * g.n * g.dxi);

    CHECK(p.magnitude_index(0.0) == 0);
    CHECK(p.magnitude_index(0.99) == 0);
    CHECK(p.magnitude_index(1.0) == 0);
    CHECK(p.magnitude_index(1.25) == 1);
    CHECK(p.magnitude_index(1.26) == 2);
    CHECK(p.magnitude_index(-3.0) == 5);  // ln3/ln1.25 = 4.92 -> level 5
    CHECK(p.magnitude_index(3.0) == p.magnitude_index(-3.0));

    CHECK(p.block_index(0.5) == 0);
    const int bp = p.block_index(3.0), bn = p.block_index(-3.0);
    CHECK(p.blocks[bp].side == 1);
    CHECK(p.blocks[bn].side == -1);
    CHECK(p.blocks[bp].level == 5);
    CHECK(p.blocks[bp].center == doctest::Approx(-p.blocks[bn].center));
}

TEST_CASE("octave ratio reproduces classical dyadic indices") {
    auto g = Grid::make(256, 50.0);
    auto p = build_dyadic(g, 1.0);
    CHECK(p.magnitude_index(2.0) == 1);
    CHECK(p.magnitude_index(2.001) == 2);
    CHECK(p.magnitude_index(4.0) == 2);
    CHECK(p.magnitude_index(8.0) == 3);
    CHECK(p.magnitude_index(-5.0) == 3);
}

TEST_CASE("smooth cutoffs form a partition of unity with local support") {
    auto g = Grid::make(512, 200.0);
    auto p = build_dyadic(g, 0.25);

    std::mt19937 rng(7);
    const double xi_max = 0.5 * g.n * g.dxi;
    std::uniform_real_distribution<double> dist(-xi_max, xi_max);
    for (int trial = 0; trial < 10000; ++trial) {
        const double xi = dist(rng);
        double sum = 0.0;
        for (int b = 0; b < static_cast<int>(p.blocks.size()); ++b)
            sum += p.cutoff(b, xi);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    for (int i = 0; i < g.n; ++i) {
        double sum = 0.0;
        for (int b = 0; b < static_cast<int>(p.blocks.size()); ++b)
            sum += p.cutoff(b, g.xi[i]);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }

    // support stays inside the (generously) doubled block
    for (int b = 0; b < static_cast<int>(p.blocks.size()); ++b) {
        const auto& blk = p.blocks[b];
        for (double r : {blk.abs_lo * 0.5, blk.abs_hi * 2.0 + 0.5}) {
            const double xi = (blk.side < 0 ? -1.0 : 1.0) * r;
            if (blk.level > 0 && r < blk.abs_lo * 0.8)
                CHECK(p.cutoff(b, xi) == 0.0);
            if (r > blk.abs_hi * 1.2 && blk.level < p.levels - 1)
                CHECK(p.cutoff(b, xi) == 0.0);
        }
        // wrong sign never contributes
        if (blk.side != 0) CHECK(p.cutoff(b, -blk.center) == 0.0);
    }
}

TEST_CASE("dyadic construction rejects bad parameters") {
    auto g = Grid::make(512, 200.0);
    CHECK_THROWS_AS(build_dyadic(g, 0.0), DispersimError);
    CHECK_THROWS_AS(build_dyadic(g, 1.5), DispersimError);
    auto coarse = Grid::make(8, 1.0);  // dxi = 2 pi
    CHECK_THROWS_AS(build_dyadic(coarse, 0.25), DispersimError);
}

TEST_CASE("velocity images follow the group velocity map") {
    auto g = Grid::make(512, 200.0);
    auto p = build_dyadic(g, 0.25);

    auto nls = make_preset("nls");
    auto vp = build_velocity_partition(p, nls, 10.0);
    CHECK(!vp.has_lambda0);  // only defined for sigma < -2
    CHECK(vp.intervals.size() == p.blocks.size());
    for (size_t i = 0; i < vp.intervals.size(); ++i) {
        const auto& blk = p.blocks[i];
        const auto& J = vp.intervals[i];
        const double lo = blk.side < 0 ? -blk.abs_hi : (blk.level == 0 ? -1.0 : blk.abs_lo);
        CHECK(J.v_lo == doctest::Approx(lo));  // identity map for quadratic symbol
        CHECK(J.v_lo < J.v_hi);
    }

    auto kg = make_preset("klein_gordon");
    auto vpk = build_velocity_partition(p, kg, 10.0);
    for (const auto& J : vpk.intervals) {
        CHECK(J.v_lo > -1.0);
        CHECK(J.v_hi < 1.0);
    }
}

TEST_CASE("high-frequency threshold solves its defining equation") {
    auto g = Grid::make(512, 200.0);
    auto p = build_dyadic(g, 0.25);
    auto kg = make_preset("klein_gordon");

    auto vp = build_velocity_partition(p, kg, 100.0);
    REQUIRE(vp.has_lambda0);
    CHECK(vp.lambda0 > 50.0);  // the upper of the two roots
    CHECK(vp.lambda0 < 100.0);
    CHECK(std::abs(100.0 * vp.lambda0 * vp.lambda0 * kg.a2(vp.lambda0) - 1.0) <= 1e-8);

    // t too small: t * max(l^2 a2) = 2 * 2/3^1.5 < 1, no threshold exists
    auto vp2 = build_velocity_partition(p, kg, 2.0);
    CHECK(!vp2.has_lambda0);

    CHECK_THROWS_AS(build_velocity_partition(p, kg, 0.0), DispersimError);
}
