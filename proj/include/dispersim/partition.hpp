#pragma once

#include "dispersim/common.hpp"
#include "dispersim/dispersion.hpp"
#include "dispersim/grid.hpp"

#include <vector>

namespace dispersim {

// One block of the geometric frequency decomposition. Magnitude level m = 0
// covers |xi| <= 1 (a single two-sided core block); level m >= 1 covers
// (1+mu)^{m-1} < |xi| <= (1+mu)^m, one block per sign.
struct DyadicBlock {
    int level = 0;
    int side = 0;  // 0 core, +1 positive frequencies, -1 negative
    double abs_lo = 0.0, abs_hi = 1.0;  // |xi| range of the level
    double center = 0.0;                // signed representative frequency
};

struct DyadicPartition {
    double mu = 0.25;
    int levels = 0;  // magnitude levels 0..levels-1
    std::vector<DyadicBlock> blocks;

    // sharp classification used by the balanced/unbalanced interaction split
    int magnitude_index(double xi) const;
    int block_index(double xi) const;  // index into blocks

    // smooth partition-of-unity multiplier of block b (raised-cosine edges
    // spanning 20% of the adjacent level width); sums to 1 over blocks
    double cutoff(int b, double xi) const;

  private:
    double ramp(int boundary_level, double r) const;  // 1 below, 0 above
};

// Covers the grid's frequency range; mu_ratio in (0,1]; errors if the grid
// spacing is too coarse to resolve the near-unit blocks.
DyadicPartition build_dyadic(const Grid& g, double mu_ratio);

// Image of one frequency block under the group velocity map.
struct VelocityInterval {
    int level = 0;
    int side = 0;
    double v_lo = 0.0, v_hi = 0.0;
};

struct VelocityPartition {
    double t = 0.0;
    std::vector<VelocityInterval> intervals;
    bool has_lambda0 = false;
    double lambda0 = 0.0;  // high-frequency threshold, only when sigma < -2
};

// Interval images J = a1(I) per block; when sigma < -2 also the threshold
// lambda0 solving t lambda^2 a2(lambda) = 1 (the larger of the two roots; left
// unset when t is too small for a root to exist).
VelocityPartition build_velocity_partition(const DyadicPartition& part,
                                           const DispersionSymbol& sym, double t);

}  // namespace dispersim
