#include "dispersim/partition.hpp"

#include <algorithm>
#include <cmath>

namespace dispersim {

namespace {

// level width: W_0 = 1, W_m = (1+mu)^m - (1+mu)^{m-1}
double level_width(double mu, int m) {
    if (m <= 0) return 1.0;
    return std::pow(1.0 + mu, m - 1) * mu;
}

}  // namespace

int DyadicPartition::magnitude_index(double xi) const {
    const double r = std::abs(xi);
    if (r <= 1.0) return 0;
    const int m = static_cast<int>(std::ceil(std::log(r) / std::log1p(mu) - 1e-12));
    return std::min(std::max(m, 1), levels - 1);
}

int DyadicPartition::block_index(double xi) const {
    const int m = magnitude_index(xi);
    if (m == 0) return 0;
    return 1 + 2 * (m - 1) + (xi > 0.0 ? 0 : 1);
}

// decreasing raised-cosine ramp across the boundary between levels m and m+1
double DyadicPartition::ramp(int m, double r) const {
    const double b = std::pow(1.0 + mu, m);  // boundary |xi| = (1+mu)^m
    const double w = 0.2 * std::min(level_width(mu, m), level_width(mu, m + 1));
    if (r <= b - 0.5 * w) return 1.0;
    if (r >= b + 0.5 * w) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * (r - b + 0.5 * w) / w));
}

double DyadicPartition::cutoff(int b, double xi) const {
    require(b >= 0 && b < static_cast<int>(blocks.size()), "block index out of range");
    const auto& blk = blocks[b];
    const double r = std::abs(xi);
    if (blk.level == 0) return ramp(0, r);
    if (blk.side > 0 && !(xi > 0.0)) return 0.0;
    if (blk.side < 0 && !(xi < 0.0)) return 0.0;
    const double hi = blk.level == levels - 1 ? 1.0 : ramp(blk.level, r);
    return hi - ramp(blk.level - 1, r);
}

DyadicPartition build_dyadic(const Grid& g, double mu_ratio) {
    require(mu_ratio > 0.0 && mu_ratio <= 1.0, "mu_ratio must lie in (0, 1]");
    require(g.dxi <= 0.5 * mu_ratio,
            "grid too coarse for the requested block ratio: need dxi <= mu/2");

    DyadicPartition p;
    p.mu = mu_ratio;
    const double xi_max = 0.5 * g.n * g.dxi;  // largest frequency magnitude on the grid
    int levels = 1;
    while (std::pow(1.0 + mu_ratio, levels) < xi_max) ++levels;
    p.levels = levels + 1;

    p.blocks.push_back({0, 0, 0.0, 1.0, 0.0});
    for (int m = 1; m < p.levels; ++m) {
        const double lo = std::pow(1.0 + mu_ratio, m - 1);
        const double hi = std::pow(1.0 + mu_ratio, m);
        const double ctr = std::sqrt(lo * hi);
        p.blocks.push_back({m, +1, lo, hi, ctr});
        p.blocks.push_back({m, -1, lo, hi, -ctr});
    }
    return p;
}

VelocityPartition build_velocity_partition(const DyadicPartition& part,
                                           const DispersionSymbol& sym, double t) {
    require(t > 0.0, "velocity partition needs t > 0");
    VelocityPartition vp;
    vp.t = t;

    for (const auto& blk : part.blocks) {
        double xlo, xhi;
        if (blk.level == 0) {
            xlo = -blk.abs_hi;
            xhi = blk.abs_hi;
        } else if (blk.side > 0) {
            xlo = blk.abs_lo;
            xhi = blk.abs_hi;
        } else {
            xlo = -blk.abs_hi;
            xhi = -blk.abs_lo;
        }
        // clip to the symbol's evaluation domain (tabulated symbols)
        xlo = std::max(xlo, sym.xi_min);
        xhi = std::min(xhi, sym.xi_max);
        if (!(xlo < xhi)) continue;
        vp.intervals.push_back({blk.level, blk.side, sym.a1(xlo), sym.a1(xhi)});
    }

    if (sym.sigma < -2.0) {
        // h(l) = l^2 a2(l) rises then falls; find the upper root of t h(l) = 1
        const double l_hi_cap = std::isfinite(sym.xi_max) ? sym.xi_max : 1e9;
        double best_l = 1.0, best_h = 0.0;
        const int scan = 4000;
        for (int i = 0; i <= scan; ++i) {
            const double l = std::exp(std::log(1e-3) +
                                      (std::log(l_hi_cap) - std::log(1e-3)) * i / scan);
            const double h = l * l * sym.a2(l);
            if (h > best_h) {
                best_h = h;
                best_l = l;
            }
        }
        if (t * best_h >= 1.0) {
            double lo = best_l, hi = best_l;
            while (t * hi * hi * sym.a2(hi) > 1.0 && hi < l_hi_cap) hi = std::min(2.0 * hi, l_hi_cap);
            require(t * hi * hi * sym.a2(hi) <= 1.0,
                    "threshold frequency search left the resolvable range");
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (t * mid * mid * sym.a2(mid) > 1.0)
                    lo = mid;
                else
                    hi = mid;
            }
            vp.lambda0 = 0.5 * (lo + hi);
            vp.has_lambda0 = true;
            require(std::abs(t * vp.lambda0 * vp.lambda0 * sym.a2(vp.lambda0) - 1.0) <= 1e-8,
                    "threshold frequency failed its defining equation");
        }
    }
    return vp;
}

}  // namespace dispersim
