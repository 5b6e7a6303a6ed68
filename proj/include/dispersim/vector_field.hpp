#pragma once

#include "dispersim/common.hpp"
#include "dispersim/dispersion.hpp"
#include "dispersim/grid.hpp"
#include "dispersim/solver.hpp"

#include <vector>

namespace dispersim {

// L u = x u - t (a1 applied as a Fourier multiplier) u, the transported-center
// operator. Refuses states with boundary mass above confinement_tol: the
// centered sawtooth x-weight is meaningless for wrapped mass.
cvec apply_L(const Grid& g, const DispersionSymbol& sym, const State& s,
             double confinement_tol = 1e-8);

// companion derivative in the moving frame, t (d/dx - i phi'(x/t)) u,
// defined at nodes whose velocity x/t lies strictly inside the group-velocity
// range; other nodes are masked out
struct FrameDerivative {
    cvec values;             // zero where masked
    std::vector<char> mask;  // 1 = valid node
    int valid = 0;
};
FrameDerivative apply_Ltilde(const Grid& g, const DispersionSymbol& sym, const State& s);

struct XNorms {
    double h_s0 = 0.0;  // ||<D>^{s0} u||_{L2}
    double lh_s1 = 0.0; // ||<D>^{s1} L u||_{L2}
    double x = 0.0;     // sqrt(h_s0^2 + lh_s1^2)
};
XNorms x_norm(const Grid& g, const DispersionSymbol& sym, const State& s,
              const ExponentChoice& exps, double confinement_tol = 1e-8);

// pointwise-decay inequality report on a frequency band:
//   sup|u|^2 vs (||u|| ||Lu|| + M ||u||^2) / (t R),
// R = inf a2 and M = sup|a3| / R over the band. Band-limited states have
// polynomially fat spatial tails, so the diagnostic checks below accept a
// looser boundary-mass gate than apply_L's default.
struct KSReport {
    double lhs = 0.0, rhs = 0.0, ratio = 0.0;
    double R = 0.0, M = 0.0, t = 0.0;
};
KSReport klainerman_sobolev_check(const Grid& g, const DispersionSymbol& sym,
                                  const State& s, double band_lo, double band_hi,
                                  double localization_tol = 1e-8,
                                  double confinement_tol = 1e-6);

// decay report beyond the fastest group line of a one-sided localization:
// for states with spectrum below xi0, samples x > x0 + sqrt(R t) with
// x0 = t a1(xi0) and reports sup |u(x)|^2 (x - x0) R t / (||Lu|| + M ||u||)^2
struct TailReport {
    double worst_ratio = 0.0;
    double x0 = 0.0;
    double R = 0.0, M = 0.0;
    int sampled = 0;
};
TailReport elliptic_tail_check(const Grid& g, const DispersionSymbol& sym,
                               const State& s, double xi0,
                               double localization_tol = 1e-8,
                               double confinement_tol = 1e-6);

}  // namespace dispersim
