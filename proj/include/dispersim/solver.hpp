#pragma once

#include "dispersim/common.hpp"
#include "dispersim/cubic.hpp"
#include "dispersim/dispersion.hpp"
#include "dispersim/grid.hpp"

#include <vector>

namespace dispersim {

// One time slice. Both representations are kept consistent (Parseval to
// 1e-12 relative); boundary_mass is the L2 fraction in the outer 10% of the
// domain, used to police periodic-wrap contamination of x-weighted operators.
struct State {
    double t = 0.0;
    cvec values;
    cvec spectrum;
    double boundary_mass = 0.0;
};

State state_from_spectrum(const Grid& g, double t, cvec spectrum);
State state_from_values(const Grid& g, double t, cvec values);

// zero the top half of the mode band (|k| > N/4)
void apply_dealias(const Grid& g, cvec& spectrum);

// exact linear flow: spectrum multiplied by e^{-i a(xi) dt}
State linear_propagate(const Grid& g, const DispersionSymbol& sym, const State& s,
                       double dt);

// one integrating-factor RK4 step of i du/dt - A(D)u = Q(u, conj u, u);
// exact for q = 0, classical fourth order otherwise. dt may be negative.
State step_nonlinear(const Grid& g, const DispersionSymbol& sym, const CubicSymbol& q,
                     const State& s, double dt, bool dealias = true);

struct EvolveControls {
    double dt = 1e-3;              // step magnitude (direction from the target)
    double snapshot_ratio = 1.15;  // geometric output times t_k = t_start * ratio^k
    double confinement_tol = 1e-8; // boundary-mass abort threshold at snapshots
    bool dealias = true;
};

struct EvolveResult {
    State final_state;
    std::vector<State> snapshots;
};

// Fixed-step evolution to t_target (backward allowed). Forward runs starting
// at t_start > 0 sample snapshots at t_start * ratio^k, k = 0, 1, ..., at all
// ladder times strictly before t_target; otherwise only the initial state is
// sampled. The final state is returned separately, never duplicated into the
// snapshot list. Steps subdivide each inter-snapshot span uniformly with
// magnitude at most controls.dt, landing on every output time exactly.
EvolveResult evolve(const Grid& g, const DispersionSymbol& sym, const CubicSymbol& q,
                    const State& start, double t_target, const EvolveControls& controls);

}  // namespace dispersim
