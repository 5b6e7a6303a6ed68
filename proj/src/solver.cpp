#include "dispersim/solver.hpp"

#include <algorithm>
#include <cmath>

namespace dispersim {

namespace {

double check_finite_max(const cvec& spectrum) {
    double mx = 0.0;
    for (const auto& v : spectrum) {
        const double m = std::abs(v.real()) + std::abs(v.imag());
        if (!std::isfinite(m))
            fail("state became non-finite; the time step is unstable (halve dt)");
        mx = std::max(mx, m);
    }
    return mx;
}

// half-step integrating factor e^{-i a(xi) dt/2}
cvec half_multiplier(const Grid& g, const DispersionSymbol& sym, double dt) {
    cvec e(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double ph = -0.5 * dt * sym.a(g.xi[i]);
        e[i] = cplx(std::cos(ph), std::sin(ph));
    }
    return e;
}

// one IF-RK4 step with a precomputed half multiplier (for segment stepping)
void rk4_step(const Grid& g, const CubicSymbol& q, const cvec& ehalf, double dt,
              bool dealias, cvec& u, cvec& n1, cvec& stage, cvec& acc) {
    const int n = g.n;
    auto nonlin = [&](const cvec& s) {
        cvec out = apply_cubic(g, q, s);
        for (auto& v : out) v *= cplx(0.0, -1.0);
        if (dealias)
            for (int i = 0; i < n; ++i)
                if (!g.dealias_keep[i]) out[i] = cplx(0.0);
        return out;
    };
    n1 = nonlin(u);
    stage.resize(n);
    for (int i = 0; i < n; ++i) stage[i] = ehalf[i] * (u[i] + 0.5 * dt * n1[i]);
    const cvec n2 = nonlin(stage);
    for (int i = 0; i < n; ++i) stage[i] = ehalf[i] * u[i] + 0.5 * dt * n2[i];
    const cvec n3 = nonlin(stage);
    for (int i = 0; i < n; ++i)
        stage[i] = ehalf[i] * (ehalf[i] * u[i] + dt * n3[i]);
    const cvec n4 = nonlin(stage);
    acc.resize(n);
    for (int i = 0; i < n; ++i) {
        const cplx e2 = ehalf[i] * ehalf[i];
        u[i] = e2 * u[i] +
               (dt / 6.0) * (e2 * n1[i] + 2.0 * ehalf[i] * (n2[i] + n3[i]) + n4[i]);
        if (dealias && !g.dealias_keep[i]) u[i] = cplx(0.0);
    }
}

}  // namespace

State state_from_spectrum(const Grid& g, double t, cvec spectrum) {
    require(static_cast<int>(spectrum.size()) == g.n,
            "spectrum size does not match the grid");
    State s;
    s.t = t;
    s.spectrum = std::move(spectrum);
    to_values(g, s.spectrum, s.values);
    s.boundary_mass = boundary_mass_fraction(g, s.values);
    return s;
}

State state_from_values(const Grid& g, double t, cvec values) {
    require(static_cast<int>(values.size()) == g.n, "values size does not match the grid");
    State s;
    s.t = t;
    s.values = std::move(values);
    to_spectrum(g, s.values, s.spectrum);
    s.boundary_mass = boundary_mass_fraction(g, s.values);
    return s;
}

void apply_dealias(const Grid& g, cvec& spectrum) {
    require(static_cast<int>(spectrum.size()) == g.n,
            "spectrum size does not match the grid");
    for (int i = 0; i < g.n; ++i)
        if (!g.dealias_keep[i]) spectrum[i] = cplx(0.0);
}

State linear_propagate(const Grid& g, const DispersionSymbol& sym, const State& s,
                       double dt) {
    require(std::isfinite(dt), "linear propagation needs a finite time increment");
    cvec spec = s.spectrum;
    for (int i = 0; i < g.n; ++i) {
        const double ph = -dt * sym.a(g.xi[i]);
        spec[i] *= cplx(std::cos(ph), std::sin(ph));
    }
    return state_from_spectrum(g, s.t + dt, std::move(spec));
}

State step_nonlinear(const Grid& g, const DispersionSymbol& sym, const CubicSymbol& q,
                     const State& s, double dt, bool dealias) {
    require(std::isfinite(dt) && dt != 0.0, "time step must be finite and nonzero");
    const cvec ehalf = half_multiplier(g, sym, dt);
    cvec u = s.spectrum, n1, stage, acc;
    rk4_step(g, q, ehalf, dt, dealias, u, n1, stage, acc);
    check_finite_max(u);
    return state_from_spectrum(g, s.t + dt, std::move(u));
}

EvolveResult evolve(const Grid& g, const DispersionSymbol& sym, const CubicSymbol& q,
                    const State& start, double t_target, const EvolveControls& controls) {
    require(std::isfinite(t_target) && t_target != start.t,
            "evolution target must differ from the current time");
    require(controls.dt > 0.0 && std::isfinite(controls.dt),
            "step magnitude must be positive");
    require(controls.snapshot_ratio > 1.0, "snapshot ratio must exceed 1");

    const bool forward = t_target > start.t;
    auto check_confinement = [&](const State& s) {
        if (std::isfinite(controls.confinement_tol) && controls.confinement_tol > 0.0)
            require(s.boundary_mass <= controls.confinement_tol,
                    "mass reached the domain boundary (fraction " +
                        std::to_string(s.boundary_mass) +
                        "); enlarge the domain or shorten the run");
    };

    // geometric snapshot ladder (forward runs from positive times only)
    std::vector<double> events;
    if (forward && start.t > 0.0) {
        const double lr = std::log(controls.snapshot_ratio);
        const int kmax =
            static_cast<int>(std::floor(std::log(t_target / start.t) / lr + 1e-9));
        for (int k = 1; k <= kmax; ++k) {
            const double tk = start.t * std::pow(controls.snapshot_ratio, k);
            if (tk < t_target * (1.0 - 1e-12)) events.push_back(tk);
        }
    }
    events.push_back(t_target);

    EvolveResult res;
    check_confinement(start);
    res.snapshots.push_back(start);

    cvec u = start.spectrum, n1, stage, acc;
    if (controls.dealias) apply_dealias(g, u);
    double t = start.t;
    for (const double target : events) {
        const double span = target - t;
        if (span != 0.0) {
            const int nsub = std::max(
                1, static_cast<int>(std::ceil(std::abs(span) / controls.dt - 1e-12)));
            const double h = span / nsub;
            const cvec ehalf = half_multiplier(g, sym, h);
            for (int i = 0; i < nsub; ++i)
                rk4_step(g, q, ehalf, h, controls.dealias, u, n1, stage, acc);
            check_finite_max(u);
        }
        t = target;
        State snap = state_from_spectrum(g, t, u);
        check_confinement(snap);
        if (target == t_target)
            res.final_state = std::move(snap);
        else
            res.snapshots.push_back(std::move(snap));
    }
    return res;
}

}  // namespace dispersim
