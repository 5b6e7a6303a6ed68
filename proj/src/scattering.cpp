#include "dispersim/scattering.hpp"

#include "dispersim/fit.hpp"

#include <algorithm>
#include <cmath>

namespace dispersim {

namespace {

void check_asym_sizes(const AsymptoticState& a) {
    require(a.v.size() == a.gamma.size() && a.v.size() == a.coeff.size(),
            "asymptotic state arrays differ in length");
    require(!a.v.empty(), "asymptotic state is empty");
}

void check_sign(int s_dir) {
    require(s_dir == 1 || s_dir == -1, "phase sign must be +1 or -1");
}

void check_record(const ProfileRecord& rec, const rvec& coeff) {
    require(!rec.t_samples.empty(), "profile record is empty");
    require(coeff.size() == rec.v_samples.size(),
            "coefficient table does not match the velocity grid");
    for (size_t j = 1; j < rec.t_samples.size(); ++j)
        require(rec.t_samples[j] > rec.t_samples[j - 1],
                "profile record times must be strictly increasing");
}

// longest contiguous run of valid rows for node k (ties -> latest run)
std::pair<int, int> valid_run(const ProfileRecord& rec, size_t k) {
    int best_lo = 0, best_len = 0, lo = -1;
    const int rows = static_cast<int>(rec.t_samples.size());
    for (int j = 0; j <= rows; ++j) {
        const bool ok = j < rows && rec.valid[j][k];
        if (ok && lo < 0) lo = j;
        if (!ok && lo >= 0) {
            if (j - lo >= best_len) {
                best_len = j - lo;
                best_lo = lo;
            }
            lo = -1;
        }
    }
    return {best_lo, best_len};
}

// W_s(t) = gamma e^{+i s c |gamma|^2 ln t}: the phase-unwound profile
cplx unwind(cplx gamma, double c, int s_dir, double t) {
    const double amp2 = std::norm(gamma);
    return gamma * std::exp(kI * (static_cast<double>(s_dir) * c * amp2 * std::log(t)));
}

}  // namespace

AsymptoticState integrate_asymptotic(const AsymptoticState& a, double t_target,
                                     int s_dir) {
    check_asym_sizes(a);
    check_sign(s_dir);
    require(a.t >= 1.0 && t_target >= 1.0,
            "asymptotic integration is defined for t >= 1");
    AsymptoticState out = a;
    const double ds = std::log(t_target / a.t);
    for (size_t k = 0; k < a.gamma.size(); ++k) {
        const double amp2 = std::norm(a.gamma[k]);
        out.gamma[k] =
            a.gamma[k] *
            std::exp(-kI * (static_cast<double>(s_dir) * a.coeff[k] * amp2 * ds));
    }
    out.t = t_target;
    return out;
}

AsymptoticResidual asymptotic_residual(const ProfileRecord& rec, const rvec& coeff,
                                       int s_dir) {
    check_sign(s_dir);
    check_record(rec, coeff);
    const int rows = static_cast<int>(rec.t_samples.size());
    const int nv = static_cast<int>(rec.v_samples.size());
    require(rows >= 3, "asymptotic residual needs at least three snapshots");

    AsymptoticResidual out;
    out.t = rec.t_samples;
    out.v = rec.v_samples;
    out.f.assign(rows, cvec(nv, 0.0));
    out.valid.assign(rows, std::vector<char>(nv, 0));
    out.slope.assign(nv, 0.0);
    out.slope_valid.assign(nv, 0);
    out.sup_f.assign(rows, 0.0);

    rvec s(rows);
    for (int j = 0; j < rows; ++j) s[j] = std::log(rec.t_samples[j]);

    bool any = false;
    for (int k = 0; k < nv; ++k) {
        const auto [lo, len] = valid_run(rec, static_cast<size_t>(k));
        if (len < 3) continue;
        any = true;
        const int hi = lo + len - 1;
        rvec ft;
        rvec fv;
        for (int j = lo; j <= hi; ++j) {
            const int wlo = std::max(lo, j - 2), whi = std::min(hi, j + 2);
            rvec sw;
            cvec yw;
            for (int m = wlo; m <= whi; ++m) {
                sw.push_back(s[m]);
                yw.push_back(rec.gamma[m][k]);
            }
            const cplx dgds = quadratic_ls_derivative(sw, yw, s[j]);
            const double t = rec.t_samples[j];
            const cplx gam = rec.gamma[j][k];
            // f = i d/dt gamma - s_dir t^{-1} coeff gamma |gamma|^2: the
            // model equation's left minus right side
            const cplx f = kI * dgds / t -
                           static_cast<double>(s_dir) * coeff[k] * std::norm(gam) *
                               gam / t;
            out.f[j][k] = f;
            out.valid[j][k] = 1;
            out.sup_f[j] = std::max(out.sup_f[j], std::abs(f));
            if (std::abs(f) > 0.0) {
                ft.push_back(std::log(t));
                fv.push_back(std::log(std::abs(f)));
            }
        }
        if (ft.size() >= 3) {
            out.slope[k] = fit_line(ft, fv).slope;
            out.slope_valid[k] = 1;
        }
    }
    require(any, "no velocity node has three consecutive valid samples");
    return out;
}

ScatteringProfile extract_W(const DispersionSymbol& sym, const ProfileRecord& rec,
                            const rvec& coeff, const ExtractOptions& opts) {
    check_record(rec, coeff);
    if (opts.sign_override != 0) check_sign(opts.sign_override);
    const int rows = static_cast<int>(rec.t_samples.size());
    const int nv = static_cast<int>(rec.v_samples.size());

    std::vector<int> tail;
    for (int j = 0; j < rows; ++j)
        if (rec.t_samples[j] >= opts.t_min) tail.push_back(j);
    require(tail.size() >= 2,
            "profile record has fewer than two samples past the extraction time");
    if (tail.size() > 4) tail.erase(tail.begin(), tail.end() - 4);

    // per-node squared drift of the unwound profile over the tail, per sign
    rvec drift_plus(nv, 0.0), drift_minus(nv, 0.0);
    for (size_t p = 0; p + 1 < tail.size(); ++p) {
        const int j0 = tail[p], j1 = tail[p + 1];
        for (int k = 0; k < nv; ++k) {
            if (!rec.valid[j0][k] || !rec.valid[j1][k]) continue;
            for (int s : {+1, -1}) {
                const cplx w0 = unwind(rec.gamma[j0][k], coeff[k], s, rec.t_samples[j0]);
                const cplx w1 = unwind(rec.gamma[j1][k], coeff[k], s, rec.t_samples[j1]);
                (s > 0 ? drift_plus[k] : drift_minus[k]) += std::norm(w1 - w0);
            }
        }
    }
    double total_plus = 0.0, total_minus = 0.0;
    for (int k = 0; k < nv; ++k) {
        total_plus += drift_plus[k];
        total_minus += drift_minus[k];
    }
    const int sign = opts.sign_override != 0
                         ? opts.sign_override
                         : (total_minus < total_plus ? -1 : +1);

    ScatteringProfile out;
    out.v = rec.v_samples;
    out.xi.assign(nv, 0.0);
    out.W.assign(nv, 0.0);
    out.coeff = coeff;
    out.valid.assign(nv, 0);
    out.sign = sign;
    out.drift.assign(nv, 0.0);

    // amplitude scale at the latest time, for the informative-node cutoff
    double amp_max = 0.0;
    for (int k = 0; k < nv; ++k)
        if (rec.valid[tail.back()][k])
            amp_max = std::max(amp_max, std::abs(rec.gamma[tail.back()][k]));

    std::string drifting;
    for (int k = 0; k < nv; ++k) {
        // last two valid tail samples for this node
        int j1 = -1, j0 = -1;
        for (int p = static_cast<int>(tail.size()) - 1; p >= 0; --p) {
            if (!rec.valid[tail[p]][k]) continue;
            if (j1 < 0) {
                j1 = tail[p];
            } else {
                j0 = tail[p];
                break;
            }
        }
        if (j1 < 0 || j0 < 0) continue;
        const double t1 = rec.t_samples[j1];
        out.W[k] = unwind(rec.gamma[j1][k], coeff[k], sign, t1);
        out.valid[k] = 1;
        out.t_extracted = std::max(out.t_extracted, t1);
        const cplx w0 = unwind(rec.gamma[j0][k], coeff[k], sign, rec.t_samples[j0]);
        const double mag = std::abs(out.W[k]);
        out.drift[k] = mag > 0.0 ? std::abs(out.W[k] - w0) / mag : 0.0;

        const bool informative = std::abs(rec.gamma[j1][k]) >= 0.05 * amp_max;
        if (informative) {
            // one global sign must fit every informative node
            const double mine = sign > 0 ? drift_plus[k] : drift_minus[k];
            const double other = sign > 0 ? drift_minus[k] : drift_plus[k];
            if (mine > 1.1 * other + 1e-30) out.sign_consistent = false;
            const double allowed =
                opts.drift_tol * std::log(t1 / rec.t_samples[j0]) / std::log(2.0);
            if (out.drift[k] > allowed)
                drifting = "scattering profile is still drifting at v = " +
                           std::to_string(rec.v_samples[k]) + " (relative step " +
                           std::to_string(out.drift[k]) + ", allowed " +
                           std::to_string(allowed) + "); run longer or reduce the data";
        }
        if (sym.v_min < rec.v_samples[k] && rec.v_samples[k] < sym.v_max)
            out.xi[k] = invert_group_velocity(sym, rec.v_samples[k]);
    }
    require(out.t_extracted > 0.0, "no velocity node has two valid late samples");
    if (!drifting.empty()) fail(drifting);
    return out;
}

cvec asymptotic_solution(const Grid& g, const DispersionSymbol& sym,
                         const ScatteringProfile& W, double t) {
    require(t >= 1.0, "asymptotic solution is defined for t >= 1");
    require(W.v.size() == W.W.size() && W.v.size() == W.coeff.size() &&
                W.v.size() == W.valid.size(),
            "scattering profile arrays differ in length");
    // roll the logarithmic phase forward and reuse the ansatz reconstruction
    ProfileRow row;
    row.t = t;
    row.v = W.v;
    row.valid = W.valid;
    row.gamma.resize(W.W.size());
    for (size_t k = 0; k < W.W.size(); ++k) {
        const double amp2 = std::norm(W.W[k]);
        row.gamma[k] =
            W.W[k] * std::exp(-kI * (static_cast<double>(W.sign) * W.coeff[k] * amp2 *
                                     std::log(t)));
    }
    return reconstruct(g, sym, row).field;
}

State modified_wave_operator(const Grid& g, const DispersionSymbol& sym,
                             const CubicSymbol& q, const ScatteringProfile& W,
                             double t_start, const EvolveControls& controls) {
    require(t_start > 1.0, "wave operator start time must exceed 1");
    const State seeded = state_from_values(g, t_start, asymptotic_solution(g, sym, W, t_start));
    const double n0 = l2_norm_values(g, seeded.values);
    const EvolveResult run = evolve(g, sym, q, seeded, 1.0, controls);
    const double n1 = l2_norm_values(g, run.final_state.values);
    require(n1 <= 10.0 * n0,
            "backward evolution is unstable; increase the start time or reduce the data");
    return run.final_state;
}

}  // namespace dispersim
