#include "dispersim/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace dispersim {

namespace detail {

// cached 2x zero-padding grids (same length, doubled mode count)
const Grid& padded_grid(const Grid& g) {
    static std::map<std::pair<int, double>, std::unique_ptr<Grid>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(g.n, g.length);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<Grid>(Grid::make(2 * g.n, g.length))).first;
    return *it->second;
}

void embed(const Grid& g, const Grid& gp, const cvec& s, cvec& out) {
    out.assign(gp.n, cplx(0.0));
    for (int i = 0; i < g.n; ++i) {
        const int k = g.kmode[i];
        out[k >= 0 ? k : gp.n + k] = s[i];
    }
}

void restrict_band(const Grid& g, const Grid& gp, const cvec& s, cvec& out) {
    out.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const int k = g.kmode[i];
        out[i] = s[k >= 0 ? k : gp.n + k];
    }
}

}  // namespace detail

namespace {

using detail::embed;
using detail::padded_grid;
using detail::restrict_band;

constexpr int kDenseLimit = 256;

// padded physical-space values of a (optionally weighted) spectrum
void padded_values(const Grid& g, const Grid& gp, const cvec& uhat,
                   const std::function<double(double)>& weight, cvec& scratch, cvec& vals) {
    if (weight) {
        scratch.resize(g.n);
        for (int i = 0; i < g.n; ++i) scratch[i] = weight(g.xi[i]) * uhat[i];
        embed(g, gp, scratch, vals);
    } else {
        embed(g, gp, uhat, vals);
    }
    scratch = vals;
    to_values(gp, scratch, vals);
}

cvec cubic_fast(const Grid& g, const CubicSymbol& q, const cvec& uhat) {
    const Grid& gp = padded_grid(g);
    cvec out(g.n, cplx(0.0));
    cvec scratch, A, B, C, W, w(gp.n);
    if (q.kind() == CubicSymbol::Kind::kConstant) {
        padded_values(g, gp, uhat, nullptr, scratch, A);
        for (int j = 0; j < gp.n; ++j) w[j] = q.constant_value() * std::norm(A[j]) * A[j];
        to_spectrum(gp, w, W);
        restrict_band(g, gp, W, out);
        return out;
    }
    for (const auto& term : q.terms()) {
        padded_values(g, gp, uhat, term.f1, scratch, A);
        padded_values(g, gp, uhat, term.f2, scratch, B);
        padded_values(g, gp, uhat, term.f3, scratch, C);
        for (int j = 0; j < gp.n; ++j) w[j] = A[j] * std::conj(B[j]) * C[j];
        to_spectrum(gp, w, W);
        restrict_band(g, gp, W, scratch);
        if (term.f4)
            for (int i = 0; i < g.n; ++i) out[i] += term.f4(g.xi[i]) * scratch[i];
        else
            for (int i = 0; i < g.n; ++i) out[i] += scratch[i];
    }
    return out;
}

// direct triple sum with integer mode arithmetic; optional balanced-only gate
cvec cubic_dense(const Grid& g, const CubicSymbol& q, const cvec& uhat,
                 const DyadicPartition* gate) {
    require(g.n <= kDenseLimit,
            "dense cubic path limited to N <= " + std::to_string(kDenseLimit) +
                "; use a constant or separable symbol for larger grids");
    const int n = g.n;
    std::vector<int> lev(n, 0);
    if (gate)
        for (int i = 0; i < n; ++i) lev[i] = gate->magnitude_index(g.xi[i]);
    auto idx_of = [n](int k) { return k >= 0 ? k : n + k; };
    cvec out(n, cplx(0.0));
    for (int io = 0; io < n; ++io) {
        const int k = g.kmode[io];
        cplx acc(0.0);
        for (int i1 = 0; i1 < n; ++i1) {
            if (uhat[i1] == cplx(0.0)) continue;
            const int k1 = g.kmode[i1];
            for (int i3 = 0; i3 < n; ++i3) {
                if (uhat[i3] == cplx(0.0)) continue;
                const int k3 = g.kmode[i3];
                const int k2 = k1 + k3 - k;
                if (k2 < -n / 2 || k2 >= n / 2) continue;
                const int i2 = idx_of(k2);
                if (gate) {
                    const int lo = std::min(std::min(lev[i1], lev[i2]),
                                            std::min(lev[i3], lev[io]));
                    const int hi = std::max(std::max(lev[i1], lev[i2]),
                                            std::max(lev[i3], lev[io]));
                    if (hi - lo > 4) continue;
                }
                acc += q(g.xi[i1], g.xi[i2], g.xi[i3]) * uhat[i1] * std::conj(uhat[i2]) *
                       uhat[i3];
            }
        }
        out[io] = acc;
    }
    return out;
}

}  // namespace

CubicSymbol CubicSymbol::constant(double q0) {
    CubicSymbol s;
    s.kind_ = Kind::kConstant;
    s.q0_ = q0;
    s.real_on_diagonal_ = true;
    return s;
}

CubicSymbol CubicSymbol::separable(std::vector<SeparableTerm> terms) {
    require(!terms.empty(), "separable symbol needs at least one term");
    CubicSymbol s;
    s.kind_ = Kind::kSeparable;
    s.terms_ = std::move(terms);
    s.real_on_diagonal_ = true;  // real factors by construction
    return s;
}

CubicSymbol CubicSymbol::dense(std::function<cplx(double, double, double)> q,
                               bool real_on_diagonal) {
    require(static_cast<bool>(q), "dense symbol needs a callable");
    CubicSymbol s;
    s.kind_ = Kind::kDense;
    s.dense_ = std::move(q);
    s.real_on_diagonal_ = real_on_diagonal;
    return s;
}

cplx CubicSymbol::operator()(double xi1, double xi2, double xi3) const {
    switch (kind_) {
        case Kind::kConstant:
            return cplx(q0_);
        case Kind::kSeparable: {
            cplx sum(0.0);
            const double xi4 = xi1 - xi2 + xi3;
            for (const auto& t : terms_) {
                double p = 1.0;
                if (t.f1) p *= t.f1(xi1);
                if (t.f2) p *= t.f2(xi2);
                if (t.f3) p *= t.f3(xi3);
                if (t.f4) p *= t.f4(xi4);
                sum += p;
            }
            return sum;
        }
        case Kind::kDense:
            return dense_(xi1, xi2, xi3);
    }
    fail("unreachable cubic symbol kind");
}

cvec apply_cubic(const Grid& g, const CubicSymbol& q, const cvec& uhat) {
    require(static_cast<int>(uhat.size()) == g.n, "spectrum size does not match the grid");
    if (q.kind() == CubicSymbol::Kind::kDense) return cubic_dense(g, q, uhat, nullptr);
    return cubic_fast(g, q, uhat);
}

cplx diagonal_coefficient(const CubicSymbol& q, double xi) { return q(xi, xi, xi); }

double calibrate_diagonal(const CubicSymbol& q, const Grid& g, double xi) {
    const int i0 = mode_index(g, xi, 1e-6);  // must be an exact grid frequency
    cvec wave(g.n, cplx(0.0));
    wave[i0] = 1.0;
    const cvec out = apply_cubic(g, q, wave);
    const cplx mu = out[i0];
    const double tol = 1e-10 * std::max(1.0, std::abs(mu));
    for (int i = 0; i < g.n; ++i)
        require(i == i0 || std::abs(out[i]) <= tol,
                "plane-wave response is not proportional to the input (aliasing)");
    if (q.real_on_diagonal())
        require(std::abs(mu.imag()) <= tol,
                "interaction symbol is not real on the diagonal");
    return mu.real();
}

BalancedSplit split_balanced(const Grid& g, const CubicSymbol& q, const cvec& uhat,
                             const DyadicPartition& part) {
    require(static_cast<int>(uhat.size()) == g.n, "spectrum size does not match the grid");
    BalancedSplit out;
    const cvec full = apply_cubic(g, q, uhat);

    if (q.kind() == CubicSymbol::Kind::kDense) {
        out.balanced = cubic_dense(g, q, uhat, &part);
    } else {
        const Grid& gp = padded_grid(g);
        const int n = g.n;
        std::vector<int> lev(n);
        int max_lev = 0;
        for (int i = 0; i < n; ++i) {
            lev[i] = part.magnitude_index(g.xi[i]);
            max_lev = std::max(max_lev, lev[i]);
        }
        // per-level l2 mass; levels without mass cannot contribute
        rvec mass(max_lev + 1, 0.0);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            mass[lev[i]] += std::norm(uhat[i]);
            total += std::norm(uhat[i]);
        }
        const double skip = 1e-30 * total;

        std::vector<SeparableTerm> terms = q.terms();
        if (q.kind() == CubicSymbol::Kind::kConstant) {
            SeparableTerm t;
            const double q0 = q.constant_value();
            t.f1 = [q0](double) { return q0; };
            terms = {t};
        }

        out.balanced.assign(n, cplx(0.0));
        cvec m1hat(n), m2hat(n), m3hat(n), scratch, A, B, C, W, w(gp.n), band;
        for (int l1 = 0; l1 <= max_lev; ++l1) {
            if (mass[l1] <= skip) continue;
            for (int l2 = std::max(0, l1 - 4); l2 <= std::min(max_lev, l1 + 4); ++l2) {
                if (mass[l2] <= skip) continue;
                const int l3_lo = std::max(0, std::max(l1, l2) - 4);
                const int l3_hi = std::min(max_lev, std::min(l1, l2) + 4);
                for (int l3 = l3_lo; l3 <= l3_hi; ++l3) {
                    if (mass[l3] <= skip) continue;
                    // output-level window completing the balanced quadruple
                    const int l4_lo = std::max(std::max(l1, l2), l3) - 4;
                    const int l4_hi = std::min(std::min(l1, l2), l3) + 4;
                    for (int i = 0; i < n; ++i) {
                        m1hat[i] = lev[i] == l1 ? uhat[i] : cplx(0.0);
                        m2hat[i] = lev[i] == l2 ? uhat[i] : cplx(0.0);
                        m3hat[i] = lev[i] == l3 ? uhat[i] : cplx(0.0);
                    }
                    for (const auto& term : terms) {
                        padded_values(g, gp, m1hat, term.f1, scratch, A);
                        padded_values(g, gp, m2hat, term.f2, scratch, B);
                        padded_values(g, gp, m3hat, term.f3, scratch, C);
                        for (int j = 0; j < gp.n; ++j)
                            w[j] = A[j] * std::conj(B[j]) * C[j];
                        to_spectrum(gp, w, W);
                        restrict_band(g, gp, W, band);
                        for (int i = 0; i < n; ++i) {
                            if (lev[i] < l4_lo || lev[i] > l4_hi) continue;
                            out.balanced[i] +=
                                term.f4 ? term.f4(g.xi[i]) * band[i] : band[i];
                        }
                    }
                }
            }
        }
    }

    out.unbalanced.resize(g.n);
    for (int i = 0; i < g.n; ++i) out.unbalanced[i] = full[i] - out.balanced[i];
    return out;
}

}  // namespace dispersim
