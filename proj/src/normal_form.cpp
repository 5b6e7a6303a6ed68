#include "dispersim/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace dispersim {

double normal_form_c(const DispersionSymbol& sym, double xi1, double xi2, double xi3) {
    require(std::isfinite(xi1) && std::isfinite(xi2) && std::isfinite(xi3),
            "normal form coefficient needs finite frequencies");
    // Write the alternating sums over {xi1, xi3} vs {xi2, xi4} around their
    // common midpoint M; both vanish to second order on the planes d = +/- e,
    // so divide those factors out with divided differences instead of the raw
    // quotient.
    const double M = 0.5 * (xi1 + xi3);
    const double d = 0.5 * (xi1 - xi3);
    const double e = M - xi2;        // = (xi4 - xi2)/2
    const double xi4 = (xi1 + xi3) - xi2;  // grouped to stay even under xi1<->xi3
    // |dm| = |xi4 - xi1|, |dp| = |xi4 - xi3|: distances to the two vanishing
    // factors; switch forms within 1e-3 of the output frequency scale
    const double dm = d - e, dp = d + e;
    const double w = 1e-3 * jbracket(xi4);
    double b, b1;
    if (std::abs(dm) <= w && std::abs(dp) <= w) {
        b = sym.a2(M);
        b1 = sym.a3(M);
    } else if (std::abs(dm) <= w || std::abs(dp) <= w) {
        // one vanishing factor nearby: difference across the far separation
        const double s = std::abs(dm) <= w ? 0.5 * dp : 0.5 * dm;
        b = (sym.a1(M + s) - sym.a1(M - s)) / (2.0 * s);
        b1 = (sym.a2(M + s) - sym.a2(M - s)) / (2.0 * s);
    } else {
        const double num = (sym.a(M + d) + sym.a(M - d)) - (sym.a(M + e) + sym.a(M - e));
        const double num1 =
            (sym.a1(M + d) + sym.a1(M - d)) - (sym.a1(M + e) + sym.a1(M - e));
        b = num / (dm * dp);
        b1 = num1 / (dm * dp);
    }
    require(b > 0.0,
            "second divided difference of the dispersion is not positive; "
            "the symbol is not strictly convex on the needed range");
    return b1 / b;
}

namespace {

bool in_domain(const DispersionSymbol& sym, double lo, double hi) {
    return lo >= sym.xi_min && hi <= sym.xi_max;
}

// exact per-quadruple path (kept for dense symbols and as an oracle)
cvec correction_dense(const Grid& g, const DispersionSymbol& sym, const CubicSymbol& q,
                      const cvec& uhat, double t, const DyadicPartition& part) {
    require(g.n <= 256, "exact correction path limited to N <= 256");
    const int n = g.n;
    std::vector<int> lev(n);
    for (int i = 0; i < n; ++i) lev[i] = part.magnitude_index(g.xi[i]);
    auto idx_of = [n](int k) { return k >= 0 ? k : n + k; };
    cvec out(n, cplx(0.0));
    for (int i1 = 0; i1 < n; ++i1) {
        if (uhat[i1] == cplx(0.0)) continue;
        for (int i2 = 0; i2 < n; ++i2) {
            if (uhat[i2] == cplx(0.0)) continue;
            if (std::abs(lev[i1] - lev[i2]) > 4) continue;
            for (int i3 = 0; i3 < n; ++i3) {
                if (uhat[i3] == cplx(0.0)) continue;
                const int k4 = g.kmode[i1] - g.kmode[i2] + g.kmode[i3];
                if (k4 < -n / 2 || k4 >= n / 2) continue;
                const int i4 = idx_of(k4);
                const int lo = std::min(std::min(lev[i1], lev[i2]),
                                        std::min(lev[i3], lev[i4]));
                const int hi = std::max(std::max(lev[i1], lev[i2]),
                                        std::max(lev[i3], lev[i4]));
                if (hi - lo > 4) continue;
                const cplx coef = normal_form_c(sym, g.xi[i1], g.xi[i2], g.xi[i3]) *
                                  q(g.xi[i1], g.xi[i2], g.xi[i3]);
                out[i4] += coef * uhat[i1] * std::conj(uhat[i2]) * uhat[i3];
            }
        }
    }
    for (auto& v : out) v *= t;
    return out;
}

}  // namespace

cvec apply_correction(const Grid& g, const DispersionSymbol& sym, const CubicSymbol& q,
                      const cvec& uhat, double t, const DyadicPartition& part) {
    require(static_cast<int>(uhat.size()) == g.n, "spectrum size does not match the grid");
    require(std::isfinite(t) && t > 0.0, "correction needs a positive finite time");
    if (q.kind() == CubicSymbol::Kind::kDense)
        return correction_dense(g, sym, q, uhat, t, part);

    const int n = g.n;
    cvec out(n, cplx(0.0));
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += std::norm(uhat[i]);
    if (total == 0.0) return out;

    // Blocks carrying a frozen coefficient: the dyadic side blocks, plus the
    // core split into uniform pieces of comparable relative width so the
    // freezing error stays O(mu) there too.
    struct CBlock {
        int level = 0;
        double center = 0.0;
        double mass = 0.0;
        std::vector<int> modes;
    };
    const int pieces = std::max(2, static_cast<int>(std::ceil(2.0 / part.mu)));
    std::vector<CBlock> blk(pieces + part.blocks.size() - 1);
    for (int p = 0; p < pieces; ++p)
        blk[p].center = -1.0 + (2.0 * p + 1.0) / pieces;
    for (std::size_t b = 1; b < part.blocks.size(); ++b) {
        blk[pieces + b - 1].level = part.blocks[b].level;
        blk[pieces + b - 1].center = part.blocks[b].center;
    }
    std::vector<int> lev(n);
    for (int i = 0; i < n; ++i) {
        const double xi = g.xi[i];
        lev[i] = part.magnitude_index(xi);
        int which;
        if (lev[i] == 0) {
            which = std::clamp(static_cast<int>(std::floor((xi + 1.0) * 0.5 * pieces)),
                               0, pieces - 1);
        } else {
            which = pieces + part.block_index(xi) - 1;
        }
        blk[which].modes.push_back(i);
        blk[which].mass += std::norm(uhat[i]);
    }
    const double skip = 1e-30 * total;
    std::vector<int> pop;
    for (std::size_t b = 0; b < blk.size(); ++b)
        if (blk[b].mass > skip) pop.push_back(static_cast<int>(b));
    const int P = static_cast<int>(pop.size());

    std::vector<SeparableTerm> terms = q.terms();
    if (q.kind() == CubicSymbol::Kind::kConstant) {
        SeparableTerm st;
        const double q0 = q.constant_value();
        st.f1 = [q0](double) { return q0; };
        terms = {st};
    }
    const int T = static_cast<int>(terms.size());

    // physical-space fields per populated block (term/slot-weighted variants
    // only where a factor is present; the plain field is shared otherwise)
    const Grid& gp = detail::padded_grid(g);
    std::vector<cvec> plain(P), wtd(static_cast<std::size_t>(P) * T * 3);
    cvec msmall(n), scratch;
    for (int bi = 0; bi < P; ++bi) {
        const CBlock& cb = blk[pop[bi]];
        std::fill(msmall.begin(), msmall.end(), cplx(0.0));
        for (int i : cb.modes) msmall[i] = uhat[i];
        detail::embed(g, gp, msmall, scratch);
        to_values(gp, scratch, plain[bi]);
        for (int ti = 0; ti < T; ++ti) {
            const std::function<double(double)>* fs[3] = {&terms[ti].f1, &terms[ti].f2,
                                                          &terms[ti].f3};
            for (int sl = 0; sl < 3; ++sl) {
                if (!*fs[sl]) continue;
                cvec wsmall(n, cplx(0.0));
                for (int i : cb.modes) wsmall[i] = (*fs[sl])(g.xi[i]) * uhat[i];
                detail::embed(g, gp, wsmall, scratch);
                to_values(gp, scratch, wtd[(static_cast<std::size_t>(bi) * T + ti) * 3 + sl]);
            }
        }
    }
    auto field = [&](int bi, int ti, int sl) -> const cvec& {
        const cvec& w = wtd[(static_cast<std::size_t>(bi) * T + ti) * 3 + sl];
        return w.empty() ? plain[bi] : w;
    };

    // accumulate frozen-coefficient triple products, bucketed by the output
    // level window that completes a balanced quadruple
    std::map<std::tuple<int, int, int>, cvec> buckets;
    for (int b1 = 0; b1 < P; ++b1) {
        const int l1 = blk[pop[b1]].level;
        const double c1 = blk[pop[b1]].center;
        for (int b2 = 0; b2 < P; ++b2) {
            const int l2 = blk[pop[b2]].level;
            if (std::abs(l1 - l2) > 4) continue;
            const double c2 = blk[pop[b2]].center;
            for (int b3 = 0; b3 < P; ++b3) {
                const int l3 = blk[pop[b3]].level;
                if (std::max(std::max(l1, l2), l3) - std::min(std::min(l1, l2), l3) > 4)
                    continue;
                const double c3 = blk[pop[b3]].center;
                const double c4 = c1 - c2 + c3;
                const double hull_lo = std::min(std::min(c1, c2), std::min(c3, c4));
                const double hull_hi = std::max(std::max(c1, c2), std::max(c3, c4));
                if (!in_domain(sym, hull_lo, hull_hi)) continue;  // tabulated edge
                const double coef = normal_form_c(sym, c1, c2, c3);
                if (coef == 0.0) continue;
                const int l4_lo = std::max(0, std::max(std::max(l1, l2), l3) - 4);
                const int l4_hi = std::min(part.levels - 1,
                                           std::min(std::min(l1, l2), l3) + 4);
                for (int ti = 0; ti < T; ++ti) {
                    cvec& acc = buckets[{ti, l4_lo, l4_hi}];
                    if (acc.empty()) acc.assign(gp.n, cplx(0.0));
                    const cvec& A = field(b1, ti, 0);
                    const cvec& B = field(b2, ti, 1);
                    const cvec& C = field(b3, ti, 2);
                    for (int j = 0; j < gp.n; ++j)
                        acc[j] += coef * A[j] * std::conj(B[j]) * C[j];
                }
            }
        }
    }

    cvec W, band;
    for (auto& [key, acc] : buckets) {
        const auto [ti, l4_lo, l4_hi] = key;
        to_spectrum(gp, acc, W);
        detail::restrict_band(g, gp, W, band);
        const auto& f4 = terms[ti].f4;
        for (int i = 0; i < n; ++i) {
            if (lev[i] < l4_lo || lev[i] > l4_hi) continue;
            out[i] += f4 ? f4(g.xi[i]) * band[i] : band[i];
        }
    }
    for (auto& v : out) v *= t;
    return out;
}

}  // namespace dispersim
