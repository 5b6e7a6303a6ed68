#include "dispersim/initial_data.hpp"

#include <algorithm>
#include <cmath>

namespace dispersim {

namespace {

// metrics for a candidate spectrum at t = 0 (where the transported-center
// operator is plain multiplication by x)
struct Metrics {
    double l2 = 0.0, x_norm = 0.0, profile_amp = 0.0;
};

Metrics measure(const Grid& g, const DispersionSymbol& sym, const cvec& spec,
                const ExponentChoice& ex) {
    Metrics m;
    m.l2 = l2_norm_spectrum(g, spec);

    cvec w(g.n);
    for (int i = 0; i < g.n; ++i)
        w[i] = std::pow(jbracket(g.xi[i]), ex.s0) * spec[i];
    const double n0 = l2_norm_spectrum(g, w);
    cvec vals, xspec;
    to_values(g, spec, vals);
    for (int i = 0; i < g.n; ++i) vals[i] *= g.x[i];
    to_spectrum(g, vals, xspec);
    for (int i = 0; i < g.n; ++i)
        xspec[i] *= std::pow(jbracket(g.xi[i]), ex.s1);
    const double n1 = l2_norm_spectrum(g, xspec);
    m.x_norm = std::sqrt(n0 * n0 + n1 * n1);

    const double unitary = g.length / std::sqrt(2.0 * kPi);
    for (int i = 0; i < g.n; ++i) {
        const double xi = g.xi[i];
        if (xi < sym.xi_min || xi > sym.xi_max) continue;
        m.profile_amp = std::max(m.profile_amp,
                                 std::abs(spec[i]) * unitary / std::sqrt(sym.a2(xi)));
    }
    return m;
}

}  // namespace

InitialData make_data(const std::string& kind, const DataParams& p, const Grid& g,
                      const DispersionSymbol& sym) {
    require(std::isfinite(p.epsilon) && p.epsilon >= 0.0,
            "data size must be finite and nonnegative");
    require(p.width > 0.0, "envelope width must be positive");

    cvec spec(g.n, cplx(0.0));
    if (kind == "gaussian") {
        cvec vals(g.n);
        for (int i = 0; i < g.n; ++i) {
            const double y = (g.x[i] - p.x0) / p.width;
            const double ph = p.xi0 * g.x[i];
            vals[i] = std::exp(-0.5 * y * y) * cplx(std::cos(ph), std::sin(ph));
        }
        to_spectrum(g, vals, spec);
    } else if (kind == "frequency_localized_bump") {
        require(p.band_lo < p.band_hi, "frequency band must have positive width");
        const double keep = g.dxi * (g.n / 4);  // band must survive dealiasing
        require(p.band_lo >= -keep && p.band_hi <= keep,
                "frequency band is outside the resolved (dealiased) range");
        const double mid = 0.5 * (p.band_lo + p.band_hi);
        const double half = 0.5 * (p.band_hi - p.band_lo);
        for (int i = 0; i < g.n; ++i) {
            const double z = (g.xi[i] - mid) / half;
            if (std::abs(z) >= 1.0) continue;
            spec[i] = std::exp(-1.0 / (1.0 - z * z));
        }
    } else if (kind == "packet_superposition") {
        require(!p.velocities.empty(), "packet superposition needs velocities");
        require(p.centers.empty() || p.centers.size() == p.velocities.size(),
                "centers must be omitted or match velocities in count");
        cvec vals(g.n, cplx(0.0));
        for (std::size_t j = 0; j < p.velocities.size(); ++j) {
            const double xiv = invert_group_velocity(sym, p.velocities[j]);
            const double cj = p.centers.empty() ? 0.0 : p.centers[j];
            for (int i = 0; i < g.n; ++i) {
                const double y = (g.x[i] - cj) / p.width;
                const double ph = xiv * g.x[i];
                vals[i] += std::exp(-0.5 * y * y) * cplx(std::cos(ph), std::sin(ph));
            }
        }
        to_spectrum(g, vals, spec);
    } else {
        fail("unknown data kind: " + kind +
             " (expected gaussian, frequency_localized_bump, packet_superposition)");
    }

    InitialData out;
    out.exponents = choose_exponents(sym.sigma, p.delta);
    const Metrics raw = measure(g, sym, spec, out.exponents);
    double target;
    if (p.normalize == "xnorm")
        target = raw.x_norm;
    else if (p.normalize == "l2")
        target = raw.l2;
    else if (p.normalize == "profile")
        target = raw.profile_amp;
    else
        fail("unknown normalization: " + p.normalize +
             " (expected xnorm, l2, profile)");
    double scale = 0.0;
    if (p.epsilon > 0.0) {
        require(target > 0.0, "cannot normalize: the requested metric vanishes");
        scale = p.epsilon / target;
    }
    for (auto& v : spec) v *= scale;

    const Metrics m = measure(g, sym, spec, out.exponents);
    out.l2 = m.l2;
    out.x_norm = m.x_norm;
    out.profile_amp = m.profile_amp;
    out.state = state_from_spectrum(g, 0.0, std::move(spec));
    return out;
}

}  // namespace dispersim
