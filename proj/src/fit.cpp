#include "dispersim/fit.hpp"

#include <cmath>

namespace dispersim {

FitLine fit_line(const rvec& x, const rvec& y) {
    require(x.size() == y.size() && x.size() >= 2, "line fit needs at least two points");
    const int n = static_cast<int>(x.size());
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    require(sxx > 0.0, "line fit abscissae are all equal");
    FitLine out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    return out;
}

FitReport fit_exponent(const std::string& quantity, const rvec& t, const rvec& value,
                       double t_lo, double t_hi) {
    require(t.size() == value.size(), "time and value series differ in length");
    require(t_lo < t_hi, "degenerate fit window");
    FitReport rep;
    rep.quantity = quantity;
    rep.t_lo = t_lo;
    rep.t_hi = t_hi;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        require(t[i] > 0.0, "fit window contains a nonpositive time");
        require(value[i] > 0.0, "fit series contains a nonpositive value");
        rep.t.push_back(t[i]);
        rep.value.push_back(value[i]);
    }
    require(rep.t.size() >= 5, "fit window holds fewer than five points");

    rvec lx(rep.t.size()), ly(rep.t.size());
    for (size_t i = 0; i < rep.t.size(); ++i) {
        lx[i] = std::log(rep.t[i]);
        ly[i] = std::log(rep.value[i]);
    }
    const FitLine line = fit_line(lx, ly);
    rep.slope = line.slope;
    rep.intercept = line.intercept;

    double ss_res = 0.0, ss_tot = 0.0, my = 0.0;
    for (double v : ly) my += v;
    my /= static_cast<double>(ly.size());
    for (size_t i = 0; i < ly.size(); ++i) {
        const double fitv = rep.intercept + rep.slope * lx[i];
        ss_res += (ly[i] - fitv) * (ly[i] - fitv);
        ss_tot += (ly[i] - my) * (ly[i] - my);
    }
    // constant series: ss_tot is round-off noise, define the fit as perfect
    const double floor = 1e-20 * static_cast<double>(ly.size()) * (1.0 + my * my);
    rep.r2 = ss_tot > floor ? 1.0 - ss_res / ss_tot : 1.0;
    return rep;
}

cplx quadratic_ls_derivative(const rvec& s, const cvec& y, double s0) {
    require(s.size() == y.size(), "abscissae and values differ in length");
    const int n = static_cast<int>(s.size());
    require(n >= 3, "quadratic fit needs at least three points");

    // normal equations for the basis {1, d, d^2}, d = s - s0
    double m[3][3] = {};
    cplx b[3] = {};
    for (int i = 0; i < n; ++i) {
        const double d = s[i] - s0;
        const double p[3] = {1.0, d, d * d};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) m[r][c] += p[r] * p[c];
            b[r] += p[r] * y[i];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[perm[r]][col]) > std::abs(m[perm[piv]][col])) piv = r;
        std::swap(perm[col], perm[piv]);
        const double diag = m[perm[col]][col];
        require(std::abs(diag) > 1e-14, "quadratic fit abscissae are degenerate");
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[perm[r]][col] / diag;
            for (int c = col; c < 3; ++c) m[perm[r]][c] -= f * m[perm[col]][c];
            b[perm[r]] -= f * b[perm[col]];
        }
    }
    cplx coef[3];
    for (int col = 2; col >= 0; --col) {
        cplx acc = b[perm[col]];
        for (int c = col + 1; c < 3; ++c) acc -= m[perm[col]][c] * coef[c];
        coef[col] = acc / m[perm[col]][col];
    }
    return coef[1];  // d/ds at s0
}

}  // namespace dispersim
