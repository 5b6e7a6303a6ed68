#pragma once

#include "dispersim/common.hpp"

#include <algorithm>
#include <utility>

namespace dispersim {

// Natural cubic spline through strictly increasing sample points.
class CubicSpline {
  public:
    CubicSpline() = default;

    CubicSpline(rvec x, rvec y) : x_(std::move(x)), y_(std::move(y)) {
        const int n = static_cast<int>(x_.size());
        require(n >= 3, "cubic spline needs at least 3 samples");
        require(y_.size() == x_.size(), "cubic spline sample size mismatch");
        for (int i = 1; i < n; ++i)
            require(x_[i] > x_[i - 1], "cubic spline abscissae must be strictly increasing");

        // second derivatives at the nodes, natural boundary conditions
        m_.assign(n, 0.0);
        rvec diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        for (int i = 1; i < n - 1; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double hr = x_[i + 1] - x_[i];
            diag[i] = 2.0 * (hl + hr);
            upper[i] = hr;
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
        }
        // Thomas algorithm (lower diagonal for row i is hl, zero in rows 0 and n-1)
        for (int i = 1; i < n - 1; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double w = hl / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (int i = n - 2; i >= 1; --i) m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
    }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

    double value(double t) const {
        const int i = interval(t);
        const double h = x_[i + 1] - x_[i];
        const double s = t - x_[i];
        const double b = (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
        return y_[i] + s * (b + s * (0.5 * m_[i] + s * (m_[i + 1] - m_[i]) / (6.0 * h)));
    }

    double derivative(double t) const {
        const int i = interval(t);
        const double h = x_[i + 1] - x_[i];
        const double s = t - x_[i];
        const double b = (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
        return b + s * (m_[i] + s * (m_[i + 1] - m_[i]) / (2.0 * h));
    }

  private:
    int interval(double t) const {
        require(t >= x_.front() && t <= x_.back(),
                "evaluation point outside the tabulated range");
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        int i = static_cast<int>(it - x_.begin()) - 1;
        return std::clamp(i, 0, static_cast<int>(x_.size()) - 2);
    }

    rvec x_, y_, m_;
};

}  // namespace dispersim
