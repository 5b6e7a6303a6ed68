#pragma once

#include "dispersim/common.hpp"
#include "dispersim/grid.hpp"
#include "dispersim/partition.hpp"

#include <functional>
#include <vector>

namespace dispersim {

// One rank-1 term of a separable interaction symbol: factors applied to the
// three input frequencies and to the output frequency xi1 - xi2 + xi3.
struct SeparableTerm {
    std::function<double(double)> f1, f2, f3, f4;
};

// Cubic interaction symbol q(xi1, xi2, xi3).
class CubicSymbol {
  public:
    enum class Kind { kConstant, kSeparable, kDense };

    static CubicSymbol constant(double q0);
    static CubicSymbol separable(std::vector<SeparableTerm> terms);
    static CubicSymbol dense(std::function<cplx(double, double, double)> q,
                             bool real_on_diagonal);

    Kind kind() const { return kind_; }
    double constant_value() const { return q0_; }
    const std::vector<SeparableTerm>& terms() const { return terms_; }
    bool real_on_diagonal() const { return real_on_diagonal_; }

    cplx operator()(double xi1, double xi2, double xi3) const;

  private:
    Kind kind_ = Kind::kConstant;
    double q0_ = 1.0;
    std::vector<SeparableTerm> terms_;
    std::function<cplx(double, double, double)> dense_;
    bool real_on_diagonal_ = true;
};

// Exact trilinear convolution out[k] = sum_{k1-k2+k3=k} q uhat1 conj(uhat2) uhat3,
// with integer (unwrapped) mode arithmetic; output truncated to the grid band.
// Constant and separable kinds run through zero-padded transforms (exact for
// this cubic order); the dense kind uses the direct sum and is limited to
// N <= 256.
cvec apply_cubic(const Grid& g, const CubicSymbol& q, const cvec& uhat);

// q(xi, xi, xi)
cplx diagonal_coefficient(const CubicSymbol& q, double xi);

// Multiplier mu(xi) with Q(e^{i xi x}) = mu e^{i xi x} measured on the grid;
// the asymptotic-phase comparisons use this value, which pins the discrete
// normalization independent of transform conventions.
double calibrate_diagonal(const CubicSymbol& q, const Grid& g, double xi);

struct BalancedSplit {
    cvec balanced;
    cvec unbalanced;
};

// Splits apply_cubic into the part carried by frequency quadruples whose
// magnitude levels differ by at most 4 (balanced) and the exact remainder.
BalancedSplit split_balanced(const Grid& g, const CubicSymbol& q, const cvec& uhat,
                             const DyadicPartition& part);

namespace detail {
// Shared zero-padding machinery (also used by the correction operator).
const Grid& padded_grid(const Grid& g);
void embed(const Grid& g, const Grid& gp, const cvec& s, cvec& out);
void restrict_band(const Grid& g, const Grid& gp, const cvec& s, cvec& out);
}  // namespace detail

}  // namespace dispersim
