#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dispersim {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr cplx kI{0.0, 1.0};

// <xi> = sqrt(1 + xi^2), the Japanese bracket used by all weighted norms.
inline double jbracket(double xi) { return std::sqrt(1.0 + xi * xi); }

struct DispersimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw DispersimError(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

}  // namespace dispersim
