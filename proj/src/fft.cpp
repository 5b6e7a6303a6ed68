#include "dispersim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace dispersim {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Plan creation is not thread-safe in FFTW; execution via the new-array
// interface is. FFTW_UNALIGNED lets the cached plans run on any buffer.
std::mutex g_plan_mutex;
std::map<int, PlanPair>& plan_cache() {
  static std::map<int, PlanPair> cache;
  return cache;
}

PlanPair get_plans(int n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  cvec scratch(n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  PlanPair pp;
  pp.fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  pp.bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  require(pp.fwd && pp.bwd, "fftw plan creation failed for n=" + std::to_string(n));
  cache[n] = pp;
  return pp;
}

}  // namespace

void fft_forward(cvec& a) {
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(get_plans(static_cast<int>(a.size())).fwd, p, p);
}

void fft_backward(cvec& a) {
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(get_plans(static_cast<int>(a.size())).bwd, p, p);
}

}  // namespace dispersim
