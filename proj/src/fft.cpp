#include "csamr/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace csamr::fft {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Plans are created once per length under a lock and kept for the process
// lifetime; fftw_execute_dft on a shared plan with distinct arrays is
// thread-safe.
PlanPair& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> a(n), b(n);
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.fwd = fftw_plan_dft_1d(static_cast<int>(n),
                           reinterpret_cast<fftw_complex*>(a.data()),
                           reinterpret_cast<fftw_complex*>(b.data()),
                           FFTW_FORWARD, flags);
  p.bwd = fftw_plan_dft_1d(static_cast<int>(n),
                           reinterpret_cast<fftw_complex*>(a.data()),
                           reinterpret_cast<fftw_complex*>(b.data()),
                           FFTW_BACKWARD, flags);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fftw planning failed");
  return cache.emplace(n, p).first->second;
}

void run(std::span<const cplx> in, std::span<cplx> out, bool forward_dir) {
  const std::size_t n = in.size();
  if (out.size() != n) throw std::invalid_argument("fft size mismatch");
  if (n == 0) return;
  PlanPair& plans = plans_for(n);
  fftw_plan plan = forward_dir ? plans.fwd : plans.bwd;

  std::vector<cplx> tmp;
  const cplx* src = in.data();
  if (src == out.data()) {  // out-of-place plan: copy aliased input
    tmp.assign(in.begin(), in.end());
    src = tmp.data();
  }
  fftw_execute_dft(
      plan,
      reinterpret_cast<fftw_complex*>(const_cast<cplx*>(src)),
      reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

}  // namespace

void forward(std::span<const cplx> in, std::span<cplx> out) {
  run(in, out, true);
}

void inverse(std::span<const cplx> in, std::span<cplx> out) {
  run(in, out, false);
}

std::vector<cplx> forward(const std::vector<cplx>& in) {
  std::vector<cplx> out(in.size());
  forward(std::span<const cplx>(in), std::span<cplx>(out));
  return out;
}

std::vector<cplx> inverse(const std::vector<cplx>& in) {
  std::vector<cplx> out(in.size());
  inverse(std::span<const cplx>(in), std::span<cplx>(out));
  return out;
}

}  // namespace csamr::fft
