#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace csamr {

/// Deterministic random source. Distributions are derived by hand from the
/// mt19937_64 stream so a seed produces the same values on every standard
/// library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; second value of each pair is cached.
  double gaussian();

  /// Uniform integer in {0, ..., n-1}, rejection-sampled (exact).
  int uniform_int(int n);

  /// Uniform ±1.
  int sign() { return (next_u64() >> 63) ? 1 : -1; }

  /// Derives a child seed from a base seed and a path of indices
  /// (splitmix64 chaining). Used so that Monte Carlo trials get independent,
  /// schedule-invariant streams.
  static std::uint64_t mix(std::uint64_t base,
                           std::initializer_list<std::uint64_t> path);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace csamr
