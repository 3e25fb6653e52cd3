#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "csamr/types.hpp"

namespace csamr::siggen {

/// Square-root raised cosine impulse response, odd length
/// span_symbols*sps + 1, normalized to unit energy (sum of squared taps = 1).
/// The removable singularities at t = 0 and |t| = Ts/(4*alpha) are evaluated
/// by their analytic limits.
///
/// Preconditions: alpha in (0,1), sps >= 2, span_symbols even and >= 6.
std::vector<double> srrc_pulse(double alpha, int sps, int span_symbols);

/// Test hook: force the symbol/bit sequences instead of drawing them from the
/// seeded RNG. mpsk_symbols are indices in {1..M}; a_bits/b_bits are ±1.
struct SymbolOverride {
  std::vector<int> mpsk_symbols;
  std::vector<int> a_bits;
  std::vector<int> b_bits;
};

/// Synthesizes a noiseless record of exactly n_symbols*sps samples:
///   - MPSK: i.i.d. uniform symbols, SRRC shaping (span 8, group-delay
///     compensated trim), complex exponential carrier.
///   - OQPSK: ±1 branch sequences, quadrature branch delayed by half a
///     symbol, SRRC shaping.
///   - MSK: rectangular branch pulses weighted by the quarter-rate sinusoid,
///     branches offset by one symbol period (constant envelope, continuous
///     phase).
/// Mean power is amplitude^2; params.snr_db is reset to +inf in the returned
/// record (use add_awgn for the channel). Deterministic for a fixed seed.
BasebandRecord synthesize(Modulation mod, const SignalParams& params,
                          const SymbolOverride* hook = nullptr);

/// Adds circularly-symmetric complex white Gaussian noise at the requested
/// SNR (defined against the record's mean power) and stores the achieved
/// empirical SNR. snr_db = +inf returns the input unchanged.
BasebandRecord add_awgn(const BasebandRecord& record, double snr_db,
                        std::uint64_t seed);

/// Mean per-sample power (1/L) * sum |s|^2.
double mean_power(std::span<const cplx> samples);

}  // namespace csamr::siggen
