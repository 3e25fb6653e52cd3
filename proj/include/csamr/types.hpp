#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace csamr {

using cplx = std::complex<double>;

/// SNR value meaning "no noise applied".
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

enum class Modulation { Bpsk, Qpsk, Psk8, Oqpsk, Msk };

inline constexpr std::array<Modulation, 5> kAllModulations = {
    Modulation::Bpsk, Modulation::Qpsk, Modulation::Psk8, Modulation::Oqpsk,
    Modulation::Msk};

/// Number of distinct carrier phases for the MPSK family; 0 for the offset
/// modulations (OQPSK, MSK) which carry no order parameter.
int phase_count(Modulation m);

std::string to_string(Modulation m);
Modulation modulation_from_string(const std::string& name);

/// Generation parameters for one complex passband record sampled uniformly at
/// fs_hz. The sample count is n_symbols * (fs_hz / rs_hz).
struct SignalParams {
  double fc_hz = 500.0;   // carrier frequency
  double rs_hz = 800.0;   // symbol rate
  double fs_hz = 6400.0;  // uniform sampling rate
  double alpha = 0.5;     // SRRC roll-off, in (0,1)
  int n_symbols = 1024;
  double amplitude = 1.0;
  double snr_db = kNoiseless;  // channel SNR; +inf means noiseless
  std::uint64_t seed = 0;

  /// Samples per symbol; validate() guarantees this is an exact integer.
  int sps() const;
  /// Record length L = n_symbols * sps().
  int length() const;

  /// Throws std::invalid_argument when any precondition fails:
  ///   - fs/rs must be a positive integer >= 2
  ///   - alpha in the open interval (0,1)
  ///   - fs > 2*(fc + (1+alpha)*rs/2), so the untransformed signal is
  ///     alias-free, and 8*fc + 2*rs < fs so every scored spectral line of
  ///     the order-8 transform stays inside [0, fs).
  void validate() const;
};

struct BasebandRecord {
  std::vector<cplx> samples;
  SignalParams params;
  Modulation modulation = Modulation::Bpsk;
  /// Empirical SNR measured when AWGN was applied; +inf while noiseless.
  double achieved_snr_db = kNoiseless;

  std::size_t size() const { return samples.size(); }
};

struct SolverReport {
  std::string method;  // "fft", "admm-eq", "admm-res", "pdhg"
  int iterations = 0;
  double residual = 0.0;   // ||y - A f||_2 at exit
  double objective = 0.0;  // l1 objective at exit
  bool converged = true;
};

/// Length-L DFT-coefficient vector of the order-N transform of a record.
/// Bin k maps to frequency k * fs / L on [0, fs). Produced either by the
/// full-rate FFT oracle or by sparse reconstruction from measurements.
struct SpectrumEstimate {
  std::vector<cplx> coeffs;
  int order = 1;
  double fs_hz = 0.0;
  bool smoothed = false;  // coeffs have been passed through the smoother
  SolverReport report;

  std::size_t size() const { return coeffs.size(); }
  double bin_hz() const { return fs_hz / static_cast<double>(coeffs.size()); }
  double freq_of_bin(std::size_t k) const {
    return static_cast<double>(k) * bin_hz();
  }
};

}  // namespace csamr
