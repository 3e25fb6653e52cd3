#include "csamr/types.hpp"

#include <cmath>
#include <stdexcept>

namespace csamr {

int phase_count(Modulation m) {
  switch (m) {
    case Modulation::Bpsk: return 2;
    case Modulation::Qpsk: return 4;
    case Modulation::Psk8: return 8;
    case Modulation::Oqpsk:
    case Modulation::Msk: return 0;
  }
  throw std::logic_error("bad modulation enum");
}

std::string to_string(Modulation m) {
  switch (m) {
    case Modulation::Bpsk: return "BPSK";
    case Modulation::Qpsk: return "QPSK";
    case Modulation::Psk8: return "8PSK";
    case Modulation::Oqpsk: return "OQPSK";
    case Modulation::Msk: return "MSK";
  }
  throw std::logic_error("bad modulation enum");
}

Modulation modulation_from_string(const std::string& name) {
  for (Modulation m : kAllModulations) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown modulation: " + name);
}

int SignalParams::sps() const {
  double ratio = fs_hz / rs_hz;
  int n = static_cast<int>(std::lround(ratio));
  if (n < 2 || std::abs(ratio - n) > 1e-9 * ratio) {
    throw std::invalid_argument(
        "samples per symbol fs/rs must be an integer >= 2");
  }
  return n;
}

int SignalParams::length() const { return n_symbols * sps(); }

void SignalParams::validate() const {
  if (!(fc_hz > 0) || !(rs_hz > 0) || !(fs_hz > 0)) {
    throw std::invalid_argument("fc, rs, fs must be positive");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("roll-off alpha must lie in (0,1)");
  }
  if (n_symbols < 1) throw std::invalid_argument("n_symbols must be >= 1");
  if (!(amplitude > 0)) throw std::invalid_argument("amplitude must be > 0");
  (void)sps();  // integer check
  if (!(fs_hz > 2.0 * (fc_hz + 0.5 * (1.0 + alpha) * rs_hz))) {
    throw std::invalid_argument("fs too low: signal band would alias");
  }
  // Keeps every scored line of the order-8 transform (centre plus the
  // |k| <= 2 side lines) inside [0, fs).
  if (!(8.0 * fc_hz + 2.0 * rs_hz < fs_hz)) {
    throw std::invalid_argument(
        "fs too low: order-8 spectral lines would wrap");
  }
}

}  // namespace csamr
