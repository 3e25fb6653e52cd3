#pragma once

#include <map>
#include <optional>
#include <vector>

#include "csamr/types.hpp"

namespace csamr::features {

/// Fixed-length classifier input: for each order in {2, 4, 8}, the m largest
/// spectral magnitudes after dividing by that spectrum's total energy
/// (sqrt of sum |f|^2), each block sorted descending, blocks concatenated in
/// order. Length is always 3*m; skipped orders appear as zero blocks.
struct FeatureVector {
  std::vector<double> values;
  int m = 0;
  std::optional<Modulation> label;
  double snr_db = kNoiseless;
};

/// Requires spectra to contain exactly the keys {2, 4, 8} (all-zero
/// coefficient vectors stand in for skipped orders) and m >= 5.
FeatureVector extract_features(const std::map<int, SpectrumEstimate>& spectra,
                               int m);

struct EnergyRatio {
  double r_p = 0.0;  // peak energy / total energy, in [0, 1]
  double peak_freq_hz = 0.0;
  int order = 0;
};

/// Fraction of total spectral energy within radius_bins of the bin nearest
/// peak_freq_hz (circular window). Throws on zero total energy or a peak
/// frequency outside [0, fs).
EnergyRatio energy_ratio(const SpectrumEstimate& spectrum, double peak_freq_hz,
                         int radius_bins = 3);

}  // namespace csamr::features
