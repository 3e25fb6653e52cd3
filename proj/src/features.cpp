#include "csamr/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csamr/kernels.hpp"

namespace csamr::features {

FeatureVector extract_features(const std::map<int, SpectrumEstimate>& spectra,
                               int m) {
  if (spectra.empty()) throw std::invalid_argument("empty spectrum map");
  if (m < 5) throw std::invalid_argument("feature block size m must be >= 5");
  static constexpr int kOrders[3] = {2, 4, 8};
  for (int o : kOrders) {
    if (!spectra.count(o)) {
      throw std::invalid_argument(
          "orders {2,4,8} must all be present (use zero spectra for skips)");
    }
  }
  FeatureVector fv;
  fv.m = m;
  fv.values.reserve(3 * m);
  for (int o : kOrders) {
    const SpectrumEstimate& s = spectra.at(o);
    if (s.coeffs.size() < static_cast<std::size_t>(m)) {
      throw std::invalid_argument("spectrum shorter than feature block");
    }
    std::vector<double> mags(s.coeffs.size());
    for (std::size_t i = 0; i < mags.size(); ++i) {
      mags[i] = std::abs(s.coeffs[i]);
    }
    const double energy = kernels::norm2(std::span<const cplx>(s.coeffs));
    if (energy > 0.0) {
      for (double& v : mags) v /= energy;
    }
    std::partial_sort(mags.begin(), mags.begin() + m, mags.end(),
                      std::greater<double>());
    fv.values.insert(fv.values.end(), mags.begin(), mags.begin() + m);
  }
  return fv;
}

EnergyRatio energy_ratio(const SpectrumEstimate& spectrum, double peak_freq_hz,
                         int radius_bins) {
  const std::size_t n = spectrum.coeffs.size();
  if (n == 0) throw std::invalid_argument("empty spectrum");
  if (!(peak_freq_hz >= 0.0 && peak_freq_hz < spectrum.fs_hz)) {
    throw std::invalid_argument("peak frequency outside [0, fs)");
  }
  const double total = kernels::norm2sq(std::span<const cplx>(spectrum.coeffs));
  if (total <= 0.0) throw std::invalid_argument("spectrum has zero energy");
  const std::size_t center =
      static_cast<std::size_t>(std::llround(peak_freq_hz / spectrum.bin_hz())) %
      n;
  double peak = 0.0;
  for (int d = -radius_bins; d <= radius_bins; ++d) {
    long long k = (static_cast<long long>(center) + d) %
                  static_cast<long long>(n);
    if (k < 0) k += static_cast<long long>(n);
    peak += std::norm(spectrum.coeffs[static_cast<std::size_t>(k)]);
  }
  EnergyRatio out;
  out.r_p = peak / total;
  out.peak_freq_hz = peak_freq_hz;
  out.order = spectrum.order;
  return out;
}

}  // namespace csamr::features
