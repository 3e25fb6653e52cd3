#include "csamr/npt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csamr/fft.hpp"
#include "csamr/kernels.hpp"

namespace csamr::npt {

void validate_order(int order) {
  for (int n : kOrders) {
    if (order == n) return;
  }
  throw std::invalid_argument("nonlinearity order must be one of {1,2,4,8}");
}

std::vector<cplx> raise_power(std::span<const cplx> samples, int order) {
  validate_order(order);
  std::vector<cplx> out(samples.size());
  kernels::pow_elementwise(samples, order, out);
  return out;
}

SpectrumEstimate nyquist_spectrum(const BasebandRecord& record, int order) {
  validate_order(order);
  if (record.samples.size() < 256) {
    throw std::invalid_argument("record too short for a spectrum (L >= 256)");
  }
  SpectrumEstimate est;
  est.coeffs.resize(record.samples.size());
  const std::vector<cplx> z = raise_power(record.samples, order);
  fft::forward(std::span<const cplx>(z), std::span<cplx>(est.coeffs));
  est.order = order;
  est.fs_hz = record.params.fs_hz;
  est.report.method = "fft";
  return est;
}

PeakSet detect_peaks(const SpectrumEstimate& spectrum, double eta,
                     int merge_radius) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("eta must lie in (0,1)");
  }
  const std::size_t n = spectrum.coeffs.size();
  PeakSet out;
  out.eta = eta;
  if (n == 0) return out;

  std::vector<double> mag(n);
  double max_mag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mag[i] = std::abs(spectrum.coeffs[i]);
    max_mag = std::max(max_mag, mag[i]);
  }
  if (max_mag == 0.0) return out;
  out.threshold = eta * max_mag;

  // Circular local maxima above the threshold; plateaus keep their leftmost
  // sample (>= towards the predecessor, > towards the successor).
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = mag[(i + n - 1) % n];
    const double next = mag[(i + 1) % n];
    if (mag[i] >= out.threshold && mag[i] >= prev && mag[i] > next) {
      cand.push_back(i);
    }
  }
  std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
    if (mag[a] != mag[b]) return mag[a] > mag[b];
    return a < b;
  });

  auto circ_dist = [n](std::size_t a, std::size_t b) {
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, n - d);
  };
  std::vector<std::size_t> kept;
  for (std::size_t c : cand) {
    bool merged = false;
    for (std::size_t k : kept) {
      if (circ_dist(c, k) <= static_cast<std::size_t>(merge_radius)) {
        merged = true;
        break;
      }
    }
    if (!merged) kept.push_back(c);
  }
  for (std::size_t k : kept) {
    out.peaks.push_back(Peak{spectrum.freq_of_bin(k), k, mag[k]});
  }
  return out;
}

namespace {

struct Cell {
  bool defined = false;
  std::set<int> counts;
  bool center = false;
  // side-line offsets from N*fc in units of rs: 1.0 for the integer grid,
  // 0.5 for the half-integer grid; 0 when the cell has no side lines.
  double side_step = 0.0;
};

Cell cell_info(Modulation mod, int order) {
  validate_order(order);
  if (order == 1) return {true, {0}, false, 0.0};
  switch (mod) {
    case Modulation::Bpsk:
      if (order == 2) return {true, {3}, true, 1.0};
      return {true, {3, 5}, true, 1.0};  // orders 4 and 8
    case Modulation::Qpsk:
      if (order == 2) return {true, {0}, false, 0.0};
      return {true, {3, 5}, true, 1.0};
    case Modulation::Psk8:
      if (order == 8) return {true, {3, 5}, true, 1.0};
      return {true, {0}, false, 0.0};
    case Modulation::Oqpsk:
      if (order == 2) return {true, {2}, false, 1.0};
      if (order == 4) return {true, {3, 5}, true, 1.0};
      return {false, {}, false, 0.0};
    case Modulation::Msk:
      if (order == 2) return {true, {2}, false, 0.5};
      if (order == 4) return {true, {2}, false, 1.0};
      return {false, {}, false, 0.0};
  }
  throw std::logic_error("bad modulation enum");
}

}  // namespace

bool is_defined_cell(Modulation mod, int order) {
  return cell_info(mod, order).defined;
}

std::set<int> expected_peak_count(Modulation mod, int order) {
  const Cell cell = cell_info(mod, order);
  if (!cell.defined) {
    throw std::domain_error("peak count unspecified for " + to_string(mod) +
                            " at order " + std::to_string(order));
  }
  return cell.counts;
}

bool has_center_line(Modulation mod, int order) {
  return cell_info(mod, order).center;
}

std::vector<double> line_frequencies(Modulation mod, int order, double fc_hz,
                                     double rs_hz, int kmax) {
  const Cell cell = cell_info(mod, order);
  if (!cell.defined) {
    throw std::domain_error("line pattern unspecified for " + to_string(mod) +
                            " at order " + std::to_string(order));
  }
  std::vector<double> lines;
  const double center = order * fc_hz;
  if (cell.center) lines.push_back(center);
  if (cell.side_step > 0.0) {
    for (int k = 1; k <= kmax; ++k) {
      const double off =
          (static_cast<double>(k) - (cell.side_step == 0.5 ? 0.5 : 0.0)) *
          rs_hz;
      lines.push_back(center - off);
      lines.push_back(center + off);
    }
  }
  std::sort(lines.begin(), lines.end());
  return lines;
}

double local_background(const SpectrumEstimate& spectrum, std::size_t bin,
                        int inner, int outer) {
  const std::size_t n = spectrum.coeffs.size();
  if (n == 0) return 0.0;
  std::vector<double> ring;
  ring.reserve(2 * (outer - inner + 1));
  for (int d = inner; d <= outer; ++d) {
    ring.push_back(std::abs(spectrum.coeffs[(bin + d) % n]));
    ring.push_back(
        std::abs(spectrum.coeffs[(bin + n - static_cast<std::size_t>(d)) % n]));
  }
  std::nth_element(ring.begin(), ring.begin() + ring.size() / 2, ring.end());
  return ring[ring.size() / 2];
}

PeakSet filter_lines(const SpectrumEstimate& spectrum, const PeakSet& peaks,
                     double line_factor) {
  PeakSet out;
  out.eta = peaks.eta;
  out.threshold = peaks.threshold;
  for (const Peak& p : peaks.peaks) {
    const double bg = local_background(spectrum, p.bin);
    if (bg == 0.0 || p.magnitude >= line_factor * bg) out.peaks.push_back(p);
  }
  return out;
}

int scored_peak_count(const SpectrumEstimate& spectrum, double eta,
                      int merge_radius, double line_factor) {
  const PeakSet peaks = detect_peaks(spectrum, eta, merge_radius);
  return static_cast<int>(
      filter_lines(spectrum, peaks, line_factor).peaks.size());
}

}  // namespace csamr::npt
