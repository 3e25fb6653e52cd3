#pragma once

#include <set>
#include <span>
#include <vector>

#include "csamr/types.hpp"

namespace csamr::npt {

/// Valid nonlinearity orders; 1 is the identity ("no transform").
inline constexpr std::array<int, 4> kOrders = {1, 2, 4, 8};

/// Throws std::invalid_argument unless order is one of {1, 2, 4, 8}.
void validate_order(int order);

/// Elementwise Nth power, length preserved.
std::vector<cplx> raise_power(std::span<const cplx> samples, int order);

/// Unitary DFT of the order-N transform of the record (the full-rate
/// "oracle" spectrum). Requires record length >= 256.
SpectrumEstimate nyquist_spectrum(const BasebandRecord& record, int order);

struct Peak {
  double freq_hz = 0.0;
  std::size_t bin = 0;
  double magnitude = 0.0;
};

struct PeakSet {
  std::vector<Peak> peaks;  // sorted by descending magnitude
  double threshold = 0.0;   // absolute detection level eta * max
  double eta = 0.0;
};

/// Local maxima of |spectrum| at or above eta * max|spectrum| (circular
/// neighbourhoods), merged so no two survivors are within merge_radius bins,
/// sorted by descending magnitude. An all-zero spectrum yields an empty set.
/// Requires 0 < eta < 1.
PeakSet detect_peaks(const SpectrumEstimate& spectrum, double eta,
                     int merge_radius = 3);

/// True when the (modulation, order) cell has a defined discrete-peak count
/// (OQPSK and MSK at order 8 are undefined).
bool is_defined_cell(Modulation mod, int order);

/// Admissible numbers of discrete peaks for the cell, e.g. {3}, {0}, {2} or
/// {3,5}. Throws std::domain_error for the undefined cells.
std::set<int> expected_peak_count(Modulation mod, int order);

/// Whether the cell's line pattern includes the centre line at N*fc.
bool has_center_line(Modulation mod, int order);

/// Admissible line frequencies for the cell: the centre line (when present)
/// plus the symmetric side lines up to |k| <= kmax on the class's offset
/// grid (integer multiples of Rs, or half-integer for MSK at order 2).
/// Empty for zero-count cells; throws std::domain_error for undefined cells.
std::vector<double> line_frequencies(Modulation mod, int order, double fc_hz,
                                     double rs_hz, int kmax = 2);

/// Median magnitude over a ring of bins around `bin` (circular distances
/// inner..outer on both sides) — the local continuous-spectrum level.
double local_background(const SpectrumEstimate& spectrum, std::size_t bin,
                        int inner = 5, int outer = 45);

/// Keeps only peaks that stand out from their local background by at least
/// line_factor. A discrete line concentrates energy in a single bin, so it
/// towers over the neighbouring bins; a maximum of the continuous spectrum
/// does not.
PeakSet filter_lines(const SpectrumEstimate& spectrum, const PeakSet& peaks,
                     double line_factor = 4.5);

/// Discrete-peak count used when scoring a (modulation, order) cell:
/// detect_peaks at the relative threshold, then the line filter. The filter
/// is what lets line-free spectra score zero — a relative threshold alone
/// always returns at least one local maximum.
int scored_peak_count(const SpectrumEstimate& spectrum, double eta,
                      int merge_radius = 3, double line_factor = 4.5);

}  // namespace csamr::npt
