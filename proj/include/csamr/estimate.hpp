#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "csamr/npt.hpp"
#include "csamr/types.hpp"

namespace csamr::estimate {

/// Carrier / symbol-rate estimate recovered from detected peak locations.
struct ParamEstimate {
  std::optional<double> fc_hz;
  std::optional<double> rs_hz;
  std::optional<double> fc_center_hz;  // centre-line route N*fc / N
  std::optional<double> fc_side_hz;    // side-average route (A2+A3)/(2N)
  int order_used = 0;
  std::string method;  // "center", "side-average", "cross-check"
  bool partial = false;
  npt::PeakSet peaks_used;
};

/// Raised when the peak set cannot support the class's line structure; any
/// partially derivable estimate rides along.
class InsufficientPeaksError : public std::runtime_error {
 public:
  InsufficientPeaksError(const std::string& what, ParamEstimate partial)
      : std::runtime_error(what), partial_estimate(std::move(partial)) {}
  ParamEstimate partial_estimate;
};

struct SidePair {
  npt::Peak lower, upper;
  int rank = 1;  // 1 = innermost symmetric pair
  double spread_hz() const { return upper.freq_hz - lower.freq_hz; }
  double midpoint_hz() const { return 0.5 * (lower.freq_hz + upper.freq_hz); }
};

struct LineAssignment {
  std::optional<npt::Peak> center;
  std::vector<SidePair> sides;  // rank-ascending
};

/// Labels peaks against the class's line pattern: the strongest peak is the
/// centre (when the pattern has one) and side lines are the best symmetric
/// pairs about it, innermost first. Centerless patterns (OQPSK order 2, MSK
/// orders 2 and 4) pair the two strongest mutually-distant peaks. Pairs
/// closer than min_spread_bins are ignored — side lines are at least half a
/// symbol rate apart, while solver/smoothing artifacts hug the lines.
/// Returns nullopt when extra peaks exist but no pair qualifies.
std::optional<LineAssignment> line_assignment(const npt::PeakSet& peaks,
                                              Modulation mod, int order,
                                              double bin_hz,
                                              double tol_bins = 2.0,
                                              double min_spread_bins = 8.0);

struct EstimateOptions {
  double tol_bins = 2.0;
  double min_spread_bins = 8.0;
  /// Reproduces the centre-minus-side spacing rule |A1 - A2| / 2 instead of
  /// half the side-pair spread. On exact line positions this yields Rs/2 for
  /// the centre-bearing classes; kept behind this flag.
  bool strict_center_side_spacing = false;
};

/// fc and Rs from labeled lines: fc = centre/N cross-checked against the
/// side-pair average (A2+A3)/(2N); Rs = half the innermost side-pair spread
/// (the full spread for MSK at order 2, whose lines sit at ±Rs/2). With only
/// the centre line available, fc is returned and the estimate is flagged
/// partial. Throws InsufficientPeaksError when nothing can be derived, and
/// std::invalid_argument for cells without discrete lines.
ParamEstimate estimate_params(const npt::PeakSet& peaks, Modulation mod,
                              int order, double bin_hz,
                              const EstimateOptions& options = {});

/// Order whose line pattern the class's estimator reads: 2 for BPSK, MSK
/// and OQPSK (whose order-2 pair is far stronger than its order-4 sides),
/// 4 for QPSK, 8 for 8PSK (8PSK has no lower-order lines).
int preferred_order(Modulation mod);

}  // namespace csamr::estimate
