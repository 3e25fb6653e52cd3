#include "csamr/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace csamr::estimate {

int preferred_order(Modulation mod) {
  switch (mod) {
    case Modulation::Bpsk:
    case Modulation::Msk:
    case Modulation::Oqpsk: return 2;
    case Modulation::Qpsk: return 4;
    case Modulation::Psk8: return 8;
  }
  throw std::logic_error("bad modulation enum");
}

namespace {

// Rs = (innermost side-pair spread) / divisor. MSK's order-2 lines sit at
// ±Rs/2, so the spread itself is Rs. OQPSK's order-4 side lines land on
// ±2Rs (the half-symbol branch offset cancels the odd harmonics), hence the
// divisor 4 there. Every other pattern has its innermost pair at ±Rs.
double spread_divisor(Modulation mod, int order) {
  if (mod == Modulation::Msk && order == 2) return 1.0;
  if (mod == Modulation::Oqpsk && order == 4) return 4.0;
  return 2.0;
}

void check_line_cell(Modulation mod, int order) {
  const std::set<int> counts = npt::expected_peak_count(mod, order);
  if (counts == std::set<int>{0}) {
    throw std::invalid_argument("no discrete lines for " + to_string(mod) +
                                " at order " + std::to_string(order));
  }
}

}  // namespace

std::optional<LineAssignment> line_assignment(const npt::PeakSet& peaks,
                                              Modulation mod, int order,
                                              double bin_hz, double tol_bins,
                                              double min_spread_bins) {
  check_line_cell(mod, order);
  const auto& ps = peaks.peaks;
  if (ps.empty()) return std::nullopt;
  const double min_spread_hz = min_spread_bins * bin_hz;

  LineAssignment out;
  if (npt::has_center_line(mod, order)) {
    out.center = ps.front();
    std::vector<npt::Peak> rest(ps.begin() + 1, ps.end());
    struct Cand {
      std::size_t i, j;
      double spread;
    };
    std::vector<Cand> cands;
    const double tol_hz = tol_bins * bin_hz;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      for (std::size_t j = i + 1; j < rest.size(); ++j) {
        const double mid = 0.5 * (rest[i].freq_hz + rest[j].freq_hz);
        const double spread = std::abs(rest[i].freq_hz - rest[j].freq_hz);
        if (std::abs(mid - out.center->freq_hz) <= tol_hz &&
            spread >= min_spread_hz) {
          cands.push_back({i, j, spread});
        }
      }
    }
    if (cands.empty()) {
      if (rest.empty()) return out;  // lone centre line
      return std::nullopt;           // extra peaks, none symmetric
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.spread != b.spread) return a.spread < b.spread;
      return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    std::vector<char> used(rest.size(), 0);
    int rank = 1;
    for (const Cand& c : cands) {
      if (used[c.i] || used[c.j]) continue;
      used[c.i] = used[c.j] = 1;
      const bool i_lower = rest[c.i].freq_hz < rest[c.j].freq_hz;
      out.sides.push_back(SidePair{i_lower ? rest[c.i] : rest[c.j],
                                   i_lower ? rest[c.j] : rest[c.i], rank++});
    }
    if (out.sides.empty()) return std::nullopt;
  } else {
    // Centerless pattern: the strongest pair of mutually-distant peaks.
    const std::size_t scan = std::min<std::size_t>(ps.size(), 6);
    for (std::size_t i = 0; i < scan && out.sides.empty(); ++i) {
      for (std::size_t j = i + 1; j < scan; ++j) {
        if (std::abs(ps[i].freq_hz - ps[j].freq_hz) < min_spread_hz) continue;
        const bool i_lower = ps[i].freq_hz < ps[j].freq_hz;
        out.sides.push_back(
            SidePair{i_lower ? ps[i] : ps[j], i_lower ? ps[j] : ps[i], 1});
        break;
      }
    }
    if (out.sides.empty()) return std::nullopt;
  }
  return out;
}

ParamEstimate estimate_params(const npt::PeakSet& peaks, Modulation mod,
                              int order, double bin_hz,
                              const EstimateOptions& options) {
  check_line_cell(mod, order);
  ParamEstimate est;
  est.order_used = order;
  est.peaks_used = peaks;
  if (peaks.peaks.empty()) {
    throw InsufficientPeaksError("no peaks to estimate from", est);
  }
  const auto assign =
      line_assignment(peaks, mod, order, bin_hz, options.tol_bins,
                      options.min_spread_bins);
  const bool center_cls = npt::has_center_line(mod, order);
  if (!assign) {
    if (center_cls) {
      est.fc_center_hz = peaks.peaks.front().freq_hz / order;
      est.fc_hz = est.fc_center_hz;
      est.method = "center";
      est.partial = true;
      throw InsufficientPeaksError("no symmetric side pair about the centre",
                                   est);
    }
    throw InsufficientPeaksError("fewer peaks than the line pattern needs",
                                 est);
  }

  if (assign->center) {
    est.fc_center_hz = assign->center->freq_hz / order;
  }
  if (!assign->sides.empty()) {
    const SidePair& s1 = assign->sides.front();
    est.fc_side_hz = s1.midpoint_hz() / order;
    if (options.strict_center_side_spacing && assign->center) {
      const npt::Peak& a2 = s1.lower.magnitude >= s1.upper.magnitude
                                ? s1.lower
                                : s1.upper;
      est.rs_hz = std::abs(assign->center->freq_hz - a2.freq_hz) / 2.0;
    } else {
      est.rs_hz = s1.spread_hz() / spread_divisor(mod, order);
    }
  }
  if (est.fc_center_hz) {
    est.fc_hz = est.fc_center_hz;
    est.method = est.fc_side_hz ? "cross-check" : "center";
  } else if (est.fc_side_hz) {
    est.fc_hz = est.fc_side_hz;
    est.method = "side-average";
  }
  est.partial = !(est.fc_hz && est.rs_hz);
  return est;
}

}  // namespace csamr::estimate
