#pragma once

#include <optional>
#include <span>
#include <vector>

#include "csamr/sensing.hpp"
#include "csamr/types.hpp"

namespace csamr::recon {

/// Banded piecewise-smoothing operator B: row i has 1 on the diagonal and
/// -1/(2*l_half) at offsets ±1..±l_half, truncated at the edges. It is
/// symmetric. The optional boundary renormalization rescales truncated rows
/// to zero sum.
struct SmoothingOperator {
  std::size_t size = 0;
  int l_half = 0;
  bool renormalize_boundary = false;

  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  std::vector<cplx> apply(const std::vector<cplx>& in) const;
};

/// Requires 1 <= l_half <= size/4.
SmoothingOperator build_smoothing(std::size_t size, int l_half,
                                  bool renormalize_boundary = false);

enum class ConstraintMode { Equality, Residual };

struct SolverConfig {
  ConstraintMode mode = ConstraintMode::Equality;
  /// Residual-mode ball radius ||y - A f|| <= epsilon, in the scale of y.
  /// Ignored in equality mode.
  double epsilon = 0.0;
  int max_iter = 3000;
  /// Relative stopping tolerance on the ADMM/PDHG residuals.
  double tol = 1e-6;
  /// ADMM penalty, applied to the unit-normalized problem.
  double rho = 1.0;
  bool adaptive_rho = true;
  double over_relax = 1.8;
  /// > 0 selects the analysis objective ||B f||_1 with this half-width.
  int smoothing_l = 0;
  bool renormalize_boundary = false;
};

/// Minimizes ||f||_1 (or ||B f||_1 when smoothing_l > 0) subject to
/// y = A f (equality) or ||y - A f|| <= epsilon (residual). Synthesis-form
/// problems run operator-form ADMM with exact projections; analysis-form
/// problems run a primal-dual (Chambolle-Pock) iteration. The input is
/// normalized by ||y|| internally so behaviour is scale-invariant.
///
/// Non-convergence is reported through report.converged = false with the
/// best iterate returned; no exception is thrown for that case.
SpectrumEstimate solve_bp(const sensing::ForwardOperator& op,
                          std::span<const cplx> y, const SolverConfig& config,
                          int order, double fs_hz);

/// raise_power -> measure -> solve_bp convenience pipeline.
SpectrumEstimate reconstruct_order(const BasebandRecord& record, int order,
                                   const sensing::MeasurementModel& model,
                                   const SolverConfig& config);

/// Same, starting from an existing measurement vector.
SpectrumEstimate reconstruct_order(std::span<const cplx> measurements,
                                   int order,
                                   const sensing::MeasurementModel& model,
                                   double fs_hz, const SolverConfig& config);

/// B * coeffs view of an estimate (marked smoothed).
SpectrumEstimate smoothed_view(const SpectrumEstimate& estimate,
                               const SmoothingOperator& smoother);

/// Two-pass noise-radius estimate for residual mode: an equality solve
/// splits measurement energy into detected-peak and background parts, and
/// epsilon = 1.1 * sqrt(background energy).
double estimate_epsilon(const sensing::ForwardOperator& op,
                        std::span<const cplx> y, double fs_hz,
                        double eta = 0.1);

}  // namespace csamr::recon
