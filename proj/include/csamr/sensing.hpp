#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "csamr/types.hpp"

namespace csamr::sensing {

enum class Kind { DenseGaussian, RowSelection };

std::string to_string(Kind k);
Kind kind_from_string(const std::string& name);

/// M x L measurement operator descriptor. Dense payload entries are i.i.d.
/// N(0, 1/M); row selection holds M distinct sorted sample indices. Either
/// payload is regenerated from the seed, so persistence stores only the
/// header.
struct MeasurementModel {
  Kind kind = Kind::RowSelection;
  std::size_t m_rows = 0;
  std::size_t l_cols = 0;
  double beta = 0.0;  // m_rows / l_cols
  std::uint64_t seed = 0;
  std::vector<double> phi;         // dense row-major payload
  std::vector<std::size_t> rows;   // selection payload

  /// M = round(beta * L). Requires 0 < beta < 1 and round(beta*L) >= 1.
  static MeasurementModel make(Kind kind, std::size_t l_cols, double beta,
                               std::uint64_t seed);

  /// Test hook: selects every row (M = L), so measuring is the identity.
  static MeasurementModel identity_selection(std::size_t l_cols);

  std::string to_json_string() const;
  static MeasurementModel from_json_string(const std::string& text);
};

/// y = Phi * z. Row selection gathers the indexed samples. Throws on length
/// mismatch.
std::vector<cplx> measure(const MeasurementModel& model,
                          std::span<const cplx> z);

/// Matrix-free composed operator A = Phi * Psi with Psi the unitary
/// inverse-DFT (synthesis) matrix:
///   apply:          y = Phi * idft(f)
///   apply_adjoint:  f = dft(Phi^T * y)
/// The operator borrows the model; the model must outlive it. All methods
/// are safe to call concurrently.
class ForwardOperator {
 public:
  explicit ForwardOperator(const MeasurementModel& model);

  std::size_t rows() const { return model_->m_rows; }
  std::size_t cols() const { return model_->l_cols; }

  void apply(std::span<const cplx> f, std::span<cplx> y) const;
  void apply_adjoint(std::span<const cplx> y, std::span<cplx> f) const;

  /// v := (A A*)^{-1} v. For row selection A A* = I, so this is a no-op;
  /// for dense models it solves against a cached Cholesky factor of
  /// Phi Phi^T.
  void solve_gram(std::span<cplx> v) const;

  /// f := (I + A* A)^{-1} f. Diagonalized by the DFT for row selection;
  /// dense models go through the Woodbury identity with a cached factor of
  /// I + Phi Phi^T.
  void solve_eye_plus_gram(std::span<cplx> f) const;

  /// Projects f onto the affine set {f : A f = y}.
  void project_equality(std::span<cplx> f, std::span<const cplx> y) const;

  /// Spectral norm ||A||_2: exactly 1 for row selection, power-iteration
  /// estimate (cached) for dense models.
  double op_norm() const;

 private:
  const MeasurementModel* model_;
  mutable std::once_flag gram_once_, eye_gram_once_, norm_once_;
  mutable std::vector<double> gram_chol_;      // chol(Phi Phi^T)
  mutable std::vector<double> eye_gram_chol_;  // chol(I + Phi Phi^T)
  mutable double op_norm_value_ = 1.0;
  mutable std::vector<double> selection_mask_;  // 1.0 on selected samples
};

}  // namespace csamr::sensing
