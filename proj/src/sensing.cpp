#include "csamr/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "csamr/fft.hpp"
#include "csamr/kernels.hpp"
#include "csamr/rng.hpp"

namespace csamr::sensing {

using nlohmann::json;

std::string to_string(Kind k) {
  return k == Kind::DenseGaussian ? "dense-gaussian" : "row-selection";
}

Kind kind_from_string(const std::string& name) {
  if (name == "dense-gaussian") return Kind::DenseGaussian;
  if (name == "row-selection") return Kind::RowSelection;
  throw std::invalid_argument("unknown sensing kind: " + name);
}

namespace {

void fill_payload(MeasurementModel& m) {
  Rng rng(m.seed);
  if (m.kind == Kind::DenseGaussian) {
    m.phi.resize(m.m_rows * m.l_cols);
    const double s = 1.0 / std::sqrt(static_cast<double>(m.m_rows));
    for (double& v : m.phi) v = s * rng.gaussian();
  } else {
    // Partial Fisher-Yates: M distinct indices, uniform without replacement.
    std::vector<std::size_t> idx(m.l_cols);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < m.m_rows; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(
                  rng.uniform_int(static_cast<int>(m.l_cols - i)));
      std::swap(idx[i], idx[j]);
    }
    m.rows.assign(idx.begin(), idx.begin() + m.m_rows);
    std::sort(m.rows.begin(), m.rows.end());
  }
}

}  // namespace

MeasurementModel MeasurementModel::make(Kind kind, std::size_t l_cols,
                                        double beta, std::uint64_t seed) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("compression ratio beta must lie in (0,1)");
  }
  const std::size_t m_rows = static_cast<std::size_t>(
      std::llround(beta * static_cast<double>(l_cols)));
  if (m_rows < 1) throw std::invalid_argument("beta*L rounds below 1");
  if (m_rows >= l_cols) {
    throw std::invalid_argument("beta too close to 1: M would reach L");
  }
  MeasurementModel m;
  m.kind = kind;
  m.m_rows = m_rows;
  m.l_cols = l_cols;
  m.beta = beta;
  m.seed = seed;
  fill_payload(m);
  return m;
}

MeasurementModel MeasurementModel::identity_selection(std::size_t l_cols) {
  MeasurementModel m;
  m.kind = Kind::RowSelection;
  m.m_rows = l_cols;
  m.l_cols = l_cols;
  m.beta = 1.0;
  m.seed = 0;
  m.rows.resize(l_cols);
  std::iota(m.rows.begin(), m.rows.end(), 0);
  return m;
}

std::string MeasurementModel::to_json_string() const {
  json j;
  j["kind"] = to_string(kind);
  j["m_rows"] = m_rows;
  j["l_cols"] = l_cols;
  j["beta"] = beta;
  j["seed"] = seed;
  return j.dump(2);
}

MeasurementModel MeasurementModel::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  const Kind kind = kind_from_string(j.at("kind").get<std::string>());
  const std::size_t l = j.at("l_cols").get<std::size_t>();
  const double beta = j.at("beta").get<double>();
  const std::uint64_t seed = j.at("seed").get<std::uint64_t>();
  MeasurementModel m = beta >= 1.0 ? identity_selection(l)
                                   : make(kind, l, beta, seed);
  if (j.contains("m_rows") &&
      j.at("m_rows").get<std::size_t>() != m.m_rows) {
    throw std::runtime_error("measurement model header inconsistent with M");
  }
  return m;
}

std::vector<cplx> measure(const MeasurementModel& model,
                          std::span<const cplx> z) {
  if (z.size() != model.l_cols) {
    throw std::invalid_argument("measure: sample length != model L");
  }
  std::vector<cplx> y(model.m_rows);
  if (model.kind == Kind::DenseGaussian) {
    kernels::dense_matvec(model.phi, model.m_rows, model.l_cols, z,
                          std::span<cplx>(y));
  } else {
    for (std::size_t i = 0; i < model.m_rows; ++i) y[i] = z[model.rows[i]];
  }
  return y;
}

ForwardOperator::ForwardOperator(const MeasurementModel& model)
    : model_(&model) {
  if (model.kind == Kind::RowSelection) {
    selection_mask_.assign(model.l_cols, 0.0);
    for (std::size_t r : model.rows) selection_mask_[r] = 1.0;
  }
}

void ForwardOperator::apply(std::span<const cplx> f, std::span<cplx> y) const {
  if (f.size() != cols() || y.size() != rows()) {
    throw std::invalid_argument("forward operator dimension mismatch");
  }
  std::vector<cplx> t(cols());
  fft::inverse(f, std::span<cplx>(t));
  if (model_->kind == Kind::DenseGaussian) {
    kernels::dense_matvec(model_->phi, rows(), cols(), t, y);
  } else {
    for (std::size_t i = 0; i < rows(); ++i) y[i] = t[model_->rows[i]];
  }
}

void ForwardOperator::apply_adjoint(std::span<const cplx> y,
                                    std::span<cplx> f) const {
  if (f.size() != cols() || y.size() != rows()) {
    throw std::invalid_argument("adjoint operator dimension mismatch");
  }
  std::vector<cplx> t(cols(), cplx(0.0, 0.0));
  if (model_->kind == Kind::DenseGaussian) {
    kernels::dense_matvec_t(model_->phi, rows(), cols(), y,
                            std::span<cplx>(t));
  } else {
    for (std::size_t i = 0; i < rows(); ++i) t[model_->rows[i]] = y[i];
  }
  fft::forward(std::span<const cplx>(t), f);
}

void ForwardOperator::solve_gram(std::span<cplx> v) const {
  if (model_->kind == Kind::RowSelection) return;  // A A* = I
  std::call_once(gram_once_, [&] {
    const std::size_t m = rows(), l = cols();
    gram_chol_.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < l; ++c) {
          s += model_->phi[i * l + c] * model_->phi[j * l + c];
        }
        gram_chol_[i * m + j] = s;
        gram_chol_[j * m + i] = s;
      }
    }
    kernels::cholesky_factor(gram_chol_, m);
  });
  kernels::cholesky_solve(gram_chol_, rows(), v);
}

void ForwardOperator::solve_eye_plus_gram(std::span<cplx> f) const {
  if (f.size() != cols()) {
    throw std::invalid_argument("solve_eye_plus_gram dimension mismatch");
  }
  if (model_->kind == Kind::RowSelection) {
    // I + A*A is diagonal in the time domain (selected samples weigh 2).
    std::vector<cplx> t(cols());
    fft::inverse(f, std::span<cplx>(t));
    for (std::size_t i = 0; i < cols(); ++i) {
      t[i] /= (1.0 + selection_mask_[i]);
    }
    fft::forward(std::span<const cplx>(t), f);
    return;
  }
  std::call_once(eye_gram_once_, [&] {
    const std::size_t m = rows(), l = cols();
    eye_gram_chol_.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < l; ++c) {
          s += model_->phi[i * l + c] * model_->phi[j * l + c];
        }
        eye_gram_chol_[i * m + j] = s;
        eye_gram_chol_[j * m + i] = s;
      }
      eye_gram_chol_[i * m + i] += 1.0;
    }
    kernels::cholesky_factor(eye_gram_chol_, m);
  });
  // Woodbury: (I + A*A)^{-1} f = f - A*((I + A A*)^{-1} A f).
  std::vector<cplx> af(rows());
  apply(f, std::span<cplx>(af));
  kernels::cholesky_solve(eye_gram_chol_, rows(), std::span<cplx>(af));
  std::vector<cplx> corr(cols());
  apply_adjoint(af, std::span<cplx>(corr));
  for (std::size_t i = 0; i < cols(); ++i) f[i] -= corr[i];
}

void ForwardOperator::project_equality(std::span<cplx> f,
                                       std::span<const cplx> y) const {
  std::vector<cplx> r(rows());
  apply(f, std::span<cplx>(r));
  for (std::size_t i = 0; i < rows(); ++i) r[i] -= y[i];
  solve_gram(std::span<cplx>(r));
  std::vector<cplx> corr(cols());
  apply_adjoint(r, std::span<cplx>(corr));
  for (std::size_t i = 0; i < cols(); ++i) f[i] -= corr[i];
}

double ForwardOperator::op_norm() const {
  if (model_->kind == Kind::RowSelection) return 1.0;
  std::call_once(norm_once_, [&] {
    Rng rng(0x9e3779b9u);
    std::vector<cplx> v(cols());
    for (cplx& x : v) x = cplx(rng.gaussian(), rng.gaussian());
    std::vector<cplx> av(rows());
    double lambda = 0.0;
    for (int it = 0; it < 60; ++it) {
      const double nv = kernels::norm2(std::span<const cplx>(v));
      for (cplx& x : v) x /= nv;
      apply(v, std::span<cplx>(av));
      apply_adjoint(av, std::span<cplx>(v));
      lambda = kernels::norm2(std::span<const cplx>(v));
    }
    op_norm_value_ = std::sqrt(lambda) * 1.02;  // small safety margin
  });
  return op_norm_value_;
}

}  // namespace csamr::sensing
