#include "csamr/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace csamr::kernels {

namespace {

void check_power_of_two(int order) {
  if (order < 1 || (order & (order - 1)) != 0) {
    throw std::invalid_argument("power order must be a positive power of two");
  }
}

inline cplx pow2k(cplx v, int order) {
  // order is a power of two: square log2(order) times.
  for (int s = order; s > 1; s >>= 1) v *= v;
  return v;
}

inline cplx shrink(cplx v, double tau) {
  const double mag = std::abs(v);
  if (mag <= tau) return cplx(0.0, 0.0);
  return v * ((mag - tau) / mag);
}

inline cplx smooth_one(std::span<const cplx> f, int l_half, bool renorm,
                       std::size_t i) {
  const std::size_t n = f.size();
  const std::size_t lo = i >= static_cast<std::size_t>(l_half)
                             ? i - static_cast<std::size_t>(l_half)
                             : 0;
  const std::size_t hi = std::min(n - 1, i + static_cast<std::size_t>(l_half));
  cplx acc(0.0, 0.0);
  for (std::size_t j = lo; j <= hi; ++j) acc += f[j];
  acc -= f[i];
  const double count = renorm ? static_cast<double>(hi - lo)
                              : 2.0 * static_cast<double>(l_half);
  return f[i] - acc / count;
}

}  // namespace

void dense_matvec(std::span<const double> phi, std::size_t rows,
                  std::size_t cols, std::span<const cplx> x,
                  std::span<cplx> y) {
  if (phi.size() != rows * cols || x.size() != cols || y.size() != rows) {
    throw std::invalid_argument("dense_matvec dimension mismatch");
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows); ++r) {
    const double* row = phi.data() + r * cols;
    double re = 0.0, im = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      re += row[c] * x[c].real();
      im += row[c] * x[c].imag();
    }
    y[r] = cplx(re, im);
  }
}

void dense_matvec_t(std::span<const double> phi, std::size_t rows,
                    std::size_t cols, std::span<const cplx> y,
                    std::span<cplx> x) {
  if (phi.size() != rows * cols || y.size() != rows || x.size() != cols) {
    throw std::invalid_argument("dense_matvec_t dimension mismatch");
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(cols); ++c) {
    double re = 0.0, im = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double a = phi[r * cols + c];
      re += a * y[r].real();
      im += a * y[r].imag();
    }
    x[c] = cplx(re, im);
  }
}

void pow_elementwise(std::span<const cplx> in, int order,
                     std::span<cplx> out) {
  check_power_of_two(order);
  if (in.size() != out.size()) {
    throw std::invalid_argument("pow_elementwise size mismatch");
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(in.size()); ++i) {
    out[i] = pow2k(in[i], order);
  }
}

void soft_threshold(std::span<const cplx> v, double tau, std::span<cplx> out) {
  if (v.size() != out.size()) {
    throw std::invalid_argument("soft_threshold size mismatch");
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(v.size()); ++i) {
    out[i] = shrink(v[i], tau);
  }
}

void smooth_apply(std::span<const cplx> f, int l_half,
                  bool renormalize_boundary, std::span<cplx> out) {
  if (f.size() != out.size()) {
    throw std::invalid_argument("smooth_apply size mismatch");
  }
  if (l_half < 1) throw std::invalid_argument("l_half must be >= 1");
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(f.size()); ++i) {
    out[i] = smooth_one(f, l_half, renormalize_boundary, i);
  }
}

double norm2sq(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += x.real() * x.real() + x.imag() * x.imag();
  return s;
}

double norm2(std::span<const cplx> v) { return std::sqrt(norm2sq(v)); }

double norm1(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::abs(x);
  return s;
}

cplx vdot(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vdot size mismatch");
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void cholesky_factor(std::span<double> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("cholesky size mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (d <= 0.0) throw std::runtime_error("cholesky: matrix not SPD");
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
    for (std::size_t k = j + 1; k < n; ++k) a[j * n + k] = 0.0;  // keep lower
  }
}

void cholesky_solve(std::span<const double> chol, std::size_t n,
                    std::span<double> b) {
  if (chol.size() != n * n || b.size() != n) {
    throw std::invalid_argument("cholesky_solve size mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {  // L z = b
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol[i * n + k] * b[k];
    b[i] = s / chol[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {  // L^T x = z
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= chol[k * n + ii] * b[k];
    b[ii] = s / chol[ii * n + ii];
  }
}

void cholesky_solve(std::span<const double> chol, std::size_t n,
                    std::span<cplx> b) {
  std::vector<double> part(n);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < n; ++i) {
      part[i] = pass == 0 ? b[i].real() : b[i].imag();
    }
    cholesky_solve(chol, n, std::span<double>(part));
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = pass == 0 ? cplx(part[i], b[i].imag())
                       : cplx(b[i].real(), part[i]);
    }
  }
}

namespace serial {

void dense_matvec(std::span<const double> phi, std::size_t rows,
                  std::size_t cols, std::span<const cplx> x,
                  std::span<cplx> y) {
  if (phi.size() != rows * cols || x.size() != cols || y.size() != rows) {
    throw std::invalid_argument("dense_matvec dimension mismatch");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = phi.data() + r * cols;
    double re = 0.0, im = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      re += row[c] * x[c].real();
      im += row[c] * x[c].imag();
    }
    y[r] = cplx(re, im);
  }
}

void dense_matvec_t(std::span<const double> phi, std::size_t rows,
                    std::size_t cols, std::span<const cplx> y,
                    std::span<cplx> x) {
  if (phi.size() != rows * cols || y.size() != rows || x.size() != cols) {
    throw std::invalid_argument("dense_matvec_t dimension mismatch");
  }
  for (std::size_t c = 0; c < cols; ++c) {
    double re = 0.0, im = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double a = phi[r * cols + c];
      re += a * y[r].real();
      im += a * y[r].imag();
    }
    x[c] = cplx(re, im);
  }
}

void pow_elementwise(std::span<const cplx> in, int order,
                     std::span<cplx> out) {
  check_power_of_two(order);
  if (in.size() != out.size()) {
    throw std::invalid_argument("pow_elementwise size mismatch");
  }
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = pow2k(in[i], order);
}

void soft_threshold(std::span<const cplx> v, double tau, std::span<cplx> out) {
  if (v.size() != out.size()) {
    throw std::invalid_argument("soft_threshold size mismatch");
  }
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = shrink(v[i], tau);
}

void smooth_apply(std::span<const cplx> f, int l_half,
                  bool renormalize_boundary, std::span<cplx> out) {
  if (f.size() != out.size()) {
    throw std::invalid_argument("smooth_apply size mismatch");
  }
  if (l_half < 1) throw std::invalid_argument("l_half must be >= 1");
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = smooth_one(f, l_half, renormalize_boundary, i);
  }
}

}  // namespace serial

}  // namespace csamr::kernels
