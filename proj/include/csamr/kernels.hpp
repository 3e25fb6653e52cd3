#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "csamr/types.hpp"

namespace csamr::kernels {

// Data-parallel inner loops, OpenMP-parallelized. kernels::serial holds the
// plain reference implementations with identical per-element arithmetic;
// tests compare the two bitwise and bench/ compares their throughput.
//
// Reductions (norms, dots) are deliberately serial so results do not depend
// on the thread count.

/// y = Phi * x with Phi real, row-major (rows x cols), x complex.
void dense_matvec(std::span<const double> phi, std::size_t rows,
                  std::size_t cols, std::span<const cplx> x,
                  std::span<cplx> y);

/// x = Phi^T * y.
void dense_matvec_t(std::span<const double> phi, std::size_t rows,
                    std::size_t cols, std::span<const cplx> y,
                    std::span<cplx> x);

/// out[i] = in[i]^order, order a power of two (repeated squaring).
void pow_elementwise(std::span<const cplx> in, int order, std::span<cplx> out);

/// Complex soft threshold: shrinks the modulus by tau, keeps the phase.
void soft_threshold(std::span<const cplx> v, double tau, std::span<cplx> out);

/// out[i] = f[i] - w * sum of the up-to-2*l_half neighbours of i, where
/// w = 1/(2*l_half), the window truncated at the edges. When
/// renormalize_boundary is set, truncated rows use w = 1/(actual count)
/// instead, making every row sum to zero.
void smooth_apply(std::span<const cplx> f, int l_half,
                  bool renormalize_boundary, std::span<cplx> out);

double norm2(std::span<const cplx> v);
double norm2sq(std::span<const cplx> v);
double norm1(std::span<const cplx> v);  // sum of moduli
cplx vdot(std::span<const cplx> a, std::span<const cplx> b);  // conj(a).b

/// In-place Cholesky (lower) of a symmetric positive definite row-major
/// matrix; throws std::runtime_error if a pivot is not positive.
void cholesky_factor(std::span<double> a, std::size_t n);
void cholesky_solve(std::span<const double> chol, std::size_t n,
                    std::span<double> b);
void cholesky_solve(std::span<const double> chol, std::size_t n,
                    std::span<cplx> b);

namespace serial {
void dense_matvec(std::span<const double> phi, std::size_t rows,
                  std::size_t cols, std::span<const cplx> x,
                  std::span<cplx> y);
void dense_matvec_t(std::span<const double> phi, std::size_t rows,
                    std::size_t cols, std::span<const cplx> y,
                    std::span<cplx> x);
void pow_elementwise(std::span<const cplx> in, int order, std::span<cplx> out);
void soft_threshold(std::span<const cplx> v, double tau, std::span<cplx> out);
void smooth_apply(std::span<const cplx> f, int l_half,
                  bool renormalize_boundary, std::span<cplx> out);
}  // namespace serial

}  // namespace csamr::kernels
