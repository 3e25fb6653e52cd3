#pragma once

#include <span>
#include <vector>

#include "csamr/types.hpp"

namespace csamr::fft {

// Unitary DFT pair: both directions carry a 1/sqrt(n) scale, so Parseval
// holds exactly and forward(inverse(x)) == x up to rounding. Thread-safe.

void forward(std::span<const cplx> in, std::span<cplx> out);
void inverse(std::span<const cplx> in, std::span<cplx> out);

std::vector<cplx> forward(const std::vector<cplx>& in);
std::vector<cplx> inverse(const std::vector<cplx>& in);

}  // namespace csamr::fft
