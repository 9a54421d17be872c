#pragma once

#include "lpup/grid.hpp"

#include <span>

namespace lpup::detail {

/// In-place unnormalised DFT over a dim-dimensional cube of side n,
/// sign -1 forward (e^{-2πi jk/n}), +1 backward.
void dft_inplace(std::span<cplx> data, int dim, std::size_t n, int sign);

}  // namespace lpup::detail
