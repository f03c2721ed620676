#pragma once

#include <span>

#include "nlsflow/grid.hpp"

namespace nlsflow::fft {

// In-place transforms backed by FFTW. Plans are created once per (dim, N)
// under a lock and executed through the new-array interface, so concurrent
// use from independent runs is safe. inverse() includes the 1/N^d factor.
void forward(const Grid& grid, std::span<cplx> data);
void inverse(const Grid& grid, std::span<cplx> data);

}  // namespace nlsflow::fft
