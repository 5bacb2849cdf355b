#pragma once

#include <fftw3.h>

#include <vector>

namespace critwave::detail {

/// Out-of-place 2-D real-to-real transform of a row-major ny x nx array
/// (rows along y). Plans are cached per (shape, kinds); execution uses the
/// thread-safe new-array interface.
std::vector<double> r2r_2d(const std::vector<double>& in, int ny, int nx,
                           fftw_r2r_kind kind_y, fftw_r2r_kind kind_x);

}  // namespace critwave::detail
