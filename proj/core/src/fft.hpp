#pragma once

// Internal FFT helpers (FFTW, real-to-complex). Not installed.

#include <array>
#include <cstddef>
#include <vector>

namespace sqfn::detail {

using Extent = std::array<std::size_t, 2>;

// Smallest m >= n of the form 2^a 3^b 5^c 7^d.
std::size_t nice_size(std::size_t n);

// Full linear convolution of two row-major arrays of dimension 1 or 2. The
// result has extent a + b - 1 per axis. Plans are created with FFTW_ESTIMATE
// so the arithmetic is identical from run to run.
std::vector<double> fft_convolve_full(int dim, const std::vector<double>& a, Extent na,
                                      const std::vector<double>& b, Extent nb);

}  // namespace sqfn::detail
