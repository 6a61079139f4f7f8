#pragma once

#include <complex>
#include <cstddef>

namespace ssct::fft {

// Unnormalized in-place 2D complex DFTs on an n x n row-major array in
// wrap (FFT) index order:
//   forward:  out[k] = sum_m a[m] exp(-2πi k·m / n)
//   backward: out[m] = sum_k a[k] exp(+2πi k·m / n)
// Plans are cached per size; planning is serialized, execution is
// thread-safe on distinct arrays.
void forward2d(std::complex<double>* data, std::size_t n);
void backward2d(std::complex<double>* data, std::size_t n);

}  // namespace ssct::fft
