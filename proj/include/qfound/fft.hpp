#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qfound {

using cplx = std::complex<double>;

std::size_t next_pow2(std::size_t n);

// In-place radix-2 complex FFT; a.size() must be a power of two.
// inverse = true applies the 1/N normalization.
void fft_radix2(std::vector<cplx>& a, bool inverse);

// Spectral derivative of order 1 or 2 on a zero-padded periodic extension of
// the sampled values (spacing dx). Callers are responsible for keeping
// boundary amplitudes negligible so the periodic wrap is harmless.
std::vector<cplx> spectral_derivative(const std::vector<cplx>& values, double dx,
                                      int order);

}  // namespace qfound
