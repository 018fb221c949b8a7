#include "qfound/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace qfound {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_radix2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: size must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

std::vector<cplx> spectral_derivative(const std::vector<cplx>& values, double dx,
                                      int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("spectral_derivative: order must be 1 or 2");
    const std::size_t n = values.size();
    const std::size_t m = next_pow2(n);
    std::vector<cplx> work(m, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) work[i] = values[i];
    fft_radix2(work, false);

    const double dk = 2.0 * M_PI / (static_cast<double>(m) * dx);
    for (std::size_t j = 0; j < m; ++j) {
        const double k =
            (j <= m / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(m)) * dk;
        if (order == 1) {
            // Nyquist mode carries no usable sign information for odd derivatives.
            if (j == m / 2)
                work[j] = 0.0;
            else
                work[j] *= cplx(0.0, k);
        } else {
            work[j] *= -k * k;
        }
    }
    fft_radix2(work, true);
    work.resize(n);
    return work;
}

}  // namespace qfound
