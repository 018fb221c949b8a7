#pragma once

// Shared oracle-side helpers for the test suites. Everything here is computed
// independently of the library paths under test (closed forms, direct
// summation, brute force).

#include <cmath>
#include <complex>
#include <vector>

#include "qfound/bohm.hpp"
#include "qfound/linalg.hpp"
#include "qfound/rng.hpp"

namespace testsup {

using qfound::cplx;

inline qfound::ComplexMatrix random_hermitian(int dim, qfound::Rng& rng,
                                              double scale = 1.0) {
    qfound::ComplexMatrix g(dim);
    for (int i = 0; i < dim; ++i) {
        g.at(i, i) = scale * rng.normal();
        for (int j = i + 1; j < dim; ++j) {
            const cplx z(scale * rng.normal(), scale * rng.normal());
            g.at(i, j) = z;
            g.at(j, i) = std::conj(z);
        }
    }
    return g;
}

inline qfound::StateVector random_state(int dim, qfound::Rng& rng) {
    std::vector<cplx> a(dim);
    for (auto& z : a) z = cplx(rng.normal(), rng.normal());
    return qfound::StateVector::unit(std::move(a));
}

// direct double-loop sum_{ij} conj(psi_i) A_ij psi_j
inline cplx expectation_oracle(const qfound::ComplexMatrix& a,
                               const qfound::StateVector& s) {
    cplx acc(0.0, 0.0);
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            acc += std::conj(s.amplitudes[i]) * a.at(i, j) * s.amplitudes[j];
    return acc;
}

// O(n^2) DFT for checking the radix-2 FFT
inline std::vector<cplx> dft_oracle(const std::vector<cplx>& x, bool inverse) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sign * 2.0 * M_PI * double(k * j % n) / double(n);
            out[k] += x[j] * cplx(std::cos(ang), std::sin(ang));
        }
    if (inverse)
        for (auto& z : out) z /= double(n);
    return out;
}

// Analytic harmonic-oscillator eigenstates, m = omega = hbar = 1.
// psi_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi)), physicists' Hermite.
inline double harmonic_state(int n, double x) {
    const double g = std::exp(-0.5 * x * x);
    const double norm0 = std::pow(M_PI, -0.25);
    switch (n) {
        case 0: return norm0 * g;
        case 1: return norm0 * M_SQRT2 * x * g;
        case 2: return norm0 * (2.0 * x * x - 1.0) / M_SQRT2 * g;
        default: break;
    }
    // recurrence H_{n+1} = 2x H_n - 2n H_{n-1}
    double hm = 1.0, h = 2.0 * x;
    double lognorm = 0.25 * std::log(M_PI);
    for (int k = 2; k <= n; ++k) {
        const double hn = 2.0 * x * h - 2.0 * (k - 1) * hm;
        hm = h;
        h = hn;
    }
    for (int k = 1; k <= n; ++k) lognorm += 0.5 * std::log(2.0 * k);
    return h * g * std::exp(-lognorm);
}

inline qfound::GridWavefunction harmonic_state_on_grid(const qfound::Grid& g,
                                                       int n) {
    qfound::GridWavefunction psi;
    psi.grid = g;
    psi.values.resize(g.n);
    for (int i = 0; i < g.n; ++i) psi.values[i] = harmonic_state(n, g.x(i));
    psi.normalize();
    return psi;
}

// Coherent state of the unit oscillator: center follows the classical orbit,
// phase p_c x - t/2 - (x_c p_c - x0 p0)/2 (Schroedinger-equation solution,
// verified by the residual suites).
inline qfound::GridWavefunction coherent_state_slice(const qfound::Grid& g,
                                                     double x0, double p0,
                                                     double t) {
    const double xc = x0 * std::cos(t) + p0 * std::sin(t);
    const double pc = p0 * std::cos(t) - x0 * std::sin(t);
    const double theta = 0.5 * t + 0.5 * (xc * pc - x0 * p0);
    qfound::GridWavefunction psi;
    psi.grid = g;
    psi.values.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        const double amp = std::exp(-0.5 * (x - xc) * (x - xc));
        const double ph = pc * x - theta;
        psi.values[i] = amp * cplx(std::cos(ph), std::sin(ph));
    }
    psi.normalize();
    return psi;
}

}  // namespace testsup
