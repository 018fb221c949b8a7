#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "qfound/linalg.hpp"

namespace qfound {

struct Grid {
    double x_min = 0.0, x_max = 0.0;
    int n = 0;
    double dx() const { return (x_max - x_min) / (n - 1); }
    double x(int i) const { return x_min + i * dx(); }
    bool operator==(const Grid&) const = default;
};

struct FreePotential {};
struct HarmonicPotential {
    double k = 1.0;  // V(x) = k x^2 / 2, omega = sqrt(k/m)
};
struct TabulatedPotential {
    std::vector<double> values;  // one per grid point
};
using PotentialSpec = std::variant<FreePotential, HarmonicPotential, TabulatedPotential>;

std::vector<double> potential_values(const PotentialSpec& v, const Grid& g);

/// Discretized 1-D wavefunction; trapezoid-normalized (checked within 1e-8 by
/// the evolution and decomposition entry points). Dimensionless units with
/// hbar = m = 1 unless overridden.
struct GridWavefunction {
    Grid grid;
    std::vector<cplx> values;
    double mass = 1.0;
    double hbar = 1.0;

    double trapezoid_norm2() const;
    void normalize();
    double expectation_x() const;
    double expectation_x2() const;
};

void check_wavefunction(const GridWavefunction& psi);

/// exp(-(x-x0)^2/(4 sigma^2) + i p0 x / hbar), trapezoid-normalized; sigma is
/// the position std of |psi|^2.
GridWavefunction make_gaussian(const Grid& g, double x0, double p0, double sigma,
                               double mass = 1.0, double hbar = 1.0);

GridWavefunction make_plane_wave(const Grid& g, double p, double mass = 1.0,
                                 double hbar = 1.0);

/// Closed-form freely spreading Gaussian at time t (reference trajectory
/// source for residual and phase diagnostics).
GridWavefunction free_gaussian_slice(const Grid& g, double x0, double p0,
                                     double sigma0, double t, double mass = 1.0,
                                     double hbar = 1.0);

/// Plane wave exp(i(px - p^2 t / 2m)/hbar), trapezoid-normalized.
GridWavefunction plane_wave_slice(const Grid& g, double p, double t,
                                  double mass = 1.0, double hbar = 1.0);

/// Crank-Nicolson propagation with reflecting (Dirichlet) walls at the grid
/// ends. spatial_order 2 uses the tridiagonal 3-point Laplacian, 4 the
/// pentadiagonal 5-point one. Requires 0 < dt < m dx^2 / hbar.
GridWavefunction evolve(const GridWavefunction& psi, const PotentialSpec& v,
                        double dt, int steps, int spatial_order = 4);

/// Amplitude/phase split psi = lambda exp(i phi / hbar) with per-run phase
/// unwrapping. node_mask marks points with lambda below threshold * max
/// lambda, dilated by 2 cells; phi is set to 0 there. v_q is filled by
/// quantum_potential, valid only where v_q_valid is set.
struct BohmFields {
    Grid grid;
    double hbar = 1.0, mass = 1.0;
    std::vector<double> lambda;
    std::vector<double> phi;
    std::vector<double> v_q;
    std::vector<std::uint8_t> node_mask;
    std::vector<std::uint8_t> v_q_valid;
    bool has_v_q = false;
    std::optional<std::vector<double>> s_ref;
};

/// prev, when given, fixes each run's 2 pi hbar branch to minimize the jump
/// against the previous time slice.
BohmFields decompose(const GridWavefunction& psi, double node_threshold = 1e-6,
                     const BohmFields* prev = nullptr);

/// V_q = -(hbar^2 / 2m) (Delta lambda) / lambda via the 5-point central
/// stencil, defined on unmasked points at least 2 cells from mask boundaries.
void quantum_potential(BohmFields& fields);

struct BohmResiduals {
    double r_hj = 0.0;    // phase (Hamilton-Jacobi-like) equation
    double r_cont = 0.0;  // amplitude (continuity) equation, natural log
};

/// Max-norm residuals of the two real evolution equations on a trajectory of
/// uniformly spaced slices (central differences in x and t; needs >= 3
/// slices). Second-order accurate: halving dx and dt cuts both by >= ~4.
BohmResiduals bohm_residuals(const std::vector<GridWavefunction>& slices,
                             const PotentialSpec& v, double dt,
                             double node_threshold = 1e-6);

/// Max |(grad phi)^2 / 2m + V + V_q - E| over valid points within
/// window_sigmas * sigma of the packet mean; for real eigenstates the
/// gradient term vanishes and this is the V + V_q = E identity.
double eigenstate_identity_deviation(const GridWavefunction& psi_e,
                                     const PotentialSpec& v, double energy,
                                     double node_threshold = 0.1,
                                     double window_sigmas = 4.0);

struct HJComparison {
    double sup_gauged = 0.0;          // sup |phi - S| after gauge matching
    std::vector<double> times;
    std::vector<double> center_diff;  // gauged phi - S at the packet center
    std::vector<double> v_q_center;   // quantum potential at the packet center
};

/// Compares the unwrapped phase against the inertial principal function
/// S = p0 x - p0^2 t / 2m (additive gauge fixed on the first slice). V = 0.
HJComparison hamilton_jacobi_compare(const std::vector<GridWavefunction>& slices,
                                     const std::vector<double>& times, double p0,
                                     double node_threshold = 1e-6);

/// Dense finite-difference Hamiltonian on the interior points (Dirichlet
/// walls), stencil order 2 or 4.
HermitianOperator grid_hamiltonian(const Grid& g, const PotentialSpec& v,
                                   int order = 4, double mass = 1.0,
                                   double hbar = 1.0);

struct GridEigenstate {
    double energy;
    GridWavefunction psi;
};

/// Lowest `count` eigenstates by dense Jacobi diagonalization of the grid
/// Hamiltonian; trapezoid-normalized, sign fixed so the largest-magnitude
/// component is positive.
std::vector<GridEigenstate> grid_eigenstates(const Grid& g, const PotentialSpec& v,
                                             int count, int order = 4,
                                             double mass = 1.0, double hbar = 1.0);

}  // namespace qfound
