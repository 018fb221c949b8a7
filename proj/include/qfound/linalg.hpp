#pragma once

#include <complex>
#include <vector>

namespace qfound {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major. Entries are validated to be finite
/// on construction.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(int dim);
    ComplexMatrix(int dim, std::vector<cplx> entries);

    static ComplexMatrix identity(int dim);
    static ComplexMatrix diagonal(const std::vector<cplx>& d);

    int dim() const { return dim_; }
    cplx& at(int i, int j) { return e_[static_cast<std::size_t>(i) * dim_ + j]; }
    const cplx& at(int i, int j) const {
        return e_[static_cast<std::size_t>(i) * dim_ + j];
    }
    const std::vector<cplx>& entries() const { return e_; }

    ComplexMatrix adjoint() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool is_hermitian(double tol = 1e-12) const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cplx s);

private:
    int dim_ = 0;
    std::vector<cplx> e_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

/// Finite-dimensional state. When `normalized` is set the squared amplitude
/// sum is checked to be 1 within 1e-12.
struct StateVector {
    std::vector<cplx> amplitudes;
    bool normalized = false;

    StateVector() = default;
    StateVector(std::vector<cplx> amps, bool is_normalized);
    static StateVector basis(int dim, int index);
    static StateVector unit(std::vector<cplx> amps);  // normalizes

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const;
};

/// Matrix certified Hermitian (entrywise against its conjugate transpose) at
/// construction.
class HermitianOperator {
public:
    explicit HermitianOperator(ComplexMatrix m, double tol = 1e-12);
    const ComplexMatrix& matrix() const { return m_; }
    int dim() const { return m_.dim(); }

private:
    ComplexMatrix m_;
};

/// <psi|A|psi>. Requires matching dimensions and a normalized state.
cplx expectation(const ComplexMatrix& op, const StateVector& state);

/// Physical (real) expectation of a Hermitian operator; throws if the
/// imaginary remainder exceeds 1e-10.
double real_expectation(const HermitianOperator& op, const StateVector& state);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product; (a (x) b)[i*db+k][j*db+l] = a[i][j] * b[k][l].
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

StateVector apply(const ComplexMatrix& op, const StateVector& v);

struct Eigensystem {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns, orthonormal
    StateVector eigenvector(int i) const;
};

/// Cyclic complex Jacobi diagonalization. Intended for dimensions up to a few
/// hundred; off-diagonal Frobenius tolerance 1e-12 relative to the input
/// scale, ascending eigenvalue order with ties kept in sweep order.
Eigensystem hermitian_eigensystem(const HermitianOperator& op);

/// Largest singular value, computed as sqrt(lambda_max(A^dag A)).
double operator_norm(const ComplexMatrix& a);

ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// V clamp(D) V^dag of the Hermitian input: eigenvalues pushed into [lo, hi].
ComplexMatrix spectral_clamp(const ComplexMatrix& hermitian, double lo, double hi);

/// Spectral sign (eigenvalues mapped to +-1; zero maps to +1).
ComplexMatrix spectral_sign(const ComplexMatrix& hermitian);

}  // namespace qfound
