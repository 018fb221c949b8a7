#include "qfound/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qfound {

namespace {

void check_finite(const std::vector<cplx>& e) {
    for (const cplx& z : e)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("matrix entries must be finite");
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b,
                      const char* what) {
    if (a.dim() != b.dim())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("matrix dimension must be >= 1");
    e_.assign(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
}

ComplexMatrix::ComplexMatrix(int dim, std::vector<cplx> entries)
    : dim_(dim), e_(std::move(entries)) {
    if (dim < 1) throw std::invalid_argument("matrix dimension must be >= 1");
    if (e_.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("entry count does not match dimension");
    check_finite(e_);
}

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<cplx>& d) {
    ComplexMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim(); ++i) m.at(i, i) = d[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) r.at(i, j) = std::conj(at(j, i));
    return r;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const cplx& z : e_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double s = 0.0;
    for (const cplx& z : e_) s = std::max(s, std::abs(z));
    return s;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j)
            if (std::abs(at(i, j) - std::conj(at(j, i))) > tol) return false;
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    require_same_dim(*this, o, "operator+");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    require_same_dim(*this, o, "operator-");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& z : e_) z *= s;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "operator*");
    const int n = a.dim();
    ComplexMatrix r(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const cplx aik = a.at(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) r.at(i, j) += aik * b.at(k, j);
        }
    }
    return r;
}

ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

StateVector::StateVector(std::vector<cplx> amps, bool is_normalized)
    : amplitudes(std::move(amps)), normalized(is_normalized) {
    if (amplitudes.empty()) throw std::invalid_argument("state must be nonempty");
    check_finite(amplitudes);
    if (normalized && std::abs(norm() * norm() - 1.0) > 1e-12)
        throw std::invalid_argument("state marked normalized is not normalized");
}

StateVector StateVector::basis(int dim, int index) {
    if (index < 0 || index >= dim) throw std::invalid_argument("basis index out of range");
    std::vector<cplx> a(dim, cplx(0.0, 0.0));
    a[index] = 1.0;
    return StateVector(std::move(a), true);
}

StateVector StateVector::unit(std::vector<cplx> amps) {
    double s = 0.0;
    for (const cplx& z : amps) s += std::norm(z);
    if (s <= 0.0) throw std::invalid_argument("cannot normalize the zero vector");
    const double inv = 1.0 / std::sqrt(s);
    for (auto& z : amps) z *= inv;
    return StateVector(std::move(amps), true);
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cplx& z : amplitudes) s += std::norm(z);
    return std::sqrt(s);
}

HermitianOperator::HermitianOperator(ComplexMatrix m, double tol) : m_(std::move(m)) {
    if (!m_.is_hermitian(tol))
        throw std::invalid_argument("operator is not Hermitian within tolerance");
}

cplx expectation(const ComplexMatrix& op, const StateVector& state) {
    if (op.dim() != state.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    if (!state.normalized && std::abs(state.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("expectation: state is not normalized");
    const int n = op.dim();
    cplx acc(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        cplx row(0.0, 0.0);
        for (int j = 0; j < n; ++j) row += op.at(i, j) * state.amplitudes[j];
        acc += std::conj(state.amplitudes[i]) * row;
    }
    return acc;
}

double real_expectation(const HermitianOperator& op, const StateVector& state) {
    const cplx v = expectation(op.matrix(), state);
    if (std::abs(v.imag()) >= 1e-10)
        throw std::runtime_error("Hermitian expectation has non-real remainder");
    return v.real();
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a, b, "commutator");
    return a * b - b * a;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    const int da = a.dim(), db = b.dim();
    ComplexMatrix r(da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) {
            const cplx aij = a.at(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < db; ++k)
                for (int l = 0; l < db; ++l)
                    r.at(i * db + k, j * db + l) = aij * b.at(k, l);
        }
    return r;
}

StateVector apply(const ComplexMatrix& op, const StateVector& v) {
    if (op.dim() != v.dim()) throw std::invalid_argument("apply: dimension mismatch");
    std::vector<cplx> out(op.dim(), cplx(0.0, 0.0));
    for (int i = 0; i < op.dim(); ++i) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < op.dim(); ++j) acc += op.at(i, j) * v.amplitudes[j];
        out[i] = acc;
    }
    return StateVector(std::move(out), false);
}

StateVector Eigensystem::eigenvector(int i) const {
    std::vector<cplx> v(vectors.dim());
    for (int k = 0; k < vectors.dim(); ++k) v[k] = vectors.at(k, i);
    return StateVector(std::move(v), true);
}

Eigensystem hermitian_eigensystem(const HermitianOperator& op) {
    ComplexMatrix a = op.matrix();
    const int n = a.dim();
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double scale = a.frobenius_norm();
    const double target = 1e-12 * std::max(1.0, scale);
    const double skip = target / (4.0 * n);

    auto offdiag = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += std::norm(a.at(i, j));
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && offdiag() > target; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double r = std::abs(a.at(p, q));
                if (r <= skip) continue;
                const cplx phase = a.at(p, q) / r;
                const double tau = (a.at(q, q).real() - a.at(p, p).real()) / (2.0 * r);
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx se = s * phase;
                const cplx sec = s * std::conj(phase);

                for (int k = 0; k < n; ++k) {
                    const cplx akp = a.at(k, p), akq = a.at(k, q);
                    a.at(k, p) = c * akp - sec * akq;
                    a.at(k, q) = se * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx apk = a.at(p, k), aqk = a.at(q, k);
                    a.at(p, k) = c * apk - se * aqk;
                    a.at(q, k) = sec * apk + c * aqk;
                }
                a.at(p, q) = 0.0;
                a.at(q, p) = 0.0;
                a.at(p, p) = a.at(p, p).real();
                a.at(q, q) = a.at(q, q).real();
                for (int k = 0; k < n; ++k) {
                    const cplx vkp = v.at(k, p), vkq = v.at(k, q);
                    v.at(k, p) = c * vkp - sec * vkq;
                    v.at(k, q) = se * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return a.at(i, i).real() < a.at(j, j).real();
    });

    Eigensystem out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n);
    for (int c = 0; c < n; ++c) {
        out.values[c] = a.at(order[c], order[c]).real();
        for (int k = 0; k < n; ++k) out.vectors.at(k, c) = v.at(k, order[c]);
    }
    return out;
}

double operator_norm(const ComplexMatrix& a) {
    const ComplexMatrix ata = hermitian_part(a.adjoint() * a);
    const Eigensystem es = hermitian_eigensystem(HermitianOperator(ata, 1e-9));
    const double top = es.values.empty() ? 0.0 : es.values.back();
    return std::sqrt(std::max(0.0, top));
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
    ComplexMatrix r(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            r.at(i, j) = 0.5 * (a.at(i, j) + std::conj(a.at(j, i)));
    return r;
}

namespace {

ComplexMatrix rebuild(const Eigensystem& es, const std::vector<double>& vals) {
    const int n = es.vectors.dim();
    ComplexMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx acc(0.0, 0.0);
            for (int k = 0; k < n; ++k)
                acc += es.vectors.at(i, k) * vals[k] * std::conj(es.vectors.at(j, k));
            r.at(i, j) = acc;
        }
    return hermitian_part(r);
}

}  // namespace

ComplexMatrix spectral_clamp(const ComplexMatrix& hermitian, double lo, double hi) {
    const Eigensystem es =
        hermitian_eigensystem(HermitianOperator(hermitian_part(hermitian), 1e-6));
    std::vector<double> vals = es.values;
    for (double& x : vals) x = std::clamp(x, lo, hi);
    return rebuild(es, vals);
}

ComplexMatrix spectral_sign(const ComplexMatrix& hermitian) {
    const Eigensystem es =
        hermitian_eigensystem(HermitianOperator(hermitian_part(hermitian), 1e-6));
    std::vector<double> vals = es.values;
    for (double& x : vals) x = (x < 0.0 ? -1.0 : 1.0);
    return rebuild(es, vals);
}

}  // namespace qfound
