#include "qfound/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace qfound {

FockSpace::FockSpace(int n_trunc, double w, double m, double hb)
    : truncation(n_trunc), omega(w), mass(m), hbar(hb) {
    if (n_trunc < 8) throw std::invalid_argument("truncation must be >= 8");
    if (!(w > 0.0) || !(m > 0.0) || !(hb > 0.0))
        throw std::invalid_argument("omega, mass, hbar must be positive");
}

ComplexMatrix FockSpace::lowering() const {
    ComplexMatrix a(dim());
    for (int n = 1; n < dim(); ++n) a.at(n - 1, n) = std::sqrt(double(n));
    return a;
}

ComplexMatrix FockSpace::raising() const { return lowering().adjoint(); }

ComplexMatrix FockSpace::number() const {
    ComplexMatrix n(dim());
    for (int k = 0; k < dim(); ++k) n.at(k, k) = double(k);
    return n;
}

ComplexMatrix FockSpace::position() const {
    const double c = std::sqrt(hbar / (2.0 * mass * omega));
    ComplexMatrix q = lowering() + raising();
    q *= c;
    return q;
}

ComplexMatrix FockSpace::momentum() const {
    const double c = std::sqrt(mass * omega * hbar / 2.0);
    ComplexMatrix p = raising() - lowering();
    p *= cplx(0.0, 1.0) * c;
    return p;
}

ComplexMatrix FockSpace::hamiltonian() const {
    const ComplexMatrix q = position();
    const ComplexMatrix p = momentum();
    ComplexMatrix h = cplx(1.0 / (2.0 * mass), 0.0) * (p * p) +
                      cplx(0.5 * mass * omega * omega, 0.0) * (q * q);
    return hermitian_part(h);
}

double interior_norm(const ComplexMatrix& m, int drop_top) {
    const int keep = m.dim() - drop_top;
    double s = 0.0;
    for (int i = 0; i < keep; ++i)
        for (int j = 0; j < keep; ++j) s += std::norm(m.at(i, j));
    return std::sqrt(s);
}

namespace {

LadderDefects defect_matrices(const FockSpace& f, int drop_top) {
    const ComplexMatrix a = f.lowering();
    const ComplexMatrix ad = f.raising();
    const ComplexMatrix h = f.hamiltonian();
    ComplexMatrix da = commutator(h, a);
    da += cplx(f.omega * f.hbar, 0.0) * a;
    ComplexMatrix dd = commutator(h, ad);
    dd -= cplx(f.omega * f.hbar, 0.0) * ad;
    return {interior_norm(da, drop_top), interior_norm(dd, drop_top)};
}

}  // namespace

LadderDefects ladder_commutators(const FockSpace& f) {
    return defect_matrices(f, 2);
}

LadderDefects ladder_commutators_full(const FockSpace& f) {
    return defect_matrices(f, 0);
}

ComplexMatrix sg_operator(const FockSpace& f) {
    const ComplexMatrix a = f.lowering();
    const ComplexMatrix m = a * a.adjoint();  // diagonal: diag(1..N, 0)
    ComplexMatrix inv_sqrt(f.dim());
    double top = 0.0;
    for (int i = 0; i < f.dim(); ++i) top = std::max(top, m.at(i, i).real());
    for (int i = 0; i < f.dim(); ++i) {
        const double d = m.at(i, i).real();
        inv_sqrt.at(i, i) = d > 1e-12 * top ? 1.0 / std::sqrt(d) : 0.0;
    }
    return inv_sqrt * a;
}

ExtendedPhaseSpace extended_phase_space(const FockSpace& f) {
    ExtendedPhaseSpace ext;
    ext.fock_dim = f.dim();
    ext.op = ComplexMatrix(2 * f.dim());
    const int ntop = f.truncation;
    // copy +: lower along the ladder
    for (int n = 1; n <= ntop; ++n) ext.op.at(ext.index(0, n - 1), ext.index(0, n)) = 1.0;
    // vacuum link: |0,+> -> |0,->
    ext.op.at(ext.index(1, 0), ext.index(0, 0)) = 1.0;
    // copy -: continue downward (levels play the role of -(n+1))
    for (int n = 0; n < ntop; ++n) ext.op.at(ext.index(1, n + 1), ext.index(1, n)) = 1.0;
    return ext;
}

PhaseOperatorChecks phase_operator_checks(const FockSpace& f) {
    const int d = f.dim();
    const ComplexMatrix e = sg_operator(f);
    const ComplexMatrix id = ComplexMatrix::identity(d);
    PhaseOperatorChecks out{};

    out.ee_dag_interior = interior_norm(e * e.adjoint() - id, 2);

    ComplexMatrix vac_proj(d);
    vac_proj.at(0, 0) = 1.0;
    out.edag_e_vacuum = (e.adjoint() * e - (id - vac_proj)).frobenius_norm();

    ComplexMatrix ce = commutator(f.hamiltonian(), e);
    ce += cplx(f.omega * f.hbar, 0.0) * e;
    out.sg_commutator_interior = interior_norm(ce, 2);

    const ExtendedPhaseSpace ext = extended_phase_space(f);
    const ComplexMatrix id2 = ComplexMatrix::identity(ext.dim());
    const ComplexMatrix d1 = ext.op.adjoint() * ext.op - id2;
    const ComplexMatrix d2 = ext.op * ext.op.adjoint() - id2;
    // interior = drop the top two levels of each copy
    auto masked_norm = [&](const ComplexMatrix& m) {
        double s = 0.0;
        auto dropped = [&](int idx) {
            const int level = idx % ext.fock_dim;
            return level >= ext.fock_dim - 2;
        };
        for (int i = 0; i < m.dim(); ++i) {
            if (dropped(i)) continue;
            for (int j = 0; j < m.dim(); ++j)
                if (!dropped(j)) s += std::norm(m.at(i, j));
        }
        return std::sqrt(s);
    };
    out.extended_unitary = std::max(masked_norm(d1), masked_norm(d2));

    double restr = 0.0;
    for (int n = 1; n < d; ++n)
        for (int m = 0; m < d; ++m) {
            const cplx diff = ext.op.at(ext.index(0, m), ext.index(0, n)) - e.at(m, n);
            restr += std::norm(diff);
        }
    out.extended_restriction = std::sqrt(restr);

    double link = 0.0;
    for (int i = 0; i < ext.dim(); ++i) link += std::norm(ext.op.at(i, ext.index(0, 0)));
    out.vacuum_link_norm = std::sqrt(link);
    return out;
}

CanonicalObstruction canonical_commutator_obstruction(const Grid& g, double mass,
                                                      double hbar) {
    const HermitianOperator h = grid_hamiltonian(g, FreePotential{}, 4, mass, hbar);
    const Eigensystem es = hermitian_eigensystem(h);
    const int n = h.dim();

    // Work in the H eigenbasis: [H, T]_{jk} = (E_j - E_k) T_{jk}, so the
    // target C = i hbar 1 is reachable only off the degeneracy set. The
    // residual collects |C_jk| wherever E_j == E_k (at least the diagonal).
    const double scale = std::max(std::abs(es.values.front()),
                                  std::abs(es.values.back()));
    const double gap_tol = 1e-9 * std::max(1.0, scale);
    double res2 = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (std::abs(es.values[j] - es.values[k]) > gap_tol) continue;
            // C~ = V^dag (i hbar 1) V = i hbar V^dag V
            cplx c(0.0, 0.0);
            for (int r = 0; r < n; ++r)
                c += std::conj(es.vectors.at(r, j)) * es.vectors.at(r, k);
            c *= cplx(0.0, hbar);
            res2 += std::norm(c);
        }
    }

    CanonicalObstruction out;
    out.min_energy = es.values.front();
    out.residual = std::sqrt(res2);
    out.expected_floor = hbar * std::sqrt(double(n));
    return out;
}

}  // namespace qfound
