#pragma once

#include "qfound/bohm.hpp"
#include "qfound/linalg.hpp"

namespace qfound {

/// Number-state space truncated at level N (dimension N+1), with the standard
/// ladder action a|n> = sqrt(n)|n-1>, a^dag|n> = sqrt(n+1)|n+1> (cut at the
/// top). The Hamiltonian is assembled from the truncated quadratures
/// p^2/2m + m omega^2 q^2 / 2, which equals omega(n + 1/2) everywhere except
/// the top level; assertions therefore exclude the top two levels.
struct FockSpace {
    int truncation = 32;  // N >= 8
    double omega = 1.0;
    double mass = 1.0;
    double hbar = 1.0;

    FockSpace(int n_trunc, double w = 1.0, double m = 1.0, double hb = 1.0);

    int dim() const { return truncation + 1; }
    ComplexMatrix lowering() const;
    ComplexMatrix raising() const;
    ComplexMatrix number() const;
    ComplexMatrix position() const;
    ComplexMatrix momentum() const;
    ComplexMatrix hamiltonian() const;
};

/// Frobenius norm of a matrix restricted to levels 0..dim-1-drop_top.
double interior_norm(const ComplexMatrix& m, int drop_top);

struct LadderDefects {
    double lowering_defect;  // ||[H,a] + omega a||
    double raising_defect;   // ||[H,a+] - omega a+||
};

/// Defects on the truncation interior (top 2 levels excluded).
LadderDefects ladder_commutators(const FockSpace& f);
/// Full-matrix defects, including the truncation-boundary artifact.
LadderDefects ladder_commutators_full(const FockSpace& f);

/// Number-lowering exponential phase operator E = (a a^dag)^(-1/2) a
/// (pseudo-inverse square root): E|n> = |n-1>, E|0> = 0. Isometric from the
/// left on the vacuum complement, co-isometric on the interior; not unitary.
ComplexMatrix sg_operator(const FockSpace& f);

/// Two ladder copies (opposite angular momentum labels) chained at their
/// vacua: the extended operator shifts |n,+> -> |n-1,+>, links |0,+> ->
/// |0,->, and walks down the second copy |n,-> -> |n+1,->. On the doubled
/// space it is a bilateral shift, unitary away from the truncation ends, and
/// restricted to copy + it reproduces sg_operator.
struct ExtendedPhaseSpace {
    int fock_dim;       // N+1
    ComplexMatrix op;   // 2(N+1) x 2(N+1)
    int index(int copy, int level) const { return copy * fock_dim + level; }
    int dim() const { return 2 * fock_dim; }
};

ExtendedPhaseSpace extended_phase_space(const FockSpace& f);

struct PhaseOperatorChecks {
    double ee_dag_interior;       // ||E E+ - 1||, levels 0..N-2
    double edag_e_vacuum;         // ||E+ E - (1 - |0><0|)||, full matrix
    double sg_commutator_interior;  // ||[H,E] + omega E||, levels 0..N-2
    double extended_unitary;      // worst defect of E~+E~ and E~E~+, interiors
    double extended_restriction;  // ||E~ restricted to copy+ nonvacuum - E||
    double vacuum_link_norm;      // |E~ |0,+>|, should be 1
};

PhaseOperatorChecks phase_operator_checks(const FockSpace& f);

/// Finite-dimensional form of the bounded-below-spectrum obstruction: the
/// free grid Hamiltonian has min eigenvalue >= 0, and no Hermitian T can
/// satisfy [H, T] = i hbar 1 -- the least-squares residual over all T equals
/// hbar sqrt(dim) (the diagonal of i hbar 1 in the H eigenbasis is
/// unreachable).
struct CanonicalObstruction {
    double min_energy;
    double residual;        // min over T of ||[H,T] - i hbar 1||_F
    double expected_floor;  // hbar * sqrt(dim)
};

CanonicalObstruction canonical_commutator_obstruction(const Grid& g,
                                                      double mass = 1.0,
                                                      double hbar = 1.0);

}  // namespace qfound
