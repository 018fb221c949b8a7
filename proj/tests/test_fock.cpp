#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qfound/fock.hpp"
#include "test_support.hpp"

using namespace qfound;

TEST_CASE("ladder matrices act as sqrt(n) shifts") {
    const FockSpace f(12);
    const ComplexMatrix a = f.lowering();
    const ComplexMatrix ad = f.raising();
    for (int n = 1; n <= 12; ++n)
        CHECK(std::abs(a.at(n - 1, n) - std::sqrt(double(n))) < 1e-15);
    for (int n = 0; n < 12; ++n)
        CHECK(std::abs(ad.at(n + 1, n) - std::sqrt(double(n + 1))) < 1e-15);
    // a|0> = 0: first column vanishes
    for (int i = 0; i <= 12; ++i) CHECK(std::abs(a.at(i, 0)) == 0.0);
    // number operator diagonal 0..N
    const ComplexMatrix num = f.number();
    for (int n = 0; n <= 12; ++n) CHECK(num.at(n, n).real() == double(n));
    CHECK_THROWS_AS(FockSpace(4), std::invalid_argument);
}

TEST_CASE("ladder commutators close on the truncation interior") {
    for (double omega : {1.0, 2.5}) {
        const FockSpace f(16, omega);
        const LadderDefects d = ladder_commutators(f);
        CHECK(d.lowering_defect < 1e-12);
        CHECK(d.raising_defect < 1e-12);
    }
}

TEST_CASE("truncation artifact is confined to the top levels") {
    const FockSpace f16(16);
    const LadderDefects full16 = ladder_commutators_full(f16);
    // the quadrature Hamiltonian misses omega(N+1/2) only at level N, which
    // feeds the single entry (N-1, N): magnitude omega (N/2 + 1/2) sqrt(N)
    const double want16 = (16.0 / 2.0 + 0.5) * std::sqrt(16.0);
    CHECK(full16.lowering_defect == doctest::Approx(want16).epsilon(1e-12));

    // doubling the truncation pushes the artifact out of the old window:
    // the N=32 defect restricted to levels 0..15 vanishes
    const FockSpace f32(32);
    const ComplexMatrix h = f32.hamiltonian();
    const ComplexMatrix a = f32.lowering();
    ComplexMatrix defect = commutator(h, a);
    defect += cplx(1.0, 0.0) * a;
    double sub = 0.0;
    for (int i = 0; i <= 16; ++i)
        for (int j = 0; j <= 16; ++j) sub += std::norm(defect.at(i, j));
    CHECK(std::sqrt(sub) < 1e-12);
}

TEST_CASE("phase operator lowers number states and annihilates the vacuum") {
    const FockSpace f(16);
    const ComplexMatrix e = sg_operator(f);
    for (int i = 0; i <= 16; ++i) CHECK(std::abs(e.at(i, 0)) == 0.0);
    for (int n = 1; n <= 16; ++n)
        for (int m = 0; m <= 16; ++m)
            CHECK(std::abs(e.at(m, n) - (m == n - 1 ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("phase operator: isometry defect is exactly the vacuum") {
    const FockSpace f(32);
    const PhaseOperatorChecks c = phase_operator_checks(f);
    CHECK(c.ee_dag_interior < 1e-12);       // E E+ = 1 away from the top
    CHECK(c.edag_e_vacuum < 1e-12);         // E+ E = 1 - |0><0| exactly
    CHECK(c.sg_commutator_interior < 1e-12);

    const ComplexMatrix e = sg_operator(f);
    const ComplexMatrix ee = e * e.adjoint();
    // full matrix: the top level betrays the truncation
    CHECK(std::abs(ee.at(32, 32)) == 0.0);
    CHECK(std::abs(ee.at(31, 31) - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("doubled space: vacuum link makes the shift unitary") {
    const FockSpace f(32);
    const PhaseOperatorChecks c = phase_operator_checks(f);
    CHECK(c.extended_unitary < 1e-12);
    CHECK(c.extended_restriction < 1e-15);
    CHECK(c.vacuum_link_norm == doctest::Approx(1.0).epsilon(1e-15));

    const ExtendedPhaseSpace ext = extended_phase_space(f);
    // |0,+> maps to |0,->
    CHECK(std::abs(ext.op.at(ext.index(1, 0), ext.index(0, 0)) - cplx(1.0, 0.0)) ==
          0.0);
    // and the only unitarity defects sit at the two chain ends
    const ComplexMatrix id = ComplexMatrix::identity(ext.dim());
    const ComplexMatrix d1 = ext.op.adjoint() * ext.op - id;
    const ComplexMatrix d2 = ext.op * ext.op.adjoint() - id;
    CHECK(std::abs(d1.at(ext.index(1, 32), ext.index(1, 32)) + cplx(1.0, 0.0)) <
          1e-15);
    CHECK(std::abs(d2.at(ext.index(0, 32), ext.index(0, 32)) + cplx(1.0, 0.0)) <
          1e-15);
    CHECK(d1.frobenius_norm() == doctest::Approx(1.0));
    CHECK(d2.frobenius_norm() == doctest::Approx(1.0));
}

TEST_CASE("finite grids obstruct the canonical commutator") {
    const Grid g{-8.0, 8.0, 96};
    const CanonicalObstruction o = canonical_commutator_obstruction(g);
    CHECK(o.min_energy >= -1e-9);  // spectrum bounded below
    CHECK(o.expected_floor == doctest::Approx(std::sqrt(94.0)).epsilon(1e-12));
    CHECK(std::abs(o.residual - o.expected_floor) < 1e-9);

    // no Hermitian T does better than the floor
    const HermitianOperator h = grid_hamiltonian(g, FreePotential{}, 4);
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix t = testsup::random_hermitian(h.dim(), rng, 3.0);
        ComplexMatrix d = commutator(h.matrix(), t);
        for (int i = 0; i < d.dim(); ++i) d.at(i, i) -= cplx(0.0, 1.0);
        CHECK(d.frobenius_norm() >= o.residual - 1e-9);
    }
}
