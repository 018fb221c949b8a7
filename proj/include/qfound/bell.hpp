#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfound/linalg.hpp"

namespace qfound {

enum class CommutationRegime { NonCommuting, CrossCommuting, AllCommuting };

const char* regime_name(CommutationRegime r);

/// |<B>| ceiling for each regime: 2*sqrt(3), 2*sqrt(2), 2.
double regime_ceiling(CommutationRegime r);

/// <B B^dag> ceiling for each regime: 12, 8, 4.
double regime_bb_ceiling(CommutationRegime r);

struct RegimeViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Measurement operator with spectrum confined to [-1, 1].
struct DichotomicObservable {
    HermitianOperator op;
    std::string label;

    DichotomicObservable(HermitianOperator o, std::string lbl);
};

/// Four dichotomic observables acting on a common space, a commutation-regime
/// tag and the evaluation state. For the cross-commuting regime the
/// observables are embeddings a (x) 1 and 1 (x) b; dim_a/dim_b record the
/// factor split (0 otherwise).
struct BellConfiguration {
    CommutationRegime regime;
    DichotomicObservable a1, a2, b1, b2;
    StateVector state;
    int dim_a = 0, dim_b = 0;
};

BellConfiguration make_noncommuting_config(const ComplexMatrix& a1,
                                           const ComplexMatrix& a2,
                                           const ComplexMatrix& b1,
                                           const ComplexMatrix& b2,
                                           StateVector state);

/// Builds embeddings a_j (x) 1 and 1 (x) b_k from factor operators.
BellConfiguration make_crosscommuting_config(const ComplexMatrix& a1,
                                             const ComplexMatrix& a2,
                                             const ComplexMatrix& b1,
                                             const ComplexMatrix& b2,
                                             StateVector state);

BellConfiguration make_allcommuting_config(const std::vector<double>& a1,
                                           const std::vector<double>& a2,
                                           const std::vector<double>& b1,
                                           const std::vector<double>& b2,
                                           StateVector state);

/// Raw constructor for pre-embedded full-space operators; validates the
/// claimed regime before use.
BellConfiguration make_config(CommutationRegime regime, const ComplexMatrix& a1,
                              const ComplexMatrix& a2, const ComplexMatrix& b1,
                              const ComplexMatrix& b2, StateVector state,
                              int dim_a = 0, int dim_b = 0);

/// Throws RegimeViolation when a commutator that the regime requires to vanish
/// has norm above 1e-8.
void validate_regime(const BellConfiguration& cfg);

/// B = a1 b1 + a1 b2 + a2 b1 - a2 b2 (plain operator products; in the
/// cross-commuting regime these reduce to tensor products of the factors).
ComplexMatrix bell_operator(const BellConfiguration& cfg);

cplx bell_expectation(const BellConfiguration& cfg);

/// operator_norm(B B^dag); checked against the regime ceiling (12 / 8 / 4)
/// and the crude ceiling 16.
double bb_dagger_bound(const BellConfiguration& cfg);

/// Exhaustive maximum of a1 b1 + a2 b1 + a1 b2 - a2 b2 over deterministic
/// +-1 assignments. Integer arithmetic; equals 2 exactly.
double lhv_bound();

struct LhvStrategy {
    int a1, a2, b1, b2;
    int value;
};
std::vector<LhvStrategy> lhv_strategies();

/// Maximum of the CHSH combination over `count` random convex mixtures of the
/// 16 deterministic strategies.
double lhv_mixture_max(std::int64_t count, std::uint64_t seed);

struct ViolationResult {
    double value = 0.0;
    BellConfiguration cfg;
};

struct ViolationOptions {
    int max_nm_evaluations = 2500;
    int polish_sweeps = 300;
    double nm_diameter_tol = 1e-9;
};

/// Derivative-free maximization of |<B>| over regime-consistent observables
/// and states: Nelder-Mead restarts over spectrally clamped Hermitian
/// generators, each run finished with a monotone alternating ascent whose
/// closed-form updates keep the spectra inside [-1, 1]. `dim` is the factor
/// dimension in the cross-commuting regime and the full space dimension
/// otherwise. Restart r uses generator seed `seed + r`; the result is the max
/// over restarts and does not depend on scheduling.
ViolationResult maximize_violation(CommutationRegime regime, int dim,
                                   std::uint64_t seed, int restarts,
                                   const ViolationOptions& opts = {});

/// The textbook maximal configuration: a1 = (Z+X)/sqrt2-side assignment with
/// measurement angles {45, 0, 22.5, 67.5} degrees on a shared Bell state;
/// <B> = 2*sqrt(2) exactly.
BellConfiguration chsh_optimal_configuration();

/// Random spectrum-clamped observable; `extreme` draws an involution
/// (eigenvalues +-1) instead of a soft clamp.
ComplexMatrix random_contraction(int dim, class Rng& rng, bool extreme);

struct RandomQuadrupleScan {
    double max_bb_norm = 0.0;   // max operator_norm(B B^dag)
    double max_abs_b = 0.0;     // max |<B>| over sampled states
    std::int64_t samples = 0;
};

/// Samples random non-commuting contraction quadruples on dims [dim_min,
/// dim_max], accumulating the extremes of the certified bounds.
RandomQuadrupleScan scan_random_quadruples(std::int64_t samples, int dim_min,
                                           int dim_max, std::uint64_t seed);

}  // namespace qfound
