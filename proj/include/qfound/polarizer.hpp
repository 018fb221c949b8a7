#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qfound/rng.hpp"

namespace qfound {

double deg2rad(double deg);
/// Reduce a polarization angle to [0, 180).
double wrap_angle_180(double deg);
/// Shortest signed polarization-angle difference, in (-90, 90].
double wrap_diff_90(double deg);

struct Polarizer {
    double axis_deg;       // [0, 180)
    double imperfectness;  // epsilon in [0, 0.5): leakage of the crossed channel

    explicit Polarizer(double axis, double eps = 0.0);
};

/// Pure polarization state over the {0 deg, 90 deg} linear basis.
struct CopenhagenPhoton {
    std::complex<double> amp_h{1.0, 0.0};
    std::complex<double> amp_v{0.0, 0.0};

    static CopenhagenPhoton linear(double angle_deg);
    double norm2() const;
};

/// eps + (1 - 2 eps) |<axis|psi>|^2.
double copenhagen_transmit_probability(const CopenhagenPhoton& photon,
                                       const Polarizer& pol);

struct CopenhagenTransmit {
    bool transmitted;
    CopenhagenPhoton photon;  // re-prepared along the axis when transmitted
};
CopenhagenTransmit copenhagen_transmit(const CopenhagenPhoton& photon,
                                       const Polarizer& pol, Rng& rng);

/// Transmission through polarizers at alpha then beta for a beam prepared
/// along 0 deg: the product of per-stage probabilities; for eps = 0 this is
/// cos^2(alpha) cos^2(alpha - beta).
double chain_probability_copenhagen(double alpha_deg, double beta_deg,
                                    double eps = 0.0);

/// Photon carrying a hidden polarization angle in [0, 180) plus an auxiliary
/// hidden decision variable in [0, 1).
struct HVPhoton {
    double hidden_angle_deg;
    double hidden_aux;
};

/// Two-parameter transmission family. sharpness = 1, realign = 1 reproduces
/// the ideal Malus chain exactly (calibration anchor); larger sharpness
/// narrows the acceptance kernel, realign < 1 leaves the hidden angle only
/// partially collapsed onto the axis after transmission.
struct HVModelParams {
    double sharpness = 1.0;  // s >= 1
    double realign = 1.0;    // r in [0, 1]
    void validate() const;
};

/// Acceptance kernel K(delta) = cos^(2s)(delta); K(0) = 1 for every s.
double hv_kernel(double delta_deg, double sharpness);

struct HvTransmit {
    bool transmitted;
    HVPhoton photon;  // hidden angle moved toward the axis, aux refreshed
};
HvTransmit hv_transmit(const HVPhoton& photon, const Polarizer& pol,
                       const HVModelParams& params, Rng& rng);

enum class PairSource { EntangledCopenhagen, CommonHiddenAngle };
enum class PolarizerModel { Copenhagen, HiddenVariable };

struct CoincidenceResult {
    std::int64_t n_pairs = 0;
    std::int64_t n_pp = 0, n_pm = 0, n_mp = 0, n_mm = 0;
    std::int64_t singles_a = 0, singles_b = 0;
    double alpha_deg = 0.0, beta_deg = 0.0;
    PairSource source = PairSource::EntangledCopenhagen;

    std::int64_t n_coincidences() const { return n_pp; }
    double rate() const;
    /// Two-channel correlation estimator (pp + mm - pm - mp) / n.
    double correlation() const;
    double correlation_stderr() const;
};

/// Photon-pair run at polarizer settings (alpha, beta). The Copenhagen source
/// samples the joint projective statistics of the aligned entangled pair
/// (both-transmit probability cos^2(alpha-beta)/2); the hidden-variable
/// source gives both photons one shared uniform hidden angle and independent
/// auxiliaries. Deterministic for a fixed seed and any thread count.
CoincidenceResult coincidence_experiment(double alpha_deg, double beta_deg,
                                         PairSource source,
                                         const HVModelParams& params,
                                         std::int64_t n_pairs,
                                         std::uint64_t seed);

struct ChshSettings {
    double a1_deg = 45.0, a2_deg = 0.0, b1_deg = 22.5, b2_deg = 67.5;
};

struct ChshEstimate {
    double b_value = 0.0;
    double stderr_b = 0.0;
    std::vector<CoincidenceResult> runs;  // (a1,b1), (a1,b2), (a2,b1), (a2,b2)
};

/// B = E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2) from four coincidence runs
/// that must share n_pairs and source type.
ChshEstimate bell_from_coincidences(const CoincidenceResult& r11,
                                    const CoincidenceResult& r12,
                                    const CoincidenceResult& r21,
                                    const CoincidenceResult& r22);

ChshEstimate chsh_experiment(const ChshSettings& settings, PairSource source,
                             const HVModelParams& params, std::int64_t n_pairs,
                             std::uint64_t seed);

struct TwoPolarizerResult {
    std::int64_t n_source = 0;
    std::int64_t n_first = 0;
    std::int64_t n_both = 0;
    double conditional_rate() const;  // stage-2 transmission given stage-1
    double conditional_stderr(double p_reference) const;
};

/// Unpolarized ensemble through a polarizer at 0 deg then one at theta.
TwoPolarizerResult two_polarizer_experiment(PolarizerModel model, double theta_deg,
                                            std::int64_t n_photons,
                                            std::uint64_t seed,
                                            const HVModelParams& params,
                                            double eps = 0.0);

struct ThreePolScanPoint {
    double alpha_deg;
    double beta_star_deg;   // transmission-minimizing third axis
    double p_min;           // minimal transmission (conditional on stage 1)
    double p_copenhagen;    // cos^2-chain value at (alpha, beta_star)
};

/// For each alpha, minimizes total transmission of the 0/alpha/beta chain
/// over beta by golden-section search (bracket width 1e-4 deg). The
/// Copenhagen objective is analytic; the hidden-variable objective is a
/// common-random-number Monte Carlo, so it is a deterministic function of
/// beta for a fixed seed.
std::vector<ThreePolScanPoint> three_polarizer_scan(
    PolarizerModel model, const std::vector<double>& alpha_grid_deg,
    std::int64_t n_photons, std::uint64_t seed, const HVModelParams& params,
    double eps = 0.0);

}  // namespace qfound
