#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "qfound/polarizer.hpp"
#include "qfound/rng.hpp"

using namespace qfound;

namespace {
double cos2_deg(double deg) {
    const double c = std::cos(deg2rad(deg));
    return c * c;
}
}  // namespace

TEST_CASE("transmission probability: aligned, crossed, oblique") {
    const CopenhagenPhoton p0 = CopenhagenPhoton::linear(0.0);
    CHECK(copenhagen_transmit_probability(p0, Polarizer(0.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(copenhagen_transmit_probability(p0, Polarizer(90.0)) < 1e-12);
    CHECK(copenhagen_transmit_probability(p0, Polarizer(30.0)) ==
          doctest::Approx(0.75).epsilon(1e-14));
    // imperfect polarizer leaks the crossed channel
    CHECK(copenhagen_transmit_probability(p0, Polarizer(90.0, 0.1)) ==
          doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("Monte Carlo rate at 30 degrees matches cos^2") {
    const CopenhagenPhoton photon = CopenhagenPhoton::linear(0.0);
    const Polarizer pol(30.0);
    std::int64_t hits = 0;
    const std::int64_t n = 1000000;
    for (std::int64_t i = 0; i < n; ++i) {
        Rng rng(child_seed(404, i));
        if (copenhagen_transmit(photon, pol, rng).transmitted) ++hits;
    }
    CHECK(std::abs(double(hits) / double(n) - 0.75) < 0.002);
}

TEST_CASE("transmitted photons are re-prepared along the axis") {
    Rng rng(5);
    const CopenhagenPhoton photon = CopenhagenPhoton::linear(10.0);
    for (;;) {
        const CopenhagenTransmit t = copenhagen_transmit(photon, Polarizer(40.0), rng);
        if (!t.transmitted) continue;
        const CopenhagenPhoton want = CopenhagenPhoton::linear(40.0);
        CHECK(std::abs(t.photon.amp_h - want.amp_h) < 1e-15);
        CHECK(std::abs(t.photon.amp_v - want.amp_v) < 1e-15);
        break;
    }
}

TEST_CASE("two-polarizer chain probability") {
    CHECK(chain_probability_copenhagen(0.0, 0.0) == doctest::Approx(1.0));
    CHECK(chain_probability_copenhagen(45.0, 90.0) ==
          doctest::Approx(0.25).epsilon(1e-14));
    for (double a = 0.0; a <= 90.0; a += 7.5)
        CHECK(chain_probability_copenhagen(a, a + 90.0) < 1e-12);
    // order sensitivity: P(30, 90) = cos^2 30 cos^2 60 vs P(90, 30) = 0
    CHECK(chain_probability_copenhagen(30.0, 90.0) ==
          doctest::Approx(0.1875).epsilon(1e-14));
    CHECK(chain_probability_copenhagen(90.0, 30.0) < 1e-12);
}

TEST_CASE("polarizer and model parameter validation") {
    CHECK_THROWS_WITH_AS(Polarizer(0.0, 0.7),
                         "imperfectness must be < 0.5 and >= 0",
                         std::invalid_argument);
    CHECK_THROWS_AS(HVModelParams({0.5, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(HVModelParams({1.0, 1.5}).validate(), std::invalid_argument);
    CHECK(Polarizer(271.0).axis_deg == doctest::Approx(91.0));
}

TEST_CASE("hidden-variable kernel is 1 at zero detuning for any sharpness") {
    for (double s : {1.0, 2.0, 4.0, 9.5}) {
        CHECK(hv_kernel(0.0, s) == doctest::Approx(1.0));
        Rng rng(7);
        const HVPhoton photon{30.0, 0.999999};
        const HvTransmit t = hv_transmit(photon, Polarizer(30.0), {s, 1.0}, rng);
        CHECK(t.transmitted);
        CHECK(t.photon.hidden_angle_deg == doctest::Approx(30.0));
    }
}

TEST_CASE("calibration anchor: s=1, r=1 reproduces the Malus curve") {
    for (double theta : {15.0, 30.0, 45.0, 60.0, 75.0}) {
        const TwoPolarizerResult r = two_polarizer_experiment(
            PolarizerModel::HiddenVariable, theta, 200000, 909, {1.0, 1.0});
        const double want = cos2_deg(theta);
        const double sigma = r.conditional_stderr(want);
        CHECK(std::abs(r.conditional_rate() - want) < 3.0 * sigma + 1e-4);
    }
    // exact endpoints
    const TwoPolarizerResult r0 = two_polarizer_experiment(
        PolarizerModel::HiddenVariable, 0.0, 50000, 909, {1.0, 1.0});
    CHECK(r0.conditional_rate() == 1.0);
    const TwoPolarizerResult r90 = two_polarizer_experiment(
        PolarizerModel::HiddenVariable, 90.0, 50000, 909, {1.0, 1.0});
    CHECK(r90.conditional_rate() == 0.0);
}

TEST_CASE("sharp kernel without realignment departs from Malus") {
    const TwoPolarizerResult r = two_polarizer_experiment(
        PolarizerModel::HiddenVariable, 45.0, 100000, 31, {4.0, 0.0});
    CHECK(std::abs(r.conditional_rate() - 0.5) > 0.05);
}

TEST_CASE("coincidences: aligned, crossed, and classical deficit") {
    const HVModelParams malus{1.0, 1.0};
    const CoincidenceResult aligned = coincidence_experiment(
        20.0, 20.0, PairSource::EntangledCopenhagen, malus, 1000000, 77);
    CHECK(std::abs(aligned.rate() - 0.5) < 0.002);
    CHECK(aligned.correlation() == doctest::Approx(1.0));

    const CoincidenceResult crossed = coincidence_experiment(
        20.0, 110.0, PairSource::EntangledCopenhagen, malus, 1000000, 78);
    CHECK(crossed.rate() < 0.001);

    // a shared hidden angle cannot produce full correlation: rate -> 3/8
    const CoincidenceResult common = coincidence_experiment(
        20.0, 20.0, PairSource::CommonHiddenAngle, malus, 1000000, 79);
    const double sigma = std::sqrt(0.375 * 0.625 / 1e6);
    CHECK(common.rate() < 0.5 - 3.0 * sigma);
    CHECK(std::abs(common.rate() - 0.375) < 4.0 * sigma);
}

TEST_CASE("flat settings produce a vanishing CHSH combination") {
    const HVModelParams malus{1.0, 1.0};
    // every pair 45 degrees apart: correlations cos(90) = 0
    const CoincidenceResult r11 = coincidence_experiment(
        0.0, 45.0, PairSource::EntangledCopenhagen, malus, 200000, 5);
    const CoincidenceResult r12 = coincidence_experiment(
        0.0, 135.0, PairSource::EntangledCopenhagen, malus, 200000, 6);
    const CoincidenceResult r21 = coincidence_experiment(
        90.0, 45.0, PairSource::EntangledCopenhagen, malus, 200000, 7);
    const CoincidenceResult r22 = coincidence_experiment(
        90.0, 135.0, PairSource::EntangledCopenhagen, malus, 200000, 8);
    const ChshEstimate est = bell_from_coincidences(r11, r12, r21, r22);
    CHECK(std::abs(est.b_value) < 4.0 * est.stderr_b);
}

TEST_CASE("projective source reaches 2 sqrt2, shared hidden angle stays at 2") {
    const ChshEstimate cop = chsh_experiment(
        ChshSettings{}, PairSource::EntangledCopenhagen, {1.0, 1.0}, 1000000, 42);
    CHECK(std::abs(cop.b_value - 2.0 * std::sqrt(2.0)) < 0.02);
    CHECK(cop.b_value >= 2.7);

    for (const HVModelParams params :
         {HVModelParams{1.0, 1.0}, HVModelParams{4.0, 0.5}, HVModelParams{2.0, 0.3}}) {
        const ChshEstimate hv = chsh_experiment(
            ChshSettings{}, PairSource::CommonHiddenAngle, params, 400000, 43);
        CHECK(hv.b_value <= 2.0 + 3.0 * hv.stderr_b);
    }
}

TEST_CASE("locality of the simulation enforces the classical bound") {
    // arbitrary kernel parameters and settings: a shared hidden angle can
    // never push the CHSH combination past 2
    Rng rng(2718);
    for (int trial = 0; trial < 6; ++trial) {
        const HVModelParams params{1.0 + 5.0 * rng.uniform(), rng.uniform()};
        const ChshSettings settings{180.0 * rng.uniform(), 180.0 * rng.uniform(),
                                    180.0 * rng.uniform(), 180.0 * rng.uniform()};
        const ChshEstimate hv = chsh_experiment(
            settings, PairSource::CommonHiddenAngle, params, 100000, rng.next());
        CHECK(std::abs(hv.b_value) <= 2.0 + 3.0 * hv.stderr_b);
    }
}

TEST_CASE("coincidence runs must share parameters") {
    const HVModelParams malus{1.0, 1.0};
    const CoincidenceResult a = coincidence_experiment(
        0.0, 0.0, PairSource::EntangledCopenhagen, malus, 1000, 1);
    const CoincidenceResult b = coincidence_experiment(
        0.0, 0.0, PairSource::EntangledCopenhagen, malus, 2000, 1);
    CHECK_THROWS_AS(bell_from_coincidences(a, b, a, a), std::invalid_argument);
}

TEST_CASE("three-polarizer scan: crossed minimum for the projective model") {
    const std::vector<double> alphas{0.0, 15.0, 30.0, 45.0, 60.0};
    const auto pts = three_polarizer_scan(PolarizerModel::Copenhagen, alphas, 1,
                                          1, {1.0, 1.0});
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double want = std::fmod(alphas[i] + 90.0, 180.0);
        double diff = std::fabs(pts[i].beta_star_deg - want);
        diff = std::min(diff, 180.0 - diff);
        CHECK(diff < 1e-3);
        CHECK(pts[i].p_min < 1e-12);
    }
}

TEST_CASE("three-polarizer scan completes for the hidden-variable family") {
    const std::vector<double> alphas{20.0, 50.0};
    const auto pts = three_polarizer_scan(PolarizerModel::HiddenVariable, alphas,
                                          5000, 3, {4.0, 0.5});
    REQUIRE(pts.size() == 2);
    for (const ThreePolScanPoint& p : pts) {
        CHECK(p.p_min >= 0.0);
        CHECK(p.p_min <= 1.0);
        CHECK(std::isfinite(p.p_copenhagen));  // comparison column
    }
}

TEST_CASE("identical seeds and parameters reproduce identical counts") {
    const HVModelParams params{2.0, 0.4};
    const CoincidenceResult a = coincidence_experiment(
        10.0, 40.0, PairSource::CommonHiddenAngle, params, 300000, 555);
    const CoincidenceResult b = coincidence_experiment(
        10.0, 40.0, PairSource::CommonHiddenAngle, params, 300000, 555);
    CHECK(a.n_pp == b.n_pp);
    CHECK(a.n_pm == b.n_pm);
    CHECK(a.n_mp == b.n_mp);
    CHECK(a.n_mm == b.n_mm);

    // independent of the worker cap
    setenv("QFOUND_THREADS", "1", 1);
    const CoincidenceResult t1 = coincidence_experiment(
        10.0, 40.0, PairSource::CommonHiddenAngle, params, 300000, 555);
    setenv("QFOUND_THREADS", "3", 1);
    const CoincidenceResult t3 = coincidence_experiment(
        10.0, 40.0, PairSource::CommonHiddenAngle, params, 300000, 555);
    unsetenv("QFOUND_THREADS");
    CHECK(t1.n_pp == t3.n_pp);
    CHECK(t1.n_mm == t3.n_mm);
    CHECK(a.n_pp == t1.n_pp);
}
