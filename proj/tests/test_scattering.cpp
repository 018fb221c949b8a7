#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qfound/scattering.hpp"

using namespace qfound;

namespace {

GridWavefunction mirrored(const GridWavefunction& psi) {
    GridWavefunction out = psi;
    std::reverse(out.values.begin(), out.values.end());
    return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = lo + (hi - lo) * i / (n - 1);
    return t;
}

}  // namespace

TEST_CASE("dilation expectation: symmetries and classical value") {
    const Grid g{-40.0, 40.0, 1601};
    const GridWavefunction rest = make_gaussian(g, 0.0, 0.0, 1.0);
    CHECK(std::abs(r_expectation(rest)) < 1e-9);

    const GridWavefunction moving = make_gaussian(g, 4.0, 1.5, 0.4);
    const double r = r_expectation(moving);
    CHECK(std::abs(r / (4.0 * 1.5) - 1.0) < 0.05);

    // mirror reflection flips x and p together, so an incoming state stays
    // incoming: <R> is invariant (the classification cannot depend on the
    // coordinate choice)
    CHECK(std::abs(r_expectation(mirrored(moving)) - r) < 1e-9);

    // motion reversal (conjugation) flips p only and negates <R>
    GridWavefunction reversed = moving;
    for (cplx& z : reversed.values) z = std::conj(z);
    CHECK(std::abs(r_expectation(reversed) + r) < 1e-9);
}

TEST_CASE("momentum diagnostics on a boosted packet") {
    const Grid g{-40.0, 40.0, 1601};
    const double p0 = 1.25, sigma = 1.5;
    const GridWavefunction psi = make_gaussian(g, 2.0, p0, sigma);
    CHECK(std::abs(momentum_expectation(psi) - p0) < 1e-9);
    const double want_p2 = p0 * p0 + 1.0 / (4.0 * sigma * sigma);
    CHECK(std::abs(momentum_squared_expectation(psi) - want_p2) < 1e-9);
}

TEST_CASE("free traces increase at rate <p^2>/m") {
    struct Packet {
        double x0, p0;
    };
    for (const Packet pk : {Packet{12.0, -3.0}, Packet{0.0, 0.0}, Packet{-10.0, 2.5}}) {
        const Grid g{-48.0, 48.0, 1921};
        const GridWavefunction psi0 = make_gaussian(g, pk.x0, pk.p0, 2.0);
        const auto trace = monotonicity_trace(psi0, 2e-3, 2000, 100);
        REQUIRE(trace.size() >= 10);
        for (std::size_t i = 1; i < trace.size(); ++i)
            CHECK(trace[i].r - trace[i - 1].r > -1e-10);
        const double slope = (trace.back().r - trace.front().r) /
                             (trace.back().t - trace.front().t);
        double mean_p2 = 0.0;
        for (const RTracePoint& p : trace) mean_p2 += p.p2 / trace.size();
        CHECK(std::abs(slope - mean_p2) / mean_p2 < 0.01);
    }
}

TEST_CASE("incoming packet transits In -> ambiguous -> Out exactly once") {
    const Grid g{-48.0, 48.0, 1921};
    const GridWavefunction psi0 = make_gaussian(g, 12.0, -3.0, 2.0);
    const auto trace = monotonicity_trace(psi0, 2e-3, 4000, 100);
    const double band = 3.0;
    std::string pattern;
    for (const RTracePoint& p : trace) {
        const char c = p.r < -band ? 'I' : (p.r > band ? 'O' : 'A');
        if (pattern.empty() || pattern.back() != c) pattern += c;
    }
    CHECK(pattern == "IAO");
}

TEST_CASE("classification thresholds") {
    const Grid g{-48.0, 48.0, 1921};
    CHECK(classify_in_out(make_gaussian(g, 12.0, -3.0, 2.0)) == SubspaceTag::In);
    CHECK(classify_in_out(make_gaussian(g, 10.0, 2.0, 2.0)) == SubspaceTag::Out);
    // symmetric rest packet: <R> = 0 by parity, inside the noise band
    CHECK(!classify_in_out(make_gaussian(g, 0.0, 0.0, 2.0)).has_value());
}

TEST_CASE("decay: exponential law, absorbing Out, untouched In") {
    const DecayModel model(1, 1, 1, 1.0);
    const auto samples = resonance_decay(model, linspace(0.0, 3.0, 61));
    CHECK(samples.front().p_in == 0.0);
    CHECK(samples.front().p_res == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(samples.front().p_out == 0.0);

    double rmse = 0.0;
    for (const DecaySample& s : samples) {
        CHECK(s.p_in == 0.0);
        CHECK(std::abs(s.p_in + s.p_res + s.p_out - 1.0) < 1e-9);
        const double ref = std::exp(-s.t);
        rmse += (s.p_res / ref - 1.0) * (s.p_res / ref - 1.0);
    }
    rmse = std::sqrt(rmse / samples.size());
    CHECK(rmse < 0.01);

    // half-life spot check
    const auto half = resonance_decay(model, {std::log(2.0)});
    CHECK(std::abs(half[0].p_res - 0.5) < 0.005);
}

TEST_CASE("decay: internal mixing leaves the block total exponential") {
    const DecayModel model(2, 3, 2, 0.7, 0.0, 2.5);
    const auto samples = resonance_decay(model, linspace(0.0, 4.0, 33));
    for (const DecaySample& s : samples) {
        CHECK(std::abs(s.p_res - std::exp(-0.7 * s.t)) < 1e-6);
        CHECK(s.p_in == 0.0);
        CHECK(std::abs(s.p_in + s.p_res + s.p_out - 1.0) < 1e-9);
    }
}

TEST_CASE("decay: invalid generators are rejected at construction") {
    // non-conservative column
    std::vector<double> bad{-1.0, 0.0, 0.0,
                            0.5, 0.0, 0.0,
                            0.0, 0.0, 0.0};
    CHECK_THROWS_AS(DecayModel::from_generator(1, 1, 1, bad), std::invalid_argument);

    // Res -> In back-coupling
    std::vector<double> back{0.0, 0.5, 0.0,
                             0.0, -0.5, 0.0,
                             0.0, 0.0, 0.0};
    CHECK_THROWS_AS(DecayModel::from_generator(1, 1, 1, back), std::invalid_argument);

    // leaking Out block
    std::vector<double> leak{0.0, 0.0, 0.0,
                             0.0, 0.0, 0.5,
                             0.0, 0.0, -0.5};
    CHECK_THROWS_AS(DecayModel::from_generator(1, 1, 1, leak), std::invalid_argument);

    CHECK_THROWS_AS(DecayModel(1, 1, 1, -2.0), std::invalid_argument);
}
