#include "qfound/polarizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "qfound/parallel.hpp"

namespace qfound {

double deg2rad(double deg) { return deg * M_PI / 180.0; }

double wrap_angle_180(double deg) {
    double a = std::fmod(deg, 180.0);
    if (a < 0.0) a += 180.0;
    return a;
}

double wrap_diff_90(double deg) {
    double d = std::fmod(deg, 180.0);
    if (d > 90.0) d -= 180.0;
    if (d <= -90.0) d += 180.0;
    return d;
}

Polarizer::Polarizer(double axis, double eps)
    : axis_deg(wrap_angle_180(axis)), imperfectness(eps) {
    if (!(eps >= 0.0 && eps < 0.5))
        throw std::invalid_argument("imperfectness must be < 0.5 and >= 0");
}

CopenhagenPhoton CopenhagenPhoton::linear(double angle_deg) {
    const double a = deg2rad(angle_deg);
    return {std::cos(a), std::sin(a)};
}

double CopenhagenPhoton::norm2() const {
    return std::norm(amp_h) + std::norm(amp_v);
}

double copenhagen_transmit_probability(const CopenhagenPhoton& photon,
                                       const Polarizer& pol) {
    if (std::abs(photon.norm2() - 1.0) > 1e-12)
        throw std::invalid_argument("photon state is not normalized");
    const double a = deg2rad(pol.axis_deg);
    const std::complex<double> overlap =
        std::cos(a) * photon.amp_h + std::sin(a) * photon.amp_v;
    return pol.imperfectness +
           (1.0 - 2.0 * pol.imperfectness) * std::norm(overlap);
}

CopenhagenTransmit copenhagen_transmit(const CopenhagenPhoton& photon,
                                       const Polarizer& pol, Rng& rng) {
    const double p = copenhagen_transmit_probability(photon, pol);
    if (rng.uniform() < p) return {true, CopenhagenPhoton::linear(pol.axis_deg)};
    return {false, photon};
}

double chain_probability_copenhagen(double alpha_deg, double beta_deg,
                                    double eps) {
    const Polarizer pa(alpha_deg, eps);
    const Polarizer pb(beta_deg, eps);
    const double p1 =
        copenhagen_transmit_probability(CopenhagenPhoton::linear(0.0), pa);
    const double p2 = copenhagen_transmit_probability(
        CopenhagenPhoton::linear(pa.axis_deg), pb);
    return p1 * p2;
}

void HVModelParams::validate() const {
    if (!(sharpness >= 1.0))
        throw std::invalid_argument("sharpness must be >= 1");
    if (!(realign >= 0.0 && realign <= 1.0))
        throw std::invalid_argument("realign must be in [0, 1]");
}

double hv_kernel(double delta_deg, double sharpness) {
    const double c2 = std::pow(std::cos(deg2rad(delta_deg)), 2);
    return std::pow(c2, sharpness);
}

HvTransmit hv_transmit(const HVPhoton& photon, const Polarizer& pol,
                       const HVModelParams& params, Rng& rng) {
    params.validate();
    const double delta = wrap_diff_90(photon.hidden_angle_deg - pol.axis_deg);
    const double k = hv_kernel(delta, params.sharpness);
    if (photon.hidden_aux < k) {
        HVPhoton out;
        out.hidden_angle_deg = wrap_angle_180(photon.hidden_angle_deg -
                                              params.realign * delta);
        out.hidden_aux = rng.uniform();
        return {true, out};
    }
    return {false, photon};
}

double CoincidenceResult::rate() const {
    return n_pairs > 0 ? static_cast<double>(n_pp) / static_cast<double>(n_pairs)
                       : 0.0;
}

double CoincidenceResult::correlation() const {
    if (n_pairs <= 0) return 0.0;
    return static_cast<double>(n_pp + n_mm - n_pm - n_mp) /
           static_cast<double>(n_pairs);
}

double CoincidenceResult::correlation_stderr() const {
    if (n_pairs <= 0) return 0.0;
    const double e = correlation();
    const double var = std::max(0.0, 1.0 - e * e);
    return std::sqrt(var / static_cast<double>(n_pairs));
}

namespace {

struct PairCounts {
    std::int64_t pp = 0, pm = 0, mp = 0, mm = 0;
};

PairCounts simulate_pair_range(double alpha_deg, double beta_deg,
                               PairSource source, const HVModelParams& params,
                               std::int64_t lo, std::int64_t hi,
                               std::uint64_t seed) {
    PairCounts c;
    const double delta = deg2rad(alpha_deg - beta_deg);
    const double cos2 = std::cos(delta) * std::cos(delta);
    const Polarizer pa(alpha_deg);
    const Polarizer pb(beta_deg);
    for (std::int64_t i = lo; i < hi; ++i) {
        Rng rng(child_seed(seed, static_cast<std::uint64_t>(i)));
        bool a_plus, b_plus;
        if (source == PairSource::EntangledCopenhagen) {
            a_plus = rng.uniform() < 0.5;
            const double p_b = a_plus ? cos2 : 1.0 - cos2;
            b_plus = rng.uniform() < p_b;
        } else {
            const double lambda = 180.0 * rng.uniform();
            HVPhoton pha{lambda, rng.uniform()};
            HVPhoton phb{lambda, rng.uniform()};
            a_plus = hv_transmit(pha, pa, params, rng).transmitted;
            b_plus = hv_transmit(phb, pb, params, rng).transmitted;
        }
        if (a_plus && b_plus)
            ++c.pp;
        else if (a_plus)
            ++c.pm;
        else if (b_plus)
            ++c.mp;
        else
            ++c.mm;
    }
    return c;
}

}  // namespace

CoincidenceResult coincidence_experiment(double alpha_deg, double beta_deg,
                                         PairSource source,
                                         const HVModelParams& params,
                                         std::int64_t n_pairs,
                                         std::uint64_t seed) {
    if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
    if (source == PairSource::CommonHiddenAngle) params.validate();

    const int chunks = std::max(1, chunk_count(n_pairs));
    std::vector<PairCounts> per_chunk(chunks);
    parallel_chunks(n_pairs, [&](std::int64_t lo, std::int64_t hi, int c) {
        per_chunk[c] =
            simulate_pair_range(alpha_deg, beta_deg, source, params, lo, hi, seed);
    });

    CoincidenceResult r;
    r.n_pairs = n_pairs;
    r.alpha_deg = alpha_deg;
    r.beta_deg = beta_deg;
    r.source = source;
    for (const PairCounts& c : per_chunk) {
        r.n_pp += c.pp;
        r.n_pm += c.pm;
        r.n_mp += c.mp;
        r.n_mm += c.mm;
    }
    r.singles_a = r.n_pp + r.n_pm;
    r.singles_b = r.n_pp + r.n_mp;
    return r;
}

ChshEstimate bell_from_coincidences(const CoincidenceResult& r11,
                                    const CoincidenceResult& r12,
                                    const CoincidenceResult& r21,
                                    const CoincidenceResult& r22) {
    const CoincidenceResult* rs[4] = {&r11, &r12, &r21, &r22};
    for (int i = 1; i < 4; ++i) {
        if (rs[i]->n_pairs != rs[0]->n_pairs || rs[i]->source != rs[0]->source)
            throw std::invalid_argument(
                "coincidence runs do not share n_pairs and source type");
    }
    ChshEstimate e;
    e.b_value = r11.correlation() + r12.correlation() + r21.correlation() -
                r22.correlation();
    double var = 0.0;
    for (const CoincidenceResult* r : rs) {
        const double s = r->correlation_stderr();
        var += s * s;
    }
    e.stderr_b = std::sqrt(var);
    e.runs = {r11, r12, r21, r22};
    return e;
}

ChshEstimate chsh_experiment(const ChshSettings& settings, PairSource source,
                             const HVModelParams& params, std::int64_t n_pairs,
                             std::uint64_t seed) {
    const CoincidenceResult r11 = coincidence_experiment(
        settings.a1_deg, settings.b1_deg, source, params, n_pairs,
        child_seed(seed, 0));
    const CoincidenceResult r12 = coincidence_experiment(
        settings.a1_deg, settings.b2_deg, source, params, n_pairs,
        child_seed(seed, 1));
    const CoincidenceResult r21 = coincidence_experiment(
        settings.a2_deg, settings.b1_deg, source, params, n_pairs,
        child_seed(seed, 2));
    const CoincidenceResult r22 = coincidence_experiment(
        settings.a2_deg, settings.b2_deg, source, params, n_pairs,
        child_seed(seed, 3));
    return bell_from_coincidences(r11, r12, r21, r22);
}

double TwoPolarizerResult::conditional_rate() const {
    return n_first > 0 ? static_cast<double>(n_both) / static_cast<double>(n_first)
                       : 0.0;
}

double TwoPolarizerResult::conditional_stderr(double p_reference) const {
    if (n_first <= 0) return 0.0;
    const double v = std::max(0.0, p_reference * (1.0 - p_reference));
    return std::sqrt(v / static_cast<double>(n_first));
}

namespace {

struct StageCounts {
    std::int64_t first = 0, both = 0;
};

}  // namespace

TwoPolarizerResult two_polarizer_experiment(PolarizerModel model, double theta_deg,
                                            std::int64_t n_photons,
                                            std::uint64_t seed,
                                            const HVModelParams& params,
                                            double eps) {
    if (n_photons < 1) throw std::invalid_argument("n_photons must be >= 1");
    if (model == PolarizerModel::HiddenVariable) params.validate();
    const Polarizer p0(0.0, eps);
    const Polarizer p1(theta_deg, eps);

    const int chunks = std::max(1, chunk_count(n_photons));
    std::vector<StageCounts> per_chunk(chunks);
    parallel_chunks(n_photons, [&](std::int64_t lo, std::int64_t hi, int c) {
        StageCounts sc;
        for (std::int64_t i = lo; i < hi; ++i) {
            Rng rng(child_seed(seed, static_cast<std::uint64_t>(i)));
            if (model == PolarizerModel::Copenhagen) {
                const CopenhagenPhoton photon =
                    CopenhagenPhoton::linear(180.0 * rng.uniform());
                const CopenhagenTransmit t0 = copenhagen_transmit(photon, p0, rng);
                if (!t0.transmitted) continue;
                ++sc.first;
                if (copenhagen_transmit(t0.photon, p1, rng).transmitted) ++sc.both;
            } else {
                HVPhoton photon{180.0 * rng.uniform(), rng.uniform()};
                const HvTransmit t0 = hv_transmit(photon, p0, params, rng);
                if (!t0.transmitted) continue;
                ++sc.first;
                if (hv_transmit(t0.photon, p1, params, rng).transmitted) ++sc.both;
            }
        }
        per_chunk[c] = sc;
    });

    TwoPolarizerResult r;
    r.n_source = n_photons;
    for (const StageCounts& sc : per_chunk) {
        r.n_first += sc.first;
        r.n_both += sc.both;
    }
    return r;
}

namespace {

// Golden-section minimization; terminates when the bracket is narrower than
// tol and returns its midpoint.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

// Conditional three-stage transmission for the hidden-variable model with a
// frozen photon stream (common random numbers across beta candidates).
double hv_three_stage_rate(double alpha_deg, double beta_deg,
                           const HVModelParams& params, double eps,
                           std::int64_t n_photons, std::uint64_t seed) {
    const Polarizer p0(0.0, eps);
    const Polarizer p1(alpha_deg, eps);
    const Polarizer p2(beta_deg, eps);
    const int chunks = std::max(1, chunk_count(n_photons));
    std::vector<StageCounts> per_chunk(chunks);
    parallel_chunks(n_photons, [&](std::int64_t lo, std::int64_t hi, int c) {
        StageCounts sc;
        for (std::int64_t i = lo; i < hi; ++i) {
            Rng rng(child_seed(seed, static_cast<std::uint64_t>(i)));
            HVPhoton photon{180.0 * rng.uniform(), rng.uniform()};
            const HvTransmit t0 = hv_transmit(photon, p0, params, rng);
            if (!t0.transmitted) continue;
            ++sc.first;
            const HvTransmit t1 = hv_transmit(t0.photon, p1, params, rng);
            if (!t1.transmitted) continue;
            if (hv_transmit(t1.photon, p2, params, rng).transmitted) ++sc.both;
        }
        per_chunk[c] = sc;
    });
    std::int64_t first = 0, both = 0;
    for (const StageCounts& sc : per_chunk) {
        first += sc.first;
        both += sc.both;
    }
    return first > 0 ? static_cast<double>(both) / static_cast<double>(first) : 0.0;
}

}  // namespace

std::vector<ThreePolScanPoint> three_polarizer_scan(
    PolarizerModel model, const std::vector<double>& alpha_grid_deg,
    std::int64_t n_photons, std::uint64_t seed, const HVModelParams& params,
    double eps) {
    if (alpha_grid_deg.empty())
        throw std::invalid_argument("alpha grid must be nonempty");
    for (double a : alpha_grid_deg)
        if (a < 0.0 || a > 90.0)
            throw std::invalid_argument("alpha grid must lie within [0, 90] deg");
    if (model == PolarizerModel::HiddenVariable) {
        params.validate();
        if (n_photons < 1) throw std::invalid_argument("n_photons must be >= 1");
    }

    std::vector<ThreePolScanPoint> out;
    out.reserve(alpha_grid_deg.size());
    for (std::size_t k = 0; k < alpha_grid_deg.size(); ++k) {
        const double alpha = alpha_grid_deg[k];
        const std::uint64_t point_seed = child_seed(seed, k);
        std::function<double(double)> objective;
        if (model == PolarizerModel::Copenhagen) {
            objective = [&](double beta) {
                return chain_probability_copenhagen(alpha, beta, eps);
            };
        } else {
            objective = [&](double beta) {
                return hv_three_stage_rate(alpha, beta, params, eps, n_photons,
                                           point_seed);
            };
        }
        // The chain transmission is 180-periodic and single-welled on
        // [alpha, alpha + 180).
        const double beta_star =
            wrap_angle_180(golden_min(objective, alpha, alpha + 180.0, 1e-4));
        ThreePolScanPoint pt;
        pt.alpha_deg = alpha;
        pt.beta_star_deg = beta_star;
        pt.p_min = objective(beta_star);
        pt.p_copenhagen = chain_probability_copenhagen(alpha, beta_star, 0.0);
        out.push_back(pt);
    }
    return out;
}

}  // namespace qfound
