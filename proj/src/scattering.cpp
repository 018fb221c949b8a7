#include "qfound/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qfound/fft.hpp"

namespace qfound {

namespace {

std::vector<cplx> spectral_psi_prime(const GridWavefunction& psi) {
    return spectral_derivative(psi.values, psi.grid.dx(), 1);
}

}  // namespace

double momentum_expectation(const GridWavefunction& psi) {
    check_wavefunction(psi);
    const std::vector<cplx> dpsi = spectral_psi_prime(psi);
    const double dx = psi.grid.dx();
    cplx acc(0.0, 0.0);
    for (int i = 0; i < psi.grid.n; ++i)
        acc += std::conj(psi.values[i]) * dpsi[i];
    // <p> = -i hbar <psi|psi'> ; the real part of -i*acc is Im(acc)
    return psi.hbar * (acc * dx).imag();
}

double momentum_squared_expectation(const GridWavefunction& psi) {
    check_wavefunction(psi);
    const std::vector<cplx> dpsi = spectral_psi_prime(psi);
    const double dx = psi.grid.dx();
    double acc = 0.0;
    for (int i = 0; i < psi.grid.n; ++i) acc += std::norm(dpsi[i]);
    return psi.hbar * psi.hbar * acc * dx;
}

double r_expectation(const GridWavefunction& psi) {
    check_wavefunction(psi);
    const std::vector<cplx> dpsi = spectral_psi_prime(psi);
    const double dx = psi.grid.dx();
    cplx acc(0.0, 0.0);
    for (int i = 0; i < psi.grid.n; ++i)
        acc += std::conj(psi.values[i]) * psi.grid.x(i) * dpsi[i];
    // <R> = Re<x p> = hbar Im <psi| x psi'>
    return psi.hbar * (acc * dx).imag();
}

std::optional<SubspaceTag> classify_in_out(const GridWavefunction& psi,
                                           double ambiguous_band) {
    const double r = r_expectation(psi);
    if (r < -ambiguous_band) return SubspaceTag::In;
    if (r > ambiguous_band) return SubspaceTag::Out;
    return std::nullopt;
}

std::vector<RTracePoint> monotonicity_trace(const GridWavefunction& psi0,
                                            double dt, int steps, int stride,
                                            int spatial_order) {
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    std::vector<RTracePoint> out;
    out.push_back({0.0, r_expectation(psi0), momentum_squared_expectation(psi0)});
    GridWavefunction psi = psi0;
    int done = 0;
    while (done < steps) {
        const int burst = std::min(stride, steps - done);
        psi = evolve(psi, FreePotential{}, dt, burst, spatial_order);
        done += burst;
        out.push_back({done * dt, r_expectation(psi),
                       momentum_squared_expectation(psi)});
    }
    return out;
}

DecayModel::DecayModel(int in_states, int res_states, int out_states,
                       double gamma_rate, double feed_rate, double mix_rate) {
    if (in_states < 1 || res_states < 1 || out_states < 1)
        throw std::invalid_argument("all three blocks need at least one state");
    if (!(gamma_rate > 0.0)) throw std::invalid_argument("gamma must be > 0");
    if (feed_rate < 0.0 || mix_rate < 0.0)
        throw std::invalid_argument("rates must be nonnegative");
    n_in = in_states;
    n_res = res_states;
    n_out = out_states;
    gamma = gamma_rate;
    feed = feed_rate;
    mix = mix_rate;

    const int d = dim();
    g_.assign(static_cast<std::size_t>(d) * d, 0.0);
    auto at = [&](int i, int j) -> double& { return g_[static_cast<std::size_t>(i) * d + j]; };

    // In -> Res feed
    for (int j = 0; j < n_in; ++j) {
        at(j, j) -= feed;
        for (int k = 0; k < n_res; ++k) at(n_in + k, j) += feed / n_res;
    }
    // Res -> Out decay, uniform per state
    for (int j = 0; j < n_res; ++j) {
        const int col = n_in + j;
        at(col, col) -= gamma;
        for (int k = 0; k < n_out; ++k) at(n_in + n_res + k, col) += gamma / n_out;
    }
    // cyclic internal mixing inside Res (conserves the block total)
    if (n_res > 1 && mix > 0.0) {
        for (int j = 0; j < n_res; ++j) {
            const int col = n_in + j;
            const int nxt = n_in + (j + 1) % n_res;
            at(col, col) -= mix;
            at(nxt, col) += mix;
        }
    }
    validate();
}

DecayModel DecayModel::from_generator(int in_states, int res_states,
                                      int out_states,
                                      const std::vector<double>& generator) {
    DecayModel m;
    m.n_in = in_states;
    m.n_res = res_states;
    m.n_out = out_states;
    m.gamma = 0.0;
    const int d = m.dim();
    if (generator.size() != static_cast<std::size_t>(d) * d)
        throw std::invalid_argument("generator size mismatch");
    m.g_ = generator;
    m.validate();
    return m;
}

void DecayModel::validate() const {
    const int d = dim();
    auto at = [&](int i, int j) { return g_[static_cast<std::size_t>(i) * d + j]; };
    for (int j = 0; j < d; ++j) {
        double col = 0.0;
        for (int i = 0; i < d; ++i) {
            col += at(i, j);
            if (i != j && at(i, j) < 0.0)
                throw std::invalid_argument("generator off-diagonals must be >= 0");
        }
        if (std::abs(col) > 1e-12)
            throw std::invalid_argument(
                "non-conservative generator: column sums must vanish");
    }
    // forbidden back-couplings: Out feeds nothing, Res never feeds In
    for (int j = n_in + n_res; j < d; ++j)
        for (int i = 0; i < d; ++i)
            if (i != j && at(i, j) != 0.0)
                throw std::invalid_argument("Out block must be absorbing");
    for (int j = n_in; j < n_in + n_res; ++j)
        for (int i = 0; i < n_in; ++i)
            if (at(i, j) != 0.0)
                throw std::invalid_argument("Res -> In coupling is forbidden");
}

std::vector<DecaySample> resonance_decay(const DecayModel& model,
                                         const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("t_grid must be nonempty");
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i + 1] > t_grid[i]))
            throw std::invalid_argument("t_grid must be strictly increasing");
    if (t_grid.front() < 0.0)
        throw std::invalid_argument("t_grid must start at t >= 0");

    const int d = model.dim();
    const std::vector<double>& g = model.generator();
    auto deriv = [&](const std::vector<double>& p, std::vector<double>& out) {
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += g[static_cast<std::size_t>(i) * d + j] * p[j];
            out[i] = acc;
        }
    };

    double rate_scale = 0.0;
    for (int i = 0; i < d; ++i)
        rate_scale = std::max(rate_scale, std::abs(g[static_cast<std::size_t>(i) * d + i]));
    const double dt_max = rate_scale > 0.0 ? 0.02 / rate_scale : 1.0;

    std::vector<double> p(d, 0.0);
    for (int j = 0; j < model.n_res; ++j) p[model.n_in + j] = 1.0 / model.n_res;

    std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
    auto rk4_to = [&](double from, double to) {
        double t = from;
        while (t < to - 1e-15) {
            const double h = std::min(dt_max, to - t);
            deriv(p, k1);
            for (int i = 0; i < d; ++i) tmp[i] = p[i] + 0.5 * h * k1[i];
            deriv(tmp, k2);
            for (int i = 0; i < d; ++i) tmp[i] = p[i] + 0.5 * h * k2[i];
            deriv(tmp, k3);
            for (int i = 0; i < d; ++i) tmp[i] = p[i] + h * k3[i];
            deriv(tmp, k4);
            for (int i = 0; i < d; ++i)
                p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            t += h;
        }
    };

    std::vector<DecaySample> out;
    out.reserve(t_grid.size());
    double cur = 0.0;
    for (double t : t_grid) {
        rk4_to(cur, t);
        cur = t;
        DecaySample s;
        s.t = t;
        s.p_in = s.p_res = s.p_out = 0.0;
        for (int i = 0; i < model.n_in; ++i) s.p_in += p[i];
        for (int i = 0; i < model.n_res; ++i) s.p_res += p[model.n_in + i];
        for (int i = 0; i < model.n_out; ++i) s.p_out += p[model.n_in + model.n_res + i];
        out.push_back(s);
    }
    return out;
}

}  // namespace qfound
