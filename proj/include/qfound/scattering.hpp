#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qfound/bohm.hpp"

namespace qfound {

/// <p> via spectral differentiation on the zero-padded periodic extension.
double momentum_expectation(const GridWavefunction& psi);

/// <p^2> = hbar^2 integral |psi'|^2 dx (spectral derivative).
double momentum_squared_expectation(const GridWavefunction& psi);

/// Expectation of the symmetrized dilation generator R = (pq + qp)/2,
/// computed as Re<x p>; real by construction.
double r_expectation(const GridWavefunction& psi);

enum class SubspaceTag { In, Resonance, Out };

/// In for <R> < -band, Out for <R> > band, nullopt (transit region) inside.
/// The default band is 10x the 1e-9 numerical noise floor.
std::optional<SubspaceTag> classify_in_out(const GridWavefunction& psi,
                                           double ambiguous_band = 1e-8);

struct RTracePoint {
    double t;
    double r;
    double p2;
};

/// Free Crank-Nicolson evolution sampling (t, <R>, <p^2>) every `stride`
/// steps. Free evolution only; d<R>/dt = <p^2>/m along the trace.
std::vector<RTracePoint> monotonicity_trace(const GridWavefunction& psi0,
                                            double dt, int steps, int stride,
                                            int spatial_order = 4);

/// Three-block population model: one-directional flow In -> Resonance -> Out.
/// Res states leak to Out at rate gamma each (so the total resonance
/// population decays exactly exponentially regardless of internal mixing);
/// no Out->Res or Res->In coupling exists. Columns of the generator sum to
/// zero, so every integration step conserves total probability.
struct DecayModel {
    int n_in = 1, n_res = 1, n_out = 1;
    double gamma = 1.0;
    double feed = 0.0;  // In -> Res rate
    double mix = 0.0;   // cyclic mixing rate inside the Resonance block

    DecayModel(int in_states, int res_states, int out_states, double gamma_rate,
               double feed_rate = 0.0, double mix_rate = 0.0);

    /// Validates an externally supplied generator (conservation, sign
    /// pattern, forbidden back-coupling blocks) instead of building one.
    static DecayModel from_generator(int in_states, int res_states,
                                     int out_states,
                                     const std::vector<double>& generator);

    int dim() const { return n_in + n_res + n_out; }
    const std::vector<double>& generator() const { return g_; }

private:
    DecayModel() = default;
    void validate() const;
    std::vector<double> g_;  // row-major dim x dim
};

struct DecaySample {
    double t;
    double p_in, p_res, p_out;
};

/// Populations over t_grid starting from the resonance block (uniform);
/// classical RK4 on dp/dt = G p, which conserves the column-sum-zero total
/// exactly.
std::vector<DecaySample> resonance_decay(const DecayModel& model,
                                         const std::vector<double>& t_grid);

}  // namespace qfound
