#include "qfound/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qfound {

std::vector<double> potential_values(const PotentialSpec& v, const Grid& g) {
    std::vector<double> out(g.n, 0.0);
    if (std::holds_alternative<HarmonicPotential>(v)) {
        const double k = std::get<HarmonicPotential>(v).k;
        if (!(k > 0.0)) throw std::invalid_argument("harmonic k must be > 0");
        for (int i = 0; i < g.n; ++i) out[i] = 0.5 * k * g.x(i) * g.x(i);
    } else if (std::holds_alternative<TabulatedPotential>(v)) {
        const auto& t = std::get<TabulatedPotential>(v);
        if (static_cast<int>(t.values.size()) != g.n)
            throw std::invalid_argument("tabulated potential size mismatch");
        for (double x : t.values)
            if (!std::isfinite(x))
                throw std::invalid_argument("tabulated potential must be finite");
        out = t.values;
    }
    return out;
}

double GridWavefunction::trapezoid_norm2() const {
    const double dx = grid.dx();
    double s = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double w = (i == 0 || i == grid.n - 1) ? 0.5 : 1.0;
        s += w * std::norm(values[i]);
    }
    return s * dx;
}

void GridWavefunction::normalize() {
    const double n2 = trapezoid_norm2();
    if (n2 <= 0.0) throw std::invalid_argument("cannot normalize zero wavefunction");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& z : values) z *= inv;
}

double GridWavefunction::expectation_x() const {
    const double dx = grid.dx();
    double s = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double w = (i == 0 || i == grid.n - 1) ? 0.5 : 1.0;
        s += w * grid.x(i) * std::norm(values[i]);
    }
    return s * dx;
}

double GridWavefunction::expectation_x2() const {
    const double dx = grid.dx();
    double s = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double w = (i == 0 || i == grid.n - 1) ? 0.5 : 1.0;
        s += w * grid.x(i) * grid.x(i) * std::norm(values[i]);
    }
    return s * dx;
}

void check_wavefunction(const GridWavefunction& psi) {
    if (psi.grid.n < 64) throw std::invalid_argument("grid must have n >= 64");
    if (static_cast<int>(psi.values.size()) != psi.grid.n)
        throw std::invalid_argument("value count does not match grid");
    if (!(psi.mass > 0.0) || !(psi.hbar > 0.0))
        throw std::invalid_argument("mass and hbar must be positive");
    for (const cplx& z : psi.values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("wavefunction must be finite");
    if (std::abs(psi.trapezoid_norm2() - 1.0) > 1e-8)
        throw std::invalid_argument("wavefunction is not trapezoid-normalized");
}

GridWavefunction make_gaussian(const Grid& g, double x0, double p0, double sigma,
                               double mass, double hbar) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    GridWavefunction psi;
    psi.grid = g;
    psi.mass = mass;
    psi.hbar = hbar;
    psi.values.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        const double arg = -(x - x0) * (x - x0) / (4.0 * sigma * sigma);
        const double ph = p0 * x / hbar;
        psi.values[i] = std::exp(arg) * cplx(std::cos(ph), std::sin(ph));
    }
    psi.normalize();
    return psi;
}

GridWavefunction make_plane_wave(const Grid& g, double p, double mass,
                                 double hbar) {
    return plane_wave_slice(g, p, 0.0, mass, hbar);
}

GridWavefunction free_gaussian_slice(const Grid& g, double x0, double p0,
                                     double sigma0, double t, double mass,
                                     double hbar) {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be > 0");
    GridWavefunction psi;
    psi.grid = g;
    psi.mass = mass;
    psi.hbar = hbar;
    psi.values.resize(g.n);
    const double tau = hbar * t / (2.0 * mass * sigma0 * sigma0);
    const cplx zeta(1.0, tau);
    const cplx pref = 1.0 / std::sqrt(zeta);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        const double big_x = x - x0 - p0 * t / mass;
        const cplx gauss = -big_x * big_x / (4.0 * sigma0 * sigma0 * zeta);
        const double ph = (p0 * (x - x0) - p0 * p0 * t / (2.0 * mass)) / hbar;
        psi.values[i] = pref * std::exp(gauss + cplx(0.0, ph));
    }
    psi.normalize();
    return psi;
}

GridWavefunction plane_wave_slice(const Grid& g, double p, double t, double mass,
                                  double hbar) {
    GridWavefunction psi;
    psi.grid = g;
    psi.mass = mass;
    psi.hbar = hbar;
    psi.values.resize(g.n);
    const double amp = 1.0 / std::sqrt(g.x_max - g.x_min);
    const double energy = p * p / (2.0 * mass);
    for (int i = 0; i < g.n; ++i) {
        const double ph = (p * g.x(i) - energy * t) / hbar;
        psi.values[i] = amp * cplx(std::cos(ph), std::sin(ph));
    }
    psi.normalize();
    return psi;
}

namespace {

// Laplacian band coefficients (c0 diagonal, c1 first, c2 second off-band).
struct Stencil {
    double c0, c1, c2;
    int bw;
};

Stencil laplacian_stencil(int order, double dx) {
    const double inv = 1.0 / (dx * dx);
    if (order == 2) return {-2.0 * inv, 1.0 * inv, 0.0, 1};
    if (order == 4)
        return {-30.0 / 12.0 * inv, 16.0 / 12.0 * inv, -1.0 / 12.0 * inv, 2};
    throw std::invalid_argument("spatial order must be 2 or 4");
}

// Complex banded LU without pivoting (rows are diagonally dominant for the
// Crank-Nicolson matrices produced under the dt precondition).
class BandedLU {
public:
    BandedLU(int n, int bw) : n_(n), bw_(bw), a_(n, std::vector<cplx>(2 * bw + 1)) {}

    cplx& at(int i, int j) { return a_[i][j - i + bw_]; }

    void factor() {
        for (int k = 0; k < n_; ++k) {
            const cplx piv = at(k, k);
            for (int i = k + 1; i <= std::min(n_ - 1, k + bw_); ++i) {
                const cplx l = at(i, k) / piv;
                at(i, k) = l;
                for (int j = k + 1; j <= std::min(n_ - 1, k + bw_); ++j)
                    at(i, j) -= l * at(k, j);
            }
        }
    }

    void solve(std::vector<cplx>& b) const {
        for (int i = 0; i < n_; ++i) {
            cplx s = b[i];
            for (int j = std::max(0, i - bw_); j < i; ++j)
                s -= a_[i][j - i + bw_] * b[j];
            b[i] = s;
        }
        for (int i = n_ - 1; i >= 0; --i) {
            cplx s = b[i];
            for (int j = i + 1; j <= std::min(n_ - 1, i + bw_); ++j)
                s -= a_[i][j - i + bw_] * b[j];
            b[i] = s / a_[i][bw_];
        }
    }

private:
    int n_, bw_;
    std::vector<std::vector<cplx>> a_;
};

}  // namespace

GridWavefunction evolve(const GridWavefunction& psi, const PotentialSpec& v,
                        double dt, int steps, int spatial_order) {
    check_wavefunction(psi);
    const double dx = psi.grid.dx();
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(dt < psi.mass * dx * dx / psi.hbar))
        throw std::invalid_argument("unstable parameters: require dt < m dx^2 / hbar");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");

    const Stencil st = laplacian_stencil(spatial_order, dx);
    const std::vector<double> vv = potential_values(v, psi.grid);
    const double kin = -psi.hbar * psi.hbar / (2.0 * psi.mass);
    const int m = psi.grid.n - 2;  // interior unknowns, Dirichlet walls
    const cplx ic = cplx(0.0, 1.0) * (dt / (2.0 * psi.hbar));

    // M+ = 1 + i dt H / 2hbar (factored), M- = 1 - i dt H / 2hbar (applied).
    BandedLU mp(m, st.bw);
    std::vector<std::vector<cplx>> mm(m, std::vector<cplx>(2 * st.bw + 1, 0.0));
    for (int i = 0; i < m; ++i) {
        for (int j = std::max(0, i - st.bw); j <= std::min(m - 1, i + st.bw); ++j) {
            double h;
            const int d = std::abs(i - j);
            if (d == 0)
                h = kin * st.c0 + vv[i + 1];
            else if (d == 1)
                h = kin * st.c1;
            else
                h = kin * st.c2;
            mp.at(i, j) = (d == 0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0)) + ic * h;
            mm[i][j - i + st.bw] = (d == 0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0)) - ic * h;
        }
    }
    mp.factor();

    std::vector<cplx> cur(m), rhs(m);
    for (int i = 0; i < m; ++i) cur[i] = psi.values[i + 1];
    for (int s = 0; s < steps; ++s) {
        for (int i = 0; i < m; ++i) {
            cplx acc(0.0, 0.0);
            for (int j = std::max(0, i - st.bw); j <= std::min(m - 1, i + st.bw); ++j)
                acc += mm[i][j - i + st.bw] * cur[j];
            rhs[i] = acc;
        }
        mp.solve(rhs);
        std::swap(cur, rhs);
    }

    GridWavefunction out = psi;
    out.values.assign(psi.grid.n, cplx(0.0, 0.0));
    for (int i = 0; i < m; ++i) out.values[i + 1] = cur[i];
    return out;
}

namespace {

std::vector<std::uint8_t> dilate(const std::vector<std::uint8_t>& mask, int cells) {
    const int n = static_cast<int>(mask.size());
    std::vector<std::uint8_t> out(n, 0);
    for (int i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        for (int j = std::max(0, i - cells); j <= std::min(n - 1, i + cells); ++j)
            out[j] = 1;
    }
    return out;
}

}  // namespace

BohmFields decompose(const GridWavefunction& psi, double node_threshold,
                     const BohmFields* prev) {
    check_wavefunction(psi);
    const int n = psi.grid.n;
    BohmFields f;
    f.grid = psi.grid;
    f.hbar = psi.hbar;
    f.mass = psi.mass;
    f.lambda.resize(n);
    f.phi.assign(n, 0.0);
    f.v_q.assign(n, 0.0);
    f.v_q_valid.assign(n, 0);

    double lam_max = 0.0;
    for (int i = 0; i < n; ++i) {
        f.lambda[i] = std::abs(psi.values[i]);
        lam_max = std::max(lam_max, f.lambda[i]);
    }
    if (lam_max <= 0.0)
        throw std::domain_error("wavefunction is numerically zero everywhere");

    std::vector<std::uint8_t> raw(n, 0);
    for (int i = 0; i < n; ++i) raw[i] = f.lambda[i] < node_threshold * lam_max;
    f.node_mask = dilate(raw, 2);
    bool any_unmasked = false;
    for (int i = 0; i < n; ++i) any_unmasked |= !f.node_mask[i];
    if (!any_unmasked)
        throw std::domain_error("all grid points masked; wavefunction too small");

    const double two_pi_h = 2.0 * M_PI * psi.hbar;
    int i = 0;
    while (i < n) {
        if (f.node_mask[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j < n && !f.node_mask[j]) ++j;
        // unwrap run [i, j)
        double prev_theta = std::arg(psi.values[i]);
        double acc = prev_theta;
        f.phi[i] = psi.hbar * acc;
        for (int k = i + 1; k < j; ++k) {
            const double th = std::arg(psi.values[k]);
            double d = th - prev_theta;
            while (d > M_PI) d -= 2.0 * M_PI;
            while (d <= -M_PI) d += 2.0 * M_PI;
            acc += d;
            f.phi[k] = psi.hbar * acc;
            prev_theta = th;
        }
        if (prev != nullptr) {
            // Pick the 2 pi hbar branch that tracks the previous slice. The
            // anchor is the largest-amplitude point available in both slices:
            // the phase drifts slowest there, so the nearest branch is the
            // right one for any reasonable time step.
            int anchor = -1;
            for (int k = i; k < j; ++k)
                if (!prev->node_mask[k] && (anchor < 0 || f.lambda[k] > f.lambda[anchor]))
                    anchor = k;
            if (anchor >= 0) {
                const double shift =
                    two_pi_h *
                    std::round((prev->phi[anchor] - f.phi[anchor]) / two_pi_h);
                for (int k = i; k < j; ++k) f.phi[k] += shift;
            }
        }
        i = j;
    }
    return f;
}

void quantum_potential(BohmFields& f) {
    const int n = f.grid.n;
    const double dx = f.grid.dx();
    const double coef = -f.hbar * f.hbar / (2.0 * f.mass) / (12.0 * dx * dx);
    f.v_q.assign(n, 0.0);
    f.v_q_valid.assign(n, 0);
    for (int i = 2; i < n - 2; ++i) {
        bool ok = true;
        for (int k = i - 2; k <= i + 2; ++k) ok = ok && !f.node_mask[k];
        if (!ok) continue;
        const double lap = -f.lambda[i - 2] + 16.0 * f.lambda[i - 1] -
                           30.0 * f.lambda[i] + 16.0 * f.lambda[i + 1] -
                           f.lambda[i + 2];
        f.v_q[i] = coef * lap / f.lambda[i];
        f.v_q_valid[i] = 1;
    }
    f.has_v_q = true;
}

BohmResiduals bohm_residuals(const std::vector<GridWavefunction>& slices,
                             const PotentialSpec& v, double dt,
                             double node_threshold) {
    if (slices.size() < 3)
        throw std::invalid_argument("need at least 3 time slices");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    for (std::size_t s = 1; s < slices.size(); ++s)
        if (!(slices[s].grid == slices[0].grid))
            throw std::invalid_argument("slices use inconsistent grids");

    std::vector<BohmFields> fields;
    fields.reserve(slices.size());
    for (std::size_t s = 0; s < slices.size(); ++s) {
        fields.push_back(decompose(slices[s], node_threshold,
                                   fields.empty() ? nullptr : &fields.back()));
        quantum_potential(fields.back());
    }

    const Grid& g = slices[0].grid;
    const std::vector<double> vv = potential_values(v, g);
    const double dx = g.dx();
    const double m = slices[0].mass;

    BohmResiduals r;
    for (std::size_t t = 1; t + 1 < slices.size(); ++t) {
        const BohmFields& fm = fields[t - 1];
        const BohmFields& f0 = fields[t];
        const BohmFields& fp = fields[t + 1];
        for (int i = 1; i < g.n - 1; ++i) {
            if (!f0.v_q_valid[i]) continue;
            if (fm.node_mask[i] || fp.node_mask[i]) continue;
            const double dphi_x = (f0.phi[i + 1] - f0.phi[i - 1]) / (2.0 * dx);
            const double dphi_t = (fp.phi[i] - fm.phi[i]) / (2.0 * dt);
            const double hj = dphi_x * dphi_x / (2.0 * m) + vv[i] + f0.v_q[i] + dphi_t;
            r.r_hj = std::max(r.r_hj, std::abs(hj));

            const double lap_phi =
                (f0.phi[i + 1] - 2.0 * f0.phi[i] + f0.phi[i - 1]) / (dx * dx);
            const double dlog_x =
                (std::log(f0.lambda[i + 1]) - std::log(f0.lambda[i - 1])) / (2.0 * dx);
            const double dlog_t =
                (std::log(fp.lambda[i]) - std::log(fm.lambda[i])) / (2.0 * dt);
            const double cont = lap_phi + 2.0 * dphi_x * dlog_x + 2.0 * m * dlog_t;
            r.r_cont = std::max(r.r_cont, std::abs(cont));
        }
    }
    return r;
}

double eigenstate_identity_deviation(const GridWavefunction& psi_e,
                                     const PotentialSpec& v, double energy,
                                     double node_threshold,
                                     double window_sigmas) {
    BohmFields f = decompose(psi_e, node_threshold);
    quantum_potential(f);
    const Grid& g = psi_e.grid;
    const std::vector<double> vv = potential_values(v, g);
    const double xbar = psi_e.expectation_x();
    const double sigma =
        std::sqrt(std::max(0.0, psi_e.expectation_x2() - xbar * xbar));
    const double dx = g.dx();

    double dev = 0.0;
    bool any = false;
    for (int i = 1; i < g.n - 1; ++i) {
        if (!f.v_q_valid[i]) continue;
        if (std::abs(g.x(i) - xbar) > window_sigmas * sigma) continue;
        const double dphi_x = (f.phi[i + 1] - f.phi[i - 1]) / (2.0 * dx);
        const double val =
            dphi_x * dphi_x / (2.0 * psi_e.mass) + vv[i] + f.v_q[i] - energy;
        dev = std::max(dev, std::abs(val));
        any = true;
    }
    if (!any) throw std::domain_error("no valid points inside the bulk window");
    return dev;
}

HJComparison hamilton_jacobi_compare(const std::vector<GridWavefunction>& slices,
                                     const std::vector<double>& times, double p0,
                                     double node_threshold) {
    if (slices.empty() || slices.size() != times.size())
        throw std::invalid_argument("need matching slices and times");

    HJComparison out;
    out.times = times;

    std::vector<BohmFields> fields;
    fields.reserve(slices.size());
    for (std::size_t s = 0; s < slices.size(); ++s) {
        fields.push_back(decompose(slices[s], node_threshold,
                                   fields.empty() ? nullptr : &fields.back()));
        quantum_potential(fields.back());
    }

    const double m = slices[0].mass;
    auto s_classical = [&](double x, double t) {
        return p0 * x - p0 * p0 * t / (2.0 * m);
    };

    // gauge from the densest point of the first slice
    const BohmFields& f0 = fields[0];
    int c0 = 0;
    for (int i = 0; i < f0.grid.n; ++i)
        if (!f0.node_mask[i] && f0.lambda[i] > f0.lambda[c0]) c0 = i;
    const double gauge =
        f0.phi[c0] - s_classical(f0.grid.x(c0), times[0]);

    for (std::size_t s = 0; s < slices.size(); ++s) {
        const BohmFields& f = fields[s];
        int center = -1;
        double sup = 0.0;
        for (int i = 0; i < f.grid.n; ++i) {
            if (f.node_mask[i]) continue;
            const double diff =
                f.phi[i] - s_classical(f.grid.x(i), times[s]) - gauge;
            sup = std::max(sup, std::abs(diff));
            if (center < 0 || f.lambda[i] > f.lambda[center]) center = i;
        }
        out.sup_gauged = std::max(out.sup_gauged, sup);
        out.center_diff.push_back(
            f.phi[center] - s_classical(f.grid.x(center), times[s]) - gauge);
        out.v_q_center.push_back(f.v_q_valid[center] ? f.v_q[center] : 0.0);
    }
    return out;
}

HermitianOperator grid_hamiltonian(const Grid& g, const PotentialSpec& v,
                                   int order, double mass, double hbar) {
    if (g.n < 64) throw std::invalid_argument("grid must have n >= 64");
    const Stencil st = laplacian_stencil(order, g.dx());
    const std::vector<double> vv = potential_values(v, g);
    const double kin = -hbar * hbar / (2.0 * mass);
    const int m = g.n - 2;
    ComplexMatrix h(m);
    for (int i = 0; i < m; ++i) {
        h.at(i, i) = kin * st.c0 + vv[i + 1];
        if (i + 1 < m) {
            h.at(i, i + 1) = kin * st.c1;
            h.at(i + 1, i) = kin * st.c1;
        }
        if (st.bw == 2 && i + 2 < m) {
            h.at(i, i + 2) = kin * st.c2;
            h.at(i + 2, i) = kin * st.c2;
        }
    }
    return HermitianOperator(std::move(h), 1e-9);
}

std::vector<GridEigenstate> grid_eigenstates(const Grid& g, const PotentialSpec& v,
                                             int count, int order, double mass,
                                             double hbar) {
    if (count < 1) throw std::invalid_argument("count must be >= 1");
    const HermitianOperator h = grid_hamiltonian(g, v, order, mass, hbar);
    const Eigensystem es = hermitian_eigensystem(h);
    const int m = g.n - 2;
    count = std::min(count, m);

    std::vector<GridEigenstate> out;
    out.reserve(count);
    for (int c = 0; c < count; ++c) {
        GridWavefunction psi;
        psi.grid = g;
        psi.mass = mass;
        psi.hbar = hbar;
        psi.values.assign(g.n, cplx(0.0, 0.0));
        int peak = 0;
        for (int i = 0; i < m; ++i) {
            psi.values[i + 1] = es.vectors.at(i, c);
            if (std::abs(psi.values[i + 1]) > std::abs(psi.values[peak])) peak = i + 1;
        }
        // deterministic sign/phase: largest-magnitude component positive real
        const cplx z = psi.values[peak];
        const cplx ph = std::abs(z) > 0 ? std::abs(z) / z : cplx(1.0, 0.0);
        for (auto& val : psi.values) val *= ph;
        psi.normalize();
        out.push_back({es.values[c], std::move(psi)});
    }
    return out;
}

}  // namespace qfound
