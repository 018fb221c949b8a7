#include "qfound/bell.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qfound/parallel.hpp"
#include "qfound/rng.hpp"

namespace qfound {

namespace {

constexpr double kCommutatorTol = 1e-8;

ComplexMatrix outer(const std::vector<cplx>& u, const std::vector<cplx>& w) {
    const int n = static_cast<int>(u.size());
    ComplexMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = u[i] * std::conj(w[j]);
    return m;
}

ComplexMatrix herm_rotated(const ComplexMatrix& b, double theta) {
    const cplx ph(std::cos(theta), -std::sin(theta));
    ComplexMatrix h(b.dim());
    for (int i = 0; i < b.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j)
            h.at(i, j) = 0.5 * (ph * b.at(i, j) + std::conj(ph * b.at(j, i)));
    return h;
}

struct Radius {
    double value = 0.0;
    StateVector state;
    double theta = 0.0;
};

Radius top_eigen_abs(const ComplexMatrix& hermitian_b) {
    const Eigensystem es = hermitian_eigensystem(HermitianOperator(
        hermitian_part(hermitian_b), 1e-8));
    Radius r;
    const double lo = es.values.front(), hi = es.values.back();
    if (std::abs(lo) > std::abs(hi)) {
        r.value = std::abs(lo);
        r.state = es.eigenvector(0);
        r.theta = M_PI;
    } else {
        r.value = std::abs(hi);
        r.state = es.eigenvector(es.vectors.dim() - 1);
        r.theta = 0.0;
    }
    return r;
}

// max over states of |<B>| (numerical radius), with the attaining state.
Radius numerical_radius(const ComplexMatrix& b, bool hermitian) {
    if (hermitian) return top_eigen_abs(b);

    auto lam_max = [&](double th) {
        const Eigensystem es =
            hermitian_eigensystem(HermitianOperator(herm_rotated(b, th), 1e-8));
        return es.values.back();
    };

    const int grid = 48;
    double best_th = 0.0, best = -1e300;
    for (int i = 0; i < grid; ++i) {
        const double th = 2.0 * M_PI * i / grid;
        const double v = lam_max(th);
        if (v > best) {
            best = v;
            best_th = th;
        }
    }
    // golden-section refinement on the bracketing interval
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_th - 2.0 * M_PI / grid, hi = best_th + 2.0 * M_PI / grid;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = lam_max(x1), f2 = lam_max(x2);
    for (int it = 0; it < 40; ++it) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = lam_max(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = lam_max(x2);
        }
    }
    const double th = 0.5 * (lo + hi);
    const Eigensystem es =
        hermitian_eigensystem(HermitianOperator(herm_rotated(b, th), 1e-8));
    Radius r;
    r.value = es.values.back();
    r.state = es.eigenvector(es.vectors.dim() - 1);
    r.theta = th;
    return r;
}

ComplexMatrix build_bell(const ComplexMatrix& a1, const ComplexMatrix& a2,
                         const ComplexMatrix& b1, const ComplexMatrix& b2) {
    return a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2;
}

double comm_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
    return commutator(a, b).frobenius_norm();
}

// ---- Nelder-Mead ------------------------------------------------------------

struct NmResult {
    std::vector<double> x;
    double fmin = 0.0;
};

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     std::vector<double> x0, double step, int max_evals,
                     double diam_tol) {
    const int d = static_cast<int>(x0.size());
    std::vector<std::vector<double>> pts(d + 1, x0);
    for (int i = 0; i < d; ++i) pts[i + 1][i] += step;
    std::vector<double> fv(d + 1);
    int evals = 0;
    for (int i = 0; i <= d; ++i) fv[i] = f(pts[i]), ++evals;

    auto order = [&]() {
        std::vector<int> idx(d + 1);
        for (int i = 0; i <= d; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> np(d + 1);
        std::vector<double> nf(d + 1);
        for (int i = 0; i <= d; ++i) np[i] = pts[idx[i]], nf[i] = fv[idx[i]];
        pts = std::move(np);
        fv = std::move(nf);
    };

    auto diameter = [&]() {
        double dm = 0.0;
        for (int i = 1; i <= d; ++i) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += (pts[i][k] - pts[0][k]) * (pts[i][k] - pts[0][k]);
            dm = std::max(dm, std::sqrt(s));
        }
        return dm;
    };

    order();
    while (evals < max_evals && diameter() > diam_tol) {
        std::vector<double> centroid(d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) centroid[k] += pts[i][k] / d;

        auto at = [&](double coef) {
            std::vector<double> x(d);
            for (int k = 0; k < d; ++k)
                x[k] = centroid[k] + coef * (pts[d][k] - centroid[k]);
            return x;
        };

        const std::vector<double> xr = at(-1.0);
        const double fr = f(xr);
        ++evals;
        if (fr < fv[0]) {
            const std::vector<double> xe = at(-2.0);
            const double fe = f(xe);
            ++evals;
            if (fe < fr) {
                pts[d] = xe;
                fv[d] = fe;
            } else {
                pts[d] = xr;
                fv[d] = fr;
            }
        } else if (fr < fv[d - 1]) {
            pts[d] = xr;
            fv[d] = fr;
        } else {
            const bool outside = fr < fv[d];
            const std::vector<double> xc = at(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            ++evals;
            if (fc < (outside ? fr : fv[d])) {
                pts[d] = xc;
                fv[d] = fc;
            } else {
                for (int i = 1; i <= d; ++i) {
                    for (int k = 0; k < d; ++k)
                        pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
                    fv[i] = f(pts[i]);
                    ++evals;
                    if (evals >= max_evals) break;
                }
            }
        }
        order();
    }
    return {pts[0], fv[0]};
}

// ---- Parametrization --------------------------------------------------------

ComplexMatrix generator_from_params(const double* p, int dim) {
    ComplexMatrix g(dim);
    int idx = 0;
    for (int i = 0; i < dim; ++i) g.at(i, i) = p[idx++];
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            const double re = p[idx++];
            const double im = p[idx++];
            g.at(i, j) = cplx(re, im);
            g.at(j, i) = cplx(re, -im);
        }
    return g;
}

int params_per_observable(CommutationRegime regime, int dim) {
    return regime == CommutationRegime::AllCommuting ? dim : dim * dim;
}

// Decoded factor-level observables (cross regime) or full-space observables.
struct ObservableSet {
    ComplexMatrix a1, a2, b1, b2;
};

ObservableSet decode(CommutationRegime regime, int dim,
                     const std::vector<double>& params) {
    const int np = params_per_observable(regime, dim);
    auto one = [&](int which) {
        const double* p = params.data() + static_cast<std::ptrdiff_t>(which) * np;
        if (regime == CommutationRegime::AllCommuting) {
            std::vector<cplx> d(dim);
            for (int i = 0; i < dim; ++i) d[i] = std::clamp(p[i], -1.0, 1.0);
            return ComplexMatrix::diagonal(d);
        }
        return spectral_clamp(generator_from_params(p, dim), -1.0, 1.0);
    };
    return {one(0), one(1), one(2), one(3)};
}

ComplexMatrix full_space_bell(CommutationRegime regime, const ObservableSet& o) {
    if (regime == CommutationRegime::CrossCommuting) {
        const ComplexMatrix ia = ComplexMatrix::identity(o.a1.dim());
        const ComplexMatrix ib = ComplexMatrix::identity(o.b1.dim());
        return build_bell(tensor(o.a1, ib), tensor(o.a2, ib), tensor(ia, o.b1),
                          tensor(ia, o.b2));
    }
    return build_bell(o.a1, o.a2, o.b1, o.b2);
}

double objective(CommutationRegime regime, int dim,
                 const std::vector<double>& params) {
    const ObservableSet o = decode(regime, dim, params);
    const ComplexMatrix b = full_space_bell(regime, o);
    return numerical_radius(b, regime != CommutationRegime::NonCommuting).value;
}

// ---- Alternating ascent polish ----------------------------------------------

// One closed-form update: the Hermitian contraction maximizing
// Re tr(X K) over -1 <= X <= 1 is sign(K).
ComplexMatrix best_contraction(const ComplexMatrix& k) { return spectral_sign(k); }

std::vector<cplx> mat_vec(const ComplexMatrix& m, const std::vector<cplx>& v) {
    std::vector<cplx> out(m.dim(), cplx(0, 0));
    for (int i = 0; i < m.dim(); ++i) {
        cplx acc(0, 0);
        for (int j = 0; j < m.dim(); ++j) acc += m.at(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

// (w (x) 1)|psi> and (1 (x) u)|psi> on a da*db product space.
std::vector<cplx> left_factor_apply(const ComplexMatrix& w, int db,
                                    const std::vector<cplx>& psi) {
    const int da = w.dim();
    std::vector<cplx> out(psi.size(), cplx(0, 0));
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) {
            const cplx wij = w.at(i, j);
            if (wij == cplx(0, 0)) continue;
            for (int k = 0; k < db; ++k) out[i * db + k] += wij * psi[j * db + k];
        }
    return out;
}

std::vector<cplx> right_factor_apply(const ComplexMatrix& u, int da,
                                     const std::vector<cplx>& psi) {
    const int db = u.dim();
    std::vector<cplx> out(psi.size(), cplx(0, 0));
    for (int i = 0; i < da; ++i)
        for (int k = 0; k < db; ++k) {
            cplx acc(0, 0);
            for (int l = 0; l < db; ++l) acc += u.at(k, l) * psi[i * db + l];
            out[i * db + k] = acc;
        }
    return out;
}

// Partial contraction  M[i][j] = sum_k T[i*db+k] conj(S[j*db+k])  (A side),
// and M[k][l] = sum_i T[i*db+k] conj(S[i*db+l])  (B side).
ComplexMatrix contract_a(const std::vector<cplx>& t, const std::vector<cplx>& s,
                         int da, int db) {
    ComplexMatrix m(da);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) {
            cplx acc(0, 0);
            for (int k = 0; k < db; ++k) acc += t[i * db + k] * std::conj(s[j * db + k]);
            m.at(i, j) = acc;
        }
    return m;
}

ComplexMatrix contract_b(const std::vector<cplx>& t, const std::vector<cplx>& s,
                         int da, int db) {
    ComplexMatrix m(db);
    for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l) {
            cplx acc(0, 0);
            for (int i = 0; i < da; ++i) acc += t[i * db + k] * std::conj(s[i * db + l]);
            m.at(k, l) = acc;
        }
    return m;
}


struct PolishState {
    ObservableSet obs;  // factor-level for cross, full-space otherwise
    Radius radius;      // value, state, theta of the current bell operator
};

void polish(CommutationRegime regime, PolishState& st, int sweeps) {
    const bool hermitian = regime != CommutationRegime::NonCommuting;
    double prev = -1.0;
    int stall = 0;
    for (int it = 0; it < sweeps; ++it) {
        const ComplexMatrix b = full_space_bell(regime, st.obs);
        st.radius = numerical_radius(b, hermitian);
        if (st.radius.value - prev < 1e-13) {
            if (++stall >= 3) break;
        } else {
            stall = 0;
        }
        prev = st.radius.value;

        const std::vector<cplx>& psi = st.radius.state.amplitudes;
        const double theta = st.radius.theta;

        if (regime == CommutationRegime::AllCommuting) {
            const int dim = st.obs.a1.dim();
            // a-updates then b-updates at the best diagonal slot
            auto diag_val = [&](int i) {
                const double b1 = st.obs.b1.at(i, i).real(),
                             b2 = st.obs.b2.at(i, i).real();
                return st.obs.a1.at(i, i).real() * (b1 + b2) +
                       st.obs.a2.at(i, i).real() * (b1 - b2);
            };
            int best = 0;
            for (int i = 1; i < dim; ++i)
                if (std::abs(diag_val(i)) > std::abs(diag_val(best))) best = i;
            const double b1 = st.obs.b1.at(best, best).real(),
                         b2 = st.obs.b2.at(best, best).real();
            st.obs.a1.at(best, best) = (b1 + b2) >= 0 ? 1.0 : -1.0;
            st.obs.a2.at(best, best) = (b1 - b2) >= 0 ? 1.0 : -1.0;
            const double a1 = st.obs.a1.at(best, best).real(),
                         a2 = st.obs.a2.at(best, best).real();
            st.obs.b1.at(best, best) = (a1 + a2) >= 0 ? 1.0 : -1.0;
            st.obs.b2.at(best, best) = (a1 - a2) >= 0 ? 1.0 : -1.0;
            continue;
        }

        if (regime == CommutationRegime::NonCommuting) {
            const ComplexMatrix u = st.obs.b1 + st.obs.b2;
            const ComplexMatrix v = st.obs.b1 - st.obs.b2;
            st.obs.a1 = best_contraction(herm_rotated(outer(mat_vec(u, psi), psi), theta));
            st.obs.a2 = best_contraction(herm_rotated(outer(mat_vec(v, psi), psi), theta));
            const ComplexMatrix w1 = st.obs.a1 + st.obs.a2;
            const ComplexMatrix w2 = st.obs.a1 - st.obs.a2;
            st.obs.b1 = best_contraction(herm_rotated(outer(psi, mat_vec(w1, psi)), theta));
            st.obs.b2 = best_contraction(herm_rotated(outer(psi, mat_vec(w2, psi)), theta));
            continue;
        }

        // CrossCommuting: closed-form factor updates via partial contraction.
        const int da = st.obs.a1.dim(), db = st.obs.b1.dim();
        const ComplexMatrix u = st.obs.b1 + st.obs.b2;
        const ComplexMatrix v = st.obs.b1 - st.obs.b2;
        st.obs.a1 = best_contraction(
            herm_rotated(contract_a(right_factor_apply(u, da, psi), psi, da, db), theta));
        st.obs.a2 = best_contraction(
            herm_rotated(contract_a(right_factor_apply(v, da, psi), psi, da, db), theta));
        const ComplexMatrix w1 = st.obs.a1 + st.obs.a2;
        const ComplexMatrix w2 = st.obs.a1 - st.obs.a2;
        st.obs.b1 = best_contraction(
            herm_rotated(contract_b(left_factor_apply(w1, db, psi), psi, da, db), theta));
        st.obs.b2 = best_contraction(
            herm_rotated(contract_b(left_factor_apply(w2, db, psi), psi, da, db), theta));
    }
    const ComplexMatrix b = full_space_bell(regime, st.obs);
    st.radius = numerical_radius(b, hermitian);
}

BellConfiguration config_from(CommutationRegime regime, const ObservableSet& o,
                              StateVector state) {
    if (regime == CommutationRegime::CrossCommuting)
        return make_crosscommuting_config(o.a1, o.a2, o.b1, o.b2, std::move(state));
    return make_config(regime, o.a1, o.a2, o.b1, o.b2, std::move(state));
}

}  // namespace

const char* regime_name(CommutationRegime r) {
    switch (r) {
        case CommutationRegime::NonCommuting: return "noncommuting";
        case CommutationRegime::CrossCommuting: return "crosscommuting";
        case CommutationRegime::AllCommuting: return "allcommuting";
    }
    return "?";
}

double regime_ceiling(CommutationRegime r) {
    switch (r) {
        case CommutationRegime::NonCommuting: return 2.0 * std::sqrt(3.0);
        case CommutationRegime::CrossCommuting: return 2.0 * std::sqrt(2.0);
        case CommutationRegime::AllCommuting: return 2.0;
    }
    return 0.0;
}

double regime_bb_ceiling(CommutationRegime r) {
    switch (r) {
        case CommutationRegime::NonCommuting: return 12.0;
        case CommutationRegime::CrossCommuting: return 8.0;
        case CommutationRegime::AllCommuting: return 4.0;
    }
    return 0.0;
}

DichotomicObservable::DichotomicObservable(HermitianOperator o, std::string lbl)
    : op(std::move(o)), label(std::move(lbl)) {
    if (operator_norm(op.matrix()) > 1.0 + 1e-10)
        throw std::invalid_argument(
            "dichotomic observable must have spectrum within [-1, 1]");
}

BellConfiguration make_config(CommutationRegime regime, const ComplexMatrix& a1,
                              const ComplexMatrix& a2, const ComplexMatrix& b1,
                              const ComplexMatrix& b2, StateVector state,
                              int dim_a, int dim_b) {
    BellConfiguration cfg{regime,
                          DichotomicObservable(HermitianOperator(a1, 1e-10), "a1"),
                          DichotomicObservable(HermitianOperator(a2, 1e-10), "a2"),
                          DichotomicObservable(HermitianOperator(b1, 1e-10), "b1"),
                          DichotomicObservable(HermitianOperator(b2, 1e-10), "b2"),
                          std::move(state),
                          dim_a,
                          dim_b};
    if (cfg.state.dim() != a1.dim())
        throw std::invalid_argument("state dimension does not match observables");
    validate_regime(cfg);
    return cfg;
}

BellConfiguration make_noncommuting_config(const ComplexMatrix& a1,
                                           const ComplexMatrix& a2,
                                           const ComplexMatrix& b1,
                                           const ComplexMatrix& b2,
                                           StateVector state) {
    return make_config(CommutationRegime::NonCommuting, a1, a2, b1, b2,
                       std::move(state));
}

BellConfiguration make_crosscommuting_config(const ComplexMatrix& a1,
                                             const ComplexMatrix& a2,
                                             const ComplexMatrix& b1,
                                             const ComplexMatrix& b2,
                                             StateVector state) {
    const int da = a1.dim(), db = b1.dim();
    const ComplexMatrix ia = ComplexMatrix::identity(da);
    const ComplexMatrix ib = ComplexMatrix::identity(db);
    return make_config(CommutationRegime::CrossCommuting, tensor(a1, ib),
                       tensor(a2, ib), tensor(ia, b1), tensor(ia, b2),
                       std::move(state), da, db);
}

BellConfiguration make_allcommuting_config(const std::vector<double>& a1,
                                           const std::vector<double>& a2,
                                           const std::vector<double>& b1,
                                           const std::vector<double>& b2,
                                           StateVector state) {
    auto diag = [](const std::vector<double>& d) {
        std::vector<cplx> c(d.begin(), d.end());
        return ComplexMatrix::diagonal(c);
    };
    return make_config(CommutationRegime::AllCommuting, diag(a1), diag(a2),
                       diag(b1), diag(b2), std::move(state));
}

void validate_regime(const BellConfiguration& cfg) {
    const ComplexMatrix& a1 = cfg.a1.op.matrix();
    const ComplexMatrix& a2 = cfg.a2.op.matrix();
    const ComplexMatrix& b1 = cfg.b1.op.matrix();
    const ComplexMatrix& b2 = cfg.b2.op.matrix();
    auto require_zero = [&](const ComplexMatrix& x, const ComplexMatrix& y,
                            const char* who) {
        if (comm_norm(x, y) > kCommutatorTol)
            throw RegimeViolation(std::string("regime violation: [") + who +
                                  "] does not vanish");
    };
    switch (cfg.regime) {
        case CommutationRegime::NonCommuting:
            break;
        case CommutationRegime::CrossCommuting:
            require_zero(a1, b1, "a1,b1");
            require_zero(a1, b2, "a1,b2");
            require_zero(a2, b1, "a2,b1");
            require_zero(a2, b2, "a2,b2");
            break;
        case CommutationRegime::AllCommuting:
            require_zero(a1, a2, "a1,a2");
            require_zero(b1, b2, "b1,b2");
            require_zero(a1, b1, "a1,b1");
            require_zero(a1, b2, "a1,b2");
            require_zero(a2, b1, "a2,b1");
            require_zero(a2, b2, "a2,b2");
            break;
    }
}

ComplexMatrix bell_operator(const BellConfiguration& cfg) {
    validate_regime(cfg);
    return build_bell(cfg.a1.op.matrix(), cfg.a2.op.matrix(), cfg.b1.op.matrix(),
                      cfg.b2.op.matrix());
}

cplx bell_expectation(const BellConfiguration& cfg) {
    return expectation(bell_operator(cfg), cfg.state);
}

double bb_dagger_bound(const BellConfiguration& cfg) {
    const ComplexMatrix b = bell_operator(cfg);
    const double norm = operator_norm(b * b.adjoint());
    if (norm > 16.0 + 1e-6)
        throw std::logic_error("BB^dag exceeded the crude ceiling 16");
    if (norm > regime_bb_ceiling(cfg.regime) + 1e-8)
        throw std::logic_error("BB^dag exceeded the regime ceiling");
    return norm;
}

double lhv_bound() {
    int best = -8;
    for (const LhvStrategy& s : lhv_strategies()) best = std::max(best, s.value);
    return static_cast<double>(best);
}

std::vector<LhvStrategy> lhv_strategies() {
    std::vector<LhvStrategy> out;
    out.reserve(16);
    for (int a1 = -1; a1 <= 1; a1 += 2)
        for (int a2 = -1; a2 <= 1; a2 += 2)
            for (int b1 = -1; b1 <= 1; b1 += 2)
                for (int b2 = -1; b2 <= 1; b2 += 2)
                    out.push_back({a1, a2, b1, b2,
                                   a1 * b1 + a2 * b1 + a1 * b2 - a2 * b2});
    return out;
}

double lhv_mixture_max(std::int64_t count, std::uint64_t seed) {
    const std::vector<LhvStrategy> strat = lhv_strategies();
    const int chunks = std::max(1, chunk_count(count));
    std::vector<double> chunk_max(chunks, -8.0);
    parallel_chunks(count, [&](std::int64_t lo, std::int64_t hi, int c) {
        double best = -8.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            Rng rng(child_seed(seed, static_cast<std::uint64_t>(i)));
            double w[16], tot = 0.0;
            for (double& x : w) {
                x = -std::log(1.0 - rng.uniform());  // exponential -> Dirichlet
                tot += x;
            }
            double b = 0.0;
            for (int k = 0; k < 16; ++k) b += (w[k] / tot) * strat[k].value;
            best = std::max(best, std::abs(b));
        }
        chunk_max[c] = best;
    });
    double best = -8.0;
    for (double v : chunk_max) best = std::max(best, v);
    return best;
}

ViolationResult maximize_violation(CommutationRegime regime, int dim,
                                   std::uint64_t seed, int restarts,
                                   const ViolationOptions& opts) {
    if (dim < 2) throw std::invalid_argument("maximize_violation: dim must be >= 2");
    if (restarts < 1)
        throw std::invalid_argument("maximize_violation: restarts must be >= 1");

    const int np = 4 * params_per_observable(regime, dim);

    struct Candidate {
        double value = -1.0;
        ObservableSet obs;
        StateVector state;
    };
    std::vector<Candidate> results(restarts);

    parallel_tasks(restarts, [&](int r) {
        Rng rng(seed + static_cast<std::uint64_t>(r));
        std::vector<double> x0(np);
        for (double& x : x0) x = 1.2 * rng.normal();

        auto f = [&](const std::vector<double>& p) {
            return -objective(regime, dim, p);
        };
        const NmResult nm = nelder_mead(f, x0, 0.4, opts.max_nm_evaluations,
                                        opts.nm_diameter_tol);

        PolishState st{decode(regime, dim, nm.x), {}};
        polish(regime, st, opts.polish_sweeps);
        results[r] = Candidate{st.radius.value, st.obs, st.radius.state};
    });

    int best = 0;
    for (int r = 1; r < restarts; ++r)
        if (results[r].value > results[best].value) best = r;

    ViolationResult out{results[best].value,
                        config_from(regime, results[best].obs,
                                    results[best].state)};
    if (out.value > regime_ceiling(regime) + 1e-6)
        throw std::logic_error("optimizer exceeded the regime ceiling");
    return out;
}

BellConfiguration chsh_optimal_configuration() {
    const double s = 1.0 / std::sqrt(2.0);
    const ComplexMatrix z(2, {1.0, 0.0, 0.0, -1.0});
    const ComplexMatrix x(2, {0.0, 1.0, 1.0, 0.0});
    ComplexMatrix b1 = z + x;
    b1 *= s;
    ComplexMatrix b2 = z - x;
    b2 *= s;
    // maximally entangled pair (|00> + |11>)/sqrt2
    StateVector phi = StateVector::unit({1.0, 0.0, 0.0, 1.0});
    return make_crosscommuting_config(z, x, b1, b2, std::move(phi));
}

ComplexMatrix random_contraction(int dim, Rng& rng, bool extreme) {
    ComplexMatrix g(dim);
    for (int i = 0; i < dim; ++i) {
        g.at(i, i) = rng.normal();
        for (int j = i + 1; j < dim; ++j) {
            const cplx z(rng.normal(), rng.normal());
            g.at(i, j) = z;
            g.at(j, i) = std::conj(z);
        }
    }
    if (!extreme) return spectral_clamp(g, -1.0, 1.0);
    // involution: random Hermitian eigenbasis with random +-1 spectrum
    const Eigensystem es = hermitian_eigensystem(HermitianOperator(g, 1e-9));
    std::vector<double> signs(dim);
    for (double& v : signs) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
    ComplexMatrix r(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            cplx acc(0, 0);
            for (int k = 0; k < dim; ++k)
                acc += es.vectors.at(i, k) * signs[k] * std::conj(es.vectors.at(j, k));
            r.at(i, j) = acc;
        }
    return hermitian_part(r);
}

RandomQuadrupleScan scan_random_quadruples(std::int64_t samples, int dim_min,
                                           int dim_max, std::uint64_t seed) {
    if (dim_min < 2 || dim_max < dim_min)
        throw std::invalid_argument("scan_random_quadruples: bad dimension range");
    const int chunks = std::max(1, chunk_count(samples));
    std::vector<RandomQuadrupleScan> acc(chunks);
    parallel_chunks(samples, [&](std::int64_t lo, std::int64_t hi, int c) {
        RandomQuadrupleScan local;
        for (std::int64_t i = lo; i < hi; ++i) {
            Rng rng(child_seed(seed, static_cast<std::uint64_t>(i)));
            const int dim =
                dim_min + static_cast<int>(rng.next() % static_cast<std::uint64_t>(
                                                            dim_max - dim_min + 1));
            const bool extreme = rng.uniform() < 0.75;
            const ComplexMatrix a1 = random_contraction(dim, rng, extreme);
            const ComplexMatrix a2 = random_contraction(dim, rng, extreme);
            const ComplexMatrix b1 = random_contraction(dim, rng, extreme);
            const ComplexMatrix b2 = random_contraction(dim, rng, extreme);
            const ComplexMatrix b = build_bell(a1, a2, b1, b2);
            const double bbn = operator_norm(b * b.adjoint());
            std::vector<cplx> amps(dim);
            for (auto& z : amps) z = cplx(rng.normal(), rng.normal());
            const StateVector psi = StateVector::unit(std::move(amps));
            const double eb = std::abs(expectation(b, psi));
            local.max_bb_norm = std::max(local.max_bb_norm, bbn);
            local.max_abs_b = std::max(local.max_abs_b, eb);
            ++local.samples;
        }
        acc[c] = local;
    });
    RandomQuadrupleScan out;
    for (const auto& a : acc) {
        out.max_bb_norm = std::max(out.max_bb_norm, a.max_bb_norm);
        out.max_abs_b = std::max(out.max_abs_b, a.max_abs_b);
        out.samples += a.samples;
    }
    return out;
}

}  // namespace qfound
