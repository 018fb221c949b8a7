#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qfound/bell.hpp"
#include "qfound/bohm.hpp"
#include "qfound/fock.hpp"
#include "qfound/harness.hpp"
#include "qfound/polarizer.hpp"
#include "qfound/scattering.hpp"
#include "qfound/version.hpp"

namespace py = pybind11;
using namespace qfound;

namespace {

using carray = py::array_t<std::complex<double>,
                           py::array::c_style | py::array::forcecast>;
using darray = py::array_t<double, py::array::c_style | py::array::forcecast>;

ComplexMatrix mat_from(const carray& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1))
        throw std::invalid_argument("expected a square 2-D array");
    const int n = static_cast<int>(a.shape(0));
    std::vector<cplx> e(static_cast<std::size_t>(n) * n);
    auto r = a.unchecked<2>();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(i) * n + j] = r(i, j);
    return ComplexMatrix(n, std::move(e));
}

py::array_t<std::complex<double>> mat_to(const ComplexMatrix& m) {
    py::array_t<std::complex<double>> out({m.dim(), m.dim()});
    auto w = out.mutable_unchecked<2>();
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) w(i, j) = m.at(i, j);
    return out;
}

std::vector<cplx> cvec_from(const carray& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    const auto r = a.unchecked<1>();
    std::vector<cplx> v(static_cast<std::size_t>(a.shape(0)));
    for (py::ssize_t i = 0; i < a.shape(0); ++i) v[i] = r(i);
    return v;
}

py::array_t<std::complex<double>> cvec_to(const std::vector<cplx>& v) {
    return py::array_t<std::complex<double>>(
        std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

py::array_t<double> dvec_to(const std::vector<double>& v) {
    return py::array_t<double>(
        std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

GridWavefunction psi_from(const carray& values, double x_min, double x_max,
                          double mass, double hbar) {
    GridWavefunction psi;
    psi.values = cvec_from(values);
    psi.grid = Grid{x_min, x_max, static_cast<int>(psi.values.size())};
    psi.mass = mass;
    psi.hbar = hbar;
    return psi;
}

CommutationRegime regime_from(const std::string& name) {
    if (name == "noncommuting") return CommutationRegime::NonCommuting;
    if (name == "crosscommuting") return CommutationRegime::CrossCommuting;
    if (name == "allcommuting") return CommutationRegime::AllCommuting;
    throw std::invalid_argument("unknown regime: " + name);
}

PairSource source_from(const std::string& name) {
    if (name == "copenhagen") return PairSource::EntangledCopenhagen;
    if (name == "hv") return PairSource::CommonHiddenAngle;
    throw std::invalid_argument("unknown source: " + name);
}

PolarizerModel model_from(const std::string& name) {
    if (name == "copenhagen") return PolarizerModel::Copenhagen;
    if (name == "hv") return PolarizerModel::HiddenVariable;
    throw std::invalid_argument("unknown model: " + name);
}

PotentialSpec potential_from(const std::string& kind, double k_spring) {
    if (kind == "free") return FreePotential{};
    if (kind == "harmonic") return HarmonicPotential{k_spring};
    throw std::invalid_argument("unknown potential: " + kind);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "quantum-foundations testbed: Bell bounds, polarizer chains, "
              "wavefunction phase diagnostics, truncated phase operators";
    m.attr("__version__") = kVersion;

    // ---- linear algebra ----
    auto linalg = m.def_submodule("linalg", "dense complex operator helpers");
    linalg.def("expectation", [](const carray& op, const carray& state) {
        return expectation(mat_from(op), StateVector(cvec_from(state), false));
    }, py::arg("op"), py::arg("state"));
    linalg.def("commutator", [](const carray& a, const carray& b) {
        return mat_to(commutator(mat_from(a), mat_from(b)));
    });
    linalg.def("tensor", [](const carray& a, const carray& b) {
        return mat_to(tensor(mat_from(a), mat_from(b)));
    });
    linalg.def("hermitian_eigensystem", [](const carray& a) {
        const Eigensystem es = hermitian_eigensystem(HermitianOperator(mat_from(a)));
        return py::make_tuple(dvec_to(es.values), mat_to(es.vectors));
    });
    linalg.def("operator_norm",
               [](const carray& a) { return operator_norm(mat_from(a)); });

    // ---- bell ----
    auto bell = m.def_submodule("bell", "Bell-operator bounds and optimization");
    bell.def("lhv_bound", &lhv_bound);
    bell.def("lhv_mixture_max", &lhv_mixture_max, py::arg("count"), py::arg("seed"));
    bell.def("regime_ceiling", [](const std::string& r) {
        return regime_ceiling(regime_from(r));
    });
    bell.def("chsh_optimal_value", []() {
        return bell_expectation(chsh_optimal_configuration()).real();
    });
    bell.def("chsh_optimal_bb", []() {
        return bb_dagger_bound(chsh_optimal_configuration());
    });
    bell.def("maximize_violation",
             [](const std::string& regime, int dim, std::uint64_t seed,
                int restarts) {
                 return maximize_violation(regime_from(regime), dim, seed, restarts)
                     .value;
             },
             py::arg("regime"), py::arg("dim"), py::arg("seed"),
             py::arg("restarts"), py::call_guard<py::gil_scoped_release>());
    bell.def("scan_random_quadruples",
             [](std::int64_t samples, int dim_min, int dim_max,
                std::uint64_t seed) {
                 RandomQuadrupleScan s;
                 {
                     py::gil_scoped_release release;
                     s = scan_random_quadruples(samples, dim_min, dim_max, seed);
                 }
                 return py::make_tuple(s.max_bb_norm, s.max_abs_b);
             },
             py::arg("samples"), py::arg("dim_min") = 2, py::arg("dim_max") = 6,
             py::arg("seed") = 1);

    // ---- polarizer ----
    auto pol = m.def_submodule("polarizer", "photon transmission models");
    pol.def("chain_probability_copenhagen", &chain_probability_copenhagen,
            py::arg("alpha_deg"), py::arg("beta_deg"), py::arg("eps") = 0.0);
    pol.def("two_polarizer_rate",
            [](const std::string& model, double theta_deg, std::int64_t n,
               std::uint64_t seed, double sharpness, double realign, double eps) {
                return two_polarizer_experiment(model_from(model), theta_deg, n,
                                                seed, {sharpness, realign}, eps)
                    .conditional_rate();
            },
            py::arg("model"), py::arg("theta_deg"), py::arg("n"), py::arg("seed"),
            py::arg("sharpness") = 1.0, py::arg("realign") = 1.0,
            py::arg("eps") = 0.0, py::call_guard<py::gil_scoped_release>());
    pol.def("coincidence",
            [](double alpha, double beta, const std::string& source,
               std::int64_t n_pairs, std::uint64_t seed, double sharpness,
               double realign) {
                const CoincidenceResult r = coincidence_experiment(
                    alpha, beta, source_from(source), {sharpness, realign},
                    n_pairs, seed);
                py::dict d;
                d["n_pairs"] = r.n_pairs;
                d["n_pp"] = r.n_pp;
                d["n_pm"] = r.n_pm;
                d["n_mp"] = r.n_mp;
                d["n_mm"] = r.n_mm;
                d["rate"] = r.rate();
                d["correlation"] = r.correlation();
                return d;
            },
            py::arg("alpha_deg"), py::arg("beta_deg"), py::arg("source"),
            py::arg("n_pairs"), py::arg("seed"), py::arg("sharpness") = 1.0,
            py::arg("realign") = 1.0);
    pol.def("chsh_experiment",
            [](const std::string& source, std::int64_t n_pairs,
               std::uint64_t seed, double a1, double a2, double b1, double b2,
               double sharpness, double realign) {
                ChshSettings s{a1, a2, b1, b2};
                ChshEstimate e;
                {
                    py::gil_scoped_release release;
                    e = chsh_experiment(s, source_from(source),
                                        {sharpness, realign}, n_pairs, seed);
                }
                return py::make_tuple(e.b_value, e.stderr_b);
            },
            py::arg("source"), py::arg("n_pairs"), py::arg("seed"),
            py::arg("a1_deg") = 45.0, py::arg("a2_deg") = 0.0,
            py::arg("b1_deg") = 22.5, py::arg("b2_deg") = 67.5,
            py::arg("sharpness") = 1.0, py::arg("realign") = 1.0);
    pol.def("three_polarizer_scan",
            [](const std::string& model, const darray& alphas,
               std::int64_t n_photons, std::uint64_t seed, double sharpness,
               double realign, double eps) {
                std::vector<double> grid(alphas.data(),
                                         alphas.data() + alphas.size());
                std::vector<ThreePolScanPoint> pts;
                {
                    py::gil_scoped_release release;
                    pts = three_polarizer_scan(model_from(model), grid, n_photons,
                                               seed, {sharpness, realign}, eps);
                }
                py::array_t<double> out({static_cast<py::ssize_t>(pts.size()),
                                         static_cast<py::ssize_t>(4)});
                auto w = out.mutable_unchecked<2>();
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    w(i, 0) = pts[i].alpha_deg;
                    w(i, 1) = pts[i].beta_star_deg;
                    w(i, 2) = pts[i].p_min;
                    w(i, 3) = pts[i].p_copenhagen;
                }
                return out;
            },
            py::arg("model"), py::arg("alphas_deg"), py::arg("n_photons"),
            py::arg("seed"), py::arg("sharpness") = 4.0,
            py::arg("realign") = 0.5, py::arg("eps") = 0.0);

    // ---- bohm ----
    auto bohm = m.def_submodule("bohm", "wavefunction evolution and decomposition");
    bohm.def("evolve",
             [](const carray& values, double x_min, double x_max,
                const std::string& potential, double k_spring, double dt,
                int steps, int order, double mass, double hbar) {
                 const GridWavefunction psi =
                     psi_from(values, x_min, x_max, mass, hbar);
                 GridWavefunction out;
                 {
                     py::gil_scoped_release release;
                     out = evolve(psi, potential_from(potential, k_spring), dt,
                                  steps, order);
                 }
                 return cvec_to(out.values);
             },
             py::arg("values"), py::arg("x_min"), py::arg("x_max"),
             py::arg("potential") = "free", py::arg("k_spring") = 1.0,
             py::arg("dt") = 1e-3, py::arg("steps") = 1, py::arg("order") = 4,
             py::arg("mass") = 1.0, py::arg("hbar") = 1.0);
    bohm.def("decompose",
             [](const carray& values, double x_min, double x_max,
                double node_threshold, double mass, double hbar) {
                 BohmFields f = decompose(
                     psi_from(values, x_min, x_max, mass, hbar), node_threshold);
                 quantum_potential(f);
                 std::vector<double> mask(f.node_mask.begin(), f.node_mask.end());
                 std::vector<double> valid(f.v_q_valid.begin(), f.v_q_valid.end());
                 return py::make_tuple(dvec_to(f.lambda), dvec_to(f.phi),
                                       dvec_to(mask), dvec_to(f.v_q),
                                       dvec_to(valid));
             },
             py::arg("values"), py::arg("x_min"), py::arg("x_max"),
             py::arg("node_threshold") = 1e-6, py::arg("mass") = 1.0,
             py::arg("hbar") = 1.0);
    bohm.def("grid_eigenstates",
             [](double x_min, double x_max, int n, int count,
                const std::string& potential, double k_spring, int order) {
                 const Grid g{x_min, x_max, n};
                 std::vector<GridEigenstate> states;
                 {
                     py::gil_scoped_release release;
                     states = grid_eigenstates(
                         g, potential_from(potential, k_spring), count, order);
                 }
                 std::vector<double> energies;
                 py::array_t<std::complex<double>> vecs(
                     {static_cast<py::ssize_t>(states.size()),
                      static_cast<py::ssize_t>(n)});
                 auto w = vecs.mutable_unchecked<2>();
                 for (std::size_t s = 0; s < states.size(); ++s) {
                     energies.push_back(states[s].energy);
                     for (int i = 0; i < n; ++i) w(s, i) = states[s].psi.values[i];
                 }
                 return py::make_tuple(dvec_to(energies), vecs);
             },
             py::arg("x_min"), py::arg("x_max"), py::arg("n"), py::arg("count"),
             py::arg("potential") = "harmonic", py::arg("k_spring") = 1.0,
             py::arg("order") = 4);
    bohm.def("eigenstate_identity_deviation",
             [](const carray& values, double x_min, double x_max,
                const std::string& potential, double k_spring, double energy,
                double node_threshold, double window_sigmas) {
                 return eigenstate_identity_deviation(
                     psi_from(values, x_min, x_max, 1.0, 1.0),
                     potential_from(potential, k_spring), energy, node_threshold,
                     window_sigmas);
             },
             py::arg("values"), py::arg("x_min"), py::arg("x_max"),
             py::arg("potential"), py::arg("k_spring"), py::arg("energy"),
             py::arg("node_threshold") = 0.1, py::arg("window_sigmas") = 4.0);
    bohm.def("residuals",
             [](const carray& slices, double x_min, double x_max, double dt,
                const std::string& potential, double k_spring,
                double node_threshold) {
                 if (slices.ndim() != 2)
                     throw std::invalid_argument("expected (n_slices, n) array");
                 const auto r = slices.unchecked<2>();
                 std::vector<GridWavefunction> traj;
                 for (py::ssize_t s = 0; s < slices.shape(0); ++s) {
                     GridWavefunction psi;
                     psi.grid = Grid{x_min, x_max, static_cast<int>(slices.shape(1))};
                     psi.values.resize(slices.shape(1));
                     for (py::ssize_t i = 0; i < slices.shape(1); ++i)
                         psi.values[i] = r(s, i);
                     traj.push_back(std::move(psi));
                 }
                 BohmResiduals res;
                 {
                     py::gil_scoped_release release;
                     res = bohm_residuals(traj, potential_from(potential, k_spring),
                                          dt, node_threshold);
                 }
                 return py::make_tuple(res.r_hj, res.r_cont);
             },
             py::arg("slices"), py::arg("x_min"), py::arg("x_max"), py::arg("dt"),
             py::arg("potential") = "free", py::arg("k_spring") = 1.0,
             py::arg("node_threshold") = 1e-6);
    bohm.def("free_gaussian",
             [](double x_min, double x_max, int n, double x0, double p0,
                double sigma0, double t) {
                 return cvec_to(
                     free_gaussian_slice(Grid{x_min, x_max, n}, x0, p0, sigma0, t)
                         .values);
             },
             py::arg("x_min"), py::arg("x_max"), py::arg("n"), py::arg("x0"),
             py::arg("p0"), py::arg("sigma0"), py::arg("t") = 0.0);

    // ---- scattering ----
    auto scat = m.def_submodule("scattering", "dilation diagnostics and decay");
    scat.def("r_expectation",
             [](const carray& values, double x_min, double x_max, double mass,
                double hbar) {
                 return r_expectation(psi_from(values, x_min, x_max, mass, hbar));
             },
             py::arg("values"), py::arg("x_min"), py::arg("x_max"),
             py::arg("mass") = 1.0, py::arg("hbar") = 1.0);
    scat.def("momentum_squared",
             [](const carray& values, double x_min, double x_max, double mass,
                double hbar) {
                 return momentum_squared_expectation(
                     psi_from(values, x_min, x_max, mass, hbar));
             },
             py::arg("values"), py::arg("x_min"), py::arg("x_max"),
             py::arg("mass") = 1.0, py::arg("hbar") = 1.0);
    scat.def("monotonicity_trace",
             [](double x0, double p0, double sigma0, double x_half, int n,
                double dt, int steps, int stride) {
                 const Grid g{-x_half, x_half, n};
                 std::vector<RTracePoint> trace;
                 {
                     py::gil_scoped_release release;
                     trace = monotonicity_trace(make_gaussian(g, x0, p0, sigma0),
                                                dt, steps, stride);
                 }
                 py::array_t<double> out({static_cast<py::ssize_t>(trace.size()),
                                          static_cast<py::ssize_t>(3)});
                 auto w = out.mutable_unchecked<2>();
                 for (std::size_t i = 0; i < trace.size(); ++i) {
                     w(i, 0) = trace[i].t;
                     w(i, 1) = trace[i].r;
                     w(i, 2) = trace[i].p2;
                 }
                 return out;
             },
             py::arg("x0"), py::arg("p0"), py::arg("sigma0"),
             py::arg("x_half") = 48.0, py::arg("n") = 1921,
             py::arg("dt") = 2e-3, py::arg("steps") = 4000,
             py::arg("stride") = 100);
    scat.def("resonance_decay",
             [](int n_in, int n_res, int n_out, double gamma, double feed,
                double mix, const darray& t_grid) {
                 const DecayModel model(n_in, n_res, n_out, gamma, feed, mix);
                 std::vector<double> ts(t_grid.data(),
                                        t_grid.data() + t_grid.size());
                 const auto samples = resonance_decay(model, ts);
                 py::array_t<double> out({static_cast<py::ssize_t>(samples.size()),
                                          static_cast<py::ssize_t>(4)});
                 auto w = out.mutable_unchecked<2>();
                 for (std::size_t i = 0; i < samples.size(); ++i) {
                     w(i, 0) = samples[i].t;
                     w(i, 1) = samples[i].p_in;
                     w(i, 2) = samples[i].p_res;
                     w(i, 3) = samples[i].p_out;
                 }
                 return out;
             },
             py::arg("n_in"), py::arg("n_res"), py::arg("n_out"),
             py::arg("gamma"), py::arg("feed"), py::arg("mix"),
             py::arg("t_grid"));

    // ---- fock ----
    auto fock = m.def_submodule("fock", "truncated ladder and phase operators");
    fock.def("lowering",
             [](int n) { return mat_to(FockSpace(n).lowering()); }, py::arg("n"));
    fock.def("raising",
             [](int n) { return mat_to(FockSpace(n).raising()); }, py::arg("n"));
    fock.def("hamiltonian",
             [](int n, double omega) {
                 return mat_to(FockSpace(n, omega).hamiltonian());
             },
             py::arg("n"), py::arg("omega") = 1.0);
    fock.def("sg_operator",
             [](int n) { return mat_to(sg_operator(FockSpace(n))); }, py::arg("n"));
    fock.def("extended_phase_operator",
             [](int n) { return mat_to(extended_phase_space(FockSpace(n)).op); },
             py::arg("n"));
    fock.def("ladder_commutators",
             [](int n, double omega) {
                 const LadderDefects d = ladder_commutators(FockSpace(n, omega));
                 return py::make_tuple(d.lowering_defect, d.raising_defect);
             },
             py::arg("n"), py::arg("omega") = 1.0);
    fock.def("phase_operator_checks", [](int n) {
        const PhaseOperatorChecks c = phase_operator_checks(FockSpace(n));
        py::dict d;
        d["ee_dag_interior"] = c.ee_dag_interior;
        d["edag_e_vacuum"] = c.edag_e_vacuum;
        d["sg_commutator_interior"] = c.sg_commutator_interior;
        d["extended_unitary"] = c.extended_unitary;
        d["extended_restriction"] = c.extended_restriction;
        d["vacuum_link_norm"] = c.vacuum_link_norm;
        return d;
    }, py::arg("n"));
    fock.def("canonical_obstruction",
             [](double x_half, int n) {
                 CanonicalObstruction o;
                 {
                     py::gil_scoped_release release;
                     o = canonical_commutator_obstruction(Grid{-x_half, x_half, n});
                 }
                 return py::make_tuple(o.min_energy, o.residual, o.expected_floor);
             },
             py::arg("x_half") = 8.0, py::arg("n") = 96);

    // ---- harness ----
    auto harness = m.def_submodule("harness", "configuration-driven experiments");
    harness.def("experiment_names", &experiment_names);
    harness.def("validate_config",
                [](const std::string& experiment, const py::dict& overrides) {
                    KeyValueConfig cfg;
                    for (auto item : overrides)
                        cfg.set(py::str(item.first), py::str(item.second));
                    return validate_config(experiment,
                                           materialize_config(experiment, cfg));
                },
                py::arg("experiment"), py::arg("config"));
    harness.def("run_experiment",
                [](const std::string& experiment, const py::dict& overrides) {
                    KeyValueConfig cfg;
                    for (auto item : overrides)
                        cfg.set(py::str(item.first), py::str(item.second));
                    const RunResult res = run_experiment(experiment, cfg);
                    py::dict out;
                    out["csv"] = res.table.to_csv();
                    out["columns"] = res.table.columns;
                    py::array_t<double> rows(
                        {static_cast<py::ssize_t>(res.table.rows.size()),
                         static_cast<py::ssize_t>(res.table.columns.size())});
                    auto w = rows.mutable_unchecked<2>();
                    for (std::size_t i = 0; i < res.table.rows.size(); ++i)
                        for (std::size_t j = 0; j < res.table.columns.size(); ++j)
                            w(i, j) = res.table.rows[i][j];
                    out["rows"] = rows;
                    return out;
                },
                py::arg("experiment"), py::arg("config"));
}
