#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "critwave/concentrators.hpp"
#include "critwave/errors.hpp"
#include "critwave/expcli/config.hpp"
#include "critwave/expcli/experiments.hpp"
#include "critwave/expcli/report.hpp"
#include "critwave/functionals.hpp"
#include "critwave/odelab.hpp"
#include "critwave/pdesolver.hpp"
#include "critwave/spectral.hpp"

namespace py = pybind11;
using namespace critwave;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Boundary parse_bc(const std::string& bc) {
  if (bc == "dirichlet") return Boundary::Dirichlet;
  if (bc == "neumann") return Boundary::Neumann;
  throw ConfigError("boundary must be 'dirichlet' or 'neumann'");
}

// Arrays are indexed [iy, ix], matching the row-major field storage.
template <class F>
F to_field(const Array& a, const std::string& bc) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw ConfigError("expected a square 2D array");
  const Grid2D g(static_cast<int>(a.shape(0)), parse_bc(bc));
  std::vector<double> v(a.data(), a.data() + a.size());
  return F(g, std::move(v));
}

Array to_array(const Field2D& f) {
  Array out({f.n(), f.n()});
  std::memcpy(out.mutable_data(), f.data().data(), f.data().size() * sizeof(double));
  return out;
}

py::dict energy_dict(const EnergyBreakdown& e) {
  py::dict d;
  d["kinetic"] = e.kinetic;
  d["dirichlet"] = e.dirichlet;
  d["potential"] = e.potential;
  d["total"] = e.total;
  return d;
}

py::tuple log_pair(const LogScalar& x) { return py::make_tuple(x.sign(), x.lnmag()); }

ConcentratorSpec make_spec(int k, double eta, std::pair<double, double> center, const std::string& amplitude,
                           double a) {
  ConcentratorSpec s;
  s.k = k;
  s.eta = eta;
  s.center = Point{center.first, center.second};
  s.a = a;
  if (amplitude == "plain") s.amplitude = Amplitude::Plain;
  else if (amplitude == "plus") s.amplitude = Amplitude::Plus;
  else if (amplitude == "minus_scaled") s.amplitude = Amplitude::MinusScaled;
  else throw ConfigError("amplitude must be 'plain', 'plus' or 'minus_scaled'");
  return s;
}

}  // namespace

PYBIND11_MODULE(_critwave, m) {
  m.doc() = "Energy-critical exponential wave equation on the unit square";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<OverflowError>(m, "OverflowError", PyExc_OverflowError);

  m.attr("CRITICAL_EXPONENT") = kCriticalExponent;
  m.def("version", &exp::version);

  m.def("nodes", [](int n, const std::string& bc) {
    const Grid2D g(n, parse_bc(bc));
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = g.node(i);
    return x;
  }, py::arg("n"), py::arg("bc") = "dirichlet");

  m.def("forward_transform", [](const Array& u, const std::string& bc) {
    return to_array(forward_transform(to_field<GridField>(u, bc)));
  }, py::arg("u"), py::arg("bc") = "dirichlet");
  m.def("inverse_transform", [](const Array& c, const std::string& bc) {
    return to_array(inverse_transform(to_field<SpectralField>(c, bc)));
  }, py::arg("c"), py::arg("bc") = "dirichlet");
  m.def("free_propagate", [](const Array& u, const Array& v, double dt, const std::string& bc) {
    const WaveState s = free_propagate(WaveState{to_field<GridField>(u, bc), to_field<GridField>(v, bc), 0.0}, dt);
    return py::make_tuple(to_array(s.u), to_array(s.v));
  }, py::arg("u"), py::arg("v"), py::arg("dt"), py::arg("bc") = "dirichlet");

  m.def("energy", [](const Array& u, const Array& v, double exponent, const std::string& bc) {
    return energy_dict(energy(WaveState{to_field<GridField>(u, bc), to_field<GridField>(v, bc), 0.0}, exponent));
  }, py::arg("u"), py::arg("v"), py::arg("exponent") = kCriticalExponent, py::arg("bc") = "dirichlet");
  m.def("moser_functional", [](const Array& u, double alpha, const std::string& bc) {
    return moser_functional(to_field<GridField>(u, bc), alpha);
  }, py::arg("u"), py::arg("alpha"), py::arg("bc") = "dirichlet");

  m.def("build_fk", [](int n, int k, double eta, std::pair<double, double> center, const std::string& amplitude,
                       double a) {
    return to_array(build_fk(make_spec(k, eta, center, amplitude, a), Grid2D(n)));
  }, py::arg("n"), py::arg("k"), py::arg("eta") = 0.2, py::arg("center") = std::pair{0.5, 0.5},
     py::arg("amplitude") = "plain", py::arg("a") = 2.0);
  m.def("analytic_reference", [](int k, double eta, const std::string& amplitude, double a) {
    const AnalyticReference r = analytic_reference(make_spec(k, eta, {0.5, 0.5}, amplitude, a));
    py::dict d;
    d["dirichlet_sq"] = r.dirichlet_sq;
    d["l2_sq"] = r.l2_sq;
    d["mt_functional"] = r.mt_functional.to_double();
    d["potential"] = r.potential.to_double();
    d["energy"] = r.energy.to_double();
    return d;
  }, py::arg("k"), py::arg("eta") = 0.2, py::arg("amplitude") = "plain", py::arg("a") = 2.0);

  m.def("period", &period, py::arg("y0"));
  m.def("period_log", [](double y0) { return period_log(y0).lnmag(); }, py::arg("y0"));
  m.def("time_to_level", &time_to_level, py::arg("y0"), py::arg("y1"));
  m.def("detect_return_time", &detect_return_time, py::arg("y0"), py::arg("dt"));
  m.def("lemma_I", [](double a, int k) {
    const LemmaIResult r = lemma_I(a, k);
    return py::make_tuple(r.value.lnmag(), r.bound.lnmag(), r.holds);
  }, py::arg("a"), py::arg("k"), "Returns (ln value, ln bound, holds).");
  m.def("lemma_T3", [](double A) {
    const LemmaT3Result r = lemma_T3(A);
    return py::make_tuple(r.lhs.to_double(), r.rhs.to_double(), r.holds);
  }, py::arg("A"), "Returns (lhs, rhs, holds).");
  m.def("decoherence", [](int k, double eta) {
    const DecoherenceReport r = decoherence(k, eta);
    py::dict d;
    d["k"] = r.k;
    d["phi_tk"] = r.phi_tk;
    d["psi_tk"] = r.psi_tk;
    d["log_t_k"] = r.t_k.lnmag();
    d["log_T_k"] = r.T_k.lnmag();
    d["log_gap_sq"] = r.gap_sq.lnmag();
    d["gap_over_ek"] = r.gap_over_ek;
    d["cone_l2_lower"] = r.cone_l2_lower;
    return d;
  }, py::arg("k"), py::arg("eta") = 0.1);

  m.def("solve", [](const Array& u, const Array& v, double T, double dt, double exponent, int snapshot_every) {
    SolverConfig cfg;
    cfg.T = T;
    cfg.dt = dt;
    cfg.exponent = exponent;
    cfg.snapshot_every = snapshot_every;
    const RunResult r = run(WaveState{to_field<GridField>(u, "dirichlet"), to_field<GridField>(v, "dirichlet"), 0.0}, cfg);
    py::dict d;
    py::list times, energies;
    for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
      times.append(r.snapshots[i].t);
      energies.append(r.energies[i].total);
    }
    d["times"] = times;
    d["energies"] = energies;
    d["max_drift"] = r.max_drift;
    d["truncated"] = r.truncated;
    d["steps"] = r.steps;
    d["u"] = to_array(r.snapshots.back().u);
    d["v"] = to_array(r.snapshots.back().v);
    return d;
  }, py::arg("u"), py::arg("v"), py::arg("T"), py::arg("dt"), py::arg("exponent") = kCriticalExponent,
     py::arg("snapshot_every") = 1);

  m.def("parse_list", &exp::parse_list, py::arg("text"));
  m.def("run_experiment", [](const std::string& name, const exp::ParamMap& params, std::uint64_t seed) {
    exp::ExperimentConfig cfg = exp::make_config(name, nullptr, params);
    cfg.seed = seed;
    cfg.reproducible = true;
    exp::ReportBundle b;
    {
      py::gil_scoped_release release;
      b = exp::run_experiment(cfg);
    }
    return exp::dump_json(exp::summary_json(b, cfg));
  }, py::arg("name"), py::arg("params") = exp::ParamMap{}, py::arg("seed") = exp::ExperimentConfig{}.seed,
     "Runs one experiment without writing files and returns its JSON summary text.");
}
