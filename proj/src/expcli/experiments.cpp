#include "critwave/expcli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <numeric>

#include "critwave/concentrators.hpp"
#include "critwave/functionals.hpp"
#include "critwave/odelab.hpp"
#include "critwave/random.hpp"
#include "critwave/spectral.hpp"

namespace critwave::exp {

namespace {

constexpr double kPi = std::numbers::pi;
using json = nlohmann::json;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
  if (dynamic_cast<const UndefinedInputError*>(&e)) return "undefined_input";
  if (dynamic_cast<const OverflowError*>(&e)) return "overflow";
  return "error";
}

// Runs fn, turning a library exception into a per-item error.
template <class Fn>
bool guarded(ReportBundle& b, const std::string& item, Fn&& fn) {
  try {
    fn();
    return true;
  } catch (const std::exception& e) {
    b.errors.push_back({item, error_kind(e), e.what()});
    return false;
  }
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : INFINITY;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

json join_notes(const std::vector<std::string>& notes) {
  std::string s;
  for (const auto& n : notes) s += (s.empty() ? "" : "; ") + n;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// shared studies

WaveState single_mode_state(const Grid2D& grid, int m, int k, double amplitude) {
  const int i = grid.bc() == Boundary::Dirichlet ? m - 1 : m;
  const int j = grid.bc() == Boundary::Dirichlet ? k - 1 : k;
  if (i < 0 || j < 0 || i >= grid.n() || j >= grid.n())
    throw PreconditionError("single_mode_state: mode not representable on this grid");
  SpectralField c(grid);
  c(i, j) = amplitude;
  return {inverse_transform(c), GridField(grid), 0.0};
}

WaveState random_smooth_state(const Grid2D& grid, std::uint64_t seed) {
  CounterRng rng(seed);
  SpectralField c(grid), d(grid);
  const int n = grid.n();
  double lin = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double lam2 = c.eigenvalue_sq(i, j);
      const double zu = rng.normal();
      const double zv = rng.normal();
      if (lam2 == 0.0) continue;
      c(i, j) = zu / lam2;
      d(i, j) = zv / std::sqrt(lam2);
      lin += lam2 * c(i, j) * c(i, j) + d(i, j) * d(i, j);
    }
  const double scale = 1.0 / std::sqrt(lin);
  for (double& x : c.values()) x *= scale;
  for (double& x : d.values()) x *= scale;
  return to_grid(SpectralWaveState{c, d, 0.0});
}

ConeStudy cone_identity_study(int n, const ConeSpec& cone, double S, double T, int m, int k,
                              double spacing) {
  const Grid2D grid(n);
  const SpectralWaveState s0 = to_spectral(single_mode_state(grid, m, k, 1.0));
  if (!(spacing > 0.0)) spacing = grid.h();
  const int count = std::max(1, int(std::ceil((T - S) / spacing - 1e-9)));
  std::vector<WaveState> traj;
  traj.reserve(count + 1);
  for (int i = 0; i <= count; ++i) {
    const double t = i == count ? T : S + (T - S) * double(i) / count;
    WaveState w = to_grid(free_propagate(s0, t));
    w.t = t;
    traj.push_back(std::move(w));
  }
  ConeStudy out;
  out.n = n;
  const IdentityResidual flux = flux_identity_residual(traj, cone, S, T, 0.0);
  const IdentityResidual mult = multiplier_identity_residual(traj, cone, S, T, 0.0);
  out.flux_residual = flux.residual;
  out.flux_lhs = flux.lhs;
  out.flux_rhs = flux.rhs;
  out.monotonicity_violation = flux.monotonicity_violation;
  out.multiplier_residual = mult.residual;
  out.warnings = flux.warnings;
  return out;
}

ProjectorStudy projector_study(int n, double q, double lo, double hi, int count, int members,
                               std::uint64_t seed) {
  const Grid2D grid(n);
  ProjectorStudy study;
  study.predicted = 2.0 / 3.0 * (0.5 - 1.0 / q);
  CounterRng rng(seed);
  auto ratio = [q](const GridField& u) {
    const double l2 = std::sqrt(l2_norm_sq(u));
    return l2 > 0.0 ? lq_norm(u, q) / l2 : 0.0;
  };
  std::vector<double> lx, ly;
  for (int r = 0; r < count; ++r) {
    const double lambda = lo * std::pow(hi / lo, double(r) / double(count - 1));
    std::vector<std::pair<int, int>> band;
    SpectralField probe(grid);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double f = probe.frequency(i, j);
        if (f >= lambda && f < lambda + 1.0) band.emplace_back(i, j);
      }
    ProjectorRow row;
    row.lambda = lambda;
    row.band_modes = int(band.size());
    if (band.empty()) {
      study.rows.push_back(row);
      continue;
    }
    for (const auto& [i, j] : band) {
      SpectralField c(grid);
      c(i, j) = 1.0;
      row.ratio_single = std::max(row.ratio_single, ratio(inverse_transform(c)));
    }
    for (int mbr = 0; mbr < members; ++mbr) {
      SpectralField c(grid);
      for (const auto& [i, j] : band) c(i, j) = rng.normal();
      row.ratio_random = std::max(row.ratio_random, ratio(inverse_transform(chi_projector(c, lambda))));
      // band function peaked at a random point: coefficients e_mk(x0)
      const double x0 = rng.uniform(), y0 = rng.uniform();
      SpectralField z(grid);
      for (const auto& [i, j] : band)
        z(i, j) = 2.0 * std::sin(grid.mode(i) * kPi * x0) * std::sin(grid.mode(j) * kPi * y0);
      row.ratio_point = std::max(row.ratio_point, ratio(inverse_transform(z)));
    }
    row.max_ratio = std::max({row.ratio_single, row.ratio_random, row.ratio_point});
    study.rows.push_back(row);
    lx.push_back(std::log(lambda));
    ly.push_back(std::log(row.max_ratio));
  }
  if (lx.size() >= 2) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    study.slope = sxy / sxx;
  }
  return study;
}

ConeNormMeasurement cone_dual_norm(int k, double a, double p, double q, const Grid2D& grid) {
  ConeNormMeasurement out;
  out.lower_bound = dual_strichartz_lower_bound(k, a, p, q).to_double();
  out.plateau = plateau_cone_norm(k, a, p, q).to_double();
  const Point centre{};
  const WaveState s0 = supercritical_growth_data(k, a, grid, centre);
  const double R = std::exp(-0.5 * k) / a;
  if (R < 4.0 * grid.h()) {
    out.warnings.push_back("cone base radius " + fmt("%.4g", R) + " spans fewer than four grid spacings");
  }
  SolverConfig cfg;
  cfg.T = R;
  cfg.dt = default_dt(grid);
  const double h2 = grid.h() * grid.h();
  std::vector<double> times, norms;
  const RunResult run = run_streaming(s0, cfg, [&](const WaveState& w, const EnergyBreakdown&) {
    const Mask mask = cone_mask(centre, R - w.t, grid);
    const GridField f = nonlinearity(w.u, cfg.exponent);
    auto fv = f.values();
    double acc = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i)
      if (mask.inside[i]) {
        acc += std::isinf(q) ? 0.0 : std::pow(std::abs(fv[i]), q);
        peak = std::max(peak, std::abs(fv[i]));
      }
    times.push_back(w.t);
    norms.push_back(std::isinf(q) ? peak : std::pow(h2 * acc, 1.0 / q));
  });
  out.steps = run.steps;
  if (run.truncated) out.warnings.push_back(run.diagnostic);
  if (std::isinf(p)) {
    out.measured = *std::max_element(norms.begin(), norms.end());
  } else {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < norms.size(); ++i)
      acc += 0.5 * (times[i + 1] - times[i]) * (std::pow(norms[i], p) + std::pow(norms[i + 1], p));
    out.measured = std::pow(acc, 1.0 / p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// experiments

ReportBundle cmd_moser(const ExperimentConfig& cfg) {
  ReportBundle b;
  b.experiment = "moser";
  const double e3 = std::exp(3.0);

  Table& quad = b.table("energy_threshold", {"k", "eta", "amplitude", "dirichlet_sq", "potential",
                                             "energy_minus_one", "limit", "pass"});
  bool plain_ok = true, plus_ok = true;
  double worst_plain = 0.0, worst_plus = 0.0;
  for (double eta : cfg.list("eta"))
    for (int k : cfg.ints("kq"))
      for (Amplitude amp : {Amplitude::Plain, Amplitude::Plus}) {
        const bool plain = amp == Amplitude::Plain;
        guarded(b, "energy k=" + std::to_string(k), [&] {
          ConcentratorSpec spec;
          spec.k = k;
          spec.eta = eta;
          spec.amplitude = amp;
          const AnalyticReference ref = analytic_reference(spec);
          const double excess = (ref.energy - LogScalar::from_double(1.0)).to_double();
          const double limit = plain ? eta * eta : 3.0 * eta * eta * e3;
          const bool ok = excess > 0.0 && excess <= limit;
          (plain ? plain_ok : plus_ok) &= ok;
          double& worst = plain ? worst_plain : worst_plus;
          worst = std::max(worst, excess / limit);
          quad.add({k, eta, plain ? "plain" : "plus", ref.dirichlet_sq, ref.potential.to_double(), excess,
                    limit, ok});
        });
      }
  b.check("energy_threshold_w", "0 < E(w_k,0) - 1 <= eta^2", plain_ok, worst_plain, 1.0,
          "max (E - 1)/eta^2 over the sweep");
  b.check("energy_threshold_v", "0 < E(v_k,0) - 1 <= 3 eta^2 e^3", plus_ok, worst_plus, 1.0,
          "max (E - 1)/(3 eta^2 e^3) over the sweep");

  std::vector<int> ks = cfg.ints("k");
  for (int k : cfg.ints("kq")) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  const double eta = cfg.get("eta");
  Table& sweep = b.table("alpha_sweep", {"k", "eta", "alpha", "ln_functional", "functional_over_4pi_eta2"});
  bool bounded = true, growing = true;
  Figure fig{"alpha_sweep", "Moser functional along the concentrating family", "k",
             "int (e^{alpha u^2} - 1)", true, true, {}};
  double growth = 0.0;
  for (double alpha : cfg.list("alpha")) {
    Series s{"alpha/pi = " + fmt("%.3g", alpha / kPi), {}, {}};
    std::vector<double> vals;
    for (int k : ks) {
      guarded(b, "alpha_sweep k=" + std::to_string(k), [&] {
        ConcentratorSpec spec;
        spec.k = k;
        spec.eta = eta;
        const LogScalar mt = moser_reference(spec, alpha);
        const double scaled = mt.to_double() / (4.0 * kPi * eta * eta);
        sweep.add({k, eta, alpha, mt.lnmag(), finite_or_null(scaled)});
        vals.push_back(mt.lnmag());
        s.x.push_back(k);
        s.y.push_back(mt.to_double());
        if (alpha <= 4.0 * kPi * (1 + 1e-12) && !(scaled <= 1.0)) bounded = false;
      });
    }
    if (alpha > 4.0 * kPi * (1 + 1e-12) && !vals.empty()) {
      for (std::size_t i = 1; i < vals.size(); ++i)
        if (!(vals[i] > vals[i - 1])) growing = false;
      growth = std::max(growth, vals.back() - vals.front());
    }
    fig.series.push_back(std::move(s));
  }
  b.figures.push_back(std::move(fig));
  b.check("moser_bounded", "int (e^{alpha u^2} - 1) <= 4 pi eta^2 for alpha <= 4 pi", bounded, nullptr,
          1.0, "functional / (4 pi eta^2) along the family");
  b.check("moser_supercritical_growth", "int e^{alpha u^2} unbounded along f_k for alpha > 4 pi", growing,
          growth, nullptr, "log growth of the functional across the k sweep");
  b.constants["moser_log_growth_supercritical"] = growth;

  const int n = cfg.get_int("n");
  const double geta = cfg.get("grid_eta");
  const Grid2D grid(n);
  Table& gt = b.table("grid", {"k", "eta", "n", "plateau_over_h", "dirichlet_grid", "dirichlet_rel_err",
                               "energy_grid", "energy_oracle", "energy_rel_err", "mt_grid", "mt_oracle",
                               "warnings"});
  bool grid_ok = true;
  double worst_energy = 0.0;
  for (int k : cfg.ints("k")) {
    guarded(b, "grid k=" + std::to_string(k), [&] {
      ConcentratorSpec spec;
      spec.k = k;
      spec.eta = geta;
      std::vector<std::string> warnings;
      WaveState w{build_fk(spec, grid, &warnings), GridField(grid), 0.0};
      const EnergyBreakdown e = energy(w);
      const AnalyticReference ref = analytic_reference(spec);
      const double e_ref = ref.energy.to_double();
      const double e_err = std::abs(e.total - e_ref) / e_ref;
      const double mt = moser_functional(w.u, 4.0 * kPi);
      worst_energy = std::max(worst_energy, e_err);
      if (e_err > 0.05) grid_ok = false;
      for (const auto& wmsg : warnings) b.warnings.push_back("k=" + std::to_string(k) + ": " + wmsg);
      gt.add({k, geta, n, spec.plateau_radius() / grid.h(), e.dirichlet, std::abs(e.dirichlet - 1.0),
              e.total, e_ref, e_err, mt, ref.mt_functional.to_double(), join_notes(warnings)});
    });
  }
  b.check("grid_energy_vs_quadrature", "E(w_k,0) on the grid vs radial quadrature", grid_ok, worst_energy,
          0.05, "max relative deviation");
  return b;
}

ReportBundle cmd_ode(const ExperimentConfig& cfg) {
  ReportBundle b;
  b.experiment = "ode";

  Table& pt = b.table("period", {"y0", "period_quadrature", "period_verlet", "rel_err", "quarter_rel_err",
                                 "drift_per_period"});
  double worst_period = 0.0, worst_drift = 0.0;
  const double spp = cfg.get("steps_per_period");
  for (double y0 : cfg.list("y0")) {
    guarded(b, "period y0=" + fmt("%g", y0), [&] {
      const double T = period(y0);
      const double dt = T / spp;
      const double Tv = detect_return_time(y0, dt);
      const double rel = std::abs(Tv - T) / T;
      const double quarter = std::abs(time_to_level(y0, 0.0) - 0.25 * T) / T;
      const double drift = integrate(y0, T, dt, Integrator::Verlet, 1 << 30).max_drift;
      worst_period = std::max(worst_period, rel);
      worst_drift = std::max(worst_drift, drift);
      pt.add({y0, T, Tv, rel, quarter, drift});
    });
  }
  b.check("period_vs_integration", "T = 4 int_0^{y0} dz / sqrt(2(F(y0) - F(z)))", worst_period <= 1e-6,
          worst_period, 1e-6, "max relative gap to event-detected return time");
  b.check("first_integral_drift", "H = v^2 + 2F(y) constant", worst_drift <= 1e-6, worst_drift, 1e-6,
          "max relative drift over one period");

  Table& li = b.table("lemma_I", {"a", "k", "ln_value", "ln_bound", "holds"});
  int li_fail = 0;
  for (double a : cfg.list("a"))
    for (int k : cfg.ints("lemma_k"))
      guarded(b, "lemma_I a=" + fmt("%g", a) + " k=" + std::to_string(k), [&] {
        const LemmaIResult r = lemma_I(a, k);
        li_fail += !r.holds;
        li.add({a, k, r.value.lnmag(), r.bound.lnmag(), r.holds});
      });
  b.check("lemma_I", "I(a,k) = int_{e^{-k/2}}^1 r e^{(4a^2/k) log^2 r} dr <= 2 e^{(a^2 - 1) k}", li_fail == 0,
          li_fail, 0, "number of failing (a, k)");

  Table& lt = b.table("lemma_T3", {"A", "ln_lhs", "ln_rhs", "lhs_over_rhs", "holds"});
  int lt_fail = 0;
  double worst_t3 = 0.0;
  for (double A : cfg.list("A"))
    guarded(b, "lemma_T3 A=" + fmt("%g", A), [&] {
      const LemmaT3Result r = lemma_T3(A);
      const double ratio = std::exp(r.lhs.lnmag() - r.rhs.lnmag());
      lt_fail += !r.holds;
      worst_t3 = std::max(worst_t3, ratio);
      lt.add({A, r.lhs.lnmag(), r.rhs.lnmag(), ratio, r.holds});
    });
  b.check("lemma_T3",
          "int_0^A du / sqrt((e^{A^2} - A^2) - (e^{u^2} - u^2)) <= sqrt(1 - 2/e) e^{-A^2/2} (A - 1/A + A/(A^2 - 1))",
          lt_fail == 0, worst_t3, 1.0, "max lhs/rhs");

  Table& dt = b.table("decoherence",
                      {"k", "eta", "phi0", "psi0", "phi_tk", "psi_tk", "ln_t_k", "ln_T_k", "tk_scaled",
                       "tk_limit", "tk_envelope_ratio", "Tk_scaled", "ln_gap_sq", "gap_over_ek",
                       "cone_l2_lower", "vel_sum_over_ek2", "tk_before_quarter", "valid", "notes"});
  std::vector<DecoherenceReport> reps;
  const double eta = cfg.get("eta");
  for (int k : cfg.ints("k"))
    guarded(b, "decoherence k=" + std::to_string(k), [&] {
      DecoherenceReport r = decoherence(k, eta);
      dt.add({k, eta, r.phi0, r.psi0, r.phi_tk, r.psi_tk, r.t_k.lnmag(), r.T_k.lnmag(), r.tk_scaled,
              0.5 * eta, finite_or_null(r.tk_envelope_ratio), r.Tk_scaled, r.gap_sq.lnmag(), r.gap_over_ek,
              r.cone_l2_lower, r.vel_sum_over_ek2, r.tk_before_quarter, r.valid, join_notes(r.notes)});
      reps.push_back(std::move(r));
    });
  if (!reps.empty()) {
    std::vector<double> gaps, cones;
    bool cone_ok = true, quarter_ok = true, period_ok = true, env_ok = true, vel_ok = true;
    double worst_tk = 0.0, worst_Tk = 0.0, worst_env = 0.0, worst_vel = 0.0;
    const double vel_limit = (std::exp(1.1) + 1.0) / std::sqrt(4.0 * kPi) * 1.05;
    Figure fig{"decoherence", "Decoherence scalings", "k", "value", true, true, {}};
    Series sg{"|d/dt(phi - psi)|^2 / e^k", {}, {}}, st{"t_k e^{k/2}", {}, {}}, sl{"eta/2", {}, {}};
    for (const auto& r : reps) {
      gaps.push_back(r.gap_over_ek);
      cones.push_back(r.cone_l2_lower);
      cone_ok &= r.tk_within_cone;
      quarter_ok &= r.tk_before_quarter;
      period_ok &= r.Tk_scaled <= 30.0;
      vel_ok &= r.vel_sum_over_ek2 <= vel_limit;
      if (r.k >= 100) {
        env_ok &= r.tk_envelope_ratio <= 1.0;
        worst_env = std::max(worst_env, r.tk_envelope_ratio);
      }
      worst_tk = std::max(worst_tk, r.tk_scaled);
      worst_Tk = std::max(worst_Tk, r.Tk_scaled);
      worst_vel = std::max(worst_vel, r.vel_sum_over_ek2);
      sg.x.push_back(r.k), sg.y.push_back(r.gap_over_ek);
      st.x.push_back(r.k), st.y.push_back(r.tk_scaled);
      sl.x.push_back(r.k), sl.y.push_back(0.5 * eta);
    }
    fig.series = {sg, st, sl};
    b.figures.push_back(std::move(fig));
    const bool gaps_pos = *std::min_element(gaps.begin(), gaps.end()) > 0.0;
    const bool cones_pos = *std::min_element(cones.begin(), cones.end()) > 0.0;
    b.check("tk_within_cone", "t_k <= (eta/2) e^{-k/2}", cone_ok, worst_tk, 0.5 * eta,
            "max t_k e^{k/2} over the sweep");
    b.check("tk_before_quarter", "t_k < T_k / 4", quarter_ok, nullptr, nullptr);
    b.check("period_envelope", "T_k <= C_1 sqrt(k) e^{-(k/2)(1 + 1/k)^2}", period_ok, worst_Tk, 30.0,
            "max T_k e^{(k/2)(1+1/k)^2} / sqrt(k)");
    b.check("tk_envelope", "t_k <= e^{8 pi} (e^{-k/2} / sqrt(k)) k(k+1) / (k^2 + (2 - 4 pi) k + 1)", env_ok,
            worst_env, 1.0, "max ratio for k >= 100");
    b.check("gap_band", "|d/dt (phi_k - psi_k)(t_k)|^2 >= C e^k", gaps_pos && spread(gaps) <= 2.0,
            spread(gaps), 2.0, "max/min of gap_sq / e^k");
    b.check("cone_l2_lower", "liminf ||d/dt (v_k - w_k)(t_k)||^2_{L^2} >= (pi/4) C eta^2",
            cones_pos && spread(cones) <= 2.0, spread(cones), 2.0, "max/min of the cone lower bound");
    b.check("velocity_sum", "|phi_k'(t_k) + psi_k'(t_k)| <= C e^{k/2}", vel_ok, worst_vel, vel_limit,
            "max |phi' + psi'| / e^{k/2}");
    b.constants["gap_over_ek_min"] = *std::min_element(gaps.begin(), gaps.end());
    b.constants["gap_over_ek_max"] = *std::max_element(gaps.begin(), gaps.end());
    b.constants["cone_l2_lower_min"] = *std::min_element(cones.begin(), cones.end());
  }
  return b;
}

ReportBundle cmd_pde(const ExperimentConfig& cfg) {
  ReportBundle b;
  b.experiment = "pde";
  const int n = cfg.get_int("n");
  const Grid2D grid(n);
  const double T = cfg.get("T");
  const double amp = cfg.get("amplitude");
  const double exponent = cfg.get("exponent");
  const int every = cfg.get_int("snapshot_every");

  Table& drift = b.table("drift", {"n", "dt", "T", "steps", "exponent", "max_drift", "final_energy",
                                   "over_budget", "truncated"});
  Table& series = b.table("energy_series", {"dt", "t", "kinetic", "dirichlet", "potential", "total",
                                            "rel_drift"});
  Figure fig{"energy_drift", "Relative energy drift, single mode", "t", "|E(t) - E(0)| / E(0)", false, true, {}};
  std::vector<double> drifts;
  const auto dts = cfg.list("dt");
  for (std::size_t idx = 0; idx < dts.size(); ++idx) {
    const double dt = dts[idx];
    guarded(b, "drift dt=" + fmt("%g", dt), [&] {
      SolverConfig sc;
      sc.dt = dt;
      sc.T = T;
      sc.exponent = exponent;
      sc.snapshot_every = every;
      sc.energy_budget = 1e-3;
      const WaveState s0 = single_mode_state(grid, 1, 1, amp);
      double e0 = 0.0, last = 0.0;
      Series s{"dt = " + fmt("%g", dt), {}, {}};
      const std::string frames = cfg.out_dir + "/pde/frames_u_dt" + fmt("%g", dt) + ".bin";
      if (cfg.snapshots && idx == 0) std::filesystem::remove(frames);
      const RunResult r = run_streaming(s0, sc, [&](const WaveState& w, const EnergyBreakdown& e) {
        if (e0 == 0.0) e0 = e.total;
        const double rel = std::abs(e.total - e0) / e0;
        series.add({dt, w.t, e.kinetic, e.dirichlet, e.potential, e.total, rel});
        s.x.push_back(w.t);
        s.y.push_back(std::max(rel, 1e-18));
        last = e.total;
        if (cfg.snapshots && idx == 0) append_frame(frames, w.u.data());
      });
      if (cfg.snapshots && idx == 0) {
        json side = {{"file", std::filesystem::path(frames).filename().string()},
                     {"n", n},
                     {"dt", dt},
                     {"cadence", every},
                     {"exponent", exponent},
                     {"bc", "dirichlet"},
                     {"dtype", "float64-le"},
                     {"layout", "row-major, rows along y"}};
        write_atomic(frames + ".json", dump_json(side));
      }
      drifts.push_back(r.max_drift);
      drift.add({n, dt, T, r.steps, exponent, r.max_drift, last, r.over_budget, r.truncated});
      fig.series.push_back(std::move(s));
    });
  }
  b.figures.push_back(std::move(fig));
  if (!drifts.empty()) {
    b.check("energy_conservation", "E(u,t) = E(u,0)", drifts.front() <= 1e-3, drifts.front(), 1e-3,
            "max relative drift at the first dt");
    double worst_ratio = INFINITY;
    for (std::size_t i = 1; i < drifts.size(); ++i) worst_ratio = std::min(worst_ratio, drifts[i - 1] / drifts[i]);
    if (drifts.size() >= 2) {
      b.check("splitting_order", "drift(dt) / drift(dt/2) >= 3.5", worst_ratio >= 3.5, worst_ratio, 3.5,
              "smallest drift ratio across consecutive dt");
      b.constants["drift_order"] = std::log2(worst_ratio);
    }
  }

  guarded(b, "linear run", [&] {
    SolverConfig sc;
    sc.dt = dts.front();
    sc.T = T;
    sc.exponent = 0.0;
    sc.snapshot_every = every;
    const RunResult r = run_streaming(single_mode_state(grid, 1, 1, amp), sc,
                                      [](const WaveState&, const EnergyBreakdown&) {});
    b.check("linear_conservation", "E(u,t) = E(u,0), zero nonlinearity", r.max_drift <= 1e-12, r.max_drift,
            1e-12, "max relative drift");
  });

  Table& conc = b.table("concentrator_run", {"k", "eta", "n", "T", "dt", "steps", "max_drift", "truncated",
                                             "diagnostic"});
  guarded(b, "concentrator run", [&] {
    ConcentratorSpec spec;
    spec.k = cfg.get_int("conc_k");
    spec.eta = cfg.get("conc_eta");
    const Grid2D cg(cfg.get_int("conc_n"));
    std::vector<std::string> warnings;
    const WaveState s0{build_fk(spec, cg, &warnings), GridField(cg), 0.0};
    for (const auto& w : warnings) b.warnings.push_back(w);
    SolverConfig sc;
    sc.dt = default_dt(cg);
    sc.T = cfg.get("conc_T");
    sc.exponent = exponent;
    sc.snapshot_every = 10;
    const RunResult r = run_streaming(s0, sc, [](const WaveState&, const EnergyBreakdown&) {});
    conc.add({spec.k, spec.eta, cg.n(), sc.T, sc.dt, r.steps, r.max_drift, r.truncated, r.diagnostic});
    b.check("concentrator_energy", "E(u,t) = E(u,0), concentrated data", !r.truncated && r.max_drift <= 1e-2,
            r.max_drift, 1e-2, "max relative drift");
  });
  return b;
}

ReportBundle cmd_cone(const ExperimentConfig& cfg) {
  ReportBundle b;
  b.experiment = "cone";
  const ConeSpec cone{Point{}, cfg.get("apex_time")};
  const double S = cfg.get("S"), T = cfg.get("T");
  const int m = cfg.get_int("mode_m"), mk = cfg.get_int("mode_k");

  Table& it = b.table("identities", {"n", "flux_residual", "multiplier_residual", "monotonicity_violation",
                                     "flux_lhs", "flux_rhs", "warnings"});
  std::vector<double> ns, flux, mult;
  double worst_mono = 0.0;
  for (int n : cfg.ints("n"))
    guarded(b, "identities n=" + std::to_string(n), [&] {
      const ConeStudy s = cone_identity_study(n, cone, S, T, m, mk);
      ns.push_back(n);
      flux.push_back(s.flux_residual);
      mult.push_back(s.multiplier_residual);
      worst_mono = std::max(worst_mono, s.monotonicity_violation);
      it.add({n, s.flux_residual, s.multiplier_residual, s.monotonicity_violation, s.flux_lhs, s.flux_rhs,
              join_notes(s.warnings)});
    });
  if (!flux.empty()) {
    b.check("flux_identity",
            "int_{D(S)} e(u(S)) - int_{D(T)} e(u(T)) = int_{M_S^T} (e - 2 u_t u_r) (coarea form)",
            flux.back() <= 0.05, flux.back(), 0.05, "relative residual at the finest grid");
    b.check("flux_refinement", "flux residual decreases under refinement", strictly_decreasing(flux), flux,
            nullptr);
    b.check("cone_energy_monotone", "int_{D(t)} e(u(t)) non-increasing toward the apex", worst_mono <= 0.05,
            worst_mono, 0.05, "largest relative increase between snapshots");
    double order = INFINITY;
    for (std::size_t i = 1; i < mult.size(); ++i)
      order = std::min(order, std::log(mult[i - 1] / mult[i]) / std::log(ns[i] / ns[i - 1]));
    if (mult.size() >= 2) {
      b.check("multiplier_refinement",
              "int_{D(T)} u_t u - int_{D(S)} u_t u + mantle + int_K (|grad u|^2 - u_t^2 + u f(u)) = 0",
              order >= 1.0, order, 1.0, "smallest observed order across refinements");
      b.constants["multiplier_order"] = order;
    }
    if (flux.size() >= 2)
      b.constants["flux_order"] = std::log(flux[flux.size() - 2] / flux.back()) /
                                  std::log(ns.back() / ns[ns.size() - 2]);
  }

  Table& at = b.table("mask_area", {"n", "radius", "area", "exact", "rel_err"});
  const int nfine = cfg.ints("n").back();
  guarded(b, "mask area", [&] {
    const Grid2D g(nfine);
    const double r = 0.2;
    const Mask mask = cone_mask(Point{}, r, g);
    const double exact = kPi * r * r;
    const double err = std::abs(mask.area() - exact) / exact;
    at.add({nfine, r, mask.area(), exact, err});
    b.check("mask_area", "|D_t| = pi t^2", err <= 0.03, err, 0.03, "relative area error");
  });

  Table& ct = b.table("energy_capture", {"k", "eta", "n", "captured_fraction"});
  guarded(b, "energy capture", [&] {
    ConcentratorSpec spec;
    spec.k = cfg.get_int("k");
    spec.eta = cfg.get("eta");
    const Grid2D g(cfg.get_int("capture_n"));
    const WaveState w{build_fk(spec, g), GridField(g), 0.0};
    const double frac = restricted_energy(w, cone_mask(spec.center, spec.eta, g)) / energy(w).total;
    ct.add({spec.k, spec.eta, g.n(), frac});
    b.check("energy_capture", "supp f_k(./eta) = B(center, eta)", frac >= 0.999, frac, 0.999,
            "fraction of energy inside the support disk");
  });

  Table& ag = b.table("agreement", {"n", "k", "eta", "window", "max_deviation", "valid", "notes"});
  Table& as = b.table("agreement_series", {"n", "t", "pde_center", "ode_center"});
  std::vector<double> devs;
  Figure fig{"agreement", "Centre value inside the cone", "t", "u(t, centre)", false, false, {}};
  const int k = cfg.get_int("k");
  const double eta = cfg.get("eta");
  for (int n : cfg.ints("agree_n"))
    guarded(b, "agreement n=" + std::to_string(n), [&] {
      const Grid2D g(n);
      SolverConfig sc;
      sc.dt = default_dt(g);
      const AgreementReport r = pde_ode_agreement(k, eta, g, sc);
      devs.push_back(r.max_deviation);
      ag.add({n, k, eta, r.window, r.max_deviation, r.valid, join_notes(r.notes)});
      Series s{"PDE n = " + std::to_string(n), r.times, r.pde_center};
      for (std::size_t i = 0; i < r.times.size(); ++i) as.add({n, r.times[i], r.pde_center[i], r.ode_center[i]});
      if (fig.series.empty()) fig.series.push_back(Series{"ODE", r.times, r.ode_center});
      fig.series.push_back(std::move(s));
    });
  b.figures.push_back(std::move(fig));
  if (!devs.empty()) {
    b.check("finite_speed", "v_k = phi_k, w_k = psi_k inside the backward cone over the plateau",
            devs.back() <= 1e-2, devs.back(), 1e-2, "max centre deviation at the finest grid");
    if (devs.size() >= 2)
      b.check("finite_speed_refinement", "centre deviation decreases with n", strictly_decreasing(devs), devs,
              nullptr);
  }
  guarded(b, "negative control", [&] {
    const Grid2D g(cfg.ints("agree_n").front());
    SolverConfig sc;
    sc.dt = default_dt(g);
    sc.exponent = 0.0;
    const AgreementReport r = pde_ode_agreement(k, eta, g, sc);
    b.check("negative_control", "zero exponent: PDE and ODE regimes flagged as different", r.regimes_differ,
            r.max_deviation, nullptr, "deviation recorded for reference");
  });
  return b;
}

ReportBundle cmd_projector(const ExperimentConfig& cfg) {
  ReportBundle b;
  b.experiment = "projector";
  Table& t = b.table("ratios", {"q", "lambda", "band_modes", "ratio_single", "ratio_random", "ratio_point",
                                "max_ratio"});
  Figure fig{"projector", "||chi_lambda u||_q / ||u||_2", "lambda", "max ratio", true, true, {}};
  for (double q : cfg.list("q"))
    guarded(b, "projector q=" + fmt("%g", q), [&] {
      const ProjectorStudy s =
          projector_study(cfg.get_int("n"), q, cfg.get("lambda_min"), cfg.get("lambda_max"),
                          cfg.get_int("lambda_count"), cfg.get_int("members"), cfg.seed);
      Series ser{"q = " + fmt("%g", q), {}, {}};
      for (const auto& r : s.rows) {
        t.add({q, r.lambda, r.band_modes, r.ratio_single, r.ratio_random, r.ratio_point, r.max_ratio});
        if (r.band_modes > 0) ser.x.push_back(r.lambda), ser.y.push_back(r.max_ratio);
      }
      fig.series.push_back(std::move(ser));
      const std::string key = "q=" + fmt("%g", q);
      b.constants["slope_" + key] = s.slope;
      b.check("projector_exponent_" + key, "||chi_lambda u||_{L^q} <= C lambda^{2/3 (1/2 - 1/q)} ||u||_{L^2}",
              s.slope <= s.predicted + 0.05, s.slope, s.predicted + 0.05, "fitted log-log slope of the max ratio");
    });
  b.figures.push_back(std::move(fig));
  return b;
}

ReportBundle cmd_strichartz(const ExperimentConfig& cfg) {
  ReportBundle b;
  b.experiment = "strichartz";
  const Grid2D grid(cfg.get_int("n"));
  const double T = cfg.get("T");
  const int snaps = cfg.get_int("snapshots");
  Table& fw = b.table("free_wave", {"member", "data_norm", "strichartz", "ratio"});
  std::vector<double> ratios;
  for (int mbr = 0; mbr < cfg.get_int("members"); ++mbr)
    guarded(b, "free wave member " + std::to_string(mbr), [&] {
      const WaveState w0 = random_smooth_state(grid, cfg.seed + std::uint64_t(mbr));
      const SpectralWaveState s0 = to_spectral(w0);
      std::vector<WaveState> traj;
      for (int i = 0; i < snaps; ++i) {
        const double t = T * double(i) / double(snaps - 1);
        WaveState w = to_grid(free_propagate(s0, t));
        w.t = t;
        traj.push_back(std::move(w));
      }
      const double data = std::sqrt(dirichlet_norm_sq(s0.u)) + std::sqrt(coefficient_norm_sq(s0.v));
      const double st = strichartz_functional(traj, T);
      ratios.push_back(st / data);
      fw.add({mbr, data, st, st / data});
    });
  if (!ratios.empty()) {
    const double worst = *std::max_element(ratios.begin(), ratios.end());
    bool finite = true;
    for (double r : ratios) finite &= std::isfinite(r) && r > 0.0;
    b.check("strichartz_ratio", "||u||_{L^8((0,T), C^{1/8})} <= C_T (||u_0||_{H^1} + ||u_1||_{L^2})", finite,
            worst, nullptr, "largest measured ratio (empirical C_T)");
    b.constants["strichartz_ratio_max"] = worst;
  }

  const double a = cfg.get("a"), p = cfg.get("p"), q = cfg.get("q");
  Table& cf = b.table("dual_closed_form", {"k", "a", "p", "q", "ln_bound", "bound_over_sqrt_k",
                                           "ln_plateau_norm"});
  std::vector<std::pair<int, double>> growth;  // (k, ln bound), k >= 16
  for (int k : cfg.ints("k_closed"))
    guarded(b, "dual closed form k=" + std::to_string(k), [&] {
      const LogScalar bound = dual_strichartz_lower_bound(k, a, p, q);
      const LogScalar plateau = plateau_cone_norm(k, a, p, q);
      cf.add({k, a, p, q, bound.lnmag(), std::exp(bound.lnmag() - 0.5 * std::log(double(k))), plateau.lnmag()});
      if (k >= 16) growth.emplace_back(k, bound.lnmag());
    });
  if (growth.size() >= 2) {
    std::sort(growth.begin(), growth.end());
    bool increasing = true;
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < growth.size(); ++i) {
      if (i && !(growth[i].second > growth[i - 1].second)) increasing = false;
      const double c = growth[i].second - 0.5 * std::log(double(growth[i].first));
      lo = std::min(lo, c), hi = std::max(hi, c);
    }
    const double sqrt_spread = std::exp(hi - lo);
    b.check("dual_growth", "||f(v_k)||_{L^p L^q(cone)} >= C sqrt(k) e^k (e^{-k/2}/a)^{2/q + 1/p} >= C sqrt(k) / a^2",
            increasing && sqrt_spread <= 1.0 + 1e-9, sqrt_spread, 1.0 + 1e-9,
            "max/min of bound / sqrt(k) over k >= 16");
  }

  Table& gt = b.table("dual_grid", {"k", "n", "measured", "lower_bound", "plateau_norm", "exceeds", "warnings"});
  bool exceeds = true;
  double worst = INFINITY;
  const Grid2D dg(cfg.get_int("grid_n"));
  for (int k : cfg.ints("k"))
    guarded(b, "dual grid k=" + std::to_string(k), [&] {
      const ConeNormMeasurement m = cone_dual_norm(k, a, p, q, dg);
      const bool ok = m.measured > m.lower_bound;
      exceeds &= ok;
      worst = std::min(worst, m.measured / m.lower_bound);
      gt.add({k, dg.n(), m.measured, m.lower_bound, m.plateau, ok, join_notes(m.warnings)});
    });
  b.check("dual_grid_exceeds_bound", "measured ||f(v_k)|| on the cone > closed-form lower bound", exceeds,
          finite_or_null(worst), 1.0, "min measured / bound");
  return b;
}

ReportBundle run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ReportBundle b;
  try {
    validate(cfg);
    if (cfg.experiment == "moser") b = cmd_moser(cfg);
    else if (cfg.experiment == "ode") b = cmd_ode(cfg);
    else if (cfg.experiment == "pde") b = cmd_pde(cfg);
    else if (cfg.experiment == "cone") b = cmd_cone(cfg);
    else if (cfg.experiment == "projector") b = cmd_projector(cfg);
    else if (cfg.experiment == "strichartz") b = cmd_strichartz(cfg);
  } catch (const std::exception& e) {
    b = ReportBundle{};
    b.errors.push_back({cfg.experiment, error_kind(e), e.what()});
  }
  b.experiment = cfg.experiment;
  b.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return b;
}

BatchResult dispatch(const std::vector<ExperimentConfig>& configs, bool write) {
  BatchResult out;
  bool item_failed = false, check_failed = false, strict = false;
  for (const auto& cfg : configs) {
    ReportBundle b = run_experiment(cfg);
    if (write) write_bundle(b, cfg);
    item_failed |= !b.errors.empty();
    check_failed |= !b.all_checks_pass();
    strict |= cfg.strict;
    out.bundles.push_back(std::move(b));
  }
  if (item_failed) out.exit_code = 3;
  else if (strict && check_failed) out.exit_code = 2;
  return out;
}

}  // namespace critwave::exp
