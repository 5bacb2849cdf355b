#include "critwave/lightcone.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "critwave/concentrators.hpp"
#include "critwave/spectral.hpp"
#include "critwave/summation.hpp"

namespace critwave {

std::size_t Mask::count() const {
  return std::size_t(std::count(inside.begin(), inside.end(), 1));
}

Mask cone_mask(Point apex, double radius, const Grid2D& grid) {
  Mask m(grid);
  const int n = grid.n();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double r = std::hypot(grid.node(ix) - apex.x, grid.node(iy) - apex.y);
      m.inside[grid.index(ix, iy)] = r < radius ? 1 : 0;
    }
  return m;
}

Mask cone_mask(const ConeSpec& spec, double t, const Grid2D& grid) {
  return cone_mask(spec.apex, spec.section_radius(t), grid);
}

namespace {

double masked_sum(const GridField& f, const Mask& m) {
  require_same_grid(f.grid(), m.grid, "masked sum");
  CompensatedSum acc;
  auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (m.inside[i]) acc += v[i];
  const double h = f.grid().h();
  return h * h * acc.value();
}

std::size_t find_snapshot(std::span<const WaveState> traj, double t, double tol, const char* what) {
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (std::abs(traj[i].t - t) <= tol) return i;
  char msg[120];
  std::snprintf(msg, sizeof msg, "cone identity: no snapshot at %s = %.9g", what, t);
  throw PreconditionError(msg);
}

struct Window {
  std::size_t first = 0;
  std::size_t last = 0;
};

Window locate_window(std::span<const WaveState> traj, const ConeSpec& spec, double S, double T,
                     std::vector<std::string>& warnings) {
  if (!(S < T)) throw PreconditionError("cone identity: need S < T");
  if (spec.section_radius(T) < 0.0) throw PreconditionError("cone identity: T lies past the apex");
  if (traj.empty()) throw PreconditionError("cone identity: empty trajectory");
  const double tol = 1e-9 + 1e-6 * (T - S);
  Window w{find_snapshot(traj, S, tol, "S"), find_snapshot(traj, T, tol, "T")};
  if (w.last <= w.first) throw PreconditionError("cone identity: snapshots must be time-ordered");
  const double h = traj[0].u.grid().h();
  double widest = 0.0;
  for (std::size_t i = w.first; i < w.last; ++i) widest = std::max(widest, traj[i + 1].t - traj[i].t);
  if (widest > h * (1.0 + 1e-9)) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "snapshot spacing %.3g exceeds grid spacing %.3g; mantle sampling is coarse", widest, h);
    warnings.emplace_back(msg);
  }
  return w;
}

// Per-node radial unit vector component of grad u: u_r = grad u . (x - x0)/|x - x0|.
GridField radial_derivative(const WaveState& s, Point apex) {
  const Gradient g = gradient_at_nodes(forward_transform(s.u));
  const Grid2D& grid = s.u.grid();
  GridField out(grid);
  for (int iy = 0; iy < grid.n(); ++iy)
    for (int ix = 0; ix < grid.n(); ++ix) {
      const double dx = grid.node(ix) - apex.x;
      const double dy = grid.node(iy) - apex.y;
      const double r = std::hypot(dx, dy);
      out(ix, iy) = r > 0.0 ? (g.dx(ix, iy) * dx + g.dy(ix, iy) * dy) / r : 0.0;
    }
  return out;
}

// Mantle passage time of every node, apex_time - |x - x0|.
std::vector<double> passage_times(const Grid2D& grid, const ConeSpec& spec) {
  std::vector<double> tp(grid.size());
  for (int iy = 0; iy < grid.n(); ++iy)
    for (int ix = 0; ix < grid.n(); ++ix)
      tp[grid.index(ix, iy)] =
          spec.apex_time - std::hypot(grid.node(ix) - spec.apex.x, grid.node(iy) - spec.apex.y);
  return tp;
}

// Section weight of a node at time t: a linear ramp of width h across the
// mantle, w = clamp((tp - t)/h + 1/2, 0, 1). Replaces the sharp disk indicator
// so that lattice effects at the rim do not dominate the residuals.
double ramp(double tp, double t, double h) { return std::clamp((tp - t) / h + 0.5, 0.0, 1.0); }

double weighted_section(const GridField& f, const std::vector<double>& tp, double t) {
  const double h = f.grid().h();
  CompensatedSum acc;
  auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = ramp(tp[i], t, h);
    if (w > 0.0) acc += w * v[i];
  }
  return h * h * acc.value();
}

// h^2 sum over nodes of int_{ta}^{tb} (-dw/dt) g dt, g linear in time between
// the two snapshots: the shell of width h swept by the mantle.
double shell_contribution(const std::vector<double>& tp, double ta, double tb, const GridField& fa,
                          const GridField& fb) {
  const double h = fa.grid().h();
  const double span = tb - ta;
  CompensatedSum acc;
  auto a = fa.values();
  auto b = fb.values();
  for (std::size_t i = 0; i < tp.size(); ++i) {
    const double lo = std::max(ta, tp[i] - 0.5 * h);
    const double hi = std::min(tb, tp[i] + 0.5 * h);
    if (!(hi > lo)) continue;
    const double w = (0.5 * (lo + hi) - ta) / span;
    acc += (hi - lo) / h * ((1.0 - w) * a[i] + w * b[i]);
  }
  return h * h * acc.value();
}

// int_{ta}^{tb} w(t) q(t) dt for one node, q linear between qa and qb. The
// ramp has kinks at tp -/+ h/2, so the interval is split there and Simpson's
// rule is exact on each piece.
double weighted_time_integral(double tp, double h, double ta, double tb, double qa, double qb) {
  double cuts[4] = {ta, std::clamp(tp - 0.5 * h, ta, tb), std::clamp(tp + 0.5 * h, ta, tb), tb};
  const double span = tb - ta;
  auto q = [&](double t) { return qa + (qb - qa) * (t - ta) / span; };
  double acc = 0.0;
  for (int p = 0; p < 3; ++p) {
    const double t0 = cuts[p], t1 = cuts[p + 1];
    if (!(t1 > t0)) continue;
    const double tm = 0.5 * (t0 + t1);
    acc += (t1 - t0) / 6.0 *
           (ramp(tp, t0, h) * q(t0) + 4.0 * ramp(tp, tm, h) * q(tm) + ramp(tp, t1, h) * q(t1));
  }
  return acc;
}

double largest_abs(std::initializer_list<double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double restricted_energy(const WaveState& s, const Mask& mask, double exponent) {
  return masked_sum(energy_density(s, exponent), mask);
}

IdentityResidual flux_identity_residual(std::span<const WaveState> traj, const ConeSpec& spec,
                                        double S, double T, double exponent) {
  IdentityResidual res;
  const Window win = locate_window(traj, spec, S, T, res.warnings);
  const Grid2D& grid = traj[win.first].u.grid();
  const std::vector<double> tp = passage_times(grid, spec);

  // g = e - 2 u_t u_r on every snapshot of the window
  auto mantle_density = [&](const WaveState& s, const GridField& e) {
    GridField g = e;
    const GridField ur = radial_derivative(s, spec.apex);
    auto gv = g.values();
    auto v = s.v.values();
    auto r = ur.values();
    for (std::size_t i = 0; i < gv.size(); ++i) gv[i] -= 2.0 * v[i] * r[i];
    return g;
  };

  GridField e_prev = energy_density(traj[win.first], exponent);
  GridField g_prev = mantle_density(traj[win.first], e_prev);
  const double e_start = weighted_section(e_prev, tp, traj[win.first].t);
  double section_prev = e_start;
  double flux = 0.0;
  double worst_rise = 0.0;
  for (std::size_t i = win.first; i < win.last; ++i) {
    const WaveState& next = traj[i + 1];
    GridField e_next = energy_density(next, exponent);
    GridField g_next = mantle_density(next, e_next);
    flux += shell_contribution(tp, traj[i].t, next.t, g_prev, g_next);
    const double section = weighted_section(e_next, tp, next.t);
    worst_rise = std::max(worst_rise, section - section_prev);
    section_prev = section;
    e_prev = std::move(e_next);
    g_prev = std::move(g_next);
  }
  const double e_end = section_prev;
  res.lhs = e_start - e_end;
  res.rhs = flux;
  res.scale = largest_abs({e_start, e_end, flux});
  res.residual = res.scale > 0.0 ? std::abs(res.lhs - res.rhs) / res.scale : 0.0;
  res.monotonicity_violation = e_start > 0.0 ? worst_rise / e_start : worst_rise;
  return res;
}

IdentityResidual multiplier_identity_residual(std::span<const WaveState> traj, const ConeSpec& spec,
                                              double S, double T, double exponent) {
  IdentityResidual res;
  const Window win = locate_window(traj, spec, S, T, res.warnings);
  const Grid2D& grid = traj[win.first].u.grid();
  const std::vector<double> tp = passage_times(grid, spec);
  const std::size_t nodes = grid.size();
  const double h = grid.h();

  auto product = [](const GridField& a, const GridField& b) {
    GridField out(a.grid());
    auto o = out.values();
    auto x = a.values();
    auto y = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
    return out;
  };
  // mantle density u u_t - u u_r
  auto mantle_density = [&](const WaveState& s) {
    GridField m = product(s.u, s.v);
    const GridField ur = radial_derivative(s, spec.apex);
    auto mv = m.values();
    auto u = s.u.values();
    auto r = ur.values();
    for (std::size_t i = 0; i < mv.size(); ++i) mv[i] -= u[i] * r[i];
    return m;
  };
  // bulk density |grad u|^2 - u_t^2 + u f(u)
  auto bulk_density = [&](const WaveState& s) {
    GridField q = gradient_energy_density(forward_transform(s.u));
    auto qv = q.values();
    auto u = s.u.values();
    auto v = s.v.values();
    for (std::size_t i = 0; i < qv.size(); ++i)
      qv[i] += -v[i] * v[i] + (exponent == 0.0 ? 0.0 : u[i] * u[i] * std::expm1(exponent * u[i] * u[i]));
    return q;
  };

  const WaveState& s0 = traj[win.first];
  const WaveState& s1 = traj[win.last];
  const double start = weighted_section(product(s0.u, s0.v), tp, s0.t);
  const double end = weighted_section(product(s1.u, s1.v), tp, s1.t);

  std::vector<CompensatedSum> bulk(nodes);
  GridField m_prev = mantle_density(s0);
  GridField q_prev = bulk_density(s0);
  double mantle = 0.0;
  for (std::size_t i = win.first; i < win.last; ++i) {
    const WaveState& next = traj[i + 1];
    const double ta = traj[i].t, tb = next.t;
    GridField m_next = mantle_density(next);
    GridField q_next = bulk_density(next);
    mantle += shell_contribution(tp, ta, tb, m_prev, m_next);
    auto qa = q_prev.values();
    auto qb = q_next.values();
    for (std::size_t j = 0; j < nodes; ++j) {
      if (tp[j] + 0.5 * h <= ta) continue;  // node already outside the cone
      bulk[j] += weighted_time_integral(tp[j], h, ta, tb, qa[j], qb[j]);
    }
    m_prev = std::move(m_next);
    q_prev = std::move(q_next);
  }
  CompensatedSum bulk_total;
  for (const auto& b : bulk) bulk_total += b.value();
  const double volume = h * h * bulk_total.value();

  res.lhs = end - start + mantle;
  res.rhs = -volume;
  res.scale = largest_abs({start, end, mantle, volume});
  res.residual = res.scale > 0.0 ? std::abs(res.lhs - res.rhs) / res.scale : 0.0;
  return res;
}

double sample_bilinear(const GridField& f, Point p) {
  const Grid2D& grid = f.grid();
  const int n = grid.n();
  const double offset = grid.bc() == Boundary::Dirichlet ? 1.0 : 0.5;
  auto locate = [&](double x, int& i0, double& w) {
    double fi = std::clamp(x / grid.h() - offset, 0.0, double(n - 1));
    i0 = std::min(int(std::floor(fi)), n - 2);
    w = fi - i0;
  };
  int ix, iy;
  double wx, wy;
  locate(p.x, ix, wx);
  locate(p.y, iy, wy);
  return (1 - wx) * (1 - wy) * f(ix, iy) + wx * (1 - wy) * f(ix + 1, iy) +
         (1 - wx) * wy * f(ix, iy + 1) + wx * wy * f(ix + 1, iy + 1);
}

AgreementReport pde_ode_agreement(int k, double eta, const Grid2D& grid, const SolverConfig& cfg) {
  if (k > 8) throw PreconditionError("pde_ode_agreement: k must be <= 8 for a grid-resolved plateau");
  ConcentratorSpec spec;
  spec.k = k;
  spec.eta = eta;
  AgreementReport rep;
  rep.k = k;
  rep.eta = eta;
  rep.n = grid.n();
  rep.exponent = cfg.exponent;
  rep.regimes_differ = cfg.exponent != kCriticalExponent;
  rep.window = 0.8 * spec.plateau_radius();
  if (rep.regimes_differ)
    rep.notes.emplace_back("exponent differs from 4 pi; PDE and ODE describe different equations");

  std::vector<std::string> warnings;
  WaveState s0{build_fk(spec, grid, &warnings), GridField(grid), 0.0};
  if (grid.h() > 0.5 * spec.plateau_radius()) {
    rep.valid = false;
    for (auto& w : warnings) rep.notes.push_back(std::move(w));
  }

  SolverConfig local = cfg;
  local.T = rep.window;
  const double alpha = cfg.exponent;
  const double y0 = std::sqrt(double(k) / kCriticalExponent);
  // Reference orbit: Verlet with steps far below the PDE step.
  const double fine = std::min(cfg.dt, rep.window) / 256.0;
  auto accel = [alpha](double y) { return -y * std::expm1(alpha * y * y); };
  double y = y0, v = 0.0, t = 0.0;
  const Point centre = spec.center;

  RunResult run = run_streaming(s0, local, [&](const WaveState& w, const EnergyBreakdown&) {
    const long m = long(std::ceil((w.t - t) / fine - 1e-9));
    if (m > 0) {
      const double hstep = (w.t - t) / double(m);
      for (long i = 0; i < m; ++i) {
        v += 0.5 * hstep * accel(y);
        y += hstep * v;
        v += 0.5 * hstep * accel(y);
      }
    }
    t = w.t;
    const double pde = sample_bilinear(w.u, centre);
    rep.times.push_back(w.t);
    rep.pde_center.push_back(pde);
    rep.ode_center.push_back(y);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(pde - y));
  });
  if (run.truncated) {
    rep.valid = false;
    rep.notes.push_back(run.diagnostic);
  }
  return rep;
}

}  // namespace critwave
