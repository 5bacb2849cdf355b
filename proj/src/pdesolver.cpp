#include "critwave/pdesolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "critwave/spectral.hpp"

namespace critwave {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver: dt must be > 0");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("solver: T must be >= 0");
  if (snapshot_every < 1) throw ConfigError("solver: snapshot_every must be >= 1");
  if (!(exponent >= 0.0)) throw ConfigError("solver: exponent must be >= 0");
  if (!(overflow_guard > 0.0)) throw ConfigError("solver: overflow_guard must be > 0");
}

double default_dt(const Grid2D& grid) { return std::min(1e-3, 0.25 * grid.h()); }

GridField nonlinearity(const GridField& u, double exponent, double guard) {
  GridField out(u.grid());
  auto o = out.values();
  auto x = u.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double arg = exponent * x[i] * x[i];
    if (!(arg <= guard)) {
      const int n = u.n();
      char msg[200];
      std::snprintf(msg, sizeof msg,
                    "nonlinearity: exponent * u^2 = %.6g exceeds guard %.6g at node (%d, %d), u = %.6g",
                    arg, guard, int(i % n), int(i / n), x[i]);
      throw OverflowError(msg, x[i]);
    }
    o[i] = x[i] * std::expm1(arg);
  }
  return out;
}

namespace {

void truncate_two_thirds(SpectralField& c) {
  const int n = c.n();
  const int cut = (2 * n) / 3;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i >= cut || j >= cut) c(i, j) = 0.0;
}

// v <- v - tau f(u), in coefficient space.
void kick(SpectralWaveState& s, double tau, const SolverConfig& cfg) {
  if (cfg.exponent == 0.0 || tau == 0.0) return;
  SpectralField f = forward_transform(nonlinearity(inverse_transform(s.u), cfg.exponent,
                                                   cfg.overflow_guard));
  if (cfg.dealias) truncate_two_thirds(f);
  auto d = s.v.values();
  auto fv = f.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= tau * fv[i];
}

}  // namespace

SpectralWaveState step(const SpectralWaveState& s, const SolverConfig& cfg) {
  SpectralWaveState out = s;
  kick(out, 0.5 * cfg.dt, cfg);
  out = free_propagate(out, cfg.dt);
  kick(out, 0.5 * cfg.dt, cfg);
  return out;
}

WaveState step(const WaveState& s, const SolverConfig& cfg) {
  return to_grid(step(to_spectral(s), cfg));
}

RunResult run_streaming(const WaveState& s0, const SolverConfig& cfg, const SnapshotSink& sink) {
  cfg.validate();
  require_same_grid(s0.u.grid(), s0.v.grid(), "run");
  if (!s0.u.all_finite() || !s0.v.all_finite()) throw PreconditionError("run: initial data not finite");

  RunResult res;
  const long steps = cfg.T == 0.0 ? 0 : std::max(1L, long(std::ceil(cfg.T / cfg.dt - 1e-9)));
  SolverConfig local = cfg;
  local.dt = steps == 0 ? cfg.dt : cfg.T / double(steps);

  const EnergyBreakdown e0 = energy(s0, cfg.exponent);
  if (!std::isfinite(e0.total)) throw PreconditionError("run: initial energy not finite");
  auto emit = [&](const WaveState& w, const EnergyBreakdown& e) {
    const double drift = e0.total > 0.0 ? std::abs(e.total - e0.total) / e0.total
                                        : std::abs(e.total - e0.total);
    res.max_drift = std::max(res.max_drift, drift);
    sink(w, e);
  };
  emit(s0, e0);

  SpectralWaveState s = to_spectral(s0);
  const double t0 = s0.t;
  try {
    // Adjacent half kicks merge into one full kick between snapshots.
    kick(s, 0.5 * local.dt, local);
    for (long i = 1; i <= steps; ++i) {
      s = free_propagate(s, local.dt);
      s.t = t0 + local.dt * double(i);
      const bool record = i % cfg.snapshot_every == 0 || i == steps;
      if (record) {
        kick(s, 0.5 * local.dt, local);
        WaveState w = to_grid(s);
        emit(w, energy(w, cfg.exponent));
        if (i < steps) kick(s, 0.5 * local.dt, local);
      } else {
        kick(s, local.dt, local);
      }
      res.steps = int(i);
    }
  } catch (const OverflowError& e) {
    res.truncated = true;
    char msg[64];
    std::snprintf(msg, sizeof msg, " (stopped at t = %.6g)", s.t);
    res.diagnostic = std::string(e.what()) + msg;
  }
  res.over_budget = res.max_drift > cfg.energy_budget;
  if (res.over_budget && res.diagnostic.empty()) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "energy drift %.3g exceeds budget %.3g", res.max_drift,
                  cfg.energy_budget);
    res.diagnostic = msg;
  }
  return res;
}

RunResult run(const WaveState& s0, const SolverConfig& cfg) {
  std::vector<WaveState> snaps;
  std::vector<EnergyBreakdown> energies;
  RunResult res = run_streaming(s0, cfg, [&](const WaveState& w, const EnergyBreakdown& e) {
    snaps.push_back(w);
    energies.push_back(e);
  });
  res.snapshots = std::move(snaps);
  res.energies = std::move(energies);
  return res;
}

}  // namespace critwave
