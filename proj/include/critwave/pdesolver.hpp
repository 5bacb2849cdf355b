#pragma once

#include <functional>
#include <string>
#include <vector>

#include "critwave/functionals.hpp"
#include "critwave/grid.hpp"

namespace critwave {

struct SolverConfig {
  double dt = 1e-3;
  double T = 0.0;
  int snapshot_every = 1;
  double exponent = kCriticalExponent;
  double overflow_guard = kOverflowGuard;
  bool dealias = false;         // 2/3-rule truncation of the nonlinear term
  double energy_budget = 1e-2;  // relative drift above which a run flags itself

  void validate() const;
};

/// min(1e-3, h/4).
double default_dt(const Grid2D& grid);

/// Nodewise u (e^{exponent u^2} - 1); throws OverflowError naming the first
/// node whose exponential argument exceeds `guard`.
GridField nonlinearity(const GridField& u, double exponent, double guard = kOverflowGuard);

/// One Strang step kick(dt/2) o free_propagate(dt) o kick(dt/2), where the
/// kick v <- v - tau f(u) is the exact flow of the nonlinear part.
SpectralWaveState step(const SpectralWaveState& s, const SolverConfig& cfg);
WaveState step(const WaveState& s, const SolverConfig& cfg);

struct RunResult {
  std::vector<WaveState> snapshots;
  std::vector<EnergyBreakdown> energies;
  double max_drift = 0.0;     // max |E(t) - E(0)| / E(0) over snapshots
  bool truncated = false;     // overflow stopped the run early
  bool over_budget = false;   // max_drift > cfg.energy_budget
  std::string diagnostic;
  int steps = 0;
};

using SnapshotSink = std::function<void(const WaveState&, const EnergyBreakdown&)>;

/// Integrates to cfg.T (the step is shortened so an integer number of steps
/// lands on T) and records every cfg.snapshot_every-th state plus the last.
RunResult run(const WaveState& s0, const SolverConfig& cfg);

/// As run(), but hands each snapshot to `sink` instead of storing it.
RunResult run_streaming(const WaveState& s0, const SolverConfig& cfg, const SnapshotSink& sink);

}  // namespace critwave
