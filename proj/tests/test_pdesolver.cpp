#include <doctest.h>

#include <cmath>
#include <numbers>

#include "critwave/errors.hpp"
#include "critwave/concentrators.hpp"
#include "critwave/pdesolver.hpp"
#include "critwave/random.hpp"
#include "critwave/spectral.hpp"

using namespace critwave;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralWaveState smooth_state(const Grid2D& g, std::uint64_t seed, double amp) {
  CounterRng rng(seed);
  SpectralField u(g), v(g);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const double w = std::pow(1.0 + i * i + j * j, -2.0);
      u(i, j) = amp * rng.normal() * w;
      v(i, j) = amp * rng.normal() * w;
    }
  return {u, v, 0.0};
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Method-of-lines RK4 in the eigenbasis: c' = d, d' = -lambda^2 c - P f(u).
SpectralWaveState rk4_reference(SpectralWaveState s, double T, int substeps, double exponent) {
  const double dt = T / substeps;
  const Grid2D g = s.u.grid();
  auto rhs = [&](const SpectralField& c, const SpectralField& d, SpectralField& dc, SpectralField& dd) {
    const SpectralField fn = forward_transform(nonlinearity(inverse_transform(c), exponent));
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i) {
        dc(i, j) = d(i, j);
        dd(i, j) = -c.eigenvalue_sq(i, j) * c(i, j) - fn(i, j);
      }
  };
  auto axpy = [](const SpectralField& x, double a, const SpectralField& y) {
    SpectralField out = x;
    for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] += a * y.values()[i];
    return out;
  };
  for (int n = 0; n < substeps; ++n) {
    SpectralField k1c(g), k1d(g), k2c(g), k2d(g), k3c(g), k3d(g), k4c(g), k4d(g);
    rhs(s.u, s.v, k1c, k1d);
    rhs(axpy(s.u, dt / 2, k1c), axpy(s.v, dt / 2, k1d), k2c, k2d);
    rhs(axpy(s.u, dt / 2, k2c), axpy(s.v, dt / 2, k2d), k3c, k3d);
    rhs(axpy(s.u, dt, k3c), axpy(s.v, dt, k3d), k4c, k4d);
    for (std::size_t i = 0; i < s.u.values().size(); ++i) {
      s.u.values()[i] += dt / 6 * (k1c.values()[i] + 2 * k2c.values()[i] + 2 * k3c.values()[i] + k4c.values()[i]);
      s.v.values()[i] += dt / 6 * (k1d.values()[i] + 2 * k2d.values()[i] + 2 * k3d.values()[i] + k4d.values()[i]);
    }
  }
  s.t += T;
  return s;
}

}  // namespace

TEST_CASE("nonlinearity") {
  const Grid2D g(16);
  {
    const auto field = nonlinearity(GridField(g), 4 * kPi);
    for (double x : field.values()) CHECK(x == 0.0);
  }
  CounterRng rng(1);
  GridField u(g);
  for (double& x : u.values()) x = 0.5 * rng.normal();
  GridField neg = u;
  for (double& x : neg.values()) x = -x;
  const GridField a = nonlinearity(u, 4 * kPi), b = nonlinearity(neg, 4 * kPi);
  for (std::size_t i = 0; i < a.values().size(); ++i) CHECK(b.values()[i] == -a.values()[i]);
  GridField plateau(g);
  const double p = std::sqrt(8.0 / (4 * kPi));
  for (double& x : plateau.values()) x = p;
  CHECK(nonlinearity(plateau, 4 * kPi)(3, 3) == doctest::Approx(p * std::expm1(8.0)).epsilon(1e-13));
  plateau(5, 7) = 10.0;
  CHECK_THROWS_AS(nonlinearity(plateau, 4 * kPi), OverflowError);
}

TEST_CASE("solver configuration is validated") {
  SolverConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.dt = 1e-3;
  cfg.snapshot_every = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(default_dt(Grid2D(64)) == doctest::Approx(std::min(1e-3, 0.25 / 65)));
}

TEST_CASE("zero exponent step is the free propagator") {
  const Grid2D g(32);
  const SpectralWaveState s = smooth_state(g, 3, 1.0);
  SolverConfig cfg;
  cfg.dt = 0.013;
  cfg.exponent = 0.0;
  const SpectralWaveState a = step(s, cfg);
  const SpectralWaveState b = free_propagate(s, cfg.dt);
  CHECK(max_diff(a.u.values(), b.u.values()) < 1e-15);
  CHECK(max_diff(a.v.values(), b.v.values()) < 1e-15);
}

TEST_CASE("steps of dt and -dt compose to the identity") {
  const Grid2D g(32);
  const SpectralWaveState s = smooth_state(g, 4, 0.05);
  SolverConfig fwd;
  fwd.dt = 2e-3;
  SolverConfig bwd = fwd;
  bwd.dt = -2e-3;
  const SpectralWaveState r = step(step(s, fwd), bwd);
  CHECK(max_diff(r.u.values(), s.u.values()) < 1e-10);
  CHECK(max_diff(r.v.values(), s.v.values()) < 1e-10);
}

TEST_CASE("local error of one step is third order against RK4") {
  const Grid2D g(16);
  SpectralField u(g);
  u(0, 0) = 0.1;
  u(1, 0) = 0.03;
  const SpectralWaveState s{u, SpectralField(g), 0.0};
  double prev = 0.0, order = 0.0;
  for (double dt : {0.01, 0.005, 0.0025}) {
    SolverConfig cfg;
    cfg.dt = dt;
    const SpectralWaveState a = step(s, cfg);
    const SpectralWaveState ref = rk4_reference(s, dt, 200, cfg.exponent);
    const double err = std::max(max_diff(a.u.values(), ref.u.values()), max_diff(a.v.values(), ref.v.values()));
    if (prev > 0.0) order = std::log2(prev / err);
    prev = err;
  }
  CHECK(order >= 2.9);
}

TEST_CASE("energy conservation") {
  const Grid2D g(64);
  SpectralField c(g);
  c(0, 0) = 0.1;
  const WaveState s0 = to_grid(SpectralWaveState{c, SpectralField(g), 0.0});
  SUBCASE("linear runs conserve energy to rounding") {
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.T = 0.5;
    cfg.exponent = 0.0;
    cfg.snapshot_every = 50;
    CHECK(run(s0, cfg).max_drift <= 1e-12);
  }
  SUBCASE("subcritical single mode drifts like dt^2") {
    SolverConfig cfg;
    cfg.T = 0.25;
    cfg.snapshot_every = 10;
    cfg.dt = 4e-4;
    const double d1 = run(s0, cfg).max_drift;
    cfg.dt = 2e-4;
    const double d2 = run(s0, cfg).max_drift;
    CHECK(d1 <= 1e-3);
    CHECK(d1 / d2 >= 3.5);
  }
}

TEST_CASE("run bookkeeping") {
  const Grid2D g(32);
  SpectralField c(g);
  c(0, 0) = 0.1;
  const WaveState s0 = to_grid(SpectralWaveState{c, SpectralField(g), 0.0});
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 0.1;
  cfg.snapshot_every = 5;
  const RunResult r = run(s0, cfg);
  CHECK(r.steps == 10);
  REQUIRE(r.snapshots.size() == 3);
  CHECK(r.snapshots.back().t == doctest::Approx(0.1));
  CHECK(r.energies.size() == r.snapshots.size());
  CHECK_FALSE(r.truncated);
}

TEST_CASE("mirror symmetry is preserved") {
  const Grid2D g(32);
  SpectralField c(g);
  c(0, 0) = 0.2;
  c(2, 2) = 0.05;
  c(1, 3) = c(3, 1) = 0.03;
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = 0.05;
  cfg.snapshot_every = 50;
  const RunResult r = run(to_grid(SpectralWaveState{c, SpectralField(g), 0.0}), cfg);
  const GridField& u = r.snapshots.back().u;
  double asym = 0.0;
  for (int j = 0; j < 32; ++j)
    for (int i = 0; i < 32; ++i) asym = std::max(asym, std::abs(u(i, j) - u(j, i)));
  CHECK(asym < 1e-13);
}

TEST_CASE("overflow truncates the run with a diagnostic") {
  const Grid2D g(32);
  GridField u(g);
  u(16, 16) = 7.0;  // 4 pi 49 > 700
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = 0.01;
  const RunResult r = run(WaveState{u, GridField(g), 0.0}, cfg);
  CHECK(r.truncated);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("concentrated data run") {
  const Grid2D g(512);
  ConcentratorSpec spec;
  spec.k = 6;
  const WaveState s0{build_fk(spec, g), GridField(g), 0.0};
  SolverConfig cfg;
  cfg.dt = default_dt(g);
  cfg.T = 0.05;
  cfg.snapshot_every = 20;
  const RunResult r = run(s0, cfg);
  CHECK_FALSE(r.truncated);
  CHECK(r.snapshots.back().t == doctest::Approx(0.05));
  CHECK(r.max_drift <= 1e-2);
}
