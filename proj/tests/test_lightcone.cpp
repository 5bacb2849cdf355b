#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "critwave/errors.hpp"
#include "critwave/concentrators.hpp"
#include "critwave/expcli/experiments.hpp"
#include "critwave/lightcone.hpp"
#include "critwave/spectral.hpp"

using namespace critwave;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<WaveState> constant_trajectory(const WaveState& s, double S, double T, int count) {
  std::vector<WaveState> traj;
  for (int i = 0; i <= count; ++i) {
    WaveState w = s;
    w.t = S + (T - S) * i / count;
    traj.push_back(w);
  }
  return traj;
}

}  // namespace

TEST_CASE("cone masks") {
  const Grid2D g(64);
  const double h = g.h();
  CHECK(cone_mask(Point{}, 0.5 * h, g).count() <= 4);
  CHECK(cone_mask(Point{}, 2.0, g).count() == g.size());
  CHECK(cone_mask(Point{}, 0.0, g).count() == 0);
  const Grid2D g256(256);
  const double area = cone_mask(Point{}, 0.2, g256).area();
  CHECK(std::abs(area - kPi * 0.04) / (kPi * 0.04) <= 0.03);
  const ConeSpec cone{Point{0.4, 0.5}, 0.3};
  CHECK(cone_mask(cone, 0.1, g).count() == cone_mask(Point{0.4, 0.5}, 0.2, g).count());
}

TEST_CASE("restricted energy") {
  const Grid2D g(64);
  const WaveState z{GridField(g), GridField(g), 0.0};
  CHECK(restricted_energy(z, cone_mask(Point{}, 0.3, g)) == 0.0);
  const WaveState s = exp::random_smooth_state(g, 12);
  const double total = energy(s).total;
  CHECK(std::abs(restricted_energy(s, cone_mask(Point{}, 5.0, g)) - total) / total <= 1e-10);

  const Grid2D fine(512);
  ConcentratorSpec spec;
  spec.k = 6;
  const WaveState w{build_fk(spec, fine), GridField(fine), 0.0};
  CHECK(restricted_energy(w, cone_mask(spec.center, spec.eta, fine)) / energy(w).total >= 0.999);
}

TEST_CASE("flux identity") {
  const ConeSpec cone{Point{}, 0.4};
  SUBCASE("zero solution") {
    const Grid2D g(32);
    const auto traj = constant_trajectory(WaveState{GridField(g), GridField(g), 0.0}, 0.0, 0.2, 8);
    const IdentityResidual r = flux_identity_residual(traj, cone, 0.0, 0.2);
    CHECK(r.residual == 0.0);
    CHECK(multiplier_identity_residual(traj, cone, 0.0, 0.2).residual == 0.0);
  }
  SUBCASE("linear single mode, refinement") {
    std::vector<double> res;
    for (int n : {64, 128, 256}) {
      const exp::ConeStudy s = exp::cone_identity_study(n, cone, 0.0, 0.2, 2, 1);
      res.push_back(s.flux_residual);
      CHECK(s.flux_lhs >= 0.0);
      CHECK(s.monotonicity_violation <= 0.05);
    }
    CHECK(res.back() <= 0.05);
    CHECK(res[1] < res[0]);
    CHECK(res[2] < res[1]);
  }
  SUBCASE("preconditions") {
    const Grid2D g(16);
    const auto traj = constant_trajectory(WaveState{GridField(g), GridField(g), 0.0}, 0.0, 0.2, 4);
    CHECK_THROWS_AS(flux_identity_residual(traj, cone, 0.2, 0.1), PreconditionError);
    CHECK_THROWS_AS(flux_identity_residual(traj, cone, 0.0, 0.13), PreconditionError);
    CHECK_THROWS_AS(flux_identity_residual(traj, cone, 0.0, 0.5), PreconditionError);
  }
}

TEST_CASE("multiplier identity") {
  const ConeSpec cone{Point{}, 0.4};
  SUBCASE("static Neumann constant") {
    const Grid2D g(32, Boundary::Neumann);
    GridField u(g);
    for (double& x : u.values()) x = 0.7;
    const auto traj = constant_trajectory(WaveState{u, GridField(g), 0.0}, 0.0, 0.2, 10);
    CHECK(multiplier_identity_residual(traj, cone, 0.0, 0.2, 0.0).residual <= 1e-10);
  }
  SUBCASE("linear single mode converges at least linearly") {
    std::vector<double> res;
    for (int n : {64, 128, 256}) res.push_back(exp::cone_identity_study(n, cone, 0.0, 0.2, 2, 1).multiplier_residual);
    CHECK(std::log2(res[0] / res[1]) >= 1.0);
    CHECK(std::log2(res[1] / res[2]) >= 1.0);
  }
}

TEST_CASE("bilinear sampling reproduces linear fields") {
  const Grid2D g(20);
  const GridField f = GridField::sample(g, [](double x, double y) { return 2 * x - 3 * y + 1; });
  for (Point p : {Point{0.5, 0.5}, Point{0.31, 0.77}, Point{0.123, 0.456}})
    CHECK(sample_bilinear(f, p) == doctest::Approx(2 * p.x - 3 * p.y + 1).epsilon(1e-13));
}

TEST_CASE("PDE and ODE agree inside the cone") {
  const Grid2D g(256);
  SolverConfig cfg;
  cfg.dt = default_dt(g);
  const AgreementReport r = pde_ode_agreement(6, 0.2, g, cfg);
  REQUIRE(!r.times.empty());
  CHECK(r.times.front() == 0.0);
  CHECK(std::abs(r.pde_center.front() - r.ode_center.front()) <= 1e-12);
  CHECK(r.window == doctest::Approx(0.8 * 0.2 * std::exp(-3.0)));
  CHECK_FALSE(r.regimes_differ);

  cfg.exponent = 0.0;
  const AgreementReport lin = pde_ode_agreement(6, 0.2, g, cfg);
  CHECK(lin.regimes_differ);
  CHECK_THROWS_AS(pde_ode_agreement(9, 0.2, g, SolverConfig{}), PreconditionError);
}
