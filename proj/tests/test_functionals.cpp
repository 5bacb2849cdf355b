#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "critwave/errors.hpp"
#include "critwave/concentrators.hpp"
#include "critwave/functionals.hpp"
#include "critwave/log_scalar.hpp"
#include "critwave/quadrature.hpp"
#include "critwave/random.hpp"
#include "critwave/spectral.hpp"

using namespace critwave;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField smooth_coeffs(const Grid2D& g, std::uint64_t seed, double scale) {
  CounterRng rng(seed);
  SpectralField c(g);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) c(i, j) = scale * rng.normal() / std::pow(1.0 + i * i + j * j, 1.5);
  return c;
}

GridField smooth_field(const Grid2D& g, std::uint64_t seed, double scale = 1.0) {
  return inverse_transform(smooth_coeffs(g, seed, scale));
}

GridField mode11(const Grid2D& g) {
  SpectralField c(g);
  c(0, 0) = 1.0;
  return inverse_transform(c);
}

double exhaustive_holder(const GridField& u, double alpha) {
  const Grid2D& g = u.grid();
  const int n = g.n();
  double best = 0.0;
  for (int a = 0; a < n * n; ++a)
    for (int b = a + 1; b < n * n; ++b) {
      const int ax = a % n, ay = a / n, bx = b % n, by = b / n;
      const double d = std::hypot(g.node(ax) - g.node(bx), g.node(ay) - g.node(by));
      best = std::max(best, std::abs(u(ax, ay) - u(bx, by)) / std::pow(d, alpha));
    }
  return best;
}

}  // namespace

TEST_CASE("energy of simple states") {
  const Grid2D g(16);
  const EnergyBreakdown z = energy(WaveState{GridField(g), GridField(g), 0.0});
  CHECK(z.kinetic == 0.0);
  CHECK(z.dirichlet == 0.0);
  CHECK(z.potential == 0.0);
  CHECK(z.total == 0.0);
  const EnergyBreakdown k = energy(WaveState{GridField(g), mode11(g), 0.0});
  CHECK(k.kinetic == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(k.dirichlet == 0.0);
  CHECK(k.potential == 0.0);
}

TEST_CASE("energy components are nonnegative") {
  const Grid2D g(32);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const EnergyBreakdown e = energy(WaveState{smooth_field(g, s, 0.3), smooth_field(g, s + 100), 0.0});
    CHECK(e.kinetic >= 0.0);
    CHECK(e.dirichlet >= 0.0);
    CHECK(e.potential >= 0.0);
  }
}

TEST_CASE("concentrated data: energy against the radial quadrature") {
  const Grid2D g(512);
  ConcentratorSpec spec;  // k = 8, eta = 0.2
  const WaveState w{build_fk(spec, g), GridField(g), 0.0};
  const EnergyBreakdown e = energy(w);
  const double oracle = analytic_reference(spec).energy.to_double();
  CHECK(e.total > 1.0);
  CHECK(e.total <= 1.0 + spec.eta * spec.eta);
  CHECK(std::abs(e.total - oracle) / oracle < 0.05);
  CHECK(std::abs(e.dirichlet - 1.0) < 0.05);
}

TEST_CASE("energy density integrates to the energy") {
  for (Boundary bc : {Boundary::Dirichlet, Boundary::Neumann}) {
    const Grid2D g(48, bc);
    const WaveState s{smooth_field(g, 4, 0.2), smooth_field(g, 5), 0.0};
    const GridField d = energy_density(s);
    double sum = 0.0;
    for (double x : d.values()) sum += x;
    sum *= g.h() * g.h();
    const double total = energy(s).total;
    CHECK(std::abs(sum - total) / total < 1e-10);
  }
  const Grid2D gn(16, Boundary::Neumann);
  GridField v(gn);
  for (double& x : v.values()) x = 0.7;
  {
    const auto field = energy_density(WaveState{GridField(gn), v, 0.0});
    for (double x : field.values()) CHECK(x == doctest::Approx(0.49));
  }
  {
    const auto field = energy_density(WaveState{GridField(gn), GridField(gn), 0.0});
    for (double x : field.values()) CHECK(x == 0.0);
  }
}

TEST_CASE("Moser functional") {
  const Grid2D g(64);
  CHECK(moser_functional(GridField(g), 4 * kPi) == 0.0);
  const GridField u = smooth_field(g, 8, 0.5);
  GridField neg = u;
  for (double& x : neg.values()) x = -x;
  CHECK(moser_functional(u, 2 * kPi) < moser_functional(u, 4 * kPi));
  CHECK(moser_functional(u, 4 * kPi) < moser_functional(u, 6 * kPi));
  CHECK(moser_functional(neg, 4 * kPi) == moser_functional(u, 4 * kPi));

  const Grid2D fine(512);
  ConcentratorSpec spec;
  const double grid_value = moser_functional(build_fk(spec, fine), 4 * kPi);
  const double oracle = 0.321693093350362478;  // 2 pi eta^2 int_0^1 r (e^{4 pi f_8^2} - 1) dr, 30 digits
  CHECK(grid_value <= 4 * kPi * spec.eta * spec.eta);
  CHECK(analytic_reference(spec).mt_functional.to_double() == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(std::abs(grid_value - oracle) / oracle < 0.02);
}

TEST_CASE("Lebesgue norms") {
  const Grid2D g(16, Boundary::Neumann);
  CHECK(lq_norm(GridField(g), 8) == 0.0);
  GridField c(g);
  for (double& x : c.values()) x = -1.5;
  CHECK(lq_norm(c, 8) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(sup_norm(c) == 1.5);
  const Grid2D gd(40);
  const SpectralField s = smooth_coeffs(gd, 3, 1.0);
  CHECK(lq_norm(inverse_transform(s), 2) * lq_norm(inverse_transform(s), 2) ==
        doctest::Approx(coefficient_norm_sq(s)).epsilon(1e-10));
}

TEST_CASE("Hoelder seminorm against the exhaustive pair oracle") {
  const Grid2D g(16, Boundary::Neumann);
  GridField c(g);
  for (double& x : c.values()) x = 3.0;
  CHECK(holder_seminorm(c) == 0.0);

  const GridField lin = GridField::sample(g, [](double x, double) { return x; });
  const double span = g.node(15) - g.node(0);
  const double closed = std::pow(span, 1.0 - 0.125);
  CHECK(exhaustive_holder(lin, 0.125) == doctest::Approx(closed).epsilon(1e-14));
  CHECK(holder_seminorm(lin, 0.125, HolderSearch::Exhaustive) == doctest::Approx(closed).epsilon(1e-14));
  CHECK(holder_seminorm(lin, 0.125, HolderSearch::Refined) == doctest::Approx(closed).epsilon(1e-14));

  for (std::uint64_t s = 0; s < 6; ++s) {
    const GridField u = smooth_field(Grid2D(16), 20 + s);
    const double oracle = exhaustive_holder(u, 0.125);
    CHECK(holder_seminorm(u, 0.125, HolderSearch::Exhaustive) == doctest::Approx(oracle).epsilon(1e-14));
    const double refined = holder_seminorm(u, 0.125, HolderSearch::Refined);
    const double dyadic = holder_seminorm(u, 0.125, HolderSearch::Dyadic);
    CHECK(refined <= oracle * (1 + 1e-14));
    CHECK(dyadic <= refined * (1 + 1e-14));
    CHECK(refined >= 0.98 * oracle);
  }
}

TEST_CASE("Hoelder seminorm is a seminorm on a fixed offset set") {
  const Grid2D g(32);
  for (std::uint64_t s = 0; s < 4; ++s) {
    const GridField a = smooth_field(g, 3 * s), b = smooth_field(g, 3 * s + 1);
    GridField sum = a, scaled = a;
    for (std::size_t i = 0; i < sum.values().size(); ++i) {
      sum.values()[i] += b.values()[i];
      scaled.values()[i] *= -2.5;
    }
    const double na = holder_seminorm(a, 0.125, HolderSearch::Dyadic);
    const double nb = holder_seminorm(b, 0.125, HolderSearch::Dyadic);
    CHECK(holder_seminorm(scaled, 0.125, HolderSearch::Dyadic) == doctest::Approx(2.5 * na).epsilon(1e-12));
    CHECK(holder_seminorm(sum, 0.125, HolderSearch::Dyadic) <= (na + nb) * (1 + 1e-12));
  }
}

TEST_CASE("logarithmic inequality ratio") {
  const Grid2D g(64);
  const GridField u = mode11(g);
  const double r = log_inequality_ratio(u, 2.0, 8.0);
  CHECK(std::isfinite(r));
  CHECK(r > 0.0);
  GridField neg = u;
  for (double& x : neg.values()) x = -x;
  CHECK(log_inequality_ratio(neg, 2.0, 8.0) == r);
  CHECK_THROWS_AS(log_inequality_ratio(GridField(g), 2.0, 8.0), UndefinedInputError);
  CHECK_THROWS_AS(log_inequality_ratio(u, 1.0, 8.0), PreconditionError);
  CHECK_THROWS_AS(log_inequality_ratio(u, 2.0, 1.0), PreconditionError);

  const Grid2D fine(256);
  for (int k = 4; k <= 10; ++k) {
    ConcentratorSpec spec;
    spec.k = k;
    CHECK(log_inequality_ratio(build_fk(spec, fine), 2.0, 8.0) <= 1.0);
  }
}

TEST_CASE("Strichartz functional") {
  const Grid2D g(16);
  std::vector<WaveState> zero(5, WaveState{GridField(g), GridField(g), 0.0});
  for (int i = 0; i < 5; ++i) zero[i].t = 0.25 * i;
  CHECK(strichartz_functional(zero, 1.0) == 0.0);

  const GridField u0 = smooth_field(g, 42);
  std::vector<WaveState> still;
  for (int i = 0; i < 9; ++i) still.push_back(WaveState{u0, GridField(g), 0.125 * i});
  const double c18 = holder_seminorm(u0) + sup_norm(u0);
  CHECK(strichartz_functional(still, 1.0) == doctest::Approx(c18).epsilon(1e-12));
  CHECK_THROWS(strichartz_functional(std::vector<WaveState>{}, 1.0));
}

TEST_CASE("LogScalar arithmetic") {
  for (double x : {-3.0, 1e-300, 0.5, 7.25, 1e300}) {
    const LogScalar s = LogScalar::from_double(x);
    CHECK(s.to_double() == doctest::Approx(x).epsilon(1e-13));  // exp(log x) loses |log x| ulps
  }
  for (double l : {-700.0, -1.0, 0.0, 3.5, 650.0}) CHECK(LogScalar::exp_of(l).lnmag() == l);
  CounterRng rng(17);
  for (int i = 0; i < 200; ++i) {
    const double a = (rng.uniform() - 0.5) * std::exp(200.0 * rng.uniform());
    const double b = (rng.uniform() - 0.5) * std::exp(200.0 * rng.uniform());
    const double sum = (LogScalar::from_double(a) + LogScalar::from_double(b)).to_double();
    CHECK(std::abs(sum - (a + b)) <= 1e-12 * (std::abs(a) + std::abs(b)));
    CHECK((LogScalar::from_double(a) * LogScalar::from_double(b)).to_double() == doctest::Approx(a * b).epsilon(1e-12));
  }
  const LogScalar big = LogScalar::exp_of(1e4);
  CHECK((big * big).lnmag() == 2e4);
  CHECK((big - big).is_zero());
  CHECK(LogScalar::exp_of(800.0) > LogScalar::exp_of(799.0));
  CHECK(std::isinf(LogScalar::exp_of(800.0).to_double()));
}

TEST_CASE("quadrature rules") {
  // Written in x alone, nodes within rounding of 1 are lost: about 2 sqrt(eps) of mass.
  const QuadratureResult naive = tanh_sinh([](double x) { return 1.0 / std::sqrt(1.0 - x); }, 0.0, 1.0);
  CHECK(naive.value == doctest::Approx(2.0).epsilon(1e-7));
  const QuadratureResult ts = tanh_sinh_complement(
      [](double x, double d) { return 1.0 / std::sqrt(x > 0.5 ? d : 1.0 - x); }, 0.0, 1.0, 1e-12);
  CHECK(ts.converged);
  CHECK(ts.value == doctest::Approx(2.0).epsilon(1e-10));
  const QuadratureResult log_sing = tanh_sinh([](double x) { return std::log(x); }, 0.0, 1.0, 1e-12);
  CHECK(log_sing.value == doctest::Approx(-1.0).epsilon(1e-10));
  const QuadratureResult simpson = adaptive_simpson([](double x) { return std::exp(-2 * x) * x * x; }, 0.0, 5.0);
  const double exact = 0.25 - std::exp(-10.0) * (25.0 / 2 + 5.0 / 2 + 0.25);
  CHECK(simpson.value == doctest::Approx(exact).epsilon(1e-11));
}
