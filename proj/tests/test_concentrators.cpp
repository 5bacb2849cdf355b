#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "critwave/errors.hpp"
#include "critwave/concentrators.hpp"
#include "critwave/functionals.hpp"
#include "critwave/quadrature.hpp"
#include "critwave/spectral.hpp"

using namespace critwave;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("radial profile values") {
  CHECK(fk_profile(0.0, 8) == doctest::Approx(std::sqrt(8.0 / (4 * kPi))).epsilon(1e-15));
  CHECK(fk_profile(0.0, 8) == doctest::Approx(0.7979).epsilon(1e-4));
  CHECK(fk_profile(1.0, 8) == 0.0);
  CHECK(fk_profile(1.5, 8) == 0.0);
  CHECK(fk_profile(std::exp(-2.0), 8) == doctest::Approx(std::sqrt(8.0) / (4 * std::sqrt(kPi))).epsilon(1e-14));
  CHECK(fk_profile(std::exp(-2.0), 8) == doctest::Approx(0.3989).epsilon(1e-4));
  // continuous at the plateau edge
  CHECK(fk_profile(std::exp(-4.0) * (1 + 1e-12), 8) == doctest::Approx(fk_profile(0.0, 8)).epsilon(1e-10));
}

TEST_CASE("sampled concentrator") {
  const Grid2D g(129);
  ConcentratorSpec spec;
  spec.eta = 0.3;
  const GridField f = build_fk(spec, g);
  CHECK(f(64, 64) == doctest::Approx(fk_profile(0.0, 8)));  // node 64 sits at x = 0.5
  CHECK(f(64 + 39, 64) == 0.0);                              // r = 39/130 = 0.3
  std::vector<std::string> warnings;
  spec.k = 12;
  build_fk(spec, g, &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("concentrator preconditions") {
  ConcentratorSpec spec;
  spec.k = 1;
  CHECK_THROWS_AS(spec.validate(), PreconditionError);
  spec.k = 8;
  spec.eta = 1.2;
  CHECK_THROWS_AS(spec.validate(), PreconditionError);
  spec.eta = 0.2;
  spec.center = {0.1, 0.5};
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = {};
  spec.amplitude = Amplitude::MinusScaled;
  spec.a = 2.0;
  spec.k = 4;  // needs k > 2a
  CHECK_THROWS_AS(spec.validate(), PreconditionError);
}

TEST_CASE("closed-form norms") {
  for (int k : {4, 8, 50, 400}) {
    ConcentratorSpec spec;
    spec.k = k;
    spec.eta = 0.1;
    const AnalyticReference ref = analytic_reference(spec);
    CHECK(ref.dirichlet_sq == 1.0);
    CHECK(ref.l2_sq <= ref.l2_sq_bound);
    // ||f||^2 = 2 pi eta^2 int_0^1 r f_k(r)^2 dr
    const double pl = std::exp(-0.5 * k);
    const double ann = adaptive_simpson([&](double r) { return r * std::pow(fk_profile(r, k), 2); }, pl, 1.0, 1e-15).value;
    const double quad = 2 * kPi * 0.01 * (ann + 0.5 * pl * pl * k / (4 * kPi));
    CHECK(ref.l2_sq == doctest::Approx(quad).epsilon(1e-8));
  }
  ConcentratorSpec plus;
  plus.k = 100;
  plus.amplitude = Amplitude::Plus;
  CHECK(analytic_reference(plus).dirichlet_sq == doctest::Approx(1.0201).epsilon(1e-14));

  ConcentratorSpec s50;
  s50.k = 50;
  s50.eta = 0.1;
  const AnalyticReference r50 = analytic_reference(s50);
  const double mt_oracle = 0.0657364933600139662720;  // arbitrary-precision quadrature
  CHECK(r50.mt_functional.to_double() == doctest::Approx(mt_oracle).epsilon(1e-9));
  CHECK(r50.mt_functional.to_double() / (4 * kPi) <= 0.01);
  CHECK(r50.potential.to_double() == doctest::Approx(0.00513114392988688920).epsilon(1e-9));

  ConcentratorSpec s8;
  CHECK(analytic_reference(s8).potential.to_double() == doctest::Approx(0.0231070708917441635).epsilon(1e-9));
}

TEST_CASE("Moser reference in log space stays finite for huge k") {
  ConcentratorSpec spec;
  spec.k = 2000;
  spec.eta = 0.1;
  const LogScalar sub = moser_reference(spec, 2 * kPi);
  const LogScalar crit = moser_reference(spec, 4 * kPi);
  const LogScalar super = moser_reference(spec, 6 * kPi);
  CHECK(sub < crit);
  CHECK(crit < super);
  CHECK(super.lnmag() > 500.0);
  CHECK(std::isfinite(super.lnmag()));
}

TEST_CASE("plus and plain data differ by 1/k^2 in the Dirichlet norm") {
  CHECK(plus_plain_gap_sq(10) == doctest::Approx(0.01));
  const Grid2D g(512);
  ConcentratorSpec w;
  ConcentratorSpec v = w;
  v.amplitude = Amplitude::Plus;
  GridField d = build_fk(v, g);
  const GridField wf = build_fk(w, g);
  for (std::size_t i = 0; i < d.values().size(); ++i) d.values()[i] -= wf.values()[i];
  const double grid_gap = dirichlet_norm_sq(forward_transform(d));
  CHECK(std::abs(grid_gap - plus_plain_gap_sq(8)) / plus_plain_gap_sq(8) < 0.05);
}

TEST_CASE("supercritical growth data") {
  const Grid2D g(257);
  const WaveState s = supercritical_growth_data(8, 2.0, g);
  for (double v : s.v.values()) CHECK(v == 0.0);
  CHECK(s.u(128, 128) == doctest::Approx((1 - 4.0 / 8) * std::sqrt(8 / (4 * kPi))).epsilon(1e-14));
  ConcentratorSpec spec;
  spec.k = 8;
  spec.amplitude = Amplitude::MinusScaled;
  CHECK(analytic_reference(spec).dirichlet_sq == doctest::Approx(0.25));
  CHECK(analytic_reference(spec).dirichlet_sq < 1.0);
}

TEST_CASE("dual Strichartz closed form") {
  const double a = 2.0;
  SUBCASE("p = infinity with 2/q + 1/p = 2 scales exactly like sqrt(k)") {
    const double inf = std::numeric_limits<double>::infinity();
    const double c16 = dual_strichartz_lower_bound(16, a, inf, 1.0).lnmag() - 0.5 * std::log(16.0);
    for (int k : {32, 64, 256, 512})
      CHECK(dual_strichartz_lower_bound(k, a, inf, 1.0).lnmag() - 0.5 * std::log(double(k)) ==
            doctest::Approx(c16).epsilon(1e-12));
  }
  SUBCASE("doubling k multiplies the bound by at least sqrt 2") {
    const double r = std::exp(dual_strichartz_lower_bound(128, a, 1, 2).lnmag() -
                              dual_strichartz_lower_bound(64, a, 1, 2).lnmag());
    CHECK(r >= std::sqrt(2.0) * (1 - 1e-12));
  }
  SUBCASE("plateau nonlinearity dominates C sqrt(k) e^k") {
    for (int k = 16; k <= 512; k *= 2)
      CHECK(plateau_nonlinearity(k, a).lnmag() >= std::log(plateau_constant(a)) + 0.5 * std::log(double(k)) + k);
    CHECK(plateau_nonlinearity(8, a).to_double() ==
          doctest::Approx(0.5 * std::sqrt(8 / (4 * kPi)) * std::expm1(2.0)).epsilon(1e-13));
  }
  SUBCASE("exact plateau norm dominates the bound") {
    for (int k = 16; k <= 512; k *= 2) CHECK(plateau_cone_norm(k, a, 1, 2) >= dual_strichartz_lower_bound(k, a, 1, 2));
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(dual_strichartz_lower_bound(8, a, 0.5, 2), PreconditionError);
    CHECK_THROWS_AS(dual_strichartz_lower_bound(8, a, 1, 0.9), PreconditionError);
    CHECK_THROWS_AS(dual_strichartz_lower_bound(3, a, 1, 2), PreconditionError);
    CHECK_THROWS_AS(dual_strichartz_lower_bound(8, 1.0, 1, 2), PreconditionError);
  }
}
