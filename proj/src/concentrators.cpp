#include "critwave/concentrators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "critwave/quadrature.hpp"
#include "critwave/special.hpp"

namespace critwave {

namespace {

constexpr double kPi = std::numbers::pi;

enum class Kernel { Exp, Expm1, Expm1MinusX };

double log_kernel(Kernel kind, double x) {
  switch (kind) {
    case Kernel::Exp: return x;
    case Kernel::Expm1: return x > 0.0 ? log_expm1(x) : -INFINITY;
    case Kernel::Expm1MinusX: return x > 0.0 ? log_expm1_minus_x(x) : -INFINITY;
  }
  return x;
}

// int_0^{k/2} e^{-2s} K(beta s^2) ds with beta = 4c^2/k, integrated after
// dividing out the largest exponential factor.
LogScalar annulus_integral(double c, int k, Kernel kind) {
  const double kk = k;
  const double beta = 4.0 * c * c / kk;
  const double gmax = std::max(0.0, (c * c - 1.0) * kk);
  auto integrand = [&](double s) {
    const double lk = log_kernel(kind, beta * s * s);
    return lk == -INFINITY ? 0.0 : std::exp(lk - 2.0 * s - gmax);
  };
  const QuadratureResult r = adaptive_simpson(integrand, 0.0, 0.5 * kk, 1e-12);
  if (r.value <= 0.0) return LogScalar::zero();
  return LogScalar::from_log(1, std::log(r.value) + gmax);
}

// e^{-k} K(c^2 k) / 2: the plateau disk contribution on the unit scale.
LogScalar plateau_term(double c, int k, Kernel kind) {
  const double lk = log_kernel(kind, c * c * k);
  return LogScalar::from_log(1, lk - k - std::log(2.0));
}

}  // namespace

double ConcentratorSpec::amplitude_factor() const {
  switch (amplitude) {
    case Amplitude::Plain: return 1.0;
    case Amplitude::Plus: return 1.0 + 1.0 / k;
    case Amplitude::MinusScaled: return 1.0 - 2.0 * a / k;
  }
  return 1.0;
}

double ConcentratorSpec::radius() const {
  return amplitude == Amplitude::MinusScaled ? 1.0 / a : eta;
}

double ConcentratorSpec::plateau_radius() const { return radius() * std::exp(-0.5 * k); }

void ConcentratorSpec::validate() const {
  if (k < 2) throw PreconditionError("concentrator: k must be >= 2");
  if (amplitude == Amplitude::MinusScaled) {
    if (!(a > 1.0)) throw PreconditionError("concentrator: scale a must exceed 1");
    if (!(k > 2.0 * a)) throw PreconditionError("concentrator: need k > 2a for a positive amplitude");
  } else if (!(eta > 0.0 && eta < 1.0)) {
    throw PreconditionError("concentrator: eta must lie in (0, 1)");
  }
  const double r = radius();
  const double slack = 1e-12;
  if (center.x - r < -slack || center.x + r > 1.0 + slack || center.y - r < -slack ||
      center.y + r > 1.0 + slack) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "concentrator support B((%.6g, %.6g), %.6g) leaves the unit square",
                  center.x, center.y, r);
    throw DomainError(msg);
  }
}

double fk_profile(double r, int k) {
  if (r >= 1.0) return 0.0;
  const double kk = k;
  if (r <= std::exp(-0.5 * kk)) return std::sqrt(kk / (4.0 * kPi));
  return -std::log(r) / std::sqrt(kk * kPi);
}

GridField build_fk(const ConcentratorSpec& spec, const Grid2D& grid,
                   std::vector<std::string>* warnings) {
  spec.validate();
  const double rho = spec.radius();
  if (warnings && grid.h() > 0.5 * spec.plateau_radius()) {
    char msg[200];
    std::snprintf(msg, sizeof msg,
                  "plateau radius %.4g is under-resolved at h = %.4g (want h <= %.4g)",
                  spec.plateau_radius(), grid.h(), 0.5 * spec.plateau_radius());
    warnings->emplace_back(msg);
  }
  const double amp = spec.amplitude_factor();
  const Point c = spec.center;
  return GridField::sample(grid, [&](double x, double y) {
    const double r = std::hypot(x - c.x, y - c.y) / rho;
    return amp * fk_profile(r, spec.k);
  });
}

LogScalar radial_moser_integral(double c, int k) {
  if (k < 1) throw PreconditionError("radial_moser_integral: k must be >= 1");
  return annulus_integral(c, k, Kernel::Exp);
}

AnalyticReference analytic_reference(const ConcentratorSpec& spec) {
  spec.validate();
  const double c = spec.amplitude_factor();
  const double rho = spec.radius();
  const double kk = spec.k;
  AnalyticReference ref;
  ref.dirichlet_sq = c * c;
  ref.l2_sq = c * c * rho * rho * (0.5 / kk - std::exp(-kk) * (0.5 + 0.5 / kk));
  ref.l2_sq_bound = c * c * rho * rho / (2.0 * kk);

  const LogScalar rho2 = LogScalar::from_double(rho * rho);
  ref.mt_functional = moser_reference(spec, 4.0 * kPi);
  ref.potential = LogScalar::from_double(0.5) * rho2 *
                  (annulus_integral(c, spec.k, Kernel::Expm1MinusX) +
                   plateau_term(c, spec.k, Kernel::Expm1MinusX));
  ref.energy = LogScalar::from_double(ref.dirichlet_sq) + ref.potential;
  return ref;
}

LogScalar moser_reference(const ConcentratorSpec& spec, double alpha) {
  spec.validate();
  if (!(alpha > 0.0)) throw PreconditionError("moser_reference: alpha must be > 0");
  // alpha u^2 = 4 pi (c')^2 f_k^2 with c' = c sqrt(alpha / 4 pi)
  const double c = spec.amplitude_factor() * std::sqrt(alpha / (4.0 * kPi));
  const double rho = spec.radius();
  return LogScalar::from_double(2.0 * kPi * rho * rho) *
         (annulus_integral(c, spec.k, Kernel::Expm1) + plateau_term(c, spec.k, Kernel::Expm1));
}

double plus_plain_gap_sq(int k) { return 1.0 / (double(k) * k); }

WaveState supercritical_growth_data(int k, double a, const Grid2D& grid, Point center) {
  ConcentratorSpec spec;
  spec.k = k;
  spec.a = a;
  spec.center = center;
  spec.amplitude = Amplitude::MinusScaled;
  return {build_fk(spec, grid), GridField(grid), 0.0};
}

LogScalar plateau_nonlinearity(int k, double a) {
  const double kk = k;
  const double factor = 1.0 - 2.0 * a / kk;
  if (!(factor > 0.0)) throw PreconditionError("plateau_nonlinearity: need k > 2a");
  const double amp = factor * std::sqrt(kk / (4.0 * kPi));
  const double x = factor * factor * kk;
  return LogScalar::from_log(1, std::log(amp) + log_expm1(x));
}

double plateau_constant(double a) {
  const double k0 = std::max(16.0, 8.0 * a);
  return (1.0 - 2.0 * a / k0) * -std::expm1(4.0 * a - k0) * std::exp(-4.0 * a) /
         std::sqrt(4.0 * kPi);
}

namespace {

// ln of pi^{1/q} (2p/q + 1)^{-1/p} R^{2/q + 1/p}, R = e^{-k/2}/a.
double log_cone_factor(int k, double a, double p, double q) {
  if (!(p >= 1.0 && q >= 1.0)) throw PreconditionError("dual Strichartz: need p, q >= 1");
  const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  if (ip + 2.0 * iq > 2.0 + 1e-15)
    throw PreconditionError("dual Strichartz: need 1/p + 2/q <= 2");
  if (k < 4) throw PreconditionError("dual Strichartz: need k >= 4");
  if (!(a > 1.0)) throw PreconditionError("dual Strichartz: need a > 1");
  const double log_r = -0.5 * k - std::log(a);
  // (2p/q + 1)^{-1/p} = exp(-ip * log(2p/q + 1)) -> 1 as p -> inf
  const double time_factor = ip == 0.0 ? 0.0 : -ip * std::log(2.0 * iq / ip + 1.0);
  return iq * std::log(kPi) + time_factor + (2.0 * iq + ip) * log_r;
}

}  // namespace

LogScalar dual_strichartz_lower_bound(int k, double a, double p, double q) {
  const double lf = log_cone_factor(k, a, p, q);
  const double kk = k;
  return LogScalar::from_log(1, std::log(plateau_constant(a)) + 0.5 * std::log(kk) + kk + lf);
}

LogScalar plateau_cone_norm(int k, double a, double p, double q) {
  const double lf = log_cone_factor(k, a, p, q);
  return LogScalar::from_log(1, plateau_nonlinearity(k, a).lnmag() + lf);
}

}  // namespace critwave
