#include "critwave/odelab.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "critwave/concentrators.hpp"
#include "critwave/errors.hpp"
#include "critwave/functionals.hpp"
#include "critwave/quadrature.hpp"
#include "critwave/special.hpp"

namespace critwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * kPi;
const double kSqrtFourPi = std::sqrt(kFourPi);

double guarded_arg(double y, const char* where) {
  const double arg = kFourPi * y * y;
  if (arg > kOverflowGuard) {
    char msg[200];
    std::snprintf(msg, sizeof msg, "%s: 4 pi y^2 = %.6g exceeds %.0f at y = %.6g; use the log variant",
                  where, arg, kOverflowGuard, y);
    throw OverflowError(msg, y);
  }
  return arg;
}

double accel(double y) { return -y * std::expm1(kFourPi * y * y); }

OdeState verlet_step(const OdeState& s, double h) {
  const double vh = s.v + 0.5 * h * accel(s.y);
  const double y = s.y + h * vh;
  return {y, vh + 0.5 * h * accel(y), s.t + h};
}

OdeState rk4_step(const OdeState& s, double h) {
  const double k1y = s.v, k1v = accel(s.y);
  const double k2y = s.v + 0.5 * h * k1v, k2v = accel(s.y + 0.5 * h * k1y);
  const double k3y = s.v + 0.5 * h * k2v, k3v = accel(s.y + 0.5 * h * k2y);
  const double k4y = s.v + h * k3v, k4v = accel(s.y + h * k3y);
  return {s.y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
          s.v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v), s.t + h};
}

// Root in [0, 1] of the cubic Hermite interpolant through (p0, d0), (p1, d1)
// on a unit interval, given p0 and p1 of opposite sign (or p1 = 0).
double hermite_root(double p0, double d0, double p1, double d1) {
  auto value = [&](double s) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * p1 +
           (s3 - s2) * d1;
  };
  double lo = 0.0, hi = 1.0;
  const bool rising = p0 < p1;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool below = value(mid) < 0.0;
    if (below == rising) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ln Q where E(a^2) - E(u^2) = d Q, b = u^2, d = a^2 - u^2.
double log_q(double b, double d) {
  const double lhs = b > 0.0 ? std::log(-std::expm1(-b)) : -INFINITY;
  return b + log_add_exp(lhs, log_secant_excess(d));
}

void require_positive_amplitude(double y0, const char* where) {
  if (!(y0 > 0.0) || !std::isfinite(y0)) {
    char msg[120];
    std::snprintf(msg, sizeof msg, "%s: y0 = %.6g does not oscillate (need y0 > 0)", where, y0);
    throw DomainError(msg);
  }
}

}  // namespace

double force(double y) { return y * std::expm1(guarded_arg(y, "force")); }

double potential_F(double y) {
  return expm1_minus_x(guarded_arg(y, "potential_F")) / (2.0 * kFourPi);
}

LogScalar force_log(double y) {
  if (y == 0.0) return LogScalar::zero();
  const double arg = kFourPi * y * y;
  return LogScalar::from_log(y > 0 ? 1 : -1, std::log(std::abs(y)) + log_expm1(arg));
}

LogScalar potential_F_log(double y) {
  if (y == 0.0) return LogScalar::zero();
  return LogScalar::from_log(1, log_expm1_minus_x(kFourPi * y * y) - std::log(2.0 * kFourPi));
}

double first_integral(double y, double v) { return v * v + 2.0 * potential_F(y); }

OdeTrajectory integrate(OdeState s0, double duration, double dt, Integrator method,
                        int record_every) {
  if (!(dt > 0.0)) throw PreconditionError("integrate: dt must be > 0");
  if (record_every < 1) throw PreconditionError("integrate: record_every must be >= 1");
  if (kFourPi * s0.y * s0.y > 600.0) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "integrate: 4 pi y0^2 = %.6g exceeds 600; use the quadrature pipeline",
                  kFourPi * s0.y * s0.y);
    throw OverflowError(msg, s0.y);
  }
  OdeTrajectory traj;
  traj.method = method;
  const long steps = duration == 0.0 ? 0 : std::max(1L, long(std::ceil(std::abs(duration) / dt - 1e-9)));
  const double h = steps == 0 ? 0.0 : duration / double(steps);
  traj.dt = h;
  const double h0 = first_integral(s0.y, s0.v);
  auto record = [&](const OdeState& s) {
    const double drift = h0 > 0.0 ? std::abs(first_integral(s.y, s.v) - h0) / h0 : 0.0;
    traj.samples.push_back(s);
    traj.h_drift.push_back(drift);
    traj.max_drift = std::max(traj.max_drift, drift);
  };
  record(s0);
  OdeState s = s0;
  const double t0 = s0.t;
  for (long i = 1; i <= steps; ++i) {
    s = method == Integrator::Verlet ? verlet_step(s, h) : rk4_step(s, h);
    s.t = t0 + h * double(i);
    if (i % record_every == 0 || i == steps) record(s);
  }
  return traj;
}

OdeTrajectory integrate(double y0, double duration, double dt, Integrator method,
                        int record_every) {
  return integrate(OdeState{y0, 0.0, 0.0}, duration, dt, method, record_every);
}

LogScalar level_crossing_integral(double a, double u1) {
  if (!(a > 0.0) || !(u1 >= 0.0) || u1 > a)
    throw PreconditionError("level_crossing_integral: need 0 <= u1 <= a, a > 0");
  if (u1 == a) return LogScalar::zero();
  // u = a - w^2 turns the inverse square root at u = a into a smooth factor:
  // du / sqrt(E(a^2) - E(u^2)) = 2 dw / (sqrt(2a - w^2) sqrt(Q)).
  const double w_end = std::sqrt(a - u1);
  auto log_g = [a](double w) {
    const double w2 = w * w;
    const double u = a - w2;
    const double d = w2 * (2.0 * a - w2);
    return std::log(2.0) - 0.5 * std::log(2.0 * a - w2) - 0.5 * log_q(u * u, d);
  };
  // g is increasing in w, so scaling by its endpoint value keeps the
  // integrand in (0, 1] for any a.
  const double scale = log_g(w_end);
  const QuadratureResult r =
      tanh_sinh([&](double w) { return std::exp(log_g(w) - scale); }, 0.0, w_end, 1e-9, 12);
  return LogScalar::from_log(1, std::log(r.value) + scale);
}

LogScalar period_log(double y0) {
  require_positive_amplitude(std::abs(y0), "period");
  return LogScalar::from_double(4.0) * level_crossing_integral(kSqrtFourPi * std::abs(y0), 0.0);
}

double period(double y0) { return period_log(y0).to_double(); }

LogScalar time_to_level_log(double y0, double y1) {
  require_positive_amplitude(y0, "time_to_level");
  if (!(y1 >= 0.0 && y1 <= y0)) throw PreconditionError("time_to_level: need 0 <= y1 <= y0");
  return level_crossing_integral(kSqrtFourPi * y0, kSqrtFourPi * y1);
}

double time_to_level(double y0, double y1) { return time_to_level_log(y0, y1).to_double(); }

LogScalar velocity_sq(double y0, double y) {
  const double a2 = kFourPi * y0 * y0;
  const double b = kFourPi * y * y;
  const double d = a2 - b;
  if (d < 0.0) throw PreconditionError("velocity_sq: |y| must not exceed y0");
  if (d == 0.0) return LogScalar::zero();
  return LogScalar::from_log(1, std::log(d) + log_q(b, d) - std::log(kFourPi));
}

double detect_return_time(double y0, double dt) {
  require_positive_amplitude(y0, "detect_return_time");
  guarded_arg(y0, "detect_return_time");
  OdeState s{y0, 0.0, 0.0};
  const long max_steps = 2'000'000'000L;
  for (long i = 0; i < max_steps; ++i) {
    const OdeState next = verlet_step(s, dt);
    if (s.v > 0.0 && next.v <= 0.0 && next.y > 0.0) {
      const double frac = hermite_root(s.v, dt * accel(s.y), next.v, dt * accel(next.y));
      return s.t + frac * dt;
    }
    s = next;
  }
  throw Error("detect_return_time: no return detected");
}

double detect_level_time(double y0, double y1, double dt) {
  require_positive_amplitude(y0, "detect_level_time");
  if (!(y1 < y0)) throw PreconditionError("detect_level_time: need y1 < y0");
  guarded_arg(y0, "detect_level_time");
  OdeState s{y0, 0.0, 0.0};
  const long max_steps = 2'000'000'000L;
  for (long i = 0; i < max_steps; ++i) {
    const OdeState next = verlet_step(s, dt);
    if (s.y > y1 && next.y <= y1) {
      const double frac = hermite_root(s.y - y1, dt * s.v, next.y - y1, dt * next.v);
      return s.t + frac * dt;
    }
    s = next;
  }
  throw Error("detect_level_time: level not reached");
}

LemmaIResult lemma_I(double a, int k) {
  if (!(a >= 1.0)) throw PreconditionError("lemma_I: need a >= 1");
  if (k < 1) throw PreconditionError("lemma_I: need k >= 1");
  LemmaIResult r;
  r.value = radial_moser_integral(a, k);
  r.bound = LogScalar::from_log(1, std::log(2.0) + (a * a - 1.0) * k);
  r.holds = r.value <= r.bound;
  return r;
}

LemmaT3Result lemma_T3(double A) {
  if (!(A > 1.0)) throw PreconditionError("lemma_T3: need A > 1");
  LemmaT3Result r;
  r.lhs = level_crossing_integral(A, 0.0);
  const double bracket = A - 1.0 / A + A / (A * A - 1.0);
  r.rhs = LogScalar::from_log(1, 0.5 * std::log1p(-2.0 / std::numbers::e) - 0.5 * A * A +
                                     std::log(bracket));
  r.holds = r.lhs <= r.rhs;
  return r;
}

DecoherenceReport decoherence(int k, double eta) {
  if (k < 8) throw PreconditionError("decoherence: need k >= 8");
  if (!(eta > 0.0 && eta < 1.0)) throw PreconditionError("decoherence: eta must lie in (0, 1)");
  DecoherenceReport rep;
  const double kk = k;
  rep.k = k;
  rep.eta = eta;
  rep.phi0 = (1.0 + 1.0 / kk) * std::sqrt(kk / kFourPi);
  rep.psi0 = std::sqrt(kk / kFourPi);
  rep.phi_tk = rep.phi0 - 1.0 / rep.phi0;
  rep.T_k = period_log(rep.phi0);

  if (rep.phi_tk >= 0.0) {
    rep.t_k = time_to_level_log(rep.phi0, rep.phi_tk);
  } else {
    // The level lies below zero: a quarter period down, then back off.
    rep.t_k = rep.T_k / LogScalar::from_double(2.0) - time_to_level_log(rep.phi0, -rep.phi_tk);
    rep.valid = false;
    rep.notes.emplace_back("level phi0 - 1/phi0 is negative; t_k exceeds a quarter period");
  }
  rep.tk_before_quarter = rep.t_k < rep.T_k / LogScalar::from_double(4.0);

  // psi(t_k): time_to_level(psi0, .) decreases from its quarter period at 0 to 0 at psi0.
  const LogScalar psi_quarter = time_to_level_log(rep.psi0, 0.0);
  if (!(rep.t_k < psi_quarter)) {
    rep.valid = false;
    rep.notes.emplace_back("t_k exceeds the quarter period of psi; psi(t_k) clamped to 0");
    rep.psi_tk = 0.0;
  } else {
    double lo = 0.0, hi = rep.psi0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (time_to_level_log(rep.psi0, mid) > rep.t_k) lo = mid;
      else hi = mid;
    }
    rep.psi_tk = 0.5 * (lo + hi);
  }

  rep.vel_phi_sq = velocity_sq(rep.phi0, rep.phi_tk);
  rep.vel_psi_sq = velocity_sq(rep.psi0, rep.psi_tk);
  // Both orbits are still descending, so both velocities are negative.
  const LogScalar vel_phi = -rep.vel_phi_sq.sqrt();
  const LogScalar vel_psi = -rep.vel_psi_sq.sqrt();
  const LogScalar gap = vel_phi - vel_psi;
  rep.gap_sq = gap * gap;
  rep.vel_sum = (vel_phi + vel_psi).abs();

  const LogScalar ek = LogScalar::exp_of(kk);
  rep.gap_over_ek = (rep.gap_sq / ek).to_double();
  rep.cone_l2_lower = (LogScalar::from_double(0.25 * kPi * eta * eta) * rep.gap_sq / ek).to_double();
  rep.tk_scaled = (rep.t_k * LogScalar::exp_of(0.5 * kk)).to_double();
  rep.tk_within_cone = rep.tk_scaled <= 0.5 * eta;
  const double denom = kk * kk + (2.0 - kFourPi) * kk + 1.0;
  if (denom > 0.0) {
    const double envelope_ln =
        8.0 * kPi - 0.5 * kk - 0.5 * std::log(kk) + std::log(kk * (kk + 1.0) / denom);
    rep.tk_envelope_ratio = (rep.t_k / LogScalar::exp_of(envelope_ln)).to_double();
  } else {
    rep.tk_envelope_ratio = std::numeric_limits<double>::quiet_NaN();
    rep.notes.emplace_back("t_k envelope undefined: k^2 + (2 - 4 pi) k + 1 <= 0");
  }
  const double plus = 1.0 + 1.0 / kk;
  rep.Tk_scaled =
      (rep.T_k * LogScalar::exp_of(0.5 * kk * plus * plus - 0.5 * std::log(kk))).to_double();
  rep.vel_sum_over_ek2 = (rep.vel_sum / LogScalar::exp_of(0.5 * kk)).to_double();
  return rep;
}

}  // namespace critwave
