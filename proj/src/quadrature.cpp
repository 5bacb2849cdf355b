#include "critwave/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace critwave {

namespace {

// f(x, d) receives the node and its distance d > 0 to the nearer endpoint;
// `keep_all` evaluates nodes that round onto an endpoint as well.
QuadratureResult tanh_sinh_impl(const std::function<double(double, double)>& f, double a, double b,
                                double rel_tol, int max_level, bool keep_all) {
  QuadratureResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  constexpr double kTMax = 3.5;

  // Contribution of the node pair at +-t (weight already includes h-free part).
  auto pair_sum = [&](double t) {
    const double s = kHalfPi * std::sinh(t);
    const double ch = std::cosh(s);
    const double w = half * kHalfPi * std::cosh(t) / (ch * ch);
    // distance from the nearer endpoint, computed without cancellation
    const double delta = half / (std::exp(s) * ch);
    double sum = 0.0;
    if (t == 0.0) {
      sum = w * f(mid, half);
      ++res.evaluations;
      return sum;
    }
    const double xr = b - delta;
    const double xl = a + delta;
    if (keep_all || (xr > a && xr < b)) {
      sum += w * f(xr, delta);
      ++res.evaluations;
    }
    if (keep_all || (xl > a && xl < b)) {
      sum += w * f(xl, delta);
      ++res.evaluations;
    }
    return sum;
  };

  double h = 1.0;
  double sum = 0.0;
  for (double t = 0.0; t <= kTMax; t += h) sum += pair_sum(t);
  double estimate = h * sum;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double fresh = 0.0;
    for (double t = h; t <= kTMax; t += 2.0 * h) fresh += pair_sum(t);
    sum += fresh;
    const double next = h * sum;
    res.error_estimate = std::abs(next - estimate);
    res.levels = level;
    estimate = next;
    if (level >= 3 && res.error_estimate <= rel_tol * std::abs(next)) {
      res.converged = true;
      break;
    }
  }
  res.value = estimate;
  return res;
}

}  // namespace

QuadratureResult tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, int max_level) {
  return tanh_sinh_impl([&](double x, double) { return f(x); }, a, b, rel_tol, max_level, false);
}

QuadratureResult tanh_sinh_complement(const std::function<double(double, double)>& f, double a,
                                      double b, double rel_tol, int max_level) {
  return tanh_sinh_impl(f, a, b, rel_tol, max_level, true);
}

namespace {

struct SimpsonContext {
  const std::function<double(double)>& f;
  int evaluations = 0;
  bool hit_depth = false;
};

double simpson_step(SimpsonContext& ctx, double a, double fa, double m, double fm, double b,
                    double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = ctx.f(lm);
  const double frm = ctx.f(rm);
  ctx.evaluations += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) {
    ctx.hit_depth = true;
    return left + right + delta / 15.0;
  }
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(ctx, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(ctx, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth) {
  SimpsonContext ctx{f};
  QuadratureResult res;
  // Four initial panels so features near one end are not skipped.
  constexpr int kPanels = 4;
  const double step = (b - a) / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + p * step;
    const double hi = p + 1 == kPanels ? b : lo + step;
    const double m = 0.5 * (lo + hi);
    const double flo = f(lo), fm = f(m), fhi = f(hi);
    ctx.evaluations += 3;
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    res.value += simpson_step(ctx, lo, flo, m, fm, hi, fhi, whole, abs_tol / kPanels, max_depth);
  }
  res.evaluations = ctx.evaluations;
  res.converged = !ctx.hit_depth;
  return res;
}

}  // namespace critwave
