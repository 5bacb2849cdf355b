#pragma once

#include <functional>

namespace critwave {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int levels = 0;          // tanh-sinh refinement levels used
  int evaluations = 0;
  bool converged = false;
};

/// Double-exponential (tanh-sinh) quadrature on [a, b]. The step is halved
/// until two successive levels agree to `rel_tol` or `max_level` is reached.
/// The integrand must be finite on the open interval; endpoints are never
/// evaluated.
QuadratureResult tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-9, int max_level = 12);

/// Tanh-sinh with f(x, d), where d > 0 is the exact distance from x to the
/// nearer endpoint. Nodes closer to an endpoint than its rounding are kept, so
/// integrands like 1/sqrt(b - x) written in terms of d lose no tail mass.
QuadratureResult tanh_sinh_complement(const std::function<double(double, double)>& f, double a,
                                      double b, double rel_tol = 1e-9, int max_level = 12);

/// Adaptive Simpson on [a, b] to absolute tolerance `abs_tol`.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol = 1e-12, int max_depth = 60);

}  // namespace critwave
