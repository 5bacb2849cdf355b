#pragma once

#include <cmath>
#include <limits>

namespace critwave {

/// e^x - 1 - x without cancellation near 0.
inline double expm1_minus_x(double x) noexcept {
  if (std::abs(x) < 0.25) {
    // x^2/2! + x^3/3! + ... ; 14 terms reach full precision on |x| < 1/4.
    double term = x * x / 2.0;
    double sum = term;
    for (int k = 3; k < 17; ++k) {
      term *= x / k;
      sum += term;
    }
    return sum;
  }
  return std::expm1(x) - x;
}

/// ln(e^x - 1) for x > 0.
inline double log_expm1(double x) noexcept {
  if (x < 700.0) return std::log(std::expm1(x));
  return x + std::log1p(-std::exp(-x));
}

/// ln(e^x - 1 - x) for x > 0.
inline double log_expm1_minus_x(double x) noexcept {
  if (x < 700.0) return std::log(expm1_minus_x(x));
  return x + std::log1p(-(1.0 + x) * std::exp(-x));
}

/// ln((e^d - 1 - d) / d) for d > 0, finite for arbitrarily large d.
inline double log_secant_excess(double d) noexcept {
  if (d <= 0.0) return -std::numeric_limits<double>::infinity();
  if (d < 700.0) return std::log(expm1_minus_x(d) / d);
  return d - std::log(d) + std::log1p(-(1.0 + d) * std::exp(-d));
}

}  // namespace critwave
