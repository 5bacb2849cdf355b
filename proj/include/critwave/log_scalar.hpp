#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace critwave {

/// Real number stored as sign and natural log of its magnitude, so values
/// such as e^k for k in the thousands stay representable.
class LogScalar {
public:
  constexpr LogScalar() = default;

  static LogScalar from_double(double x);
  /// e^x
  static LogScalar exp_of(double x) { return LogScalar(1, x); }
  /// sign * e^lnmag
  static LogScalar from_log(int sign, double lnmag);
  static LogScalar zero() { return {}; }

  int sign() const noexcept { return sign_; }
  /// ln|x|; -inf for zero.
  double lnmag() const noexcept {
    return sign_ == 0 ? -std::numeric_limits<double>::infinity() : lnmag_;
  }
  bool is_zero() const noexcept { return sign_ == 0; }

  /// Nearest double; saturates to +-inf / 0 outside the double range.
  double to_double() const noexcept;

  LogScalar operator-() const noexcept { return LogScalar(-sign_, lnmag_); }
  LogScalar abs() const noexcept { return LogScalar(sign_ == 0 ? 0 : 1, lnmag_); }

  friend LogScalar operator+(const LogScalar& a, const LogScalar& b);
  friend LogScalar operator-(const LogScalar& a, const LogScalar& b) { return a + (-b); }
  friend LogScalar operator*(const LogScalar& a, const LogScalar& b);
  friend LogScalar operator/(const LogScalar& a, const LogScalar& b);

  LogScalar& operator+=(const LogScalar& o) { return *this = *this + o; }
  LogScalar& operator-=(const LogScalar& o) { return *this = *this - o; }
  LogScalar& operator*=(const LogScalar& o) { return *this = *this * o; }
  LogScalar& operator/=(const LogScalar& o) { return *this = *this / o; }

  /// Square root of a non-negative value.
  LogScalar sqrt() const;
  LogScalar pow(double p) const;

  friend bool operator<(const LogScalar& a, const LogScalar& b) noexcept;
  friend bool operator<=(const LogScalar& a, const LogScalar& b) noexcept { return !(b < a); }
  friend bool operator>(const LogScalar& a, const LogScalar& b) noexcept { return b < a; }
  friend bool operator>=(const LogScalar& a, const LogScalar& b) noexcept { return !(a < b); }
  friend bool operator==(const LogScalar& a, const LogScalar& b) noexcept {
    return a.sign_ == b.sign_ && (a.sign_ == 0 || a.lnmag_ == b.lnmag_);
  }

  std::string to_string() const;

private:
  constexpr LogScalar(int sign, double lnmag) : sign_(sign), lnmag_(lnmag) {}

  int sign_ = 0;
  double lnmag_ = 0.0;
};

/// log(e^a + e^b), exact for a or b = -inf.
double log_add_exp(double a, double b) noexcept;

}  // namespace critwave
