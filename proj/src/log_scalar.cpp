#include "critwave/log_scalar.hpp"

#include <cstdio>
#include <stdexcept>

namespace critwave {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_add_exp(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

LogScalar LogScalar::from_double(double x) {
  if (std::isnan(x)) throw std::domain_error("LogScalar: NaN");
  if (x == 0.0) return {};
  return LogScalar(x > 0 ? 1 : -1, std::log(std::abs(x)));
}

LogScalar LogScalar::from_log(int sign, double lnmag) {
  if (sign == 0 || lnmag == kNegInf) return {};
  return LogScalar(sign > 0 ? 1 : -1, lnmag);
}

double LogScalar::to_double() const noexcept {
  if (sign_ == 0) return 0.0;
  return sign_ * std::exp(lnmag_);
}

LogScalar operator+(const LogScalar& a, const LogScalar& b) {
  if (a.sign_ == 0) return b;
  if (b.sign_ == 0) return a;
  const bool a_big = a.lnmag_ >= b.lnmag_;
  const LogScalar& big = a_big ? a : b;
  const LogScalar& small = a_big ? b : a;
  const double ratio = std::exp(small.lnmag_ - big.lnmag_);
  if (a.sign_ == b.sign_) return LogScalar(big.sign_, big.lnmag_ + std::log1p(ratio));
  if (small.lnmag_ == big.lnmag_) return {};
  return LogScalar(big.sign_, big.lnmag_ + std::log1p(-ratio));
}

LogScalar operator*(const LogScalar& a, const LogScalar& b) {
  if (a.sign_ == 0 || b.sign_ == 0) return {};
  return LogScalar(a.sign_ * b.sign_, a.lnmag_ + b.lnmag_);
}

LogScalar operator/(const LogScalar& a, const LogScalar& b) {
  if (b.sign_ == 0) throw std::domain_error("LogScalar: division by zero");
  if (a.sign_ == 0) return {};
  return LogScalar(a.sign_ * b.sign_, a.lnmag_ - b.lnmag_);
}

LogScalar LogScalar::sqrt() const {
  if (sign_ < 0) throw std::domain_error("LogScalar: sqrt of negative value");
  if (sign_ == 0) return {};
  return LogScalar(1, 0.5 * lnmag_);
}

LogScalar LogScalar::pow(double p) const {
  if (sign_ < 0) throw std::domain_error("LogScalar: pow of negative value");
  if (sign_ == 0) return p == 0.0 ? LogScalar(1, 0.0) : LogScalar{};
  return LogScalar(1, p * lnmag_);
}

bool operator<(const LogScalar& a, const LogScalar& b) noexcept {
  if (a.sign_ != b.sign_) return a.sign_ < b.sign_;
  if (a.sign_ == 0) return false;
  return a.sign_ > 0 ? a.lnmag_ < b.lnmag_ : a.lnmag_ > b.lnmag_;
}

std::string LogScalar::to_string() const {
  if (sign_ == 0) return "0";
  // m * 10^e with m in [1, 10)
  const double log10 = lnmag_ / std::log(10.0);
  const double e = std::floor(log10);
  const double m = std::pow(10.0, log10 - e);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%.12ge%+.0f", sign_ < 0 ? "-" : "", m, e);
  return buf;
}

}  // namespace critwave
