#include "hlweak/log_value.hpp"

#include <algorithm>

#include "hlweak/errors.hpp"
#include "hlweak/specfun.hpp"

namespace hlweak {

LogValue LogValue::from_linear(double value) {
  if (value < 0.0 || std::isnan(value)) {
    throw DomainError("LogValue::from_linear: negative or NaN value");
  }
  return from_log(std::log(value));
}

LogValue operator+(LogValue a, LogValue b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const double hi = std::max(a.log_, b.log_);
  const double lo = std::min(a.log_, b.log_);
  if (hi == std::numeric_limits<double>::infinity()) return LogValue::from_log(hi);
  if (hi - lo > 700.0) return LogValue::from_log(hi);
  return LogValue::from_log(hi + std::log1p(std::exp(lo - hi)));
}

LogValue LogValue::pow(double exponent) const {
  if (exponent == 0.0) return one();
  if (is_zero()) {
    if (exponent < 0.0) throw DomainError("LogValue::pow: zero to a negative power");
    return zero();
  }
  return from_log(log_ * exponent);
}

LogValue LogValue::minus(LogValue other, double slack) const {
  if (other.is_zero()) return *this;
  const double diff = other.log_ - log_;
  if (diff > slack) throw DomainError("LogValue::minus: negative difference");
  if (diff >= 0.0) return zero();
  return from_log(log_ + log1mexp(diff));
}

}  // namespace hlweak
