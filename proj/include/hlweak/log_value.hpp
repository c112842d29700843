#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace hlweak {

/// A nonnegative extended real stored as its natural logarithm.
///
/// Zero is encoded by a log magnitude of -inf. Products, quotients and powers
/// are exact in log space; sums use log-sum-exp, which keeps full precision
/// while the operands are within 700 nats of each other and returns the larger
/// operand otherwise.
class LogValue {
 public:
  constexpr LogValue() = default;

  static constexpr LogValue from_log(double log_magnitude) {
    LogValue v;
    v.log_ = log_magnitude;
    return v;
  }
  static LogValue from_linear(double value);
  static constexpr LogValue zero() {
    return from_log(-std::numeric_limits<double>::infinity());
  }
  static constexpr LogValue one() { return from_log(0.0); }

  constexpr double log() const { return log_; }
  double linear() const { return std::exp(log_); }
  constexpr bool is_zero() const {
    return log_ == -std::numeric_limits<double>::infinity();
  }

  friend LogValue operator+(LogValue a, LogValue b);
  friend constexpr LogValue operator*(LogValue a, LogValue b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return from_log(a.log_ + b.log_);
  }
  /// Division by zero yields +inf in log magnitude.
  friend constexpr LogValue operator/(LogValue a, LogValue b) {
    if (a.is_zero()) return zero();
    return from_log(a.log_ - b.log_);
  }
  LogValue& operator+=(LogValue o) { return *this = *this + o; }
  LogValue& operator*=(LogValue o) { return *this = *this * o; }
  LogValue& operator/=(LogValue o) { return *this = *this / o; }

  LogValue pow(double exponent) const;

  /// this - other, for other <= this. Throws DomainError when the difference
  /// would be negative by more than `slack` in log magnitude.
  LogValue minus(LogValue other, double slack = 1e-12) const;

  friend constexpr auto operator<=>(LogValue a, LogValue b) {
    return a.log_ <=> b.log_;
  }
  friend constexpr bool operator==(LogValue a, LogValue b) {
    return a.log_ == b.log_;
  }

 private:
  double log_ = -std::numeric_limits<double>::infinity();
};

/// Comparison tolerance used by invariant checks on log magnitudes.
inline constexpr double kLogCompareTol = 1e-10;

/// a <= b up to `tol` in log magnitude.
inline bool log_le(LogValue a, LogValue b, double tol = kLogCompareTol) {
  return a.is_zero() || a.log() <= b.log() + tol;
}

}  // namespace hlweak
