#include "hlweak/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hlweak/errors.hpp"

namespace hlweak {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Stirling correction lnGamma(z) - [(z-1/2) ln z - z + ln(2pi)/2], z >= 10.
double stirling_tail(double z) {
  const double r = 1.0 / z;
  const double r2 = r * r;
  return r * (1.0 / 12.0 -
              r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
}

// lnGamma(x + h) - lnGamma(x), stable when x is large and h is O(1).
double log_gamma_ratio(double x, double h) {
  if (x < 10.0 || x + h < 10.0) return log_gamma(x + h) - log_gamma(x);
  return (x - 0.5) * std::log1p(h / x) + h * std::log(x + h) - h +
         stirling_tail(x + h) - stirling_tail(x);
}

double log_beta_fn(double a, double b) {
  // ln B(a,b) = lnGamma(a) + lnGamma(b) - lnGamma(a+b); difference the large
  // argument against a+b to avoid cancellation.
  if (a >= b) return log_gamma(b) - log_gamma_ratio(a, b);
  return log_gamma(a) - log_gamma_ratio(b, a);
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 100000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw PrecisionError("log_beta_inc: continued fraction did not converge");
}

// ln I_x(a,b) given both x and y = 1 - x, so callers can supply y without
// cancellation.
double log_beta_inc_xy(double a, double b, double x, double y) {
  if (x <= 0.0) return kNegInf;
  if (y <= 0.0) return 0.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double log_front = a * std::log(x) + b * std::log(y) - log_beta_fn(a, b);
    return log_front + std::log(beta_continued_fraction(a, b, x) / a);
  }
  const double log_front = b * std::log(y) + a * std::log(x) - log_beta_fn(a, b);
  const double log_complement =
      log_front + std::log(beta_continued_fraction(b, a, y) / b);
  return log1mexp(std::min(log_complement, 0.0));
}

void require_dim(int d, const char* who) {
  if (d < 1) throw DomainError(std::string(who) + ": dimension must be >= 1");
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log1mexp(double x) {
  if (x > 0.0) throw DomainError("log1mexp: argument must be <= 0");
  if (x > -std::numbers::ln2) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

double log_beta_inc(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("log_beta_inc: a, b must be positive");
  if (x < 0.0 || x > 1.0) throw DomainError("log_beta_inc: x outside [0,1]");
  return log_beta_inc_xy(a, b, x, 1.0 - x);
}

LogValue log_ball_volume(int d) {
  require_dim(d, "log_ball_volume");
  return LogValue::from_log(0.5 * d * std::log(std::numbers::pi) - log_gamma(1.0 + 0.5 * d));
}

LogValue log_sphere_area(int d) {
  require_dim(d, "log_sphere_area");
  return LogValue::from_log(std::log(static_cast<double>(d)) + log_ball_volume(d).log());
}

CapSpec CapSpec::from_cosine(int dim, double s) {
  CapSpec cap{dim, s, std::sqrt((1.0 - s) * (1.0 + s))};
  cap.validate();
  return cap;
}

void CapSpec::validate() const {
  if (dim < 2) throw DomainError("CapSpec: dimension must be >= 2");
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("CapSpec: s must lie in [0, 1)");
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("CapSpec: t must lie in (0, 1]");
  if (std::fabs(s * s + t * t - 1.0) > 1e-12) throw DomainError("CapSpec: s^2 + t^2 != 1");
}

LogValue cap_area_exact(const CapSpec& cap) {
  cap.validate();
  if (cap.s == 0.0) return LogValue::from_log(-std::numbers::ln2);
  // sigma_N(C(s)) = I_{t^2}((d-1)/2, 1/2) / 2
  const double a = 0.5 * (cap.dim - 1);
  return LogValue::from_log(log_beta_inc_xy(a, 0.5, cap.t * cap.t, cap.s * cap.s) -
                            std::numbers::ln2);
}

double log_cap_upper_constant(int d, double s) {
  if (d < 2) throw DomainError("cap bound: dimension must be >= 2");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("cap bound: s must lie in (0, 1)");
  const double t = std::sqrt((1.0 - s) * (1.0 + s));
  return 0.5 * std::log1p(1.0 / d) - std::log(t * s) -
         0.5 * std::log(2.0 * std::numbers::pi * d);
}

std::pair<LogValue, LogValue> cap_area_bounds(const CapSpec& cap) {
  cap.validate();
  if (cap.s == 0.0) throw DomainError("cap_area_bounds: upper bound undefined for s = 0");
  const double d = cap.dim;
  const double lower = (d - 1.0) * std::log(cap.t) - 0.5 * std::log(2.0 * std::numbers::pi * d);
  const double upper = lower - std::log(cap.s) + 0.5 * std::log1p(1.0 / d);
  return {LogValue::from_log(lower), LogValue::from_log(upper)};
}

LogValue log_sphere_fraction(int d, double s) {
  require_dim(d, "log_sphere_fraction");
  if (s > 1.0) return LogValue::zero();
  if (s <= -1.0) return LogValue::one();
  if (d == 1) return LogValue::from_log(-std::numbers::ln2);
  if (s >= 1.0) return LogValue::zero();
  if (s >= 0.0) return cap_area_exact(CapSpec::from_cosine(d, s));
  const double cap = cap_area_exact(CapSpec::from_cosine(d, -s)).log();
  return LogValue::from_log(log1mexp(cap));
}

bool gamma_ratio_bounds_hold(int d) {
  require_dim(d, "gamma_ratio_bounds_hold");
  constexpr double kSlack = 1e-12;
  const double log_ratio = log_gamma_ratio(0.5 + 0.5 * d, 0.5);
  const double lo = 0.5 * std::log(0.5 * d);
  const double hi = 0.5 * std::log(0.5 * (d + 1));
  return log_ratio - lo >= -kSlack && hi - log_ratio >= -kSlack;
}

}  // namespace hlweak
