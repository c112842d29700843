#include "hlweak/radial_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hlweak/errors.hpp"
#include "hlweak/specfun.hpp"

namespace hlweak {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log of the fraction of the sphere |y| = rho inside B(R0 e1, r), for rho in
// the open cap range (|R0 - r|, R0 + r). 1 - s and 1 + s are formed from
// factored differences so the cap stays accurate near both ends.
double log_cap_fraction(int d, double rho, double R0, double r) {
  const double denom = 2.0 * rho * R0;
  const double one_minus_s = (r - rho + R0) * (r + rho - R0) / denom;
  const double one_plus_s = (rho + R0 - r) * (rho + R0 + r) / denom;
  if (one_minus_s <= 0.0) return kNegInf;
  if (one_plus_s <= 0.0) return 0.0;
  if (d == 1) return -std::numbers::ln2;
  // t from the same side as s so that s^2 + t^2 = 1 to rounding
  double s, t;
  if (one_minus_s < 1.0) {
    s = 1.0 - one_minus_s;
    t = std::sqrt(std::min(1.0, one_minus_s * (2.0 - one_minus_s)));
  } else {
    s = one_plus_s - 1.0;
    t = std::sqrt(std::min(1.0, one_plus_s * (2.0 - one_plus_s)));
  }
  if (s >= 0.0) {
    if (t >= 1.0) return -std::numbers::ln2;
    return cap_area_exact(CapSpec{d, s, t}).log();
  }
  return log1mexp(cap_area_exact(CapSpec{d, -s, t}).log());
}

// int_{lo}^{hi} f(rho) rho^{d-1} F(rho) d rho, F the fraction of the rho
// sphere inside B(R0 e1, r). No sphere-area factor.
LogValue shell_ball_mass(const RadialDensity& density, double lo, double hi, double R0,
                         double r, const QuadratureOptions& options) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  if (!(R0 >= 0.0) || std::isinf(R0)) throw DomainError("center radius must be finite and >= 0");
  lo = std::max(lo, 0.0);
  if (!(hi > lo)) return LogValue::zero();
  if (R0 == 0.0) return density.log_radial_mass(lo, std::min(hi, r));

  LogValue total = LogValue::zero();
  // Spheres entirely inside the ball.
  if (r > R0) total += density.log_radial_mass(lo, std::min(hi, r - R0));

  double a = std::max(lo, std::fabs(R0 - r));
  const double b = std::min(hi, R0 + r);
  if (!(b > a)) return total;
  const double support = density.support_radius();
  const double b_eff = std::min(b, support);
  if (!(b_eff > a)) return total;

  const int d = density.dim();
  const double log_b = std::log(b_eff);
  double log_a;
  if (a > 0.0) {
    log_a = std::log(a);
  } else {
    // The cap range reaches the origin (R0 == r); cut where the remaining
    // mass is negligible.
    log_a = log_b - std::min(100.0 / density.small_radius_exponent(), 700.0);
    a = std::exp(log_a);
  }

  std::vector<double> points{log_a};
  for (double bp : density.breakpoints()) {
    if (bp > a && bp < b_eff) points.push_back(std::log(bp));
  }
  points.push_back(log_b);

  const auto integrand = [&density, d, R0, r](double sigma) {
    const double lf = density.log_value_at_log_radius(sigma);
    if (lf == kNegInf) return kNegInf;
    const double rho = std::exp(sigma);
    return lf + d * sigma + log_cap_fraction(d, rho, R0, r);
  };
  total += integrate_log(integrand, points, options);
  return total;
}

}  // namespace

LogValue log_ball_at_origin(const RadialDensity& density, double R) {
  if (!(R > 0.0)) throw DomainError("log_ball_at_origin: R must be positive");
  return log_sphere_area(density.dim()) * density.log_radial_mass(0.0, R);
}

LogValue growth_h(const RadialDensity& density, double u, double R) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("growth_h: u must lie in (0, 1)");
  if (!(R > 0.0)) throw DomainError("growth_h: R must be positive");
  const LogValue inner = density.log_radial_mass(0.0, u * R);
  if (inner.is_zero()) throw UndefinedGrowthError("growth_h: mu(B(0, uR)) = 0");
  const LogValue outer = inner + density.log_radial_mass(u * R, R);
  return outer / inner;
}

LogValue log_ball_offcenter(const RadialDensity& density, double center_radius, double r,
                            const QuadratureOptions& options) {
  if (!(r > 0.0)) throw DomainError("log_ball_offcenter: r must be positive");
  return log_sphere_area(density.dim()) *
         shell_ball_mass(density, 0.0, kInf, center_radius, r, options);
}

LogValue intersect_origin_ball(const RadialDensity& density, double rho_max,
                               double center_radius, double r,
                               const QuadratureOptions& options) {
  if (!(rho_max > 0.0)) throw DomainError("intersect_origin_ball: rho_max must be positive");
  if (!(r > 0.0)) throw DomainError("intersect_origin_ball: r must be positive");
  return log_sphere_area(density.dim()) *
         shell_ball_mass(density, 0.0, rho_max, center_radius, r, options);
}

LogValue offcenter_outside_origin_ball(const RadialDensity& density, double rho_min,
                                       double center_radius, double r,
                                       const QuadratureOptions& options) {
  if (!(rho_min >= 0.0)) throw DomainError("offcenter_outside_origin_ball: rho_min must be >= 0");
  if (!(r > 0.0)) throw DomainError("offcenter_outside_origin_ball: r must be positive");
  return log_sphere_area(density.dim()) *
         shell_ball_mass(density, rho_min, kInf, center_radius, r, options);
}

bool GrowthProfile::within_bounds(double slack) const {
  const double cap = -dim * std::log(u);
  return std::all_of(samples.begin(), samples.end(), [&](const auto& s) {
    return s.second.log() >= -slack && s.second.log() <= cap + slack;
  });
}

GrowthProfile sample_growth(const RadialDensity& density, double u, const std::vector<double>& radii) {
  GrowthProfile profile{u, density.dim(), {}};
  profile.samples.reserve(radii.size());
  for (double R : radii) profile.samples.emplace_back(R, growth_h(density, u, R));
  return profile;
}

}  // namespace hlweak
