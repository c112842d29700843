#include "hlweak/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hlweak/certificate.hpp"
#include "hlweak/errors.hpp"
#include "hlweak/radial_measure.hpp"

namespace hlweak {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLevelSlack = 1e-9;

void require_dim(int d, int max_dim, const char* what) {
  if (d > max_dim) {
    throw DomainError(std::string(what) + ": dimension " + std::to_string(d) + " exceeds " +
                      std::to_string(max_dim));
  }
}

// Independent evaluation in linear doubles. Nothing here goes through the
// log-space quadrature or the incomplete beta routines.
class DirectMeasure {
 public:
  explicit DirectMeasure(const RadialDensity& density)
      : density_(density), d_(density.dim()), breaks_(density.breakpoints()) {}

  double ball_at_origin(double radius) const {
    return sphere_area(d_) * radial(0.0, radius, [](double) { return 1.0; });
  }

  double ball_offcenter(double R0, double r) const {
    double total = 0.0;
    if (r > R0) total += ball_at_origin(r - R0);
    const double lo = std::fabs(r - R0);
    const double hi = R0 + r;
    const int d = d_;
    const auto angular = [R0, r, d](double rho) {
      const double s = std::clamp((rho * rho + R0 * R0 - r * r) / (2.0 * rho * R0), -1.0, 1.0);
      const double theta_max = std::acos(s);
      if (d == 2) return theta_max;
      return boost::math::quadrature::gauss<double, 30>::integrate(
          [d](double th) { return std::pow(std::sin(th), d - 2); }, 0.0, theta_max);
    };
    total += sphere_area(d_ - 1) * radial(lo, hi, angular);
    return total;
  }

 private:
  static double sphere_area(int n) {
    // surface of the unit sphere in R^n
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
  }

  template <class Weight>
  double radial(double a, double b, Weight weight) const {
    if (!(b > a)) return 0.0;
    std::vector<double> cuts{a};
    for (double bp : breaks_) {
      if (bp > a && bp < b) cuts.push_back(bp);
    }
    cuts.push_back(b);
    boost::math::quadrature::tanh_sinh<double> integrator;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      sum += integrator.integrate(
          [&](double rho) {
            if (rho <= 0.0) return 0.0;
            const double lr = std::log(rho);
            return std::exp(density_.log_value_at_log_radius(lr) + (d_ - 1) * lr) * weight(rho);
          },
          cuts[i], cuts[i + 1]);
    }
    return sum;
  }

  const RadialDensity& density_;
  int d_;
  std::vector<double> breaks_;
};

std::optional<double> log_ratio(const RadialDensity& density, double v, double R,
                                double eval_radius, double r) {
  const LogValue den = log_ball_offcenter(density, eval_radius, r);
  if (den.is_zero()) return std::nullopt;
  const LogValue num = intersect_origin_ball(density, v * R, eval_radius, r);
  return num.is_zero() ? kNegInf : num.log() - den.log();
}

double log_alpha_of(const RadialDensity& density, double v, double R) {
  return lemma_certificate(density, 1.0, v, R).log_alpha();
}

}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

double SplitMix64::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

LogValue maximal_at_point(const RadialDensity& density, double v, double R, double eval_radius,
                          const MaximalOptions& options) {
  require_dim(density.dim(), 10, "maximal_at_point");
  if (options.grid < 64) throw DomainError("maximal_at_point: grid must be >= 64");
  if (!(v > 0.0 && v <= 1.0) || !(R > 0.0) || !(eval_radius >= 0.0)) {
    throw DomainError("maximal_at_point: need v in (0,1], R > 0, eval_radius >= 0");
  }
  const double H = R * std::sqrt(1.0 + v * v);
  const double lo = std::log(1e-3 * v * R);
  const double hi = std::log(10.0 * (R + H + eval_radius));
  const int n = options.grid;

  std::vector<double> xs(n), fs(n, kNegInf);
  std::vector<bool> valid(n, false);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * i / (n - 1);
    if (const auto f = log_ratio(density, v, R, eval_radius, std::exp(xs[i]))) {
      fs[i] = *f;
      valid[i] = true;
    }
  }
  if (std::none_of(valid.begin(), valid.end(), [](bool b) { return b; })) {
    throw DomainError("maximal_at_point: every grid radius has zero denominator");
  }
  int k = 0;
  for (int i = 0; i < n; ++i) {
    if (valid[i] && (!valid[k] || fs[i] > fs[k])) k = i;
  }
  double best = fs[k];
  if (options.refine_iterations > 0 && best > kNegInf) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = xs[std::max(k - 1, 0)];
    double b = xs[std::min(k + 1, n - 1)];
    const auto f = [&](double x) {
      return log_ratio(density, v, R, eval_radius, std::exp(x)).value_or(kNegInf);
    };
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < options.refine_iterations; ++it) {
      if (f1 < f2) {
        a = x1; x1 = x2; f1 = f2; x2 = a + phi * (b - a); f2 = f(x2);
      } else {
        b = x2; x2 = x1; f2 = f1; x1 = b - phi * (b - a); f1 = f(x1);
      }
      best = std::max({best, f1, f2});
    }
  }
  return LogValue::from_log(best);
}

LevelSetResult verify_level_set(const RadialDensity& density, double v, double R, int samples,
                                std::uint64_t seed, const MaximalOptions& options) {
  const int d = density.dim();
  require_dim(d, 6, "verify_level_set");
  if (samples < 1) throw DomainError("verify_level_set: samples must be >= 1");
  const double log_alpha = log_alpha_of(density, v, R);

  // M chi_{B(0,vR)} is radial, so only |x| matters.
  SplitMix64 rng(seed);
  std::vector<double> radii{R};
  for (int i = 0; i < samples; ++i) radii.push_back(R * std::pow(rng.uniform(), 1.0 / d));

  // A coarse grid already gives a lower estimate; the full grid is only
  // needed when the coarse one falls short.
  MaximalOptions coarse = options;
  coarse.grid = std::min(options.grid, 64);

  LevelSetResult out;
  out.ok = true;
  out.worst_margin = std::numeric_limits<double>::infinity();
  out.samples = static_cast<int>(radii.size());
  for (double rho : radii) {
    double margin = maximal_at_point(density, v, R, rho, coarse).log() - log_alpha;
    if (margin < -kLevelSlack && coarse.grid < options.grid) {
      margin = maximal_at_point(density, v, R, rho, options).log() - log_alpha;
    }
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_radius = rho;
    }
    if (margin < -kLevelSlack) out.ok = false;
  }
  return out;
}

LogValue empirical_weak_ratio(const RadialDensity& density, double p, double v, double R) {
  require_dim(density.dim(), 6, "empirical_weak_ratio");
  if (!(p >= 1.0) || !(v > 0.0 && v <= 1.0) || !(R > 0.0)) {
    throw DomainError("empirical_weak_ratio: need p >= 1, v in (0,1], R > 0");
  }
  const DirectMeasure m(density);
  const double inner = m.ball_at_origin(v * R);
  if (!(inner > 0.0)) throw EmptyTestFunctionError("empirical_weak_ratio: empty test function");
  const double level = m.ball_at_origin(R);
  const double denom = m.ball_offcenter(R, R * std::sqrt(1.0 + v * v));
  const double alpha = inner / (2.0 * denom);
  return LogValue::from_log(std::log(alpha) + (std::log(level) - std::log(inner)) / p);
}

std::pair<double, double> half_space_masses(const RadialDensity& density, double R0, double H,
                                            int samples, std::uint64_t seed) {
  const int d = density.dim();
  require_dim(d, 10, "half_space_masses");
  if (samples < 1 || !(R0 >= 0.0) || !(H > 0.0)) {
    throw DomainError("half_space_masses: need samples >= 1, R0 >= 0, H > 0");
  }
  SplitMix64 rng(seed);
  double right = 0.0, left = 0.0;
  std::vector<double> z(d);
  for (int i = 0; i < samples; ++i) {
    double norm2 = 0.0;
    for (double& zi : z) {
      zi = rng.normal();
      norm2 += zi * zi;
    }
    const double scale = H * std::pow(rng.uniform(), 1.0 / d) / std::sqrt(norm2);
    const double z1 = std::fabs(z[0]) * scale;
    const double rest2 = (norm2 - z[0] * z[0]) * scale * scale;
    right += density.value(std::sqrt((R0 + z1) * (R0 + z1) + rest2));
    left += density.value(std::sqrt((R0 - z1) * (R0 - z1) + rest2));
  }
  // Each reflected pair covers the ball twice.
  const double volume = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(H, d);
  return {volume * right / (2.0 * samples), volume * left / (2.0 * samples)};
}

bool OracleReport::passed(double tol) const {
  return level_set_ok && max_value.log() >= alpha.log() - kLevelSlack &&
         std::fabs(empirical_weak_ratio.log() - certificate_log_bound) <= tol;
}

OracleReport run_oracle(const RadialDensity& density, double p, double v, double R, int samples,
                        std::uint64_t seed, const MaximalOptions& options) {
  require_dim(density.dim(), 10, "oracle");
  const Certificate cert = lemma_certificate(density, p, v, R);
  OracleReport r;
  r.d = density.dim();
  r.density_id = density.id();
  r.p = p;
  r.v = v;
  r.point_radius = R;
  r.alpha = LogValue::from_log(cert.log_alpha());
  r.certificate_log_bound = cert.log_lower_bound;
  r.radius_grid_size = options.grid;
  r.rng_seed = seed;
  r.max_value = maximal_at_point(density, v, R, R, options);
  const LevelSetResult level = verify_level_set(density, v, R, samples, seed, options);
  r.level_set_ok = level.ok;
  r.worst_margin = level.worst_margin;
  r.samples = level.samples;
  r.empirical_weak_ratio = empirical_weak_ratio(density, p, v, R);
  return r;
}

}  // namespace hlweak
