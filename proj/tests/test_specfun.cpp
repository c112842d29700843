#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "doctest.h"
#include "hlweak/errors.hpp"
#include "hlweak/log_value.hpp"
#include "hlweak/specfun.hpp"

using namespace hlweak;

namespace {

// ln(n!) from an exact base-1e9 big integer.
double log_factorial_exact(int n) {
  std::vector<std::uint64_t> limbs{1};
  for (int k = 2; k <= n; ++k) {
    std::uint64_t carry = 0;
    for (auto& limb : limbs) {
      const std::uint64_t x = limb * static_cast<std::uint64_t>(k) + carry;
      limb = x % 1000000000ULL;
      carry = x / 1000000000ULL;
    }
    while (carry) {
      limbs.push_back(carry % 1000000000ULL);
      carry /= 1000000000ULL;
    }
  }
  const std::size_t n_limbs = limbs.size();
  double lead = static_cast<double>(limbs.back());
  if (n_limbs >= 2) lead += limbs[n_limbs - 2] / 1e9;
  if (n_limbs >= 3) lead += limbs[n_limbs - 3] / 1e18;
  return std::log(lead) + 9.0 * (n_limbs - 1) * std::log(10.0);
}

double sphere_area_linear(int n) {
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

}  // namespace

TEST_CASE("log_gamma basics") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5723649429247001).epsilon(1e-14));
  CHECK(log_gamma(101.0) == doctest::Approx(log_factorial_exact(100)).epsilon(1e-13));
  CHECK(log_gamma(501.0) == doctest::Approx(log_factorial_exact(500)).epsilon(1e-13));
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-2.5), DomainError);
}

TEST_CASE("log_gamma relative accuracy against std::lgamma over [0.5, 1e6]") {
  for (double x = 0.5; x <= 1e6; x *= 1.37) {
    CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
  }
}

TEST_CASE("ball volume and sphere area") {
  CHECK(log_ball_volume(1).log() == doctest::Approx(std::log(2.0)));
  CHECK(log_ball_volume(2).log() == doctest::Approx(std::log(std::numbers::pi)));
  CHECK(log_sphere_area(2).log() == doctest::Approx(std::log(2.0 * std::numbers::pi)));
  CHECK(log_sphere_area(3).log() == doctest::Approx(std::log(4.0 * std::numbers::pi)));
  CHECK_THROWS_AS(log_ball_volume(0), DomainError);
  CHECK_THROWS_AS(log_sphere_area(-1), DomainError);

  // Monte Carlo volume of the unit 3-ball
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 400000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    const double x = unif(gen), y = unif(gen), z = unif(gen);
    inside += x * x + y * y + z * z <= 1.0;
  }
  const double mc = 8.0 * inside / n;
  CHECK(std::exp(log_ball_volume(3).log()) == doctest::Approx(mc).epsilon(1e-2));
  CHECK(log_ball_volume(3).log() == doctest::Approx(std::log(4.0 * std::numbers::pi / 3.0)));
}

TEST_CASE("sphere area recursion through the sine integral") {
  double area = 2.0 * std::numbers::pi;  // S^1
  for (int d = 3; d <= 10; ++d) {
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [d](double t) { return std::pow(std::sin(t), d - 2); }, 0.0, std::numbers::pi);
    area *= integral;
    CHECK(log_sphere_area(d).log() == doctest::Approx(std::log(area)).epsilon(1e-13));
  }
  for (int d : {1, 2, 10, 1000, 100000}) {
    const double diff = log_sphere_area(d).log() - log_ball_volume(d).log();
    // a few ulps of the magnitudes involved
    const double tol = 8e-16 * std::max(1.0, std::fabs(log_ball_volume(d).log()));
    CHECK(std::fabs(diff - std::log(static_cast<double>(d))) <= tol);
  }
}

TEST_CASE("cap_area_exact trivial cases") {
  for (int d : {2, 3, 10, 1000}) {
    CHECK(cap_area_exact(CapSpec::from_cosine(d, 0.0)).log() ==
          doctest::Approx(std::log(0.5)).epsilon(1e-14));
  }
  for (double theta : {0.1, 0.7, 1.2, 1.5}) {
    CHECK(cap_area_exact(CapSpec::from_cosine(2, std::cos(theta))).log() ==
          doctest::Approx(std::log(theta / std::numbers::pi)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(cap_area_exact(CapSpec{1, 0.5, std::sqrt(0.75)}), DomainError);
  CHECK_THROWS_AS(cap_area_exact(CapSpec{5, 0.5, 0.5}), DomainError);
}

TEST_CASE("cap_area_exact against direct quadrature at d = 10, s = 1/2") {
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double t) { return std::pow(std::sin(t), 8); }, 0.0, std::numbers::pi / 3.0);
  const double expected = integral * sphere_area_linear(9) / sphere_area_linear(10);
  const CapSpec cap = CapSpec::from_cosine(10, 0.5);
  const LogValue exact = cap_area_exact(cap);
  CHECK(exact.log() == doctest::Approx(std::log(expected)).epsilon(1e-12));
  const auto [lo, hi] = cap_area_bounds(cap);
  CHECK(lo.log() < exact.log());
  CHECK(exact.log() < hi.log());
}

TEST_CASE("cap_area_exact against boost ibeta") {
  for (int d : {2, 3, 7, 20, 50, 200}) {
    for (double s : {0.01, 0.2, 0.375, 0.5, 0.9, 0.99}) {
      const double t = std::sqrt(1.0 - s * s);
      const double expected = 0.5 * boost::math::ibeta((d - 1) / 2.0, 0.5, t * t);
      CHECK(cap_area_exact(CapSpec::from_cosine(d, s)).log() ==
            doctest::Approx(std::log(expected)).epsilon(1e-11));
    }
  }
}

TEST_CASE("cap bounds bracket the exact area") {
  const auto brackets = [](int d, double s) {
    const CapSpec cap = CapSpec::from_cosine(d, s);
    const auto [lo, hi] = cap_area_bounds(cap);
    const LogValue exact = cap_area_exact(cap);
    return log_le(lo, exact) && log_le(exact, hi);
  };
  CHECK(brackets(100, 3.0 / 8.0));
  CHECK(brackets(2, 0.5));
  CHECK(brackets(50, 0.9));
  const auto [lo2, hi2] = cap_area_bounds(CapSpec::from_cosine(2, 0.5));
  CHECK(lo2.log() <= std::log(1.0 / 3.0));
  CHECK(std::log(1.0 / 3.0) <= hi2.log());
  CHECK_THROWS_AS(cap_area_bounds(CapSpec::from_cosine(10, 0.0)), DomainError);

  int failures = 0;
  for (int d = 2; d <= 2000; d += (d < 100 ? 1 : 37)) {
    for (int k = 1; k <= 50; ++k) failures += !brackets(d, 0.99 * k / 50.0);
  }
  CHECK(failures == 0);
}

TEST_CASE("cap area is decreasing in s and in d") {
  for (int d : {3, 30, 300}) {
    double prev = 1.0;
    for (double s = 0.0; s < 0.99; s += 0.03) {
      const double v = cap_area_exact(CapSpec::from_cosine(d, s)).log();
      CHECK(v < prev);
      prev = v;
    }
  }
  for (double s : {0.1, 0.5, 0.8}) {
    double prev = 1.0;
    for (int d = 2; d < 400; d += 7) {
      const double v = cap_area_exact(CapSpec::from_cosine(d, s)).log();
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("cap area stays finite in very high dimension") {
  const LogValue v = cap_area_exact(CapSpec::from_cosine(100000, 3.0 / 8.0));
  CHECK(std::isfinite(v.log()));
  const auto [lo, hi] = cap_area_bounds(CapSpec::from_cosine(100000, 3.0 / 8.0));
  CHECK(log_le(lo, v));
  CHECK(log_le(v, hi));
}

TEST_CASE("log_beta_inc matches boost ibeta") {
  for (double a : {0.5, 1.0, 4.5, 40.0}) {
    for (double b : {0.5, 2.0, 7.0}) {
      for (double x : {0.01, 0.3, 0.5, 0.8, 0.999}) {
        CHECK(log_beta_inc(a, b, x) == doctest::Approx(std::log(boost::math::ibeta(a, b, x))).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("signed sphere fraction") {
  CHECK(log_sphere_fraction(5, -1.5).log() == 0.0);
  CHECK(log_sphere_fraction(5, 1.5).is_zero());
  CHECK(log_sphere_fraction(1, 0.3).log() == doctest::Approx(std::log(0.5)));
  for (int d : {2, 4, 9}) {
    for (double s : {0.1, 0.6}) {
      const double pos = log_sphere_fraction(d, s).linear();
      const double neg = log_sphere_fraction(d, -s).linear();
      CHECK(pos + neg == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("gamma ratio sandwich") {
  CHECK(gamma_ratio_bounds_hold(1));
  CHECK(gamma_ratio_bounds_hold(2));
  CHECK(gamma_ratio_bounds_hold(10000));
  CHECK_THROWS_AS(gamma_ratio_bounds_hold(0), DomainError);
}

TEST_CASE("LogValue arithmetic") {
  const LogValue a = LogValue::from_linear(3.0);
  const LogValue b = LogValue::from_linear(5.0);
  const LogValue c = LogValue::from_linear(0.25);
  CHECK((a + b).linear() == doctest::Approx(8.0).epsilon(1e-14));
  CHECK((a * b).linear() == doctest::Approx(15.0).epsilon(1e-14));
  CHECK((b / a).linear() == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(a.pow(2.5).linear() == doctest::Approx(std::pow(3.0, 2.5)).epsilon(1e-14));
  CHECK((a + LogValue::zero()) == a);
  CHECK((LogValue::zero() + a) == a);
  CHECK(((a + b) + c).log() == doctest::Approx((a + (b + c)).log()).epsilon(1e-12));
  CHECK((a + b).log() == doctest::Approx((b + a).log()).epsilon(1e-15));
  CHECK(b.minus(a).linear() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK_THROWS_AS(a.minus(b), DomainError);
  CHECK_THROWS_AS(LogValue::from_linear(-1.0), DomainError);

  // far-apart operands keep the larger one
  const LogValue big = LogValue::from_log(1000.0);
  const LogValue tiny = LogValue::from_log(-1000.0);
  CHECK((big + tiny).log() == 1000.0);
  const LogValue x = LogValue::from_log(-5000.0), y = LogValue::from_log(-5000.5);
  CHECK((x + y).log() == doctest::Approx(-5000.0 + std::log1p(std::exp(-0.5))).epsilon(1e-15));
}
