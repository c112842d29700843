#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hlweak/errors.hpp"
#include "hlweak/geometry.hpp"

using namespace hlweak;

TEST_CASE("main construction caps") {
  const double half_sqrt5 = std::sqrt(5.0) / 2.0;
  for (double R1 : {0.01, 1.0, 37.0}) {
    const ConeCapParams outer = sphere_ball_cap(R1, R1, R1 * half_sqrt5);
    CHECK(outer.s == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(outer.t == doctest::Approx(std::sqrt(55.0) / 8.0).epsilon(1e-14));
    CHECK(outer.sphere_radius == R1);
    const ConeCapParams mid = sphere_ball_cap(std::sqrt(2.0 / 3.0) * R1, R1, R1 * half_sqrt5);
    CHECK(mid.t == doctest::Approx(std::sqrt(1077.0) / (24.0 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(mid.t == doctest::Approx(0.96689).epsilon(1e-5));
    CHECK(mid.s * mid.s + mid.t * mid.t == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("degenerate intersections") {
  const auto kind_of = [](double rho, double R0, double H) {
    try {
      sphere_ball_cap(rho, R0, H);
    } catch (const DegenerateCapError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  CHECK(kind_of(1.0, 2.0, 1.0) == static_cast<int>(DegenerateCapError::Kind::kTangent));
  CHECK(kind_of(0.1, 1.0, 2.0) == static_cast<int>(DegenerateCapError::Kind::kSphereInsideBall));
  CHECK(kind_of(5.0, 1.0, 1.0) == static_cast<int>(DegenerateCapError::Kind::kDisjoint));
  CHECK_THROWS_AS(sphere_ball_cap(-1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("scale invariance and monotonicity in rho") {
  const ConeCapParams base = sphere_ball_cap(0.9, 1.3, 0.7);
  for (double k : {1e-3, 0.5, 8.0, 1e4}) {
    const ConeCapParams scaled = sphere_ball_cap(0.9 * k, 1.3 * k, 0.7 * k);
    CHECK(scaled.s == doctest::Approx(base.s).epsilon(1e-13));
    CHECK(scaled.t == doctest::Approx(base.t).epsilon(1e-13));
  }
  // s(rho) = (rho^2 + R0^2 - H^2)/(2 rho R0) is increasing once H >= R0
  double prev = -2.0;
  for (double rho = 0.31; rho < 1.69; rho += 0.01) {
    const double s = sphere_ball_cap(rho, 0.7, 1.0).s;
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("doubling x2") {
  CHECK(doubling_cap_x2(1.0 + 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(doubling_cap_x2(2.0) == doctest::Approx(std::sqrt(55.0) / 8.0).epsilon(1e-15));
  CHECK(doubling_cap_x2(2.0) ==
        doctest::Approx(sphere_ball_cap(1.0, 1.0, std::sqrt(5.0) / 2.0).t).epsilon(1e-14));
  const double mid = doubling_cap_x2(1.5);
  CHECK(mid > std::sqrt(55.0) / 8.0);
  CHECK(mid < 1.0);
  CHECK(doubling_cap_x2(1.49) > mid);
  CHECK(doubling_cap_x2(1.51) < mid);
  double prev = 2.0;
  for (int i = 1; i <= 1000; ++i) {
    const double x = doubling_cap_x2(1.0 + i / 1000.0);
    CHECK(x < prev);
    prev = x;
  }
  CHECK_THROWS_AS(doubling_cap_x2(1.0), DomainError);
  CHECK_THROWS_AS(doubling_cap_x2(2.01), DomainError);
}

TEST_CASE("cone parameters of the doubling construction") {
  const ConeCapParams at2 = cap_containment_params(2.0);
  CHECK(at2.s == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(at2.t == doctest::Approx(std::sqrt(55.0) / 8.0).epsilon(1e-15));
  CHECK(at2.cone);
  CHECK(cap_containment_params(1.2).s == doctest::Approx(0.44 / 4.8).epsilon(1e-14));
  const ConeCapParams near1 = cap_containment_params(1.0 + 1e-8);
  CHECK(near1.s < 1e-7);
  CHECK(near1.t == doctest::Approx(1.0).epsilon(1e-7));
  // 16c^2 s^2 + 16c^2 x2^2 = (c^2-1)^2 + 18c^2 - c^4 - 1 = 16 c^2
  for (double c = 1.01; c <= 2.0; c += 0.07) {
    const ConeCapParams p = cap_containment_params(c);
    CHECK(p.s * p.s + p.t * p.t == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(cap_containment_params(0.9), DomainError);
}

TEST_CASE("three-piece split is exhaustive") {
  const double u = std::sqrt(2.0 / 3.0);
  CHECK(1.0 / (u * u) == doctest::Approx(1.5).epsilon(1e-15));
  const double R1 = 1.0, H = std::sqrt(5.0) / 2.0;
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  for (int d : {2, 3, 4}) {
    int checked = 0;
    for (int i = 0; i < 50000; ++i) {
      std::vector<double> z(d);
      double n2 = 0.0;
      for (double& zi : z) {
        zi = normal(gen);
        n2 += zi * zi;
      }
      const double scale = H * std::pow(unif(gen), 1.0 / d) / std::sqrt(n2);
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double x = (k == 0 ? R1 : 0.0) + z[k] * scale;
        r2 += x * x;
      }
      const double x1 = R1 + z[0] * scale;
      if (x1 <= R1) {
        ++checked;
        CHECK(std::sqrt(r2) <= 1.5 * R1 + 1e-12);
      }
    }
    CHECK(checked > 10000);
  }
}
