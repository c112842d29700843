#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hlweak/certificate.hpp"
#include "hlweak/errors.hpp"
#include "hlweak/radial_measure.hpp"
#include "hlweak/specfun.hpp"

using namespace hlweak;

namespace {

const double kT0 = (6.0 * std::log(2.0) - std::log(55.0)) / (3.0 * std::log(3.0) - 3.0 * std::log(2.0));

}  // namespace

TEST_CASE("lemma certificate in one dimension") {
  const Certificate c = lemma_certificate(RadialDensity::lebesgue(1), 1.0, 1.0, 1.0);
  CHECK(c.term_level.linear() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c.term_denom.linear() == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(c.log_lower_bound == doctest::Approx(-std::log(2.0 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(std::isinf(c.q()));
  CHECK_NOTHROW(c.check_invariants());
}

TEST_CASE("lemma certificate errors") {
  CHECK_THROWS_AS(lemma_certificate(RadialDensity::lebesgue(2), 1.0, 1.5, 1.0), DomainError);
  CHECK_THROWS_AS(lemma_certificate(RadialDensity::lebesgue(2), 0.5, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(lemma_certificate(RadialDensity::lebesgue(2), 1.0, 0.5, -1.0), DomainError);
}

TEST_CASE("lemma certificate invariants across families") {
  const std::vector<RadialDensity> fs{RadialDensity::lebesgue(5), RadialDensity::restricted_lebesgue(5),
                                      RadialDensity::power(5, 0.6), RadialDensity::truncated_power(5, 0.6),
                                      RadialDensity::log_singularity(5)};
  for (const auto& f : fs) {
    for (double p : {1.0, 1.3, 4.0}) {
      for (double v : {0.2, 0.5, 1.0}) {
        const Certificate c = lemma_certificate(f, p, v, 0.8);
        CHECK_NOTHROW(c.check_invariants());
        CHECK(c.log_alpha() == doctest::Approx(c.term_inner.log() - std::log(2.0) - c.term_denom.log()));
        CHECK(c.strong_lower_log() >= c.log_lower_bound);
        CHECK(c.log_lower_bound <= besicovitch_upper(5, 1.0));
      }
    }
  }
}

TEST_CASE("p = 1 limit of a shrinking test ball") {
  const RadialDensity f = RadialDensity::power(3, 0.4);
  const Certificate c = lemma_certificate(f, 1.0, 1e-6, 1.0);
  const double limit = log_ball_at_origin(f, 1.0).log() - std::log(2.0) - log_ball_offcenter(f, 1.0, 1.0).log();
  CHECK(c.log_lower_bound == doctest::Approx(limit).epsilon(1e-6));
}

TEST_CASE("bound is monotone in p") {
  for (const auto& f : {RadialDensity::restricted_lebesgue(6), RadialDensity::power(6, 0.3)}) {
    double prev = 1e300;
    for (double p = 1.0; p <= 6.0; p += 0.25) {
      const double b = lemma_certificate(f, p, 0.5, 1.0).log_lower_bound;
      // term_inner <= term_level makes the bound nonincreasing in p
      CHECK(b <= prev + 1e-12);
      prev = b;
    }
  }
}

TEST_CASE("power family is scale invariant") {
  const RadialDensity f = RadialDensity::power(7, 0.45);
  const double at1 = lemma_certificate(f, 1.2, 0.5, 1.0).log_lower_bound;
  for (double R : {0.1, 10.0}) {
    CHECK(lemma_certificate(f, 1.2, 0.5, R).log_lower_bound == doctest::Approx(at1).epsilon(1e-9));
  }
}

TEST_CASE("main construction") {
  const DecpResult res = decp_certificate(RadialDensity::restricted_lebesgue(200), 1.03);
  CHECK(res.exact.construction == Construction::kDecp);
  CHECK(res.exact.v == 0.5);
  CHECK(res.exact.log_lower_bound >= 200 * std::log(1.005) - std::log(4.0 + res.floor_constant / std::sqrt(200.0)));
  CHECK(res.exact.log_lower_bound >= res.log_floor - 1e-9);
  CHECK(res.hypothesis.verified_on_grid);
  CHECK(res.log_h_R1 >= std::log1p(-0.01) + 200.0 / 6.0 * std::log(64.0 / 55.0) - 1e-9);
  CHECK(res.log_h_R1_over_u <= std::log1p(0.01) + 200.0 / 6.0 * std::log(64.0 / 55.0) + 1e-9);
  CHECK_FALSE(res.degenerate_rate);

  // the floor equals base^d / (4/(1-eps) + C/sqrt(d))
  const double base = std::log(std::pow(2.0, 1.0 / 1.03) * std::pow(55.0, -1.0 / 6.0));
  CHECK(res.log_floor == doctest::Approx(200 * base - std::log(4.0 / 0.99 + res.floor_constant / std::sqrt(200.0))).epsilon(1e-10));
}

TEST_CASE("main construction: floor dominated at small d, p = 1") {
  for (int d : {3, 8, 20}) {
    const DecpResult res = decp_certificate(RadialDensity::restricted_lebesgue(d), 1.0);
    CHECK(res.exact.log_lower_bound >= res.log_floor - 1e-9);
  }
}

TEST_CASE("main construction: equality case of the truncated power") {
  for (int d : {10, 60}) {
    const DecpResult res = decp_certificate(RadialDensity::truncated_power(d, 1.0 - kT0), 1.0);
    CHECK(res.hypothesis.log_sup == doctest::Approx(d / 6.0 * std::log(64.0 / 55.0)).epsilon(1e-10));
    CHECK(res.exact.log_lower_bound >= res.log_floor - 1e-9);
  }
}

TEST_CASE("main construction: degenerate rate and hypothesis failures") {
  const DecpResult high_p = decp_certificate(RadialDensity::restricted_lebesgue(50), 1.2);
  CHECK(high_p.degenerate_rate);

  try {
    decp_certificate(RadialDensity::power(10, 0.5), 1.0);
    FAIL("expected a hypothesis violation");
  } catch (const HypothesisError& e) {
    CHECK(e.inequality() == "limsup");
  }
  try {
    decp_certificate(RadialDensity::power(10, 0.95), 1.0);
    FAIL("expected a hypothesis violation");
  } catch (const HypothesisError& e) {
    CHECK(e.inequality() == "sup");
  }
  // mass keeps arriving far out: the tail has not settled
  const RadialDensity slow = RadialDensity::piecewise(2, {{1.0, 1.0, 0.0}, {std::numeric_limits<double>::infinity(), 1e-12, 0.0}});
  CHECK_THROWS_AS(decp_certificate(slow, 1.0), InconclusiveHypothesisError);
  CHECK_THROWS_AS(decp_certificate(RadialDensity::restricted_lebesgue(10), 1.0, 0.2), DomainError);
}

TEST_CASE("generalized construction") {
  const double p_crit = 6.0 * std::log(2.0) / std::log(55.0);
  for (double t1 : {0.05, 0.1, kT0}) {
    CHECK(decp_generalized_rate(1.0, kT0, t1).first == doctest::Approx(p_crit).epsilon(1e-12));
  }
  const double edge = decp_t1_limit() - 1e-6;
  const auto [p0, b] = decp_generalized_rate(1.0, kT0, edge);
  CHECK(std::isfinite(p0));
  CHECK(p0 > 1.0);
  CHECK(b > 1.0);
  CHECK_THROWS_AS(decp_generalized_certificate(RadialDensity::power(10, 0.85), 1.0, 0.1, decp_t1_limit()), DomainError);

  const DecpGeneralizedResult res = decp_generalized_certificate(RadialDensity::power(20, 0.85), 1.0, 0.1, 0.15);
  CHECK(res.construction.hypothesis.verified_on_grid);
  CHECK(res.base == doctest::Approx(std::min({res.base_inner, res.base_middle, res.base_outer})));
  CHECK(res.construction.exact.log_lower_bound >= res.construction.log_floor - 1e-9);

  // base(p0) = 1
  const auto [p0b, b_at_p0] = decp_generalized_rate(res.p0, 0.1, 0.15);
  CHECK(p0b == doctest::Approx(res.p0));
  CHECK(b_at_p0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("doubling construction") {
  for (double c : {1.1, 1.3, 2.0}) {
    const int d = 40;
    const double t = 0.7;
    const double k = (1.0 - t) * d;
    const DoublingResult res = doubling_certificate(t, d, 1.0, 1.0, std::min(c, 1.99));
    const double cc = std::min(c, 1.99);
    const double expected = std::log(2.0) + d / 2.0 * std::log(std::numbers::pi) - std::lgamma(d / 2.0) +
                            k * std::log(cc / 2.0) - std::log(k);
    CHECK(res.inner_closed_form.log() == doctest::Approx(expected).epsilon(1e-12));
  }
  // the closed form at c = 2 is the unit ball mass sigma / ((1-t)d)
  {
    const double k = 0.3 * 40;
    const LogValue unit = log_ball_at_origin(RadialDensity::power(40, 0.7), 1.0);
    CHECK(unit.log() == doctest::Approx(log_sphere_area(40).log() - std::log(k)).epsilon(1e-13));
  }
  const DoublingResult res = doubling_certificate(0.95, 100, 2.0, 2.0, 1.3);
  CHECK(res.exact.log_lower_bound >= -std::log(6.0) + 5.0 * std::log(std::sqrt(2.0) / 1.3));
  CHECK(res.log_floor_closed == doctest::Approx(-std::log(6.0) + 5.0 * std::log(std::sqrt(2.0) / 1.3)).epsilon(1e-13));
  CHECK(res.exact.log_lower_bound >= res.log_floor_explicit - 1e-9);
  CHECK(res.d0 >= 2);
  CHECK(res.b0 > 1.0);

  // as t -> 1 the middle and outer pieces vanish relative to the inner one
  double prev_gap = 1e300;
  for (double t : {0.9, 0.97, 0.995}) {
    const DoublingResult r = doubling_certificate(t, 60, 1.5, 1.5, 1.2);
    const double gap = std::max(r.middle_bound.log(), r.outer_bound.log()) - r.inner_closed_form.log();
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.0);
  CHECK(doubling_certificate(0.995, 60, 1.5, 1.5, 1.2).dominance_holds);
  CHECK(doubling_certificate(0.995, 60, 1.5, 1.5, 1.2).exact.log_lower_bound >=
        doubling_certificate(0.995, 60, 1.5, 1.5, 1.2).log_floor_closed);

  CHECK_THROWS_AS(doubling_certificate(0.5, 10, 2.0, 2.0, 1.5), DomainError);
  CHECK_THROWS_AS(doubling_certificate(0.5, 10, 2.0, 1.5, 1.2), DomainError);
}

TEST_CASE("restricted Lebesgue ball") {
  for (int d : {2, 10, 100, 500}) {
    for (double p : {1.0, 1.05, 1.1227}) {
      const LebesgueBallResult res = lebesgue_ball_certificate(d, p);
      CHECK(res.exact.log_lower_bound >= res.log_floor - 1e-9);
    }
  }
  // d = 2, p = 1: alpha-free bound from planar lens areas
  const double r = std::sqrt(5.0) / 2.0;
  const double alpha = std::acos((1.0 + 1.0 - r * r) / 2.0);
  const double beta = std::acos((1.0 + r * r - 1.0) / (2.0 * r));
  const double lens = alpha + r * r * beta - 0.5 * std::sqrt((-1.0 + 1.0 + r) * (1.0 + 1.0 - r) * (1.0 - 1.0 + r) * (1.0 + 1.0 + r));
  CHECK(lebesgue_ball_certificate(2, 1.0).exact.log_lower_bound ==
        doctest::Approx(std::log(std::numbers::pi / (2.0 * lens))).epsilon(1e-9));
  CHECK_THROWS_AS(lebesgue_ball_certificate(1, 1.0), DomainError);
}

TEST_CASE("critical exponents and bases") {
  CHECK(critical_p(CriticalBase::kDecp) == doctest::Approx(1.03782).epsilon(5e-6));
  CHECK(critical_p(CriticalBase::kLebesgueBall) == doctest::Approx(1.1227).epsilon(5e-5));
  for (auto which : {CriticalBase::kDecp, CriticalBase::kLebesgueBall}) {
    CHECK(std::fabs(log_critical_base(which, critical_p(which))) < 1e-12);
  }
  CHECK(std::log(std::pow(2.0, 1.0 / 1.03) * std::pow(55.0, -1.0 / 6.0)) > std::log(1.005));
}

TEST_CASE("g proxy and v optimisation") {
  const double p0 = critical_p(CriticalBase::kLebesgueBall);
  const double q0 = p0 / (p0 - 1.0);
  CHECK(q0 == doctest::Approx(9.1474).epsilon(1e-4));
  CHECK(g_proxy(0.5, q0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g_proxy(0.5, 3.0) == doctest::Approx(std::pow(2.0, 2.0 + 1.0 / 1.5) / std::sqrt(55.0)).epsilon(1e-12));

  const RadialDensity f = RadialDensity::restricted_lebesgue(200);
  const OptimizeVResult best = optimize_v(f, 1.05, 1.0);
  CHECK(best.v_star > 0.05);
  CHECK(best.v_star < 0.95);
  CHECK(best.certificate.log_lower_bound >= lemma_certificate(f, 1.05, 0.5, 1.0).log_lower_bound);
  REQUIRE(best.proxy.has_value());
  CHECK(*best.proxy > 0.0);
  CHECK_THROWS_AS(optimize_v(f, 1.0, 1.0), DomainError);
}

TEST_CASE("Besicovitch upper bound") {
  CHECK(besicovitch_upper(1, 1.0) == doctest::Approx(std::log(2.641)));
  CHECK(besicovitch_upper(10, 1e12) < 1e-10);
  CHECK(besicovitch_upper(10, std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("scan ordering and worker independence") {
  std::vector<ScanTask> tasks;
  for (int d : {30, 10, 20}) {
    for (double p : {1.1, 1.0}) {
      ScanTask t;
      t.density = RadialDensity::restricted_lebesgue(d);
      t.p = p;
      t.construction = Construction::kLebesgueBall;
      tasks.push_back(t);
    }
  }
  ScanTask bad;
  bad.density = RadialDensity::power(10, 0.5);
  bad.construction = Construction::kDecp;
  tasks.push_back(bad);

  const auto serial = run_scan(tasks, 1);
  const auto parallel = run_scan(tasks, 3);
  REQUIRE(serial.size() == tasks.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].family == parallel[i].family);
    CHECK(serial[i].d == parallel[i].d);
    CHECK(serial[i].p == parallel[i].p);
    CHECK((serial[i].log_lower == parallel[i].log_lower ||
           (std::isnan(serial[i].log_lower) && std::isnan(parallel[i].log_lower))));
    if (i > 0 && serial[i].family == serial[i - 1].family) {
      CHECK((serial[i - 1].d < serial[i].d || (serial[i - 1].d == serial[i].d && serial[i - 1].p <= serial[i].p)));
    }
    if (serial[i].error.empty()) CHECK(serial[i].log_lower <= serial[i].upper_log);
  }
  CHECK_FALSE(serial.front().error.empty());  // "power" sorts first
}
