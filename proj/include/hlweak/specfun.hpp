#pragma once

#include <utility>

#include "hlweak/log_value.hpp"

namespace hlweak {

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// log(1 - exp(x)) for x <= 0, accurate near both ends.
double log1mexp(double x);

/// Natural log of the regularized incomplete beta function I_x(a, b).
///
/// Evaluated with the Lentz continued fraction on whichever side of the
/// symmetry I_x(a,b) = 1 - I_{1-x}(b,a) converges quickly; the x^a (1-x)^b
/// prefactor is kept in log space so the result does not underflow for
/// a, b in the tens of thousands.
double log_beta_inc(double a, double b, double x);

/// Volume of the unit ball B^d.
LogValue log_ball_volume(int d);

/// Surface area of the unit sphere S^{d-1}, equal to d * vol(B^d).
LogValue log_sphere_area(int d);

/// A spherical cap {theta in S^{d-1} : <theta, e1> >= s}, with t = sqrt(1-s^2).
struct CapSpec {
  int dim = 2;
  double s = 0.0;
  double t = 1.0;

  /// Builds the cap from its cosine; t is derived.
  static CapSpec from_cosine(int dim, double s);
  void validate() const;
};

/// Normalized area of the cap, in (0, 1/2].
LogValue cap_area_exact(const CapSpec& cap);

/// Two-sided bound t^{d-1}/sqrt(2 pi d) <= area <= t^{d-1} sqrt(1+1/d) / (s sqrt(2 pi d)).
/// Requires s > 0.
std::pair<LogValue, LogValue> cap_area_bounds(const CapSpec& cap);

/// Upper cap bound written as t^d * constant; returns log of the constant
/// sqrt(1+1/d) / (t s sqrt(2 pi d)).
double log_cap_upper_constant(int d, double s);

/// Fraction of the sphere S^{d-1} lying in {<theta, e1> >= s} for any
/// s in [-1, 1]. Works for d = 1 (two-point sphere) as well.
LogValue log_sphere_fraction(int d, double s);

/// Checks sqrt(d/2) <= Gamma(1+d/2)/Gamma(1/2+d/2) <= sqrt((d+1)/2) with
/// slack 1e-12 in log space.
bool gamma_ratio_bounds_hold(int d);

}  // namespace hlweak
