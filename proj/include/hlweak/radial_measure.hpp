#pragma once

#include <utility>
#include <vector>

#include "hlweak/log_value.hpp"
#include "hlweak/quadrature.hpp"
#include "hlweak/radial_density.hpp"

namespace hlweak {

/// mu(B(0, R)) = sigma(S^{d-1}) int_0^R f(r) r^{d-1} dr.
LogValue log_ball_at_origin(const RadialDensity& density, double R);

/// h_u(R) = mu(B(0,R)) / mu(B(0,uR)); lies in [1, u^{-d}].
LogValue growth_h(const RadialDensity& density, double u, double R);

/// mu(B(x0, r)) for |x0| = center_radius.
///
/// Each sphere |y| = rho meets the ball in a cap whose normalized area is
/// exact, so only the radial integral is discretised (log-space adaptive
/// Gauss-Kronrod in sigma = ln rho).
LogValue log_ball_offcenter(const RadialDensity& density, double center_radius, double r,
                            const QuadratureOptions& options = {});

/// mu(B(0, rho_max) intersected with B(x0, r)), |x0| = center_radius.
LogValue intersect_origin_ball(const RadialDensity& density, double rho_max,
                               double center_radius, double r,
                               const QuadratureOptions& options = {});

/// mu(B(x0, r) minus B(0, rho_min)).
LogValue offcenter_outside_origin_ball(const RadialDensity& density, double rho_min,
                                       double center_radius, double r,
                                       const QuadratureOptions& options = {});

/// Sampled growth profile R -> h_u(R).
struct GrowthProfile {
  double u = 0.5;
  int dim = 1;
  std::vector<std::pair<double, LogValue>> samples;

  /// Checks 1 <= h <= u^{-d} (slack 1e-9) for every sample.
  bool within_bounds(double slack = 1e-9) const;
};

GrowthProfile sample_growth(const RadialDensity& density, double u, const std::vector<double>& radii);

}  // namespace hlweak
