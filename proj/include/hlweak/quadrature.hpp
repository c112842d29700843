#pragma once

#include <functional>
#include <span>

#include "hlweak/log_value.hpp"

namespace hlweak {

struct QuadratureOptions {
  /// Relative tolerance on the integral (equivalently, absolute tolerance on
  /// its logarithm).
  double rel_tol = 1e-10;
  /// Subdivision budget; exceeding it raises PrecisionError.
  int max_subdivisions = 1 << 15;
};

/// Adaptive 21-point Gauss-Kronrod quadrature of exp(log_integrand(x)) over
/// [points.front(), points.back()], with the interior points used as initial
/// panel boundaries.
///
/// Every panel is summed relative to its own largest node value, so the
/// integrand may range over thousands of nats without underflow. The
/// integrand may return -inf where the integrand vanishes.
LogValue integrate_log(const std::function<double(double)>& log_integrand,
                       std::span<const double> points,
                       const QuadratureOptions& options = {});

/// Convenience overload for a single interval [a, b].
LogValue integrate_log(const std::function<double(double)>& log_integrand, double a,
                       double b, const QuadratureOptions& options = {});

}  // namespace hlweak
