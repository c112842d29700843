#include "hlweak/geometry.hpp"

#include <cmath>
#include <string>

#include "hlweak/errors.hpp"

namespace hlweak {

ConeCapParams sphere_ball_cap(double rho, double R0, double H) {
  if (!(rho > 0.0) || !(R0 > 0.0) || !(H > 0.0)) {
    throw DomainError("sphere_ball_cap: radii must be positive");
  }
  const double gap = std::fabs(R0 - H);
  if (rho == gap || rho == R0 + H) {
    throw DegenerateCapError(DegenerateCapError::Kind::kTangent,
                             "sphere_ball_cap: sphere is tangent to the ball");
  }
  if (rho < gap) {
    if (H > R0) {
      throw DegenerateCapError(DegenerateCapError::Kind::kSphereInsideBall,
                               "sphere_ball_cap: sphere lies inside the ball");
    }
    throw DegenerateCapError(DegenerateCapError::Kind::kDisjoint,
                             "sphere_ball_cap: sphere passes inside the ball without meeting it");
  }
  if (rho > R0 + H) {
    throw DegenerateCapError(DegenerateCapError::Kind::kDisjoint,
                             "sphere_ball_cap: sphere encloses the ball without meeting it");
  }
  const double denom = 2.0 * rho * R0;
  const double one_minus_s = (H - rho + R0) * (H + rho - R0) / denom;
  const double one_plus_s = (rho + R0 - H) * (rho + R0 + H) / denom;
  const double s = (rho * rho + R0 * R0 - H * H) / denom;
  return {s, std::sqrt(one_minus_s * one_plus_s), rho, false};
}

double doubling_cap_x2(double c) {
  if (!(c > 1.0 && c <= 2.0)) throw DomainError("doubling_cap_x2: c must lie in (1, 2]");
  return std::sqrt(18.0 * c * c - c * c * c * c - 1.0) / (4.0 * c);
}

ConeCapParams cap_containment_params(double c) {
  // s^2 + t^2 = ((c^2-1)^2 + 18c^2 - c^4 - 1) / (16 c^2) = 1, so (s, t) is an
  // ordinary cap on the unit sphere.
  return {(c * c - 1.0) / (4.0 * c), doubling_cap_x2(c), 1.0, true};
}

}  // namespace hlweak
