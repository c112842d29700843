#pragma once

namespace hlweak {

/// Cap parameters (s, t) = (cos r, sin r) on a sphere of the given radius.
/// `cone` marks caps obtained by radially projecting a cap from another
/// sphere onto the unit sphere.
struct ConeCapParams {
  double s = 0.0;
  double t = 1.0;
  double sphere_radius = 1.0;
  bool cone = false;
};

/// Cap cut from the sphere |x| = rho by the ball B(R0 e1, H).
/// Requires |R0 - H| < rho < R0 + H; tangency and containment raise
/// DegenerateCapError.
ConeCapParams sphere_ball_cap(double rho, double R0, double H);

/// x2(c) = sqrt(18 c^2 - c^4 - 1) / (4c), for c in (1, 2].
double doubling_cap_x2(double c);

/// Cap on the unit sphere subtending the middle shell of the doubling
/// construction: s = (c^2 - 1)/(4c), t = x2(c).
ConeCapParams cap_containment_params(double c);

}  // namespace hlweak
