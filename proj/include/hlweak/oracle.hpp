#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "hlweak/log_value.hpp"
#include "hlweak/radial_density.hpp"

namespace hlweak {

/// splitmix64; counter based, so a seed fixes every draw.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in (0, 1).
  double uniform();
  double normal();

 private:
  std::uint64_t state_;
};

struct MaximalOptions {
  int grid = 512;
  int refine_iterations = 20;
};

/// Lower estimate of M chi_{B(0,vR)} at a point of norm eval_radius:
/// grid max of mu(B(0,vR) cap B(x0,r)) / mu(B(x0,r)) over log-spaced r in
/// [1e-3 vR, 10 (R + H + eval_radius)], then golden refinement.
LogValue maximal_at_point(const RadialDensity& density, double v, double R, double eval_radius,
                          const MaximalOptions& options = {});

struct LevelSetResult {
  bool ok = false;
  /// min over samples of log M(x) - log alpha.
  double worst_margin = 0.0;
  double worst_radius = 0.0;
  int samples = 0;
};

/// Samples |x| = R U^{1/d} (plus the witness |x| = R) and checks
/// M chi_{B(0,vR)}(x) >= alpha up to 1e-9 in log.
LevelSetResult verify_level_set(const RadialDensity& density, double v, double R, int samples,
                                std::uint64_t seed, const MaximalOptions& options = {});

/// alpha mu(B(0,R))^{1/p} / ||chi_{B(0,vR)}||_p recomputed with Boost
/// quadrature in linear doubles (d <= 6).
LogValue empirical_weak_ratio(const RadialDensity& density, double p, double v, double R);

/// Monte Carlo masses of B(R0 e1, H) on either side of {x1 = R0}, using
/// reflected pairs. Returns (right, left).
std::pair<double, double> half_space_masses(const RadialDensity& density, double R0, double H,
                                            int samples, std::uint64_t seed);

struct OracleReport {
  int d = 0;
  std::string density_id;
  double p = 1.0;
  double v = 0.5;
  double point_radius = 1.0;
  LogValue alpha;
  LogValue max_value;
  bool level_set_ok = false;
  double worst_margin = 0.0;
  LogValue empirical_weak_ratio;
  double certificate_log_bound = 0.0;
  int radius_grid_size = 0;
  int samples = 0;
  std::uint64_t rng_seed = 0;

  /// |certificate - empirical| within tol (log) and the level set check.
  bool passed(double tol = 1e-6) const;
};

OracleReport run_oracle(const RadialDensity& density, double p, double v, double R, int samples,
                        std::uint64_t seed, const MaximalOptions& options = {});

}  // namespace hlweak
