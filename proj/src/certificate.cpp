#include "hlweak/certificate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <tuple>

#include "hlweak/errors.hpp"
#include "hlweak/geometry.hpp"
#include "hlweak/radial_measure.hpp"
#include "hlweak/specfun.hpp"

namespace hlweak {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;
constexpr double kHypothesisTol = 1e-9;

const double kU = std::sqrt(2.0 / 3.0);
const double kHalfSqrt5 = std::sqrt(5.0) / 2.0;

void require_p(double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw DomainError("p must be finite and >= 1");
}

// Cosines of the caps bounding the middle shell (sphere of radius u R1) and
// the outer shell (sphere of radius R1) of the three-piece split, R1 = 1.
double middle_cap_cosine() { return sphere_ball_cap(kU, 1.0, kHalfSqrt5).s; }
double outer_cap_cosine() { return sphere_ball_cap(1.0, 1.0, kHalfSqrt5).s; }

double log_cap_upper(int d, double s) {
  return cap_area_bounds(CapSpec::from_cosine(d, s)).second.log();
}

struct GrowthGrid {
  std::vector<double> radii;
  std::vector<double> log_h;
};

GrowthGrid growth_grid(const RadialDensity& density, double u) {
  constexpr int kPoints = 241;  // 20 per decade over 12 decades
  GrowthGrid grid;
  const double scale = density.scale();
  for (int k = 0; k < kPoints; ++k) {
    grid.radii.push_back(scale * std::pow(10.0, -6.0 + 12.0 * k / (kPoints - 1)));
  }
  if (const auto sup_r = density.known_sup_radius()) {
    grid.radii.push_back(*sup_r);
    std::sort(grid.radii.begin(), grid.radii.end());
  }
  for (double R : grid.radii) grid.log_h.push_back(growth_h(density, u, R).log());
  return grid;
}

HypothesisReport check_hypothesis(const RadialDensity& density, const GrowthGrid& grid, double u,
                                  double log_thr_sup, double log_thr_limsup) {
  HypothesisReport report;
  report.u = u;
  report.log_threshold_sup = log_thr_sup;
  report.log_threshold_limsup = log_thr_limsup;

  const auto best = std::max_element(grid.log_h.begin(), grid.log_h.end());
  const std::size_t k = static_cast<std::size_t>(best - grid.log_h.begin());
  report.log_sup = *best;
  report.sup_radius = grid.radii[k];
  if (const auto sup_r = density.known_sup_radius()) {
    report.sup_radius = *sup_r;
    report.log_sup = std::max(report.log_sup, growth_h(density, u, *sup_r).log());
  } else if (k > 0 && k + 1 < grid.radii.size()) {
    // Golden-section refinement of the grid maximum in ln R.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(grid.radii[k - 1]);
    double b = std::log(grid.radii[k + 1]);
    const auto h_at = [&](double x) { return growth_h(density, u, std::exp(x)).log(); };
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = h_at(x1), f2 = h_at(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        a = x1; x1 = x2; f1 = f2; x2 = a + phi * (b - a); f2 = h_at(x2);
      } else {
        b = x2; x2 = x1; f2 = f1; x1 = b - phi * (b - a); f1 = h_at(x1);
      }
    }
    if (std::max(f1, f2) > report.log_sup) {
      report.log_sup = std::max(f1, f2);
      report.sup_radius = std::exp(f1 > f2 ? x1 : x2);
    }
  }

  const double scale = density.scale();
  for (double m : {1e3, 1e4, 1e5, 1e6}) {
    const double R = scale * m;
    report.tail.emplace_back(R, growth_h(density, u, R).log());
  }
  for (std::size_t i = 1; i < report.tail.size(); ++i) {
    if (report.tail[i].second > report.tail[i - 1].second + kHypothesisTol) {
      throw InconclusiveHypothesisError(
          "limsup", "growth hypothesis inconclusive: h_u(R) is still increasing on the tail grid");
    }
  }
  report.log_limsup = report.tail.back().second;

  if (report.log_sup < log_thr_sup - kHypothesisTol) {
    throw HypothesisError("sup", "growth hypothesis violated: sup_R h_u(R) (log " +
                                     std::to_string(report.log_sup) + ") is below the threshold (log " +
                                     std::to_string(log_thr_sup) + ")");
  }
  if (report.log_limsup > log_thr_limsup + kHypothesisTol) {
    throw HypothesisError("limsup", "growth hypothesis violated: limsup h_u(R) (log " +
                                        std::to_string(report.log_limsup) +
                                        ") exceeds the threshold (log " +
                                        std::to_string(log_thr_limsup) + ")");
  }
  report.verified_on_grid = true;
  return report;
}

// Picks R1 with h(R1) >= (1-eps) theta0 and h(R1/u), h(R1/u^2) <= (1+eps) theta1.
double select_r1(const RadialDensity& density, const GrowthGrid& grid, double u, double log_low,
                 double log_high) {
  const std::size_t n = grid.radii.size();
  std::vector<double> candidates;
  std::size_t last = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (grid.log_h[k] >= log_low) last = k;
  }
  if (last != n && last + 1 < n) {
    // The set {h >= (1-eps) theta0} ends inside the grid: bisect for its max.
    double lo = std::log(grid.radii[last]);
    double hi = std::log(grid.radii[last + 1]);
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (growth_h(density, u, std::exp(mid)).log() >= log_low) lo = mid; else hi = mid;
    }
    candidates.push_back(std::exp(lo));
  }
  const auto mid_index = static_cast<std::size_t>(
      std::lower_bound(grid.radii.begin(), grid.radii.end(), density.scale()) - grid.radii.begin());
  for (std::size_t k = mid_index; k < n; ++k) {
    if (grid.log_h[k] >= log_low) candidates.push_back(grid.radii[k]);
  }
  for (std::size_t k = std::min(mid_index, n); k-- > 0;) {
    if (grid.log_h[k] >= log_low) candidates.push_back(grid.radii[k]);
  }
  for (double R : candidates) {
    if (growth_h(density, u, R / u).log() <= log_high + 1e-12 &&
        growth_h(density, u, R / (u * u)).log() <= log_high + 1e-12) {
      return R;
    }
  }
  throw HypothesisError("r1", "no admissible radius R1 found on the growth grid");
}

DecpResult three_piece(const RadialDensity& density, double p, double epsilon,
                       double log_theta0, double log_theta1, Construction tag) {
  require_p(p);
  if (!(epsilon > 0.0 && epsilon < 0.1)) throw DomainError("epsilon must lie in (0, 1/10)");
  const int d = density.dim();
  if (d < 2) throw DomainError("three-piece construction requires d >= 2");

  const GrowthGrid grid = growth_grid(density, kU);
  DecpResult out;
  out.hypothesis = check_hypothesis(density, grid, kU, log_theta0, log_theta1);
  out.epsilon = epsilon;
  const double log_low = std::log1p(-epsilon) + log_theta0;
  const double log_high = std::log1p(epsilon) + log_theta1;
  out.R1 = select_r1(density, grid, kU, log_low, log_high);
  out.log_h_R1 = growth_h(density, kU, out.R1).log();
  out.log_h_R1_over_u = growth_h(density, kU, out.R1 / kU).log();
  out.log_h_R1_over_u2 = growth_h(density, kU, out.R1 / (kU * kU)).log();

  out.exact = lemma_certificate(density, p, 0.5, out.R1);
  out.exact.construction = tag;

  // mu(B(R1 e1, H)) <= 4 mu(B(0,R1)) [1/((1-eps) theta0)
  //                    + (1+eps)^2 theta1^2 cap(3/8) + cap(s_mid)]
  const LogValue sum = LogValue::from_log(-log_low) +
                       LogValue::from_log(2.0 * log_high + log_cap_upper(d, outer_cap_cosine())) +
                       LogValue::from_log(log_cap_upper(d, middle_cap_cosine()));
  const double inv_q = 1.0 - 1.0 / p;
  out.log_floor = -d * inv_q * kLn2 - std::log(4.0) - sum.log();
  if (log_theta0 == log_theta1) {
    const double scaled = std::exp(sum.log() + log_theta0);  // 1/(1-eps) + C/(4 sqrt d)
    out.floor_constant = 4.0 * (scaled - 1.0 / (1.0 - epsilon)) * std::sqrt(static_cast<double>(d));
  }
  return out;
}

}  // namespace

std::string construction_name(Construction c) {
  switch (c) {
    case Construction::kLemmaDirect: return "lemma_direct";
    case Construction::kDecp: return "decp";
    case Construction::kDecpGeneralized: return "decp_generalized";
    case Construction::kDoubling: return "doubling";
    case Construction::kLebesgueBall: return "lebesgue_ball";
  }
  return "unknown";
}

Construction parse_construction(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '-', '_');
  for (Construction c : {Construction::kLemmaDirect, Construction::kDecp,
                         Construction::kDecpGeneralized, Construction::kDoubling,
                         Construction::kLebesgueBall}) {
    if (n == construction_name(c)) return c;
  }
  if (n == "lemma") return Construction::kLemmaDirect;
  throw DomainError("unknown construction '" + name +
                    "' (known: lemma_direct, decp, decp_generalized, doubling, lebesgue_ball)");
}

double Certificate::q() const { return p == 1.0 ? kInf : p / (p - 1.0); }

double Certificate::log_alpha() const { return term_inner.log() - kLn2 - term_denom.log(); }

double Certificate::recompute() const {
  const double inner = inv_q() == 0.0 ? 0.0 : inv_q() * term_inner.log();
  return inner + term_level.log() / p - kLn2 - term_denom.log();
}

void Certificate::check_invariants() const {
  if (std::fabs(H * H - R * R * (1.0 + v * v)) > 1e-12 * R * R * (1.0 + v * v)) {
    throw DomainError("certificate: H^2 != R^2 (1 + v^2)");
  }
  if (std::fabs(recompute() - log_lower_bound) > 1e-12 * (1.0 + std::fabs(log_lower_bound))) {
    throw DomainError("certificate: stored bound does not match its terms");
  }
  if (!log_le(term_inner, term_level)) throw DomainError("certificate: mu(B(0,vR)) > mu(B(0,R))");
}

Certificate lemma_certificate(const RadialDensity& density, double p, double v, double R) {
  require_p(p);
  if (!(v > 0.0)) throw DomainError("lemma_certificate: v must be positive");
  if (v > 1.0) throw DomainError("lemma_certificate: v must be <= 1");
  if (!(R > 0.0) || std::isinf(R)) throw DomainError("lemma_certificate: R must be positive");

  Certificate c;
  c.density = density;
  c.p = p;
  c.v = v;
  c.R = R;
  c.H = R * std::sqrt(1.0 + v * v);
  c.term_inner = log_ball_at_origin(density, v * R);
  if (c.term_inner.is_zero()) {
    throw EmptyTestFunctionError("lemma_certificate: mu(B(0, vR)) = 0");
  }
  c.term_level = log_ball_at_origin(density, R);
  c.term_denom = log_ball_offcenter(density, R, c.H);
  c.log_lower_bound = c.recompute();
  return c;
}

double decp_t0() {
  return (6.0 * kLn2 - std::log(55.0)) / (3.0 * std::log(3.0) - 3.0 * kLn2);
}

double decp_t1_limit() { return std::log(64.0 / 55.0) / std::log(9.0 / 4.0); }

DecpResult decp_certificate(const RadialDensity& density, double p, double epsilon) {
  const double log_theta = density.dim() / 6.0 * std::log(64.0 / 55.0);
  DecpResult out = three_piece(density, p, epsilon, log_theta, log_theta, Construction::kDecp);
  out.degenerate_rate = p >= critical_p(CriticalBase::kDecp);
  return out;
}

std::pair<double, double> decp_generalized_rate(double p, double t0, double t1) {
  require_p(p);
  const double t_mid = std::sqrt(1.0 - std::pow(middle_cap_cosine(), 2));
  const double m = std::min({std::pow(kU, -t0), 8.0 * std::pow(kU, 2.0 * t1) / std::sqrt(55.0),
                             1.0 / t_mid});
  const double log2m = std::log2(m);
  const double p0 = log2m >= 1.0 ? kInf : 1.0 / (1.0 - log2m);
  return {p0, std::pow(2.0, -(1.0 - 1.0 / p)) * m};
}

DecpGeneralizedResult decp_generalized_certificate(const RadialDensity& density, double p,
                                                   double t0, double t1, double epsilon) {
  if (!(t0 > 0.0 && t0 < 1.0)) throw DomainError("t0 must lie in (0, 1)");
  if (!(t1 > 0.0 && t1 < decp_t1_limit())) {
    throw DomainError("t1 must lie in (0, ln(64/55)/ln(9/4))");
  }
  const int d = density.dim();
  const double neg_log_u = -std::log(kU);
  DecpGeneralizedResult out;
  out.t0 = t0;
  out.t1 = t1;
  out.construction = three_piece(density, p, epsilon, t0 * d * neg_log_u, t1 * d * neg_log_u,
                                 Construction::kDecpGeneralized);
  const double scale = std::pow(2.0, -(1.0 - 1.0 / p));
  out.base_inner = scale * std::pow(kU, -t0);
  out.base_middle = scale / std::sqrt(1.0 - std::pow(middle_cap_cosine(), 2));
  out.base_outer = scale * 8.0 * std::pow(kU, 2.0 * t1) / std::sqrt(55.0);
  std::tie(out.p0, out.base) = decp_generalized_rate(p, t0, t1);
  out.construction.degenerate_rate = out.base <= 1.0;
  return out;
}

int doubling_d0(double c) {
  const ConeCapParams mid = cap_containment_params(c);
  for (int d = 2; d < 100000000; ++d) {
    if (log_cap_upper_constant(d, mid.s) <= 0.0 && log_cap_upper_constant(d, 3.0 / 8.0) <= 0.0) {
      return d;
    }
  }
  throw DomainError("doubling_d0: no dimension found");
}

DoublingResult doubling_certificate(double t, int d, double p, double p0_budget, double c) {
  require_p(p);
  if (!(t > 0.0 && t < 1.0)) throw DomainError("doubling: t must lie in (0, 1)");
  if (d < 2) throw DomainError("doubling: d must be >= 2");
  if (!(p0_budget >= p) || std::isinf(p0_budget)) throw DomainError("doubling: p0 must be >= p");
  if (!(c > 1.0 && c <= 2.0)) throw DomainError("doubling: c must lie in (1, 2]");
  if (c >= std::pow(2.0, 1.0 / p0_budget)) {
    throw DomainError("doubling: c >= 2^{1/p0} makes the base 2^{1/p0}/c <= 1");
  }

  const RadialDensity density = RadialDensity::power(d, t);
  DoublingResult out;
  out.exact = lemma_certificate(density, p, 0.5, 1.0);
  out.exact.construction = Construction::kDoubling;
  out.c = c;
  out.p0_budget = p0_budget;

  const double k = (1.0 - t) * d;
  const LogValue sphere = log_sphere_area(d);
  out.inner_closed_form = sphere * LogValue::from_log(k * std::log(c / 2.0) - std::log(k));
  const ConeCapParams mid = cap_containment_params(c);
  out.middle_bound = sphere * density.log_radial_mass(0.0, 1.0) *
                     LogValue::from_log(log_cap_upper(d, mid.s));
  out.outer_bound = sphere * density.log_radial_mass(1.0, 1.0 + kHalfSqrt5) *
                    LogValue::from_log(log_cap_upper(d, 3.0 / 8.0));

  const LogValue denom = out.inner_closed_form + out.middle_bound + out.outer_bound;
  out.log_floor_explicit = out.exact.inv_q() * out.exact.term_inner.log() +
                           out.exact.term_level.log() / p - kLn2 - denom.log();
  out.log_floor_closed = -std::log(6.0) + k * (kLn2 / p - std::log(c));
  out.dominance_holds =
      out.middle_bound <= out.inner_closed_form && out.outer_bound <= out.inner_closed_form;
  out.d0 = doubling_d0(c);
  out.b0 = std::min(std::pow(6.0, 1.0 / out.d0), std::pow(2.0, 1.0 / p0_budget) / c);
  return out;
}

LebesgueBallResult lebesgue_ball_certificate(int d, double p) {
  require_p(p);
  if (d < 2) throw DomainError("lebesgue_ball: d must be >= 2");
  LebesgueBallResult out;
  out.exact = lemma_certificate(RadialDensity::restricted_lebesgue(d), p, 0.5, 1.0);
  out.exact.construction = Construction::kLebesgueBall;
  const double inv_q = 1.0 - 1.0 / p;
  out.log_floor = -d * inv_q * kLn2 + log_ball_volume(d).log() - kLn2 -
                  log_ball_volume(d - 1).log() + std::log(3.0 * (d + 1) / 16.0) +
                  (d + 1) * std::log(8.0 / std::sqrt(55.0));
  return out;
}

double g_proxy(double v, double q) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("g_proxy: v must lie in [0, 1]");
  if (!(q >= 1.0)) throw DomainError("g_proxy: q must be >= 1");
  const double v2 = v * v;
  return 2.0 * std::pow(v, 1.0 / q) / std::sqrt(3.0 + 2.0 * v2 - v2 * v2);
}

OptimizeVResult optimize_v(const RadialDensity& density, double p, double R) {
  require_p(p);
  if (!(p > 1.0)) throw DomainError("optimize_v: p must be > 1 (finite conjugate exponent)");
  const auto objective = [&](double v) -> std::pair<double, std::optional<Certificate>> {
    try {
      Certificate c = lemma_certificate(density, p, v, R);
      return {c.log_lower_bound, std::move(c)};
    } catch (const EmptyTestFunctionError&) {
      return {kNegInf, std::nullopt};
    }
  };

  constexpr int kGrid = 40;
  std::vector<double> vs, values;
  std::vector<std::optional<Certificate>> certs;
  for (int i = 1; i <= kGrid; ++i) {
    auto [val, cert] = objective(static_cast<double>(i) / kGrid);
    vs.push_back(static_cast<double>(i) / kGrid);
    values.push_back(val);
    certs.push_back(std::move(cert));
  }
  const auto best_it = std::max_element(values.begin(), values.end());
  if (*best_it == kNegInf) throw EmptyTestFunctionError("optimize_v: every v gives zero inner mass");
  const std::size_t k = static_cast<std::size_t>(best_it - values.begin());

  constexpr double kTieTol = 1e-12;
  bool unimodal = true;
  for (std::size_t i = 0; i + 1 <= k && i + 1 < values.size(); ++i) {
    if (values[i + 1] < values[i] - kTieTol) unimodal = false;
  }
  for (std::size_t i = k; i + 1 < values.size(); ++i) {
    if (values[i + 1] > values[i] + kTieTol) unimodal = false;
  }

  OptimizeVResult out{vs[k], *certs[k], unimodal, std::nullopt};
  if (unimodal) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = k > 0 ? vs[k - 1] : 1e-4;
    double b = k + 1 < vs.size() ? vs[k + 1] : 1.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = objective(x1).first, f2 = objective(x2).first;
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        a = x1; x1 = x2; f1 = f2; x2 = a + phi * (b - a); f2 = objective(x2).first;
      } else {
        b = x2; x2 = x1; f2 = f1; x1 = b - phi * (b - a); f1 = objective(x1).first;
      }
    }
    const double v_golden = f1 > f2 ? x1 : x2;
    auto [val, cert] = objective(v_golden);
    if (cert && val > out.certificate.log_lower_bound) {
      out.v_star = v_golden;
      out.certificate = std::move(*cert);
    }
  }
  if (density.family() == RadialDensity::Family::kRestrictedLebesgue) {
    out.proxy = g_proxy(out.v_star, out.certificate.q());
  }
  return out;
}

double besicovitch_upper(int d, double p) {
  if (d < 1) throw DomainError("besicovitch_upper: d must be >= 1");
  if (!(p >= 1.0)) throw DomainError("besicovitch_upper: p must be >= 1");
  if (std::isinf(p)) return 0.0;
  return d / p * std::log(2.641);
}

double log_critical_base(CriticalBase which, double p) {
  switch (which) {
    case CriticalBase::kDecp:
      return kLn2 / p - std::log(55.0) / 6.0;
    case CriticalBase::kLebesgueBall:
      return (2.0 + 1.0 / p) * kLn2 - 0.5 * std::log(55.0);
  }
  return 0.0;
}

double critical_p(CriticalBase which) {
  switch (which) {
    case CriticalBase::kDecp:
      return 6.0 * kLn2 / std::log(55.0);
    case CriticalBase::kLebesgueBall:
      return 1.0 / (std::log(55.0) / (2.0 * kLn2) - 2.0);
  }
  return 0.0;
}

ScanRow run_scan_task(const ScanTask& task) {
  ScanRow row;
  row.d = task.density.dim();
  row.p = task.p;
  row.family = task.density.family_name();
  row.params = task.density.params_string();
  row.log_lower = std::numeric_limits<double>::quiet_NaN();
  row.rate_per_dim = std::numeric_limits<double>::quiet_NaN();
  try {
    row.upper_log = besicovitch_upper(row.d, task.p);
    double bound = 0.0;
    switch (task.construction) {
      case Construction::kLemmaDirect:
        bound = lemma_certificate(task.density, task.p, task.v, task.R).log_lower_bound;
        break;
      case Construction::kDecp:
        bound = decp_certificate(task.density, task.p, task.epsilon).exact.log_lower_bound;
        break;
      case Construction::kDecpGeneralized:
        bound = decp_generalized_certificate(task.density, task.p, task.t0, task.t1, task.epsilon)
                    .construction.exact.log_lower_bound;
        break;
      case Construction::kDoubling: {
        if (task.density.family() != RadialDensity::Family::kPower) {
          throw DomainError("doubling construction requires the power family");
        }
        const double budget = task.p0_budget > 0.0 ? task.p0_budget : task.p;
        bound = doubling_certificate(task.density.t(), row.d, task.p, budget, task.c)
                    .exact.log_lower_bound;
        break;
      }
      case Construction::kLebesgueBall:
        if (task.density.family() != RadialDensity::Family::kRestrictedLebesgue) {
          throw DomainError("lebesgue_ball construction requires the restricted-lebesgue family");
        }
        bound = lebesgue_ball_certificate(row.d, task.p).exact.log_lower_bound;
        break;
    }
    row.log_lower = bound;
    row.rate_per_dim = bound / row.d;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

std::vector<ScanRow> run_scan(const std::vector<ScanTask>& tasks, unsigned jobs) {
  std::vector<ScanRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) rows[i] = run_scan_task(tasks[i]);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) {
    return std::tie(a.family, a.d, a.p, a.params) < std::tie(b.family, b.d, b.p, b.params);
  });
  return rows;
}

}  // namespace hlweak
