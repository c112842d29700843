#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hlweak/log_value.hpp"
#include "hlweak/radial_density.hpp"

namespace hlweak {

enum class Construction { kLemmaDirect, kDecp, kDecpGeneralized, kDoubling, kLebesgueBall };

std::string construction_name(Construction c);
Construction parse_construction(const std::string& name);

/// A lower-bound certificate for the weak-type (p,p) constant, built from the
/// test function chi_{B(0, vR)} evaluated at R e1 with the ball of radius
/// H = R sqrt(1 + v^2):
///
///   c_{p,d,mu} >= mu(B(0,vR))^{1/q} mu(B(0,R))^{1/p} / (2 mu(B(R e1, H))).
///
/// The same number bounds the strong-type constant from below.
struct Certificate {
  RadialDensity density;
  double p = 1.0;
  double v = 0.5;
  double R = 1.0;
  double H = 0.0;
  LogValue term_inner;  // mu(B(0, vR))
  LogValue term_level;  // mu(B(0, R))
  LogValue term_denom;  // mu(B(R e1, H))
  double log_lower_bound = 0.0;
  Construction construction = Construction::kLemmaDirect;

  int dim() const { return density.dim(); }
  /// 1/q = 1 - 1/p (0 at p = 1).
  double inv_q() const { return 1.0 - 1.0 / p; }
  /// Conjugate exponent; +inf at p = 1.
  double q() const;
  /// log alpha, alpha = mu(B(0,vR)) / (2 mu(B(R e1, H))).
  double log_alpha() const;
  double rate_per_dim() const { return log_lower_bound / dim(); }
  /// Lower bound on the strong-type constant (Chebyshev: c <= C).
  double strong_lower_log() const { return log_lower_bound; }
  /// Bound recomputed from the stored terms.
  double recompute() const;
  /// Throws DomainError if a stored invariant is violated.
  void check_invariants() const;
};

Certificate lemma_certificate(const RadialDensity& density, double p, double v, double R);

/// Sup / limsup checks of a growth hypothesis on a finite grid. Never more
/// than "verified on grid".
struct HypothesisReport {
  double u = 0.0;
  double log_threshold_sup = 0.0;     // sup_R h_u(R) must reach this
  double log_threshold_limsup = 0.0;  // limsup h_u(R) must stay below this
  double log_sup = 0.0;
  double sup_radius = 0.0;
  std::vector<std::pair<double, double>> tail;  // (R, log h_u(R))
  double log_limsup = 0.0;
  bool verified_on_grid = false;
};

/// Output of the three-piece construction with threshold exponents (t0, t1).
struct DecpResult {
  Certificate exact;
  HypothesisReport hypothesis;
  double epsilon = 0.01;
  double R1 = 0.0;
  double log_h_R1 = 0.0;
  double log_h_R1_over_u = 0.0;
  double log_h_R1_over_u2 = 0.0;
  /// Analytic floor obtained from the exact route by inequalities only.
  double log_floor = 0.0;
  /// Explicit constant C in floor = base^d / (4/(1-eps) + C/sqrt(d)) (main
  /// theorem thresholds only).
  double floor_constant = 0.0;
  /// p at or above the critical exponent: base <= 1, certificate still valid.
  bool degenerate_rate = false;
};

DecpResult decp_certificate(const RadialDensity& density, double p, double epsilon = 0.01);

struct DecpGeneralizedResult {
  DecpResult construction;
  double t0 = 0.0;
  double t1 = 0.0;
  /// Per-dimension bases of the inner, middle and outer pieces at this p.
  double base_inner = 0.0;
  double base_middle = 0.0;
  double base_outer = 0.0;
  /// b(p, t0, t1) = min of the three bases.
  double base = 0.0;
  /// Root of b(p) = 1; +inf when b > 1 for every p.
  double p0 = 0.0;
};

/// Largest admissible t1 (exclusive): ln(64/55)/ln(9/4).
double decp_t1_limit();
/// Threshold exponent of the main construction, (6 ln2 - ln55)/(3 ln3 - 3 ln2).
double decp_t0();

DecpGeneralizedResult decp_generalized_certificate(const RadialDensity& density, double p,
                                                   double t0, double t1,
                                                   double epsilon = 0.01);

/// Closed-form (p0, b) of the generalized construction, independent of mu.
std::pair<double, double> decp_generalized_rate(double p, double t0, double t1);

struct DoublingResult {
  Certificate exact;
  double c = 0.0;
  double p0_budget = 0.0;
  /// mu_{t,d}(B(0, c/2)) in closed form.
  LogValue inner_closed_form;
  LogValue middle_bound;
  LogValue outer_bound;
  /// Lemma bound with the denominator replaced by inner + middle + outer.
  double log_floor_explicit = 0.0;
  /// (1/6)(2^{1/p}/c)^{(1-t)d}.
  double log_floor_closed = 0.0;
  /// middle and outer bounds both below the inner term, so the denominator
  /// is at most 3 inner and the (1/6) floor is proven for this (t, d).
  bool dominance_holds = false;
  int d0 = 0;
  double b0 = 0.0;
};

DoublingResult doubling_certificate(double t, int d, double p, double p0_budget, double c);

/// Smallest d0 with both cap constants of the doubling construction <= 1 for
/// all d >= d0.
int doubling_d0(double c);

struct LebesgueBallResult {
  Certificate exact;
  double log_floor = 0.0;
};

LebesgueBallResult lebesgue_ball_certificate(int d, double p);

/// 2 v^{1/q} / sqrt(3 + 2v^2 - v^4).
double g_proxy(double v, double q);

struct OptimizeVResult {
  double v_star = 0.0;
  Certificate certificate;
  bool unimodal = false;
  /// g_proxy(v_star, q) for the restricted-Lebesgue family, else nullopt.
  std::optional<double> proxy;
};

OptimizeVResult optimize_v(const RadialDensity& density, double p, double R);

/// Log of the asymptotic covering-theorem bound (2.641)^{d/p}; the o(1)
/// correction is dropped.
double besicovitch_upper(int d, double p);

enum class CriticalBase { kDecp, kLebesgueBall };

/// log of 2^{1/p} 55^{-1/6} or 2^{2+1/p} / sqrt(55).
double log_critical_base(CriticalBase which, double p);
double critical_p(CriticalBase which);

/// One row of a parameter scan.
struct ScanRow {
  int d = 0;
  double p = 1.0;
  std::string family;
  std::string params;
  double log_lower = 0.0;
  double rate_per_dim = 0.0;
  double upper_log = 0.0;
  std::string error;
};

struct ScanTask {
  RadialDensity density;
  double p = 1.0;
  Construction construction = Construction::kLemmaDirect;
  double v = 0.5;
  double R = 1.0;
  double epsilon = 0.01;
  double c = 0.0;          // doubling only
  double p0_budget = 0.0;  // doubling only
  double t0 = 0.0;         // generalized only
  double t1 = 0.0;         // generalized only
};

ScanRow run_scan_task(const ScanTask& task);

/// Runs every task on `jobs` worker threads; rows come back sorted by
/// (family, d, p, params) regardless of completion order.
std::vector<ScanRow> run_scan(const std::vector<ScanTask>& tasks, unsigned jobs);

}  // namespace hlweak
