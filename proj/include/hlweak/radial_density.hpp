#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hlweak/log_value.hpp"

namespace hlweak {

/// A nonincreasing radial density f on (0, inf) in a fixed dimension d,
/// defining d mu = f(|y|) d lambda^d.
///
/// Immutable after construction; the factories validate monotonicity,
/// nontriviality and local integrability of f(r) r^{d-1}.
class RadialDensity {
 public:
  enum class Family {
    kConstant,            // f = level
    kRestrictedLebesgue,  // f = chi_[0, radius]
    kPower,               // f = r^{-t d}
    kTruncatedPower,      // f = r^{-t d} chi_(0,1]
    kLogSingularity,      // f = |ln r| chi_(0,1]
    kPiecewise,           // user segments c_i r^{-e_i}
  };

  /// f(r) = coefficient * r^{-exponent} on (previous breakpoint, breakpoint].
  /// The last breakpoint may be +inf; beyond a finite last breakpoint f = 0.
  struct Segment {
    double breakpoint;
    double coefficient;
    double exponent;
  };

  /// Lebesgue measure on the line.
  RadialDensity() : RadialDensity(Family::kConstant, 1) {
    segments_ = {{std::numeric_limits<double>::infinity(), 1.0, 0.0}};
  }

  static RadialDensity lebesgue(int dim, double level = 1.0);
  static RadialDensity restricted_lebesgue(int dim, double radius = 1.0);
  static RadialDensity power(int dim, double t);
  static RadialDensity truncated_power(int dim, double t);
  static RadialDensity log_singularity(int dim);
  static RadialDensity piecewise(int dim, std::vector<Segment> segments);

  Family family() const { return family_; }
  int dim() const { return dim_; }
  /// Power exponent t for the power families, 0 otherwise.
  double t() const { return t_; }
  const std::vector<Segment>& segments() const { return segments_; }

  /// f(r); zero outside the support.
  double value(double r) const;
  /// ln f(e^sigma), evaluated without forming e^sigma.
  double log_value_at_log_radius(double sigma) const;

  /// Interior discontinuities of f, ascending.
  std::vector<double> breakpoints() const;
  /// Sup of the support; +inf for unbounded support.
  double support_radius() const;
  /// Characteristic radius used to place sampling grids.
  double scale() const;
  /// Exponent k with f(r) r^{d-1} ~ r^{k-1} as r -> 0.
  double small_radius_exponent() const;
  /// Radius where sup_R h_u(R) is attained, when known in closed form.
  std::optional<double> known_sup_radius() const;

  /// log of int_a^b f(r) r^{d-1} dr, 0 <= a <= b <= inf (no sphere factor).
  LogValue log_radial_mass(double a, double b) const;

  /// Canonical family name as used by the key-value format.
  std::string family_name() const;
  /// Parameters other than the family and dimension, as "k=v;k=v".
  std::string params_string() const;
  std::string id() const;

  /// Plain-text key-value form ("family", "dim" and family parameters).
  std::map<std::string, std::string> to_kv() const;
  static RadialDensity from_kv(const std::map<std::string, std::string>& kv);

  static std::vector<std::string> family_names();

 private:
  RadialDensity(Family family, int dim) : family_(family), dim_(dim) {}
  void validate() const;

  Family family_;
  int dim_;
  double t_ = 0.0;
  // Every family except the log singularity is stored as segments.
  std::vector<Segment> segments_;
};

/// Parses "key = value" lines (or whitespace-separated key=value tokens);
/// '#' starts a comment.
std::map<std::string, std::string> parse_kv(const std::string& text);
std::string format_kv(const std::map<std::string, std::string>& kv);

/// Segments encoded as "breakpoint:coefficient:exponent,..." ("inf" allowed).
std::vector<RadialDensity::Segment> parse_segments(const std::string& text);
std::string format_segments(const std::vector<RadialDensity::Segment>& segments);

}  // namespace hlweak
