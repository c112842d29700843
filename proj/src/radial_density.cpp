#include "hlweak/radial_density.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "hlweak/errors.hpp"
#include "hlweak/quadrature.hpp"
#include "hlweak/specfun.hpp"

namespace hlweak {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "+inf") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DomainError("cannot parse value '" + text + "' for key '" + key + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string normalize_family(std::string name) {
  std::replace(name.begin(), name.end(), '_', '-');
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (name == "constant") return "lebesgue";
  return name;
}

}  // namespace

RadialDensity RadialDensity::lebesgue(int dim, double level) {
  RadialDensity f(Family::kConstant, dim);
  if (!(level > 0.0) || std::isinf(level)) throw DomainError("lebesgue: level must be positive");
  f.segments_ = {{kInf, level, 0.0}};
  f.validate();
  return f;
}

RadialDensity RadialDensity::restricted_lebesgue(int dim, double radius) {
  RadialDensity f(Family::kRestrictedLebesgue, dim);
  if (!(radius > 0.0) || std::isinf(radius)) {
    throw DomainError("restricted-lebesgue: radius must be positive and finite");
  }
  f.segments_ = {{radius, 1.0, 0.0}};
  f.validate();
  return f;
}

RadialDensity RadialDensity::power(int dim, double t) {
  RadialDensity f(Family::kPower, dim);
  if (!(t > 0.0 && t < 1.0)) throw DomainError("power: t must lie in (0, 1)");
  f.t_ = t;
  f.segments_ = {{kInf, 1.0, t * dim}};
  f.validate();
  return f;
}

RadialDensity RadialDensity::truncated_power(int dim, double t) {
  RadialDensity f(Family::kTruncatedPower, dim);
  if (!(t > 0.0 && t < 1.0)) throw DomainError("truncated-power: t must lie in (0, 1)");
  f.t_ = t;
  f.segments_ = {{1.0, 1.0, t * dim}};
  f.validate();
  return f;
}

RadialDensity RadialDensity::log_singularity(int dim) {
  RadialDensity f(Family::kLogSingularity, dim);
  f.validate();
  return f;
}

RadialDensity RadialDensity::piecewise(int dim, std::vector<Segment> segments) {
  RadialDensity f(Family::kPiecewise, dim);
  f.segments_ = std::move(segments);
  f.validate();
  return f;
}

void RadialDensity::validate() const {
  if (dim_ < 1) throw DomainError("density: dimension must be >= 1");
  if (family_ == Family::kLogSingularity) return;
  if (segments_.empty()) throw DomainError("density: at least one segment required");
  bool any_positive = false;
  double prev = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (!(s.breakpoint > prev)) throw DomainError("density: breakpoints must be positive and increasing");
    if (std::isinf(s.breakpoint) && i + 1 != segments_.size()) {
      throw DomainError("density: only the last breakpoint may be infinite");
    }
    if (!(s.coefficient >= 0.0) || std::isinf(s.coefficient)) {
      throw DomainError("density: coefficients must be finite and nonnegative");
    }
    if (!(s.exponent >= 0.0) || std::isinf(s.exponent)) {
      throw DomainError("density: exponents must be finite and nonnegative (f nonincreasing)");
    }
    if (i + 1 < segments_.size()) {
      const Segment& n = segments_[i + 1];
      const double left = s.coefficient * std::pow(s.breakpoint, -s.exponent);
      const double right = n.coefficient * std::pow(s.breakpoint, -n.exponent);
      if (right > left * (1.0 + 1e-14)) {
        throw DomainError("density: f increases at breakpoint " + fmt(s.breakpoint));
      }
    }
    any_positive = any_positive || s.coefficient > 0.0;
    prev = s.breakpoint;
  }
  if (!any_positive) throw DomainError("density: f is zero almost everywhere");
  const Segment& first = segments_.front();
  if (first.coefficient > 0.0 && !(first.exponent < dim_)) {
    throw DomainError("density: f(r) r^{d-1} is not locally integrable at 0");
  }
}

double RadialDensity::value(double r) const {
  if (family_ == Family::kLogSingularity) return (r > 0.0 && r <= 1.0) ? -std::log(r) : (r <= 0.0 ? kInf : 0.0);
  for (const Segment& s : segments_) {
    if (r <= s.breakpoint) {
      if (s.coefficient == 0.0) return 0.0;
      return s.exponent == 0.0 ? s.coefficient : s.coefficient * std::pow(r, -s.exponent);
    }
  }
  return 0.0;
}

double RadialDensity::log_value_at_log_radius(double sigma) const {
  if (family_ == Family::kLogSingularity) return sigma < 0.0 ? std::log(-sigma) : kNegInf;
  for (const Segment& s : segments_) {
    if (sigma <= std::log(s.breakpoint)) {
      if (s.coefficient == 0.0) return kNegInf;
      return std::log(s.coefficient) - s.exponent * sigma;
    }
  }
  return kNegInf;
}

std::vector<double> RadialDensity::breakpoints() const {
  if (family_ == Family::kLogSingularity) return {1.0};
  std::vector<double> out;
  for (const Segment& s : segments_) {
    if (!std::isinf(s.breakpoint)) out.push_back(s.breakpoint);
  }
  return out;
}

double RadialDensity::support_radius() const {
  if (family_ == Family::kLogSingularity) return 1.0;
  double sup = 0.0;
  for (const Segment& s : segments_) {
    if (s.coefficient > 0.0) sup = s.breakpoint;
  }
  return sup;
}

double RadialDensity::scale() const {
  switch (family_) {
    case Family::kRestrictedLebesgue:
      return segments_.front().breakpoint;
    case Family::kPiecewise: {
      const auto bps = breakpoints();
      return bps.empty() ? 1.0 : bps.back();
    }
    default:
      return 1.0;
  }
}

double RadialDensity::small_radius_exponent() const {
  if (family_ == Family::kLogSingularity) return dim_;
  return dim_ - segments_.front().exponent;
}

std::optional<double> RadialDensity::known_sup_radius() const {
  switch (family_) {
    case Family::kConstant:
    case Family::kPower:
    case Family::kTruncatedPower:
      return 1.0;
    case Family::kRestrictedLebesgue:
      return segments_.front().breakpoint;
    default:
      return std::nullopt;
  }
}

LogValue RadialDensity::log_radial_mass(double a, double b) const {
  if (a < 0.0 || std::isnan(a) || std::isnan(b)) throw DomainError("log_radial_mass: bad interval");
  if (!(b > a)) return LogValue::zero();
  const double d = dim_;
  if (family_ == Family::kLogSingularity) {
    // int (-ln r) r^{d-1} dr with r = e^sigma: int (-sigma) e^{d sigma} d sigma.
    const double hi = std::log(std::min(b, 1.0));
    if (a >= 1.0) return LogValue::zero();
    const double lo = a > 0.0 ? std::log(a) : hi - 100.0 / d;
    return integrate_log(
        [d](double s) { return s < 0.0 ? std::log(-s) + d * s : kNegInf; }, lo, hi);
  }
  LogValue total = LogValue::zero();
  double lo = 0.0;
  for (const Segment& s : segments_) {
    const double A = std::max(a, lo);
    const double B = std::min(b, s.breakpoint);
    lo = s.breakpoint;
    if (!(B > A) || s.coefficient == 0.0) continue;
    const double k = d - s.exponent;
    if (std::isinf(B)) {
      if (k >= 0.0) return LogValue::from_log(kInf);
      total += LogValue::from_log(std::log(s.coefficient) + k * std::log(A) - std::log(-k));
      continue;
    }
    const double log_b = std::log(B);
    const double log_ratio = A > 0.0 ? k * (std::log(A) - log_b) : kNegInf;
    total += LogValue::from_log(std::log(s.coefficient) + k * log_b - std::log(k) + log1mexp(log_ratio));
  }
  return total;
}

std::string RadialDensity::family_name() const {
  switch (family_) {
    case Family::kConstant: return "lebesgue";
    case Family::kRestrictedLebesgue: return "restricted-lebesgue";
    case Family::kPower: return "power";
    case Family::kTruncatedPower: return "truncated-power";
    case Family::kLogSingularity: return "log-singularity";
    case Family::kPiecewise: return "piecewise";
  }
  return "unknown";
}

std::vector<std::string> RadialDensity::family_names() {
  return {"lebesgue", "restricted-lebesgue", "power", "truncated-power", "log-singularity", "piecewise"};
}

std::string RadialDensity::params_string() const {
  std::string out;
  for (const auto& [k, v] : to_kv()) {
    if (k == "family" || k == "dim") continue;
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

std::string RadialDensity::id() const {
  std::string out = family_name() + "(d=" + std::to_string(dim_);
  const std::string params = params_string();
  if (!params.empty()) out += ";" + params;
  return out + ")";
}

std::map<std::string, std::string> RadialDensity::to_kv() const {
  std::map<std::string, std::string> kv{{"family", family_name()}, {"dim", std::to_string(dim_)}};
  switch (family_) {
    case Family::kConstant:
      kv["level"] = fmt(segments_.front().coefficient);
      break;
    case Family::kRestrictedLebesgue:
      kv["radius"] = fmt(segments_.front().breakpoint);
      break;
    case Family::kPower:
    case Family::kTruncatedPower:
      kv["t"] = fmt(t_);
      break;
    case Family::kPiecewise:
      kv["segments"] = format_segments(segments_);
      break;
    case Family::kLogSingularity:
      break;
  }
  return kv;
}

RadialDensity RadialDensity::from_kv(const std::map<std::string, std::string>& kv) {
  const auto get = [&kv](const std::string& key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  const auto family = get("family");
  if (!family) throw DomainError("density: missing 'family' key");
  auto dim_text = get("dim");
  if (!dim_text) dim_text = get("d");
  if (!dim_text) throw DomainError("density: missing 'dim' key");
  const double dim_value = parse_double("dim", *dim_text);
  if (dim_value != std::floor(dim_value) || dim_value < 1 || dim_value > 1e9) {
    throw DomainError("density: dimension must be an integer >= 1");
  }
  const int dim = static_cast<int>(dim_value);
  const auto number = [&](const std::string& key, double fallback) {
    const auto v = get(key);
    return v ? parse_double(key, *v) : fallback;
  };
  const auto required = [&](const std::string& key) {
    const auto v = get(key);
    if (!v) throw DomainError("density: missing '" + key + "' key");
    return parse_double(key, *v);
  };

  const std::string name = normalize_family(*family);
  if (name == "lebesgue") return lebesgue(dim, number("level", 1.0));
  if (name == "restricted-lebesgue") return restricted_lebesgue(dim, number("radius", 1.0));
  if (name == "power") return power(dim, required("t"));
  if (name == "truncated-power") return truncated_power(dim, required("t"));
  if (name == "log-singularity") return log_singularity(dim);
  if (name == "piecewise") {
    const auto segs = get("segments");
    if (!segs) throw DomainError("density: piecewise family requires 'segments'");
    return piecewise(dim, parse_segments(*segs));
  }
  std::string known;
  for (const auto& n : family_names()) known += (known.empty() ? "" : ", ") + n;
  throw DomainError("unknown density family '" + *family + "' (known: " + known + ")");
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    // "key = value" on its own line, or several key=value tokens.
    std::vector<std::string> tokens;
    if (const auto eq = line.find('='); eq != std::string::npos &&
        line.find('=', eq + 1) == std::string::npos) {
      tokens.push_back(line);
    } else {
      std::istringstream words(line);
      std::string w;
      while (words >> w) tokens.push_back(w);
    }
    for (const std::string& tok : tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw DomainError("key-value: expected key=value, got '" + tok + "'");
      const std::string key = trim(tok.substr(0, eq));
      if (key.empty()) throw DomainError("key-value: empty key in '" + tok + "'");
      out[key] = trim(tok.substr(eq + 1));
    }
  }
  return out;
}

std::string format_kv(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::vector<RadialDensity::Segment> parse_segments(const std::string& text) {
  std::vector<RadialDensity::Segment> out;
  std::istringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::vector<std::string> parts;
    std::istringstream fields(item);
    std::string f;
    while (std::getline(fields, f, ':')) parts.push_back(trim(f));
    if (parts.size() != 2 && parts.size() != 3) {
      throw DomainError("segments: expected breakpoint:coefficient[:exponent], got '" + item + "'");
    }
    out.push_back({parse_double("segments", parts[0]), parse_double("segments", parts[1]),
                   parts.size() == 3 ? parse_double("segments", parts[2]) : 0.0});
  }
  return out;
}

std::string format_segments(const std::vector<RadialDensity::Segment>& segments) {
  std::string out;
  for (const auto& s : segments) {
    if (!out.empty()) out += ',';
    out += fmt(s.breakpoint) + ":" + fmt(s.coefficient) + ":" + fmt(s.exponent);
  }
  return out;
}

}  // namespace hlweak
