#include "hlweak/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "hlweak/errors.hpp"

namespace hlweak {

namespace {

// 21-point Kronrod abscissae; odd indices are the 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Panel {
  double a;
  double b;
  double log_value;  // log of the Kronrod estimate
  double log_error;  // log of |Kronrod - Gauss|
  bool operator<(const Panel& o) const { return log_error < o.log_error; }
};

double log_add(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

Panel evaluate_panel(const std::function<double(double)>& g, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 21> values{};
  values[20] = g(center);
  for (int j = 0; j < 10; ++j) {
    values[2 * j] = g(center - half * kXgk[j]);
    values[2 * j + 1] = g(center + half * kXgk[j]);
  }
  double peak = kNegInf;
  for (double v : values) {
    if (std::isnan(v)) throw DomainError("integrate_log: integrand returned NaN");
    peak = std::max(peak, v);
  }
  if (peak == kNegInf) return {a, b, kNegInf, kNegInf};
  if (peak == std::numeric_limits<double>::infinity()) {
    throw DomainError("integrate_log: integrand is infinite at a node");
  }
  double kronrod = kWgk[10] * std::exp(values[20] - peak);
  double gauss = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double pair = std::exp(values[2 * j] - peak) + std::exp(values[2 * j + 1] - peak);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  const double err = std::fabs(kronrod - gauss);
  return {a, b, peak + std::log(half * kronrod),
          err > 0.0 ? peak + std::log(half * err) : kNegInf};
}

}  // namespace

LogValue integrate_log(const std::function<double(double)>& log_integrand,
                       std::span<const double> points, const QuadratureOptions& options) {
  if (points.size() < 2) throw DomainError("integrate_log: need at least two points");
  std::priority_queue<Panel> heap;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i] <= points[i + 1])) {
      throw DomainError("integrate_log: panel boundaries must be nondecreasing");
    }
    if (points[i] < points[i + 1]) heap.push(evaluate_panel(log_integrand, points[i], points[i + 1]));
  }
  if (heap.empty()) return LogValue::zero();

  const double log_tol = std::log(options.rel_tol);
  // Panels narrower than this cannot be split meaningfully.
  const auto unsplittable = [](const Panel& p) {
    const double scale = std::max(std::fabs(p.a), std::fabs(p.b));
    return (p.b - p.a) <= 64.0 * std::numeric_limits<double>::epsilon() * scale;
  };

  std::vector<Panel> settled;
  int subdivisions = 0;
  while (true) {
    double total = kNegInf;
    double error = kNegInf;
    // Heap iteration is by copy of the underlying container.
    auto copy = heap;
    while (!copy.empty()) {
      total = log_add(total, copy.top().log_value);
      error = log_add(error, copy.top().log_error);
      copy.pop();
    }
    for (const Panel& p : settled) total = log_add(total, p.log_value);
    if (total == kNegInf) return LogValue::zero();
    if (error <= total + log_tol) return LogValue::from_log(total);

    // Split the worst panels in a batch so the bookkeeping above stays cheap.
    const std::size_t batch = std::max<std::size_t>(1, heap.size() / 4);
    for (std::size_t k = 0; k < batch && !heap.empty(); ++k) {
      const Panel worst = heap.top();
      if (worst.log_error <= total + log_tol - std::log(static_cast<double>(heap.size()) + 1.0)) {
        break;
      }
      heap.pop();
      if (unsplittable(worst)) {
        settled.push_back(worst);
        continue;
      }
      if (++subdivisions > options.max_subdivisions) {
        throw PrecisionError("integrate_log: subdivision budget of " +
                             std::to_string(options.max_subdivisions) + " exhausted");
      }
      const double mid = 0.5 * (worst.a + worst.b);
      heap.push(evaluate_panel(log_integrand, worst.a, mid));
      heap.push(evaluate_panel(log_integrand, mid, worst.b));
    }
  }
}

LogValue integrate_log(const std::function<double(double)>& log_integrand, double a, double b,
                       const QuadratureOptions& options) {
  const std::array<double, 2> pts{a, b};
  return integrate_log(log_integrand, pts, options);
}

}  // namespace hlweak
