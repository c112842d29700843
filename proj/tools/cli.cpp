#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"

#include "hlweak/certificate.hpp"
#include "hlweak/errors.hpp"
#include "hlweak/oracle.hpp"
#include "hlweak/radial_density.hpp"
#include "hlweak/specfun.hpp"

namespace hlweak::cli {

namespace {

using Field = std::variant<std::string, double, long long, std::uint64_t, bool>;

struct Record {
  std::vector<std::pair<std::string, Field>> fields;

  template <class T>
  void add(std::string key, T value) {
    if constexpr (std::is_same_v<T, int>) {
      fields.emplace_back(std::move(key), static_cast<long long>(value));
    } else if constexpr (std::is_convertible_v<T, std::string>) {
      fields.emplace_back(std::move(key), std::string(value));
    } else {
      fields.emplace_back(std::move(key), value);
    }
  }
};

struct Options {
  std::string family = "restricted-lebesgue";
  int d = 0;
  std::string d_range;
  double t = 0.5;
  double radius = 1.0;
  double level = 1.0;
  std::string segments;
  double p = 1.0;
  std::string p_list;
  std::string construction = "lemma_direct";
  bool optimize = false;
  double v = 0.5;
  double R = 1.0;
  double epsilon = 0.01;
  double c = 1.2;
  double p0_budget = 0.0;
  double t0 = decp_t0();
  double t1 = decp_t0();
  std::uint64_t seed = 42;
  int samples = 200;
  int grid = 512;
  double s = 0.375;
  std::string s_grid;
  std::string format;
  std::string output;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  double tol = 1e-6;
};

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string shortest(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_cell(const Field& f) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) return csv_quote(x);
        else if constexpr (std::is_same_v<T, double>) return fmt_double(x);
        else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else return std::to_string(x);
      },
      f);
}

void write_records(std::ostream& os, const std::vector<Record>& records, const std::string& format,
                   const std::string* header = nullptr) {
  if (format == "json") {
    for (const auto& r : records) {
      nlohmann::ordered_json j;
      for (const auto& [k, v] : r.fields) {
        std::visit([&](const auto& x) { j[k] = x; }, v);
      }
      os << j.dump() << '\n';
    }
    return;
  }
  if (header) {
    os << *header << '\n';
  } else if (!records.empty()) {
    std::string line;
    for (const auto& [k, v] : records.front().fields) line += (line.empty() ? "" : ",") + k;
    os << line << '\n';
  }
  for (const auto& r : records) {
    std::string line;
    for (const auto& [k, v] : r.fields) line += (line.empty() ? "" : ",") + csv_cell(v);
    os << line << '\n';
  }
}

std::vector<double> parse_range(const std::string& text, const char* what) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError(std::string(what) + ": cannot parse '" + item + "'");
    }
  }
  if (sep == ',') return parts;
  if (parts.size() < 2 || parts.size() > 3) {
    throw DomainError(std::string(what) + ": expected a:b or a:b:step");
  }
  const double a = parts[0], b = parts[1], step = parts.size() == 3 ? parts[2] : 1.0;
  if (!(step > 0.0)) throw DomainError(std::string(what) + ": step must be positive");
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double x = a + k * step;
    if (x > b + 1e-9 * std::max(1.0, std::fabs(b))) break;
    out.push_back(x);
  }
  return out;
}

std::vector<int> dimensions(const Options& o, const CLI::App& app) {
  std::vector<int> ds;
  if (app.count("--d-range") > 0) {
    for (double x : parse_range(o.d_range, "--d-range")) {
      if (x != std::floor(x)) throw DomainError("--d-range: dimensions must be integers");
      ds.push_back(static_cast<int>(x));
    }
    if (ds.empty()) throw DomainError("--d-range is empty");
  } else if (app.count("--d") > 0) {
    ds.push_back(o.d);
  } else {
    throw DomainError("missing --d");
  }
  for (int d : ds) {
    if (d < 1) throw DomainError("dimension must be >= 1 (got " + std::to_string(d) + ")");
  }
  return ds;
}

std::vector<double> exponents(const Options& o, const CLI::App& app) {
  std::vector<double> ps =
      app.count("--p-list") > 0 ? parse_range(o.p_list, "--p-list") : std::vector<double>{o.p};
  if (ps.empty()) throw DomainError("--p-list is empty");
  for (double p : ps) {
    if (!(p >= 1.0)) throw DomainError("p must be >= 1 (got " + fmt_double(p) + ")");
  }
  return ps;
}

RadialDensity make_density(const Options& o, const CLI::App& app, int d) {
  std::map<std::string, std::string> kv{{"family", o.family}, {"dim", std::to_string(d)}};
  if (app.count("--t") > 0) kv["t"] = shortest(o.t);
  if (app.count("--radius") > 0) kv["radius"] = shortest(o.radius);
  if (app.count("--level") > 0) kv["level"] = shortest(o.level);
  if (app.count("--segments") > 0) kv["segments"] = o.segments;
  return RadialDensity::from_kv(kv);
}

void add_certificate(Record& r, const Certificate& c) {
  r.add("d", c.dim());
  r.add("p", c.p);
  r.add("family", c.density.family_name());
  r.add("params", c.density.params_string());
  r.add("construction", construction_name(c.construction));
  r.add("v", c.v);
  r.add("R", c.R);
  r.add("H", c.H);
  r.add("log_inner", c.term_inner.log());
  r.add("log_level", c.term_level.log());
  r.add("log_denom", c.term_denom.log());
  r.add("log_alpha", c.log_alpha());
  r.add("log_lower", c.log_lower_bound);
  r.add("rate_per_dim", c.rate_per_dim());
  const double upper = besicovitch_upper(c.dim(), c.p);
  r.add("upper_log", upper);
  r.add("upper_rate", upper / c.dim());
  r.add("upper_asymptotic", true);
}

void add_floor(Record& r, double log_floor, int d) {
  r.add("log_floor", log_floor);
  r.add("floor_rate", log_floor / d);
}

void add_decp(Record& r, const DecpResult& res) {
  add_certificate(r, res.exact);
  r.add("epsilon", res.epsilon);
  r.add("R1", res.R1);
  r.add("log_h_R1", res.log_h_R1);
  r.add("log_h_R1_over_u", res.log_h_R1_over_u);
  r.add("log_h_R1_over_u2", res.log_h_R1_over_u2);
  r.add("hypothesis", "verified on grid");
  r.add("log_sup_h", res.hypothesis.log_sup);
  r.add("log_sup_threshold", res.hypothesis.log_threshold_sup);
  r.add("log_limsup_h", res.hypothesis.log_limsup);
  r.add("log_limsup_threshold", res.hypothesis.log_threshold_limsup);
  add_floor(r, res.log_floor, res.exact.dim());
  r.add("degenerate_rate", res.degenerate_rate);
}

Record certify_one(const Options& o, const CLI::App& app, int d, double p) {
  const Construction kind = parse_construction(o.construction);
  Record r;
  r.add("command", "certify");
  switch (kind) {
    case Construction::kLemmaDirect: {
      const RadialDensity density = make_density(o, app, d);
      if (o.optimize) {
        const OptimizeVResult res = optimize_v(density, p, o.R);
        add_certificate(r, res.certificate);
        r.add("v_star", res.v_star);
        r.add("unimodal", res.unimodal);
        if (res.proxy) r.add("g_proxy", *res.proxy);
      } else {
        add_certificate(r, lemma_certificate(density, p, o.v, o.R));
      }
      break;
    }
    case Construction::kDecp: {
      const DecpResult res = decp_certificate(make_density(o, app, d), p, o.epsilon);
      add_decp(r, res);
      r.add("floor_constant", res.floor_constant);
      break;
    }
    case Construction::kDecpGeneralized: {
      const DecpGeneralizedResult res =
          decp_generalized_certificate(make_density(o, app, d), p, o.t0, o.t1, o.epsilon);
      add_decp(r, res.construction);
      r.add("t0", res.t0);
      r.add("t1", res.t1);
      r.add("base_inner", res.base_inner);
      r.add("base_middle", res.base_middle);
      r.add("base_outer", res.base_outer);
      r.add("base", res.base);
      r.add("p0", res.p0);
      break;
    }
    case Construction::kDoubling: {
      const RadialDensity density = make_density(o, app, d);
      if (density.family() != RadialDensity::Family::kPower) {
        throw DomainError("doubling construction requires --family power");
      }
      const double budget = app.count("--p0-budget") > 0 ? o.p0_budget : p;
      const DoublingResult res = doubling_certificate(density.t(), d, p, budget, o.c);
      add_certificate(r, res.exact);
      r.add("c", res.c);
      r.add("p0_budget", res.p0_budget);
      r.add("log_inner_closed_form", res.inner_closed_form.log());
      r.add("log_middle_bound", res.middle_bound.log());
      r.add("log_outer_bound", res.outer_bound.log());
      r.add("log_floor_explicit", res.log_floor_explicit);
      add_floor(r, res.log_floor_closed, d);
      r.add("dominance_holds", res.dominance_holds);
      r.add("d0", res.d0);
      r.add("b0", res.b0);
      break;
    }
    case Construction::kLebesgueBall: {
      if (make_density(o, app, d).family() != RadialDensity::Family::kRestrictedLebesgue) {
        throw DomainError("lebesgue_ball construction requires --family restricted-lebesgue");
      }
      const LebesgueBallResult res = lebesgue_ball_certificate(d, p);
      add_certificate(r, res.exact);
      add_floor(r, res.log_floor, d);
      break;
    }
  }
  return r;
}

std::ostream* open_output(const Options& o, std::ofstream& file, std::ostream& out) {
  if (o.output.empty()) return &out;
  std::filesystem::path path(o.output);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("HLWEAK_OUTPUT_DIR"); dir && *dir) path = dir / path;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  file.open(path);
  if (!file) throw DomainError("cannot open output file " + path.string());
  return &file;
}

int cmd_certify(const Options& o, const CLI::App& app, std::ostream& os) {
  const auto ds = dimensions(o, app);
  const auto ps = exponents(o, app);
  if (ds.size() != 1 || ps.size() != 1) throw DomainError("certify takes a single --d and --p");
  write_records(os, {certify_one(o, app, ds.front(), ps.front())}, o.format);
  return kOk;
}

int cmd_scan(const Options& o, const CLI::App& app, std::ostream& os, std::ostream& err) {
  const auto ds = dimensions(o, app);
  const auto ps = exponents(o, app);
  const Construction kind = parse_construction(o.construction);
  std::vector<ScanTask> tasks;
  for (int d : ds) {
    const RadialDensity density = make_density(o, app, d);
    for (double p : ps) {
      ScanTask task;
      task.density = density;
      task.p = p;
      task.construction = kind;
      task.v = o.v;
      task.R = o.R;
      task.epsilon = o.epsilon;
      task.c = o.c;
      task.p0_budget = app.count("--p0-budget") > 0 ? o.p0_budget : 0.0;
      task.t0 = o.t0;
      task.t1 = o.t1;
      tasks.push_back(std::move(task));
    }
  }
  const auto rows = run_scan(tasks, o.jobs);
  std::vector<Record> records;
  bool any_ok = false;
  for (const auto& row : rows) {
    Record r;
    r.add("d", row.d);
    r.add("p", row.p);
    r.add("family", row.family);
    r.add("params", row.params);
    r.add("log_lower", row.log_lower);
    r.add("rate_per_dim", row.rate_per_dim);
    r.add("upper_log", row.upper_log);
    r.add("error", row.error);
    records.push_back(std::move(r));
    any_ok = any_ok || row.error.empty();
  }
  write_records(os, records, o.format, &scan_csv_header());
  if (!any_ok) {
    err << "error: every scan row failed\n";
    return kUsage;
  }
  return kOk;
}

int cmd_oracle(const Options& o, const CLI::App& app, std::ostream& os, std::ostream& err) {
  const auto ds = dimensions(o, app);
  const auto ps = exponents(o, app);
  if (ds.size() != 1 || ps.size() != 1) throw DomainError("oracle takes a single --d and --p");
  const int d = ds.front();
  if (d > 10) {
    throw DomainError("oracle refuses d > 10: every radius needs two nested quadratures and the "
                      "level-set check needs hundreds of radii");
  }
  MaximalOptions mo;
  mo.grid = o.grid;
  const OracleReport rep =
      run_oracle(make_density(o, app, d), ps.front(), o.v, o.R, o.samples, o.seed, mo);
  Record r;
  r.add("command", "oracle");
  r.add("d", rep.d);
  r.add("density", rep.density_id);
  r.add("p", rep.p);
  r.add("v", rep.v);
  r.add("point_radius", rep.point_radius);
  r.add("log_alpha", rep.alpha.log());
  r.add("log_max_value", rep.max_value.log());
  r.add("level_set_ok", rep.level_set_ok);
  r.add("worst_margin", rep.worst_margin);
  r.add("log_empirical_weak_ratio", rep.empirical_weak_ratio.log());
  r.add("log_certificate", rep.certificate_log_bound);
  r.add("rate_per_dim", rep.certificate_log_bound / rep.d);
  r.add("dual_path_gap", std::fabs(rep.empirical_weak_ratio.log() - rep.certificate_log_bound));
  r.add("radius_grid_size", rep.radius_grid_size);
  r.add("samples", rep.samples);
  r.add("rng_seed", rep.rng_seed);
  const bool pass = rep.passed(o.tol);
  r.add("pass", pass);
  write_records(os, {r}, o.format);
  if (!pass) {
    err << "oracle: soundness check failed\n";
    return kOracleFailure;
  }
  return kOk;
}

int cmd_caps(const Options& o, const CLI::App& app, std::ostream& os) {
  const auto ds = dimensions(o, app);
  const std::vector<double> ss =
      app.count("--s-grid") > 0 ? parse_range(o.s_grid, "--s-grid") : std::vector<double>{o.s};
  std::vector<Record> records;
  for (int d : ds) {
    if (d < 2) throw DomainError("caps needs d >= 2");
    for (double s : ss) {
      if (!(s >= 0.0 && s < 1.0)) throw DomainError("caps: s must lie in [0, 1)");
      const CapSpec cap = CapSpec::from_cosine(d, s);
      const LogValue exact = cap_area_exact(cap);
      // s = 0: only the lower bound is meaningful
      const auto [lo, hi] =
          s > 0.0 ? cap_area_bounds(cap)
                  : std::pair{LogValue::from_log(-0.5 * std::log(2.0 * std::numbers::pi * d)),
                              LogValue::from_log(std::numeric_limits<double>::infinity())};
      Record r;
      r.add("d", d);
      r.add("s", s);
      r.add("t", cap.t);
      r.add("log_exact", exact.log());
      r.add("exact", exact.linear());
      r.add("log_lower", lo.log());
      r.add("log_upper", hi.log());
      r.add("rate_per_dim", exact.log() / d);
      r.add("sandwich_ok", log_le(lo, exact) && log_le(exact, hi));
      records.push_back(std::move(r));
    }
  }
  write_records(os, records, o.format);
  return kOk;
}

int cmd_critical_p(const Options& o, const CLI::App& app, std::ostream& os) {
  std::vector<Record> records;
  for (const auto& [name, which] : {std::pair{"decp", CriticalBase::kDecp},
                                    std::pair{"lebesgue_ball", CriticalBase::kLebesgueBall}}) {
    Record r;
    r.add("construction", name);
    r.add("p_critical", critical_p(which));
    if (app.count("--p") > 0) {
      r.add("p", o.p);
      r.add("log_base", log_critical_base(which, o.p));
    }
    records.push_back(std::move(r));
  }
  write_records(os, records, o.format);
  return kOk;
}

}  // namespace

const std::string& scan_csv_header() {
  static const std::string header = "d,p,family,params,log_lower,rate_per_dim,upper_log,error";
  return header;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Lower-bound certificates for weak-type constants of centered maximal operators"};
  app.name("hlweak");
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "key = value file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--family", o.family, "Density family")->capture_default_str();
  app.add_option("--d,--dim", o.d, "Dimension");
  app.add_option("--d-range", o.d_range, "Dimensions a:b[:step]");
  app.add_option("--t", o.t, "Power exponent t");
  app.add_option("--radius", o.radius, "Support radius (restricted-lebesgue)");
  app.add_option("--level", o.level, "Density level (lebesgue)");
  app.add_option("--segments", o.segments, "bp:coef[:exp],... (piecewise)");
  app.add_option("--p", o.p, "Exponent p >= 1")->capture_default_str();
  app.add_option("--p-list", o.p_list, "p values, comma list or a:b:step");
  app.add_option("--construction", o.construction, "lemma_direct|decp|decp_generalized|doubling|lebesgue_ball")
      ->capture_default_str();
  app.add_flag("--optimize-v", o.optimize, "Optimize v (lemma_direct)");
  app.add_option("--v", o.v, "Test ball ratio v")->capture_default_str();
  app.add_option("--R", o.R, "Level radius R")->capture_default_str();
  app.add_option("--epsilon", o.epsilon, "Slack in the R1 selection")->capture_default_str();
  app.add_option("--c", o.c, "Doubling base c")->capture_default_str();
  app.add_option("--p0-budget", o.p0_budget, "Doubling p0 (default p)");
  app.add_option("--t0", o.t0, "Generalized threshold exponent t0");
  app.add_option("--t1", o.t1, "Generalized threshold exponent t1");
  app.add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  app.add_option("--samples", o.samples, "Level-set samples")->capture_default_str();
  app.add_option("--grid", o.grid, "Radius grid size")->capture_default_str();
  app.add_option("--s", o.s, "Cap cosine")->capture_default_str();
  app.add_option("--s-grid", o.s_grid, "Cap cosines a:b:step");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", o.output, "Output file (relative to $HLWEAK_OUTPUT_DIR)");
  app.add_option("--jobs", o.jobs, "Scan worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol", o.tol, "Oracle dual-path tolerance (log)")->capture_default_str();

  auto* certify = app.add_subcommand("certify", "One certificate");
  auto* scan = app.add_subcommand("scan", "Certificates over d and p");
  auto* oracle = app.add_subcommand("oracle", "Brute-force check in low dimension");
  auto* caps = app.add_subcommand("caps", "Cap areas against their bounds");
  auto* critical = app.add_subcommand("critical-p", "Critical exponents");
  for (auto* sub : {certify, scan, oracle, caps, critical}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    std::ofstream file;
    if (o.format.empty()) o.format = (*scan || *caps) ? "csv" : "json";
    std::ostream& os = *open_output(o, file, out);
    if (*certify) return cmd_certify(o, app, os);
    if (*scan) return cmd_scan(o, app, os, err);
    if (*oracle) return cmd_oracle(o, app, os, err);
    if (*caps) return cmd_caps(o, app, os);
    return cmd_critical_p(o, app, os);
  } catch (const HypothesisError& e) {
    err << "hypothesis violated (" << e.inequality() << "): " << e.what() << '\n';
    return kHypothesis;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace hlweak::cli
