#include "homflow/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <json.hpp>

#include "homflow/errors.hpp"
#include "homflow/lie_butcher.hpp"
#include "homflow/parallel.hpp"
#include "homflow/random.hpp"

namespace homflow {
namespace {

constexpr const char* kLibraryVersion = "0.1.0";

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names{
      {ExperimentKind::LocalOrder, "local-order"}, {ExperimentKind::GlobalOrder, "global-order"},
      {ExperimentKind::Gronwall, "gronwall"},      {ExperimentKind::Windermere, "windermere"},
      {ExperimentKind::Mechanism, "mechanism"},    {ExperimentKind::Trees, "trees"},
      {ExperimentKind::LieSeries, "lie-series"}};
  return names;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "version", "experiment", "space",      "field",      "field.vector", "field.epsilon", "methods",
      "h_ladder", "n_ladder",  "T",          "epsilon",    "seed",         "pairs",         "pair_radius",
      "steps",    "h",         "resolution", "max_order",  "orders",       "output"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
}

long long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
  }
}

// "2^k" -> k
int parse_power(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.rfind("2^", 0) != 0) throw ConfigError("key '" + key + "': expected 2^k in a range, got '" + t + "'");
  return static_cast<int>(parse_int(key, t.substr(2)));
}

std::vector<double> parse_ladder(const std::string& key, const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
      if (item.rfind("2^", 0) == 0) out.push_back(std::ldexp(1.0, parse_power(key, item)));
      else out.push_back(parse_double(key, item));
    }
    return out;
  }
  const int from = parse_power(key, text.substr(0, dots));
  const int to = parse_power(key, text.substr(dots + 2));
  if (std::abs(to - from) > 40) throw ConfigError("key '" + key + "': range too long");
  std::vector<double> out;
  const int dir = to >= from ? 1 : -1;
  for (int k = from;; k += dir) {
    out.push_back(std::ldexp(1.0, k));
    if (k == to) break;
  }
  return out;
}

bool uses_methods(ExperimentKind k) {
  return k == ExperimentKind::LocalOrder || k == ExperimentKind::GlobalOrder || k == ExperimentKind::Windermere ||
         k == ExperimentKind::Mechanism;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no infinity; unbounded ends become null.
nlohmann::ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kind_names())
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& [k, n] : kind_names())
    if (n == name) return k;
  throw ConfigError("unknown experiment '" + name + "'");
}

std::vector<std::string> experiment_kind_names() {
  std::vector<std::string> out;
  for (const auto& entry : kind_names()) out.push_back(entry.second);
  return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (values.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    values[key] = value;
    c.echo.emplace_back(key, value);
  }

  if (!values.count("version")) throw ConfigError("missing required key 'version'");
  if (parse_int("version", values["version"]) != kVersion) {
    throw ConfigError("unsupported config version " + values["version"] + " (expected " + std::to_string(kVersion) + ")");
  }
  if (!values.count("experiment")) throw ConfigError("missing required key 'experiment'");
  c.kind = parse_experiment_kind(values["experiment"]);

  auto get = [&](const char* key) -> const std::string* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  if (auto v = get("field")) c.field = *v;
  if (auto v = get("space")) c.space = *v;
  if (get("field.vector") || get("field.epsilon")) {
    FieldParams p;
    try {
      p = default_field_params(c.field);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    if (auto v = get("field.vector")) {
      const auto parts = split_list(*v);
      if (parts.size() != 3) throw ConfigError("key 'field.vector': expected three comma-separated numbers");
      for (int i = 0; i < 3; ++i) p.vector(i) = parse_double("field.vector", parts[static_cast<std::size_t>(i)]);
    }
    if (auto v = get("field.epsilon")) p.epsilon = parse_double("field.epsilon", *v);
    c.field_params = p;
  }
  if (auto v = get("methods")) c.methods = split_list(*v);
  else if (uses_methods(c.kind)) c.methods = MethodSpec::known_ids();
  if (auto v = get("h_ladder")) c.h_ladder = parse_ladder("h_ladder", *v);
  if (auto v = get("n_ladder")) {
    for (double n : parse_ladder("n_ladder", *v)) {
      if (n != std::floor(n) || n < 1 || n > 1e8) throw ConfigError("key 'n_ladder': entries must be positive integers");
      c.n_ladder.push_back(static_cast<int>(n));
    }
  }
  if (auto v = get("T")) c.t_end = parse_double("T", *v);
  if (auto v = get("epsilon")) c.epsilon = parse_double("epsilon", *v);
  if (auto v = get("seed")) {
    const long long s = parse_int("seed", *v);
    if (s < 0) throw ConfigError("key 'seed': must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("pairs")) c.pairs = static_cast<int>(parse_int("pairs", *v));
  if (auto v = get("pair_radius")) c.pair_radius = parse_double("pair_radius", *v);
  if (auto v = get("steps")) c.steps = static_cast<int>(parse_int("steps", *v));
  if (auto v = get("h")) {
    const auto hs = parse_ladder("h", *v);
    if (hs.size() != 1) throw ConfigError("key 'h': expected a single step");
    c.h = hs[0];
  }
  if (auto v = get("resolution")) c.resolution = static_cast<int>(parse_int("resolution", *v));
  if (auto v = get("max_order")) c.max_order = static_cast<int>(parse_int("max_order", *v));
  if (auto v = get("orders")) {
    c.orders.clear();
    for (const auto& item : split_list(*v)) c.orders.push_back(static_cast<int>(parse_int("orders", item)));
  }
  if (auto v = get("output")) c.output_prefix = *v;
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

SpaceDescriptor ExperimentConfig::space_descriptor() const {
  const std::string id = space.empty() ? (field == "c" ? "group:3" : "sphere:3") : space;
  try {
    return SpaceDescriptor::parse(id);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

CoefficientField ExperimentConfig::make_field() const {
  try {
    const auto sp = space_descriptor();
    return field_params ? sample_field(sp, field, *field_params) : sample_field(sp, field);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

void ExperimentConfig::validate() const {
  if (kind != ExperimentKind::Trees) make_field();
  if (!output_prefix.empty() && output_prefix.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("key 'output': expected a file stem without directories");
  }
  if (uses_methods(kind)) {
    if (methods.empty()) throw ConfigError("key 'methods': at least one method is required");
    for (const auto& m : methods) {
      try {
        MethodSpec::from_id(m);
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  auto require_h_ladder = [&](std::size_t min_len) {
    if (h_ladder.size() < min_len) {
      throw ConfigError("key 'h_ladder': need at least " + std::to_string(min_len) + " steps, got " +
                        std::to_string(h_ladder.size()));
    }
    for (double h : h_ladder)
      if (!(h > 0.0)) throw ConfigError("key 'h_ladder': steps must be positive");
  };
  if (!(t_end > 0.0)) throw ConfigError("key 'T': must be positive");
  switch (kind) {
    case ExperimentKind::LocalOrder:
      require_h_ladder(4);
      if (epsilon < 0.0 || epsilon > std::numbers::pi / 4) throw ConfigError("key 'epsilon': expected 0 <= ε <= π/4");
      break;
    case ExperimentKind::LieSeries:
      require_h_ladder(4);
      if (orders.empty()) throw ConfigError("key 'orders': at least one order is required");
      for (int p : orders)
        if (p < 1 || p > 3) throw ConfigError("key 'orders': orders must lie in 1..3");
      break;
    case ExperimentKind::GlobalOrder:
      if (n_ladder.size() < 4) {
        throw ConfigError("key 'n_ladder': need at least 4 step counts, got " + std::to_string(n_ladder.size()));
      }
      break;
    case ExperimentKind::Gronwall:
      if (pairs < 1 || pairs > 10000) throw ConfigError("key 'pairs': expected 1..10000");
      if (!(pair_radius > 0.0 && pair_radius < 1.0)) throw ConfigError("key 'pair_radius': expected 0 < r < 1");
      if (resolution < 1 || resolution > 1024) throw ConfigError("key 'resolution': expected 1..1024");
      break;
    case ExperimentKind::Windermere:
      if (steps < 1 || steps > 100000) throw ConfigError("key 'steps': expected 1..100000");
      break;
    case ExperimentKind::Mechanism:
      require_h_ladder(2);
      if (!(h > 0.0)) throw ConfigError("key 'h': must be positive");
      if (!(epsilon > 0.0 && epsilon <= std::numbers::pi / 4)) throw ConfigError("key 'epsilon': expected 0 < ε <= π/4");
      break;
    case ExperimentKind::Trees:
      if (max_order < 0 || max_order > kMaxForestOrder) {
        throw ConfigError("key 'max_order': expected 0.." + std::to_string(kMaxForestOrder));
      }
      break;
  }
}

bool VerdictReport::pass() const {
  for (const auto& s : slopes)
    if (!s.report.pass) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

CsvTable order_csv(const ErrorTable& t) {
  CsvTable csv;
  csv.name = t.method;
  csv.header = {"h", "err_metric", "err_testfn_max"};
  csv.header.insert(csv.header.end(), t.aux_names.begin(), t.aux_names.end());
  for (const auto& r : t.rows) {
    std::vector<double> row{r.h, r.err_metric, r.err_testfn_max};
    row.insert(row.end(), r.aux.begin(), r.aux.end());
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

double worst_error(const ErrorTable& t) {
  double m = 0.0;
  for (const auto& r : t.rows) m = std::max({m, r.err_metric, r.err_testfn_max});
  return m;
}

void run_local(const ExperimentConfig& c, VerdictReport& rep) {
  const auto v = c.make_field();
  const auto suite = test_function_suite(v.space());
  const Point x0 = sample_point(v.space(), c.seed);
  for (const auto& id : c.methods) {
    const auto spec = MethodSpec::from_id(id);
    LocalTableOptions opt;
    opt.comparison_epsilon = c.epsilon;
    const auto table = local_error_table(spec, v, x0, c.h_ladder, suite, opt);
    rep.tables.push_back(order_csv(table));
    if (v.constant_value()) {
      const double worst = worst_error(table);
      rep.checks.push_back({id + ":constant_field_exactness", 0.0, worst, 1e-12, worst <= 1e-12});
      continue;
    }
    const double expected = spec.order + 1;
    for (const auto& [column, name] : {std::pair{ErrorColumn::Metric, "err_metric"},
                                       std::pair{ErrorColumn::TestFunctionMax, "err_testfn_max"}}) {
      auto slope = convergence_slope(table, column, expected - 0.25, expected + 0.25);
      slope.expected = expected;
      rep.slopes.push_back({id, name, slope});
    }
    if (c.epsilon > 0.0) {
      // One κ per ladder: err_metric <= κ · comparison_max, with κ stable across h.
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (const auto& r : table.rows) {
        if (r.err_metric < kErrorFloor || r.aux[0] <= 0.0) continue;
        lo = std::min(lo, r.aux[1]);
        hi = std::max(hi, r.aux[1]);
      }
      const double spread = hi > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
      rep.checks.push_back({id + ":comparability_spread", 10.0, spread, 0.0, spread < 10.0});
    }
  }
  if (v.constant_value()) rep.notes.push_back("exact on constant fields");
}

void run_global(const ExperimentConfig& c, VerdictReport& rep) {
  const auto v = c.make_field();
  const Point x0 = sample_point(v.space(), c.seed);
  for (const auto& id : c.methods) {
    const auto spec = MethodSpec::from_id(id);
    const auto table = global_error_table(spec, v, x0, c.t_end, c.n_ladder);
    rep.tables.push_back(order_csv(table));
    if (v.constant_value()) {
      const double worst = worst_error(table);
      rep.checks.push_back({id + ":constant_field_exactness", 0.0, worst, 1e-11, worst <= 1e-11});
      continue;
    }
    rep.slopes.push_back(
        {id, "err_metric", convergence_slope(table, ErrorColumn::Metric, spec.order - 0.25, spec.order + 0.25)});
    rep.slopes.back().report.expected = spec.order;
  }
  if (v.constant_value()) rep.notes.push_back("exact on constant fields");
}

void run_gronwall(const ExperimentConfig& c, VerdictReport& rep) {
  const auto v = c.make_field();
  const auto& sp = v.space();
  std::vector<GronwallReport> reports(static_cast<std::size_t>(c.pairs));
  std::vector<double> d0(reports.size());
  parallel_for(reports.size(), 0, [&](std::size_t k) {
    const Point p = sample_point(sp, c.seed + 100 + k);
    Rng rng(c.seed + k);
    Vector offset(sp.tangent_dim());
    for (Eigen::Index i = 0; i < offset.size(); ++i) offset(i) = c.pair_radius * rng.normal();
    const Point q = act(lift_to_group(p), exp_at_base(sp, offset));
    d0[k] = geodesic_distance(p, q);
    reports[k] = gronwall_check(v, p, q, c.t_end, c.resolution);
  });
  CsvTable csv{"pairs", {"pair", "distance", "c_t", "max_ratio", "pass"}, {}};
  double worst = 0.0;
  bool all = true;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    csv.rows.push_back({static_cast<double>(k), d0[k], reports[k].c_t, reports[k].max_ratio, reports[k].pass ? 1.0 : 0.0});
    worst = std::max(worst, reports[k].max_ratio);
    all = all && reports[k].pass;
  }
  rep.tables.push_back(std::move(csv));
  rep.checks.push_back({"max_ratio", 1.0, worst, kGronwallInflation - 1.0, all && worst <= 1.0});
}

void run_windermere(const ExperimentConfig& c, VerdictReport& rep) {
  const auto v = c.make_field();
  const Point x0 = sample_point(v.space(), c.seed);
  for (const auto& id : c.methods) {
    const auto fan = windermere_decomposition(MethodSpec::from_id(id), v, x0, uniform_grid(0.0, c.t_end, c.steps));
    CsvTable csv{id, {"i", "t", "e", "E", "horizon"}, {}};
    double transport = 0.0;
    for (std::size_t i = 0; i < fan.e.size(); ++i) {
      csv.rows.push_back({static_cast<double>(i + 1), fan.times[i + 1], fan.e[i], fan.big_e[i], fan.horizon[i]});
      const double bound = std::exp(fan.c_t * fan.horizon[i]) * fan.e[i];
      if (bound > 0.0) transport = std::max(transport, fan.big_e[i] / bound);
    }
    rep.tables.push_back(std::move(csv));
    rep.checks.push_back({id + ":transport", 1.0, transport, kGronwallInflation - 1.0, fan.transport_pass});
    rep.checks.push_back({id + ":triangle", 1.0, fan.sum_big_e > 0 ? fan.global_error / fan.sum_big_e : 0.0, 1e-9,
                          fan.triangle_pass});
    rep.checks.push_back({id + ":closing_bound", 1.0, fan.fan_bound > 0 ? fan.sum_big_e / fan.fan_bound : 0.0, 0.05,
                          fan.bound_pass});
  }
}

void run_mechanism(const ExperimentConfig& c, VerdictReport& rep) {
  const auto v = c.make_field();
  const Point x0 = sample_point(v.space(), c.seed);
  const ComparisonFamily family(v.space(), c.epsilon);
  for (const auto& id : c.methods) {
    const auto spec = MethodSpec::from_id(id);
    const auto single = mechanism_check(spec, v, x0, c.h, family);
    rep.checks.push_back({id + ":invariance", 0.0, single.invariance_defect, 1e-10, single.invariance_pass});
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < single.t.size(); ++i) margin = std::min(margin, single.comparison[i] - single.distance[i]);
    rep.checks.push_back({id + ":domination", 0.0, margin, 1e-14, single.domination_pass});

    const auto ladder = mechanism_ladder(spec, v, x0, c.h_ladder, family);
    CsvTable csv{id, {"h", "ratio", "invariance_defect", "domination"}, {}};
    bool ladder_ok = true;
    for (const auto& r : ladder.reports) {
      csv.rows.push_back({r.h, r.ratio, r.invariance_defect, r.domination_pass ? 1.0 : 0.0});
      ladder_ok = ladder_ok && r.pass();
    }
    rep.tables.push_back(std::move(csv));
    rep.checks.push_back({id + ":ladder_ratio_spread", 10.0, ladder.ratio_spread, 0.0, ladder.bounded_pass && ladder_ok});
  }
}

void run_trees(const ExperimentConfig& c, VerdictReport& rep) {
  CsvTable csv{"forests", {"order", "count"}, {}};
  double catalan = 1.0;
  for (int n = 0; n <= c.max_order; ++n) {
    if (n > 0) catalan = catalan * 2.0 * (2 * n - 1) / (n + 1);
    const auto count = static_cast<double>(generate_forests(n).size());
    csv.rows.push_back({static_cast<double>(n), count});
    rep.checks.push_back({"count_order_" + std::to_string(n), catalan, count, 0.0, count == catalan});
  }
  rep.tables.push_back(std::move(csv));
}

void run_lie_series(const ExperimentConfig& c, VerdictReport& rep) {
  const auto v = c.make_field();
  const auto suite = test_function_suite(v.space());
  const Point x0 = sample_point(v.space(), c.seed);
  std::vector<double> hs = c.h_ladder;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  std::vector<double> exact_values(hs.size() * suite.size());
  parallel_for(hs.size(), 0, [&](std::size_t i) {
    const Point y = reference_flow(v, x0, hs[i]);
    for (std::size_t j = 0; j < suite.size(); ++j) exact_values[i * suite.size() + j] = suite[j].value(y);
  });
  CsvTable csv{"defects", {"p", "function", "h", "defect", "remainder_probe"}, {}};
  for (int p : c.orders) {
    for (std::size_t j = 0; j < suite.size(); ++j) {
      std::vector<double> defects;
      double excess = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < hs.size(); ++i) {
        const auto r = lie_series_partial_sum(v, suite[j], x0, hs[i], p);
        const double defect = std::abs(exact_values[i * suite.size() + j] - r.value);
        defects.push_back(defect);
        excess = std::max(excess, defect - r.remainder_bound_probe);
        csv.rows.push_back({static_cast<double>(p), static_cast<double>(j), hs[i], defect, r.remainder_bound_probe});
      }
      const std::string label = "p=" + std::to_string(p);
      rep.slopes.push_back(
          {label, suite[j].name(), convergence_slope(hs, defects, p + 0.75, std::numeric_limits<double>::infinity())});
      rep.slopes.back().report.expected = p + 1;
      rep.checks.push_back({label + ":" + suite[j].name() + ":probe_dominates", 0.0, excess, 1e-6, excess <= 1e-6});
    }
  }
  rep.tables.push_back(std::move(csv));
}

}  // namespace

VerdictReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  VerdictReport rep;
  rep.experiment = to_string(config.kind);
  rep.config_echo = config.echo;
  if (uses_methods(config.kind)) rep.methods = config.methods;
  if (config.kind != ExperimentKind::Trees) {
    rep.field = config.field;
    rep.space = config.space_descriptor().id();
  }
  switch (config.kind) {
    case ExperimentKind::LocalOrder: run_local(config, rep); break;
    case ExperimentKind::GlobalOrder: run_global(config, rep); break;
    case ExperimentKind::Gronwall: run_gronwall(config, rep); break;
    case ExperimentKind::Windermere: run_windermere(config, rep); break;
    case ExperimentKind::Mechanism: run_mechanism(config, rep); break;
    case ExperimentKind::Trees: run_trees(config, rep); break;
    case ExperimentKind::LieSeries: run_lie_series(config, rep); break;
  }
  return rep;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_g17(row[i]);
    out += '\n';
  }
  return out;
}

std::string to_json(const VerdictReport& report) {
  using json = nlohmann::ordered_json;
  json j;
  j["experiment"] = report.experiment;
  j["method"] = report.methods;
  if (report.field.empty()) {
    j["field"] = nullptr;
  } else {
    json field;
    field["family"] = report.field;
    field["space"] = report.space;
    j["field"] = field;
  }
  json slopes = json::array();
  for (const auto& s : report.slopes) {
    json e;
    e["method"] = s.method;
    e["column"] = s.column;
    e["slope"] = s.report.slope;
    e["expected"] = s.report.expected;
    e["lo"] = number_or_null(s.report.lo);
    e["hi"] = number_or_null(s.report.hi);
    e["residual"] = s.report.residual;
    e["window_h"] = s.report.window_h;
    e["pass"] = s.report.pass;
    slopes.push_back(e);
  }
  j["slopes"] = slopes;
  json checks = json::array();
  for (const auto& c : report.checks) {
    json e;
    e["name"] = c.name;
    e["expected"] = number_or_null(c.expected);
    e["measured"] = number_or_null(c.measured);
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["notes"] = report.notes;
  j["pass"] = report.pass();
  json cfg = json::object();
  for (const auto& [k, v] : report.config_echo) cfg[k] = v;
  j["config"] = cfg;
  json tool;
  tool["homflow"] = kLibraryVersion;
#if defined(__VERSION__)
  tool["compiler"] = __VERSION__;
#endif
  tool["cxx_standard"] = static_cast<long>(__cplusplus);
  tool["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                  std::to_string(EIGEN_MINOR_VERSION);
  j["toolchain"] = tool;
  return j.dump(2) + "\n";
}

std::vector<std::string> emit_report(const VerdictReport& report, const std::string& dir, const std::string& stem,
                                     ReportFormat format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());

  std::vector<std::pair<std::string, std::string>> files;
  if (format != ReportFormat::Json) {
    for (const auto& t : report.tables) {
      const std::string name = report.tables.size() == 1 ? stem + ".csv" : stem + "_" + t.name + ".csv";
      files.emplace_back((fs::path(dir) / name).string(), to_csv(t));
    }
  }
  if (format != ReportFormat::Csv) files.emplace_back((fs::path(dir) / (stem + ".json")).string(), to_json(report));

  std::vector<std::string> written;
  for (const auto& [path, content] : files) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    written.push_back(path);
  }
  return written;
}

}  // namespace homflow
