#include "saddle/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "saddle/errors.hpp"

namespace saddle {

namespace {

using json = nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_as(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return get_as<T>(j, key, where);
}

Matrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
      throw ConfigError(where + ": matrix must be square");
    }
    for (Eigen::Index c = 0; c < rows; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) throw ConfigError(where + ": non-numeric entry");
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

StepSchedule schedule_from_json(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return builtin_schedule(j.get<std::string>());
    if (!j.is_object()) throw ConfigError(where + ": expected a builtin name or an object");
    const auto kind = get_as<std::string>(j, "kind", where);
    if (kind == "power") {
      reject_unknown_keys(j, {"kind", "c", "p", "offset"}, where);
      return StepSchedule::power(get_or(j, "c", 1.0, where), get_as<double>(j, "p", where),
                                 get_or<std::int64_t>(j, "offset", 2, where));
    }
    if (kind == "constant") {
      reject_unknown_keys(j, {"kind", "c"}, where);
      return StepSchedule::constant(get_as<double>(j, "c", where));
    }
    if (kind == "geometric") {
      reject_unknown_keys(j, {"kind", "c", "r"}, where);
      return StepSchedule::geometric(get_as<double>(j, "c", where), get_as<double>(j, "r", where));
    }
    if (kind == "table") {
      reject_unknown_keys(j, {"kind", "values", "tail"}, where);
      if (!j.contains("tail")) throw ConfigError(where + ": table needs a tail schedule");
      return StepSchedule::table(get_as<std::vector<double>>(j, "values", where),
                                 schedule_from_json(j.at("tail"), where + ".tail"));
    }
    throw ConfigError(where + ": unknown schedule kind '" + kind + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

ObjectiveSpec objective_from_json(const json& j, const std::string& where) {
  if (j.is_string()) {
    ObjectiveSpec spec;
    spec.kind = j.get<std::string>();
    return spec;
  }
  if (!j.is_object()) throw ConfigError(where + ": expected a name or an object");
  ObjectiveSpec spec;
  spec.kind = get_as<std::string>(j, "kind", where);
  if (spec.kind == "fig1") {
    reject_unknown_keys(j, {"kind"}, where);
  } else if (spec.kind == "cubic") {
    reject_unknown_keys(j, {"kind", "a"}, where);
    spec.a = get_or(j, "a", 0.1, where);
  } else if (spec.kind == "quadratic") {
    reject_unknown_keys(j, {"kind", "matrix"}, where);
    if (!j.contains("matrix")) throw ConfigError(where + ": quadratic needs 'matrix'");
    spec.matrix = parse_matrix(j.at("matrix"), where + ".matrix");
  } else {
    throw ConfigError(where + ": unknown objective kind '" + spec.kind + "'");
  }
  return spec;
}

ChartConfig chart_from_json(const json& j) {
  const std::string where = "chart";
  if (!j.is_object()) throw ConfigError("chart: expected an object");
  reject_unknown_keys(j,
                      {"x_star", "delta", "max_halvings", "horizon", "tail_tol", "grid", "lipschitz_pairs", "fp_tol",
                       "fp_budget"},
                      where);
  ChartConfig c;
  c.x_star = get_or(j, "x_star", c.x_star, where);
  c.delta = get_or(j, "delta", c.delta, where);
  c.max_halvings = get_or(j, "max_halvings", c.max_halvings, where);
  c.horizon = get_or(j, "horizon", c.horizon, where);
  c.tail_tol = get_or(j, "tail_tol", c.tail_tol, where);
  c.lipschitz_pairs = get_or(j, "lipschitz_pairs", c.lipschitz_pairs, where);
  c.fp_tol = get_or(j, "fp_tol", c.fp_tol, where);
  c.fp_budget = get_or(j, "fp_budget", c.fp_budget, where);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown_keys(g, {"lo", "hi", "points"}, "chart.grid");
    c.grid_lo = get_or(g, "lo", c.grid_lo, "chart.grid");
    c.grid_hi = get_or(g, "hi", c.grid_hi, "chart.grid");
    c.grid_points = get_or(g, "points", c.grid_points, "chart.grid");
  }
  if (!(c.delta > 0.0)) throw ConfigError("chart.delta must be > 0");
  if (c.max_halvings < 0) throw ConfigError("chart.max_halvings must be >= 0");
  if (c.horizon < 1) throw ConfigError("chart.horizon must be >= 1");
  if (!(c.tail_tol > 0.0)) throw ConfigError("chart.tail_tol must be > 0");
  if (c.grid_points < 2) throw ConfigError("chart.grid.points must be >= 2");
  if (!(c.grid_lo < c.grid_hi)) throw ConfigError("chart.grid: lo must be < hi");
  if (c.fp_budget < 1) throw ConfigError("chart.fp_budget must be >= 1");
  if (c.lipschitz_pairs < 1) throw ConfigError("chart.lipschitz_pairs must be >= 1");
  return c;
}

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

const char* to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::avoidance:
      return "avoidance";
    case ExperimentKind::fig1:
      return "fig1";
    case ExperimentKind::chart:
      return "chart";
    case ExperimentKind::single_run:
      return "single_run";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  if (name == "avoidance") return ExperimentKind::avoidance;
  if (name == "fig1") return ExperimentKind::fig1;
  if (name == "chart") return ExperimentKind::chart;
  if (name == "single_run" || name == "run") return ExperimentKind::single_run;
  return std::nullopt;
}

Objective build_objective(const ObjectiveSpec& spec) {
  try {
    if (spec.kind == "fig1") return fig1_objective();
    if (spec.kind == "cubic") return cubic_perturbed_saddle(spec.a);
    if (spec.kind == "quadratic") return quadratic(spec.matrix);
  } catch (const Error& e) {
    throw ConfigError(std::string("objective: ") + e.what());
  }
  throw ConfigError("objective: unknown kind '" + spec.kind + "'");
}

RunOptions ExperimentConfig::run_options() const {
  RunOptions o;
  o.budget = budget;
  o.conv_tol = conv_tol;
  o.escape_radius = escape_radius;
  o.stride = stride;
  o.window = window;
  o.seed = seed;
  return o;
}

Method ExperimentConfig::make_method() const {
  const int dim = static_cast<int>(build_objective(objective).dimension);
  std::optional<RiemannianMetric> m;
  if (metric) m = constant_metric(*metric);
  return Method::from_id(to_string(method), dim, m);
}

StepSchedule parse_schedule(const std::string& json_text) {
  return schedule_from_json(parse_json(json_text, "schedule"), "schedule");
}

ExperimentConfig parse_config(const std::string& json_text, std::optional<ExperimentKind> experiment) {
  const json j = parse_json(json_text, "config");
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  const std::string where = "config";
  reject_unknown_keys(j,
                      {"experiment", "method", "objective", "schedule", "trials", "seed", "init_box",
                       "init_subspace", "x0", "budget", "conv_tol", "escape_radius", "stride", "window", "metric",
                       "output_dir", "chart", "expect"},
                      where);

  ExperimentConfig cfg;
  if (j.contains("experiment")) {
    const auto name = get_as<std::string>(j, "experiment", where);
    const auto kind = parse_experiment_kind(name);
    if (!kind) throw ConfigError("config.experiment: unknown experiment '" + name + "'");
    if (experiment && *kind != *experiment) {
      throw ConfigError("config.experiment: '" + name + "' does not match the requested '" + to_string(*experiment) +
                        "'");
    }
    cfg.experiment = *kind;
  } else if (experiment) {
    cfg.experiment = *experiment;
  } else {
    throw ConfigError("config.experiment is required");
  }

  const auto method = get_or<std::string>(j, "method", "gd", where);
  const auto id = parse_method_id(method);
  if (!id) throw ConfigError("config.method: unknown method '" + method + "'");
  cfg.method = *id;

  if (j.contains("objective")) cfg.objective = objective_from_json(j.at("objective"), "config.objective");
  if (j.contains("schedule")) cfg.schedule = schedule_from_json(j.at("schedule"), "config.schedule");
  cfg.trials = get_or(j, "trials", cfg.trials, where);
  cfg.seed = get_or(j, "seed", cfg.seed, where);
  cfg.init_subspace = get_or(j, "init_subspace", cfg.init_subspace, where);
  cfg.x0 = get_or(j, "x0", cfg.x0, where);
  cfg.budget = get_or(j, "budget", cfg.budget, where);
  cfg.conv_tol = get_or(j, "conv_tol", cfg.conv_tol, where);
  cfg.escape_radius = get_or(j, "escape_radius", cfg.escape_radius, where);
  cfg.stride = get_or(j, "stride", cfg.stride, where);
  cfg.window = get_or(j, "window", cfg.window, where);
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir.string(), where);
  if (j.contains("metric")) cfg.metric = parse_matrix(j.at("metric"), "config.metric");
  if (j.contains("chart")) cfg.chart = chart_from_json(j.at("chart"));
  if (j.contains("expect")) {
    const json& e = j.at("expect");
    reject_unknown_keys(e, {"max_saddle_hits", "min_saddle_hits"}, "config.expect");
    if (e.contains("max_saddle_hits")) cfg.expect.max_saddle_hits = get_as<std::int64_t>(e, "max_saddle_hits", "config.expect");
    if (e.contains("min_saddle_hits")) cfg.expect.min_saddle_hits = get_as<std::int64_t>(e, "min_saddle_hits", "config.expect");
  }

  const Objective obj = build_objective(cfg.objective);
  const auto dim = static_cast<std::size_t>(obj.dimension);
  if (j.contains("init_box")) {
    const json& box = j.at("init_box");
    if (!box.is_array() || box.empty()) throw ConfigError("config.init_box: expected a non-empty array of [lo, hi]");
    for (const auto& b : box) {
      if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
        throw ConfigError("config.init_box: each entry must be [lo, hi]");
      }
      cfg.init_box.emplace_back(b[0].get<double>(), b[1].get<double>());
    }
  }

  if (cfg.trials < 1) throw ConfigError("config.trials must be >= 1");
  if (cfg.budget < 1) throw ConfigError("config.budget must be >= 1");
  if (!(cfg.conv_tol > 0.0)) throw ConfigError("config.conv_tol must be > 0");
  if (!(cfg.escape_radius > 0.0)) throw ConfigError("config.escape_radius must be > 0");
  if (cfg.stride < 1) throw ConfigError("config.stride must be >= 1");
  if (cfg.window < 1) throw ConfigError("config.window must be >= 1");
  if (cfg.init_subspace != "full" && cfg.init_subspace != "stable") {
    throw ConfigError("config.init_subspace must be 'full' or 'stable'");
  }
  if (cfg.experiment == ExperimentKind::avoidance) {
    if (cfg.init_box.empty()) throw ConfigError("config.init_box is required for avoidance experiments");
    if (cfg.init_box.size() != dim) throw ConfigError("config.init_box: one [lo, hi] per coordinate");
    for (const auto& [lo, hi] : cfg.init_box) {
      if (!(lo <= hi)) throw ConfigError("config.init_box: empty interval");
    }
  }
  if (!cfg.x0.empty() && cfg.x0.size() != dim) throw ConfigError("config.x0: dimension mismatch");
  if (cfg.experiment == ExperimentKind::single_run && cfg.x0.empty()) {
    throw ConfigError("config.x0 is required for single runs");
  }
  if (cfg.metric && static_cast<std::size_t>(cfg.metric->rows()) != dim) {
    throw ConfigError("config.metric: dimension mismatch");
  }
  if (!cfg.chart.x_star.empty() && cfg.chart.x_star.size() != dim) {
    throw ConfigError("config.chart.x_star: dimension mismatch");
  }
  try {
    (void)cfg.make_method();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config.method: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> experiment) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), experiment);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace saddle
