#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "saddle/methods.hpp"
#include "saddle/objectives.hpp"
#include "saddle/schedules.hpp"

namespace saddle {

enum class ExperimentKind { avoidance, fig1, chart, single_run };

[[nodiscard]] const char* to_string(ExperimentKind k) noexcept;

/// "fig1", "cubic" (with a), or "quadratic" (with a symmetric matrix).
struct ObjectiveSpec {
  std::string kind = "fig1";
  double a = 0.1;
  Matrix matrix;
};

[[nodiscard]] Objective build_objective(const ObjectiveSpec& spec);

struct ChartConfig {
  std::vector<double> x_star;  ///< empty: the origin
  double delta = 0.1;
  int max_halvings = 20;
  std::int64_t horizon = 400;
  double tail_tol = 1e-10;
  double grid_lo = -0.05;
  double grid_hi = 0.05;
  int grid_points = 11;
  int lipschitz_pairs = 10'000;
  double fp_tol = 1e-13;
  int fp_budget = 500;
};

/// Optional pass/fail checks on an avoidance report (exit code 1 on failure).
struct AvoidanceExpectations {
  std::optional<std::int64_t> max_saddle_hits;
  std::optional<std::int64_t> min_saddle_hits;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::single_run;
  MethodId method = MethodId::gd;
  ObjectiveSpec objective;
  StepSchedule schedule = StepSchedule::power(1.0, 1.0, 2);
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  /// Per-coordinate [lo, hi].
  std::vector<std::pair<double, double>> init_box;
  /// "full" or "stable" (project each draw onto E^s of the first registered
  /// strict saddle).
  std::string init_subspace = "full";
  std::vector<double> x0;
  std::int64_t budget = 100'000;
  double conv_tol = 1e-12;
  double escape_radius = 1e3;
  std::int64_t stride = 10;
  int window = 50;
  /// Constant inverse metric for manifold-intrinsic; identity when absent.
  std::optional<Matrix> metric;
  std::filesystem::path output_dir = "out";
  ChartConfig chart;
  AvoidanceExpectations expect;

  [[nodiscard]] RunOptions run_options() const;
  [[nodiscard]] Method make_method() const;
};

/// Parses a schedule: either a builtin name ("harmonic", ...) or an object
/// {"kind": "power"|"constant"|"geometric"|"table", ...}. Throws ConfigError.
[[nodiscard]] StepSchedule parse_schedule(const std::string& json_text);

/// Parses and validates a full experiment config. Unknown keys are rejected.
/// When `experiment` is given the "experiment" key becomes optional and must
/// agree with it if present. Throws ConfigError.
[[nodiscard]] ExperimentConfig parse_config(const std::string& json_text,
                                            std::optional<ExperimentKind> experiment = std::nullopt);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path,
                                           std::optional<ExperimentKind> experiment = std::nullopt);

[[nodiscard]] std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

}  // namespace saddle
