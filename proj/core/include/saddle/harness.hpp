#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "saddle/config.hpp"
#include "saddle/lyapunov_perron.hpp"
#include "saddle/methods.hpp"

namespace saddle {

struct TrialOutcome {
  std::int64_t trial = 0;
  Vector x0;
  Terminal terminal = Terminal::budget_exhausted;
  std::int64_t k_final = 0;
  Vector final_point;
  std::optional<CriticalTag> limit_tag;
  bool saddle_hit = false;
  std::string error;
};

struct AvoidanceReport {
  std::int64_t trials = 0;
  /// Indexed by Terminal; step_error is the error bucket.
  std::array<std::int64_t, 4> terminal_counts{};
  /// converged_to_point trials, indexed by CriticalTag.
  std::array<std::int64_t, 4> limit_counts{};
  std::int64_t saddle_hits = 0;
  std::vector<Vector> saddle_hit_inits;
  /// Sorted by trial index.
  std::vector<TrialOutcome> outcomes;

  [[nodiscard]] std::int64_t count(Terminal t) const { return terminal_counts[static_cast<std::size_t>(t)]; }
  [[nodiscard]] std::int64_t count(CriticalTag t) const { return limit_counts[static_cast<std::size_t>(t)]; }
};

/// A trajectory "hits the saddle" when it did not escape or fail and its final
/// iterate lies within `radius` of a registered critical point that classifies
/// as a strict saddle in the method's geometry. Objectives without registered
/// critical points fall back to a strict_saddle limit classification.
[[nodiscard]] bool is_saddle_hit(const Method& method, const Objective& obj, const TrajectoryRecord& rec,
                                 double radius = 1e-4);

/// Initial point of trial `trial`: a uniform draw from the box on substream
/// (seed, trial), projected onto E^s when cfg.init_subspace == "stable" and
/// mapped onto the method's domain (simplex or sphere) when it has one.
[[nodiscard]] Vector draw_initial_point(const ExperimentConfig& cfg, const Objective& obj, std::int64_t trial);

[[nodiscard]] AvoidanceReport avoidance_experiment(const ExperimentConfig& cfg);

struct Fig1Run {
  std::string label;
  StepSchedule schedule;
  TrajectoryRecord record;
  /// ||grad f|| at the final iterate.
  double final_grad_norm = 0.0;
};

struct Fig1Report {
  Vector x0;
  std::vector<Fig1Run> runs;  ///< sqrt, harmonic, quartic
  std::vector<std::string> failures;

  [[nodiscard]] bool passed() const { return failures.empty(); }
};

/// GD on x^2 - y^2 from cfg.x0 (default (0.5, 0.5)) under 1/sqrt(k+1),
/// 1/(k+2) and 1/(k+1)^4. Checks: the first two escape, the 1/sqrt run escapes
/// first, the third converges with ||grad f|| > 1e-3.
[[nodiscard]] Fig1Report fig1_experiment(const ExperimentConfig& cfg);

struct ChartReport {
  CertifiedProblem certified;
  std::optional<ManifoldChart> chart;
  std::string message;
};

/// Certifies the cubic/quadratic problem at cfg.chart.x_star and, when K < 1,
/// charts phi on the configured grid of the first stable coordinate.
[[nodiscard]] ChartReport chart_experiment(const ExperimentConfig& cfg);

[[nodiscard]] TrajectoryRecord single_run(const ExperimentConfig& cfg);

/// CSV with header k, x_1..x_d, step_size, grad_norm; one row per sample.
/// An empty record gives a header-only file (d from `dimension`).
void emit_plot_data(const TrajectoryRecord& record, const std::filesystem::path& path, Eigen::Index dimension);
void emit_plot_data(const AvoidanceReport& report, const std::filesystem::path& path);
void emit_plot_data(const ChartReport& report, const std::filesystem::path& path);

/// JSON summary of the certificate: K1, K2, K, delta, epsilon, N, epsilon_star, ...
void write_certificate_summary(const ChartReport& report, const std::filesystem::path& path);

/// Runs the configured experiment, writes its files into cfg.output_dir and a
/// human-readable summary to `log`. Returns 0 on success, 1 on an assertion
/// failure.
int execute(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace saddle
