#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "saddle/config.hpp"
#include "saddle/errors.hpp"
#include "saddle/harness.hpp"

using namespace saddle;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "saddle_escape_tests" / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig avoidance_cfg(const std::string& method, std::int64_t trials, const std::string& extra = "") {
  return parse_config(R"({"experiment": "avoidance", "method": ")" + method + R"(", "trials": )" +
                      std::to_string(trials) + R"(, "seed": 5, "init_box": [[-1, 1], [-1, 1]], "budget": 20000)" +
                      extra + "}");
}

std::int64_t bucket_sum(const AvoidanceReport& r) {
  return std::accumulate(r.terminal_counts.begin(), r.terminal_counts.end(), std::int64_t{0});
}

}  // namespace

TEST(Avoidance, BucketsSumToTrials) {
  for (const char* m : {"gd", "prox", "mirror-euclidean", "manifold-intrinsic"}) {
    const auto r = avoidance_experiment(avoidance_cfg(m, 50));
    EXPECT_EQ(r.trials, 50);
    EXPECT_EQ(bucket_sum(r), 50) << m;
    EXPECT_EQ(static_cast<std::int64_t>(r.outcomes.size()), 50);
    for (std::size_t i = 0; i < r.outcomes.size(); ++i) EXPECT_EQ(r.outcomes[i].trial, static_cast<std::int64_t>(i));
  }
}

TEST(Avoidance, ErrorsGetTheirOwnBucket) {
  // alpha_0 = 1/2 with lambda = -2 makes the proximal system singular at k = 0.
  auto cfg = avoidance_cfg("prox", 20);
  cfg.schedule = StepSchedule::power(1.0, 1.0, 2);
  const auto r = avoidance_experiment(cfg);
  EXPECT_EQ(r.count(Terminal::step_error), 20);
  EXPECT_EQ(bucket_sum(r), 20);
  EXPECT_FALSE(r.outcomes[0].error.empty());
}

TEST(Avoidance, FullMeasureVersusStableSubspace) {
  const auto full = avoidance_experiment(avoidance_cfg("gd", 200));
  EXPECT_EQ(full.saddle_hits, 0);
  const auto stable = avoidance_experiment(avoidance_cfg("gd", 100, R"(, "init_subspace": "stable", "budget": 100000)"));
  EXPECT_EQ(stable.saddle_hits, 100);
  EXPECT_EQ(stable.saddle_hit_inits.size(), 100u);
  for (const auto& o : stable.outcomes) {
    EXPECT_EQ(o.x0(1), 0.0);
    EXPECT_LT(o.final_point.norm(), 1e-4);
  }
}

TEST(Avoidance, InitialPointsAreReproducibleAndInDomain) {
  const auto cfg = avoidance_cfg("gd", 10);
  const Objective f = build_objective(cfg.objective);
  for (std::int64_t t = 0; t < 10; ++t) {
    const Vector a = draw_initial_point(cfg, f, t);
    EXPECT_EQ(a, draw_initial_point(cfg, f, t));
    EXPECT_LE(a.cwiseAbs().maxCoeff(), 1.0);
  }
  EXPECT_NE(draw_initial_point(cfg, f, 0), draw_initial_point(cfg, f, 1));

  const auto simplex = avoidance_cfg("mirror-entropy", 10);
  for (std::int64_t t = 0; t < 10; ++t) {
    const Vector x = draw_initial_point(simplex, f, t);
    EXPECT_NEAR(x.sum(), 1.0, 1e-15);
    EXPECT_GE(x.minCoeff(), 0.0);
  }
}

TEST(SaddleHit, RequiresProximityAndClassification) {
  const Method gd = Method::gd();
  const Objective f = fig1_objective();
  TrajectoryRecord rec;
  rec.terminal = Terminal::converged_to_point;
  rec.final_point = Vector::Zero(2);
  EXPECT_TRUE(is_saddle_hit(gd, f, rec));
  rec.final_point(0) = 2e-4;
  EXPECT_FALSE(is_saddle_hit(gd, f, rec));
  rec.final_point(0) = 0.0;
  rec.terminal = Terminal::escaped_region;
  EXPECT_FALSE(is_saddle_hit(gd, f, rec));
  rec.terminal = Terminal::step_error;
  EXPECT_FALSE(is_saddle_hit(gd, f, rec));
}

TEST(Determinism, AvoidanceCsvIsByteIdentical) {
  auto cfg = avoidance_cfg("gd", 40);
  const fs::path a = scratch("det_a") / "avoidance.csv";
  const fs::path b = scratch("det_b") / "avoidance.csv";
  emit_plot_data(avoidance_experiment(cfg), a);
  emit_plot_data(avoidance_experiment(cfg), b);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(lines(a).size(), 41u);
  cfg.seed = 6;
  const fs::path c = scratch("det_c") / "avoidance.csv";
  emit_plot_data(avoidance_experiment(cfg), c);
  EXPECT_NE(slurp(a), slurp(c));
}

TEST(PlotData, EmptyRecordGivesHeaderOnly) {
  const fs::path p = scratch("empty") / "t.csv";
  emit_plot_data(TrajectoryRecord{}, p, 2);
  const auto l = lines(p);
  ASSERT_EQ(l.size(), 1u);
  EXPECT_EQ(l[0], "k,x_1,x_2,step_size,grad_norm");
}

TEST(PlotData, ThreeStepsStrideOneGivesFourRows) {
  auto cfg = parse_config(R"({"experiment": "single_run", "x0": [0.5, 0.5], "budget": 3, "stride": 1})");
  const fs::path p = scratch("three") / "t.csv";
  emit_plot_data(single_run(cfg), p, 2);
  const auto l = lines(p);
  ASSERT_EQ(l.size(), 5u);
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(l[static_cast<std::size_t>(k) + 1].substr(0, 2), std::to_string(k) + ",");
}

TEST(PlotData, UnwritablePathNamesThePath) {
  const fs::path blocker = scratch("blocked");
  fs::create_directories(blocker.parent_path());
  std::ofstream(blocker) << "file";
  try {
    emit_plot_data(TrajectoryRecord{}, blocker / "t.csv", 2);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("blocked"), std::string::npos);
  }
  fs::remove(blocker);
}

TEST(Fig1, EscapeOrdering) {
  const auto cfg = parse_config(R"({"experiment": "fig1", "x0": [0.5, 0.5]})");
  const auto r = fig1_experiment(cfg);
  ASSERT_TRUE(r.passed()) << r.failures.front();
  ASSERT_EQ(r.runs.size(), 3u);
  EXPECT_EQ(r.runs[0].record.terminal, Terminal::escaped_region);
  EXPECT_EQ(r.runs[1].record.terminal, Terminal::escaped_region);
  EXPECT_LT(r.runs[0].record.k_final, r.runs[1].record.k_final);
  EXPECT_EQ(r.runs[2].record.terminal, Terminal::converged_to_point);
  EXPECT_GT(r.runs[2].final_grad_norm, 1e-3);
}

TEST(Fig1, AxisInitialPointNeverEscapes) {
  const auto r = fig1_experiment(parse_config(R"({"experiment": "fig1", "x0": [0.5, 0.0]})"));
  EXPECT_FALSE(r.passed());
  for (const auto& run : r.runs) {
    EXPECT_EQ(run.record.final_point(1), 0.0) << run.label;
    EXPECT_NE(run.record.terminal, Terminal::escaped_region) << run.label;
  }
  EXPECT_LT(r.runs[0].record.final_point.norm(), 1e-4);
  EXPECT_LT(r.runs[1].record.final_point.norm(), 1e-4);
  // The summable schedule stops the x-coordinate short of the saddle.
  EXPECT_GT(std::abs(r.runs[2].record.final_point(0)), 1e-3);
}

TEST(ChartExperiment, CubicAndQuadratic) {
  auto cfg = load_config(fs::path(SADDLE_SOURCE_DIR) / "configs" / "chart_cubic.json");
  cfg.output_dir = scratch("chart");
  std::ostringstream log;
  EXPECT_EQ(execute(cfg, log), 0) << log.str();
  const auto j = nlohmann::json::parse(slurp(cfg.output_dir / "certificate.json"));
  EXPECT_TRUE(j.at("valid").get<bool>());
  EXPECT_NEAR(j.at("K").get<double>(), 0.62, 1e-9);
  EXPECT_TRUE(j.at("tangent").get<bool>());
  const auto l = lines(cfg.output_dir / "chart.csv");
  ASSERT_EQ(l.size(), 12u);
  EXPECT_EQ(l[0], "x0_plus_1,x0_minus_1,residual,picard_iters,ok,error");

  auto q = parse_config(R"({"experiment": "chart", "objective": {"kind": "quadratic", "matrix": [[1, 0], [0, -1]]}})");
  const auto r = chart_experiment(q);
  ASSERT_TRUE(r.chart.has_value());
  EXPECT_NEAR(r.certified.certificate.K, 0.5, 1e-15);
  for (const auto& s : r.chart->samples) EXPECT_EQ(s.x0_minus(0), 0.0);
}

TEST(ChartExperiment, UncertifiableReportsEpsilonStar) {
  auto cfg = load_config(fs::path(SADDLE_SOURCE_DIR) / "configs" / "chart_uncertifiable.json");
  cfg.output_dir = scratch("uncert");
  std::ostringstream log;
  EXPECT_EQ(execute(cfg, log), 1);
  EXPECT_FALSE(fs::exists(cfg.output_dir / "chart.csv"));
  const auto j = nlohmann::json::parse(slurp(cfg.output_dir / "certificate.json"));
  EXPECT_FALSE(j.at("valid").get<bool>());
  EXPECT_NEAR(j.at("epsilon_star").get<double>(), 0.25, 1e-9);
  EXPECT_NE(log.str().find("FAIL"), std::string::npos);
}

TEST(Execute, AvoidanceExpectationsDriveStatus) {
  auto cfg = avoidance_cfg("gd", 20, R"(, "expect": {"max_saddle_hits": 0})");
  cfg.output_dir = scratch("expect_ok");
  std::ostringstream log;
  EXPECT_EQ(execute(cfg, log), 0);
  EXPECT_EQ(lines(cfg.output_dir / "avoidance.csv").size(), 21u);
  cfg.expect = {};
  cfg.expect.min_saddle_hits = 1;
  cfg.output_dir = scratch("expect_fail");
  EXPECT_EQ(execute(cfg, log), 1);
}

TEST(Execute, Fig1WritesAllFiles) {
  auto cfg = parse_config(R"({"experiment": "fig1", "stride": 1})");
  cfg.output_dir = scratch("fig1");
  std::ostringstream log;
  EXPECT_EQ(execute(cfg, log), 0) << log.str();
  for (const char* f : {"fig1_sqrt.csv", "fig1_harmonic.csv", "fig1_quartic.csv", "fig1_summary.csv"}) {
    EXPECT_TRUE(fs::exists(cfg.output_dir / f)) << f;
  }
  EXPECT_EQ(lines(cfg.output_dir / "fig1_sqrt.csv")[0], "k,x_1,x_2,step_size,grad_norm");
  EXPECT_EQ(lines(cfg.output_dir / "fig1_summary.csv").size(), 4u);
}
