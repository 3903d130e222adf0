#include <gtest/gtest.h>

#include <filesystem>

#include "saddle/config.hpp"
#include "saddle/errors.hpp"

using namespace saddle;

namespace {

const std::string kMinimalAvoidance = R"({
  "experiment": "avoidance",
  "init_box": [[-1, 1], [-1, 1]]
})";

}  // namespace

TEST(Config, Defaults) {
  const auto cfg = parse_config(kMinimalAvoidance);
  EXPECT_EQ(cfg.experiment, ExperimentKind::avoidance);
  EXPECT_EQ(cfg.method, MethodId::gd);
  EXPECT_EQ(cfg.objective.kind, "fig1");
  EXPECT_EQ(cfg.schedule.id(), "power(c=1,p=1,offset=2)");
  EXPECT_EQ(cfg.trials, 1);
  EXPECT_EQ(cfg.init_subspace, "full");
  const auto opts = cfg.run_options();
  EXPECT_EQ(opts.budget, cfg.budget);
  EXPECT_EQ(opts.stride, cfg.stride);
}

TEST(Config, AllShippedConfigsParse) {
  const std::filesystem::path dir = std::filesystem::path(SADDLE_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW((void)load_config(entry.path())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5);
}

TEST(Config, Schedules) {
  EXPECT_EQ(parse_schedule(R"("harmonic")").id(), builtin_schedule("harmonic").id());
  EXPECT_EQ(parse_schedule(R"({"kind": "constant", "c": 0.1})").id(), "constant(c=0.1)");
  EXPECT_EQ(parse_schedule(R"({"kind": "power", "p": 0.5, "offset": 1})").id(), "power(c=1,p=0.5,offset=1)");
  EXPECT_DOUBLE_EQ(parse_schedule(R"({"kind": "geometric", "c": 0.1, "r": 0.5})").value(1), 0.05);
  const auto t = parse_schedule(R"({"kind": "table", "values": [0.9, 0.6], "tail": "harmonic"})");
  EXPECT_DOUBLE_EQ(t.value(1), 0.6);
  EXPECT_THROW((void)parse_schedule(R"({"kind": "cosine"})"), ConfigError);
  EXPECT_THROW((void)parse_schedule(R"({"kind": "constant", "c": 0.1, "r": 2})"), ConfigError);
  EXPECT_THROW((void)parse_schedule(R"({"kind": "constant", "c": -1})"), ConfigError);
  EXPECT_THROW((void)parse_schedule(R"({"kind": "table", "values": [0.9]})"), ConfigError);
  EXPECT_THROW((void)parse_schedule(R"("nope")"), ConfigError);
}

TEST(Config, Objectives) {
  auto cfg = parse_config(R"({"experiment": "single_run", "x0": [0.1, 0.2, 0.3],
                              "objective": {"kind": "quadratic", "matrix": [[1,0,0],[0,-1,0],[0,0,2]]}})");
  EXPECT_EQ(build_objective(cfg.objective).dimension, 3);
  cfg = parse_config(R"({"experiment": "single_run", "x0": [0, 0], "objective": {"kind": "cubic", "a": 0.3}})");
  EXPECT_DOUBLE_EQ(cfg.objective.a, 0.3);
  EXPECT_THROW((void)parse_config(R"({"experiment": "single_run", "x0": [0, 0], "objective": "rosenbrock"})"),
               ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "single_run", "x0": [0, 0],
                                      "objective": {"kind": "quadratic", "matrix": [[1, 2], [0, 1]]}})"),
               ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "single_run", "x0": [0, 0], "objective": {"kind": "cubic", "a": 2}})"),
               ConfigError);
}

TEST(Config, ExperimentKindFromCaller) {
  const auto cfg = parse_config(R"({"x0": [0.5, 0.5]})", ExperimentKind::fig1);
  EXPECT_EQ(cfg.experiment, ExperimentKind::fig1);
  EXPECT_THROW((void)parse_config(kMinimalAvoidance, ExperimentKind::chart), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"x0": [0.5, 0.5]})"), ConfigError);
  EXPECT_EQ(parse_experiment_kind("run"), ExperimentKind::single_run);
  EXPECT_FALSE(parse_experiment_kind("plot").has_value());
}

TEST(Config, Errors) {
  EXPECT_THROW((void)parse_config("{"), ConfigError);
  EXPECT_THROW((void)parse_config("[]"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "avoidance", "init_box": [[-1, 1], [-1, 1]], "colour": 1})"),
               ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "avoidance"})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "avoidance", "init_box": [[-1, 1]]})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "avoidance", "init_box": [[1, -1], [-1, 1]]})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "avoidance", "init_box": [[-1, 1], [-1, 1]], "trials": 0})"),
               ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "avoidance", "init_box": [[-1, 1], [-1, 1]], "budget": 0})"),
               ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "avoidance", "init_box": [[-1, 1], [-1, 1]], "trials": "ten"})"),
               ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "avoidance", "init_box": [[-1, 1], [-1, 1]], "method": "adam"})"),
               ConfigError);
  EXPECT_THROW(
      (void)parse_config(R"({"experiment": "avoidance", "init_box": [[-1, 1], [-1, 1]], "init_subspace": "half"})"),
      ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "single_run"})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "single_run", "x0": [1, 2, 3]})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "chart", "chart": {"grid": {"n": 3}}})"), ConfigError);
  EXPECT_THROW((void)parse_config(R"({"experiment": "explore"})"), ConfigError);
  EXPECT_THROW((void)load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, MethodWithMetric) {
  const auto cfg = parse_config(R"({"experiment": "single_run", "x0": [1, 1], "method": "manifold-intrinsic",
                                    "metric": [[2, 0], [0, 2]]})");
  ASSERT_TRUE(cfg.metric.has_value());
  const Method m = cfg.make_method();
  EXPECT_EQ(m.id(), MethodId::manifold_intrinsic);
  Vector x(2);
  x << 1, 1;
  const Vector y = m.step(quadratic(Matrix(Vector::Ones(2).asDiagonal()) * 1.0), StepSchedule::constant(0.1), 0, x);
  EXPECT_NEAR(y(0), 0.8, 1e-15);
}
