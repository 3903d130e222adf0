// saddle-escape: drives the avoidance, fig1, chart and single-run experiments
// from a JSON config.
//
// Exit codes: 0 success, 1 assertion failure, 2 configuration error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "saddle/config.hpp"
#include "saddle/errors.hpp"
#include "saddle/harness.hpp"

namespace {

constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* sub, Options& opts) {
  sub->add_option("--config", opts.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", opts.seed, "override the config seed");
  sub->add_option("--out", opts.out, "override the output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saddle-point avoidance experiments for first-order methods with vanishing step sizes"};
  app.require_subcommand(1);

  Options opts;
  CLI::App* run = app.add_subcommand("run", "single trajectory from config x0");
  CLI::App* avoidance = app.add_subcommand("avoidance", "Monte Carlo saddle-avoidance experiment");
  CLI::App* fig1 = app.add_subcommand("fig1", "escape comparison of three schedules on x^2 - y^2");
  CLI::App* chart = app.add_subcommand("chart", "certify and chart the local stable manifold");
  for (CLI::App* sub : {run, avoidance, fig1, chart}) add_common(sub, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  saddle::ExperimentKind kind = saddle::ExperimentKind::single_run;
  if (avoidance->parsed()) kind = saddle::ExperimentKind::avoidance;
  if (fig1->parsed()) kind = saddle::ExperimentKind::fig1;
  if (chart->parsed()) kind = saddle::ExperimentKind::chart;

  saddle::ExperimentConfig cfg;
  try {
    cfg = saddle::load_config(opts.config, kind);
  } catch (const saddle::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out) cfg.output_dir = *opts.out;

  try {
    const int status = saddle::execute(cfg, std::cout);
    std::cout << "output: " << cfg.output_dir.string() << '\n';
    return status == 0 ? 0 : kExitAssertion;
  } catch (const saddle::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const saddle::InvalidArgument& e) {
    std::cerr << "unsupported configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const saddle::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAssertion;
  }
}
