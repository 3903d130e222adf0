#include <benchmark/benchmark.h>

#include "saddle/config.hpp"
#include "saddle/harness.hpp"
#include "saddle/lyapunov_perron.hpp"
#include "saddle/methods.hpp"

using namespace saddle;

namespace {

const StepSchedule kHarmonic = StepSchedule::power(1.0, 1.0, 2);

Vector point(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

void BM_Step(benchmark::State& state) {
  const auto id = static_cast<MethodId>(state.range(0));
  const Method m = Method::from_id(to_string(id), 2);
  const Objective f = id == MethodId::mirror_entropy ? linear(point(1.0, -0.5)) : cubic_perturbed_saddle(0.1);
  const Vector x = id == MethodId::manifold_sphere ? point(0.6, 0.8) : point(0.4, 0.6);
  std::int64_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.step(f, kHarmonic, k, x));
    k = (k + 1) % 1000;
  }
  state.SetLabel(to_string(id));
}
BENCHMARK(BM_Step)->DenseRange(0, 5);

struct CubicProblem {
  CertifiedProblem cp = certify_radius(cubic_perturbed_saddle(0.1), Vector::Zero(2), kHarmonic);
};

const CubicProblem& cubic() {
  static const CubicProblem c;
  return c;
}

void BM_ApplyT(benchmark::State& state) {
  PerronProblem prob = cubic().cp.linearized.problem;
  prob.horizon = state.range(0);
  const auto u = zero_sequence(prob);
  const Vector x0 = Vector::Constant(1, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(apply_T(prob, x0, u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApplyT)->RangeMultiplier(2)->Range(100, 1600)->Complexity(benchmark::oN);

void BM_SolveStablePoint(benchmark::State& state) {
  const auto& c = cubic().cp;
  const Vector x0 = Vector::Constant(1, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(solve_stable_point(c.linearized.problem, c.certificate, x0));
}
BENCHMARK(BM_SolveStablePoint)->Unit(benchmark::kMillisecond);

void BM_BoundK2(benchmark::State& state) {
  const Vector ev = point(1.0, -1.0);
  const auto s = split(Matrix(ev.asDiagonal()));
  const double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bound_K2(s, kHarmonic, {-1, 0, 10}, tol));
}
BENCHMARK(BM_BoundK2)->DenseRange(4, 10, 3)->Unit(benchmark::kMillisecond);

void BM_AvoidanceTrials(benchmark::State& state) {
  const auto cfg = parse_config(R"({"experiment": "avoidance", "seed": 1, "init_box": [[-1, 1], [-1, 1]],
                                    "trials": )" + std::to_string(state.range(0)) + "}");
  for (auto _ : state) benchmark::DoNotOptimize(avoidance_experiment(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AvoidanceTrials)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();
