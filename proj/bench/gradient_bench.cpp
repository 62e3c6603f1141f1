// Serial reference vs OpenMP gradient kernel on one N=25 horizon with a
// drafting opponent, plus the whole planning call.

#include <benchmark/benchmark.h>

#include <cmath>

#include "racing/nmpc_controller.hpp"
#include "racing/scenarios.hpp"

using namespace racing;

namespace {

struct Fixture {
  Track track = fixture_oval();
  Raceline line = optimize_raceline(fixture_raceline_problem(track, 1000)).line;
  VehicleParams vehicle;
  TireCoefficients tires;
  DraftingParams drafting;
  ControllerConfig config;
  VehicleState x;
  std::vector<OpponentObservation> opponents;
  std::vector<double> z;

  Fixture() {
    const auto e = line.spline().eval(100.0);
    x = {e.x, e.y, std::atan2(e.dy, e.dx), 36.0, 0.0, 0.0};
    const auto q = line.spline().eval(118.0);
    opponents.push_back(
        predict_constant_velocity(1, {q.x, q.y, std::atan2(q.dy, q.dx)}, 28.0, 4.9, 1.9, config.N, config.dt));
    z.resize(2 * static_cast<std::size_t>(config.N));
    for (int k = 0; k < config.N; ++k) z[2 * k] = 0.05 * std::sin(k), z[2 * k + 1] = 0.6;
  }

  HorizonProblem problem() const {
    return {line, track, vehicle, tires, drafting, config, opponents, x, line.project(x.X, x.Y), track.project(x.X, x.Y)};
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_GradientSerial(benchmark::State& state) {
  const auto& f = fixture();
  const auto prob = f.problem();
  std::vector<double> g(f.z.size());
  for (auto _ : state) benchmark::DoNotOptimize(cost_gradient_serial(prob, f.z, g));
}
BENCHMARK(BM_GradientSerial)->Unit(benchmark::kMicrosecond)->UseRealTime();

void BM_GradientParallel(benchmark::State& state) {
  const auto& f = fixture();
  const auto prob = f.problem();
  std::vector<double> g(f.z.size());
  for (auto _ : state) benchmark::DoNotOptimize(cost_gradient_parallel(prob, f.z, g));
}
BENCHMARK(BM_GradientParallel)->Unit(benchmark::kMicrosecond)->UseRealTime();

void BM_Plan(benchmark::State& state) {
  const auto& f = fixture();
  NmpcController ctl(f.line, f.track, f.vehicle, f.tires, f.drafting, f.config);
  ctl.set_parallel_gradient(state.range(0) != 0);
  for (auto _ : state) {
    OvertakeMemory mem;
    benchmark::DoNotOptimize(ctl.plan(f.x, f.opponents, mem, nullptr).cost);
  }
}
BENCHMARK(BM_Plan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
