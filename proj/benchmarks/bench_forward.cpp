#include <memory>

#include <benchmark/benchmark.h>

#include "emis/emis.hpp"

using namespace emis;

namespace {

MediumSpec bump() { return MediumSpec(1.0, {Bump{Vec3::Zero(), 1.0, {0.1, 0.0}, 3}}); }

void BM_ForwardApply(benchmark::State& state) {
  const WaveParams w = WaveParams::from_k(2.0);
  const auto grid = std::make_shared<const VolumeGrid>(build_volume_grid(1.0, static_cast<int>(state.range(0))));
  const ForwardOperator op(grid, bump(), w);
  const Direction alpha(Vec3(0, 0, 1));
  const FieldValues E0 = incident_field(*grid, IncidentWave(alpha, Vec3(1, 0, 0), w));
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(E0));
  state.counters["cells"] = static_cast<double>(grid->size());
}
BENCHMARK(BM_ForwardApply)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_ForwardSolveIterative(benchmark::State& state) {
  const WaveParams w = WaveParams::from_k(2.0);
  const auto grid = std::make_shared<const VolumeGrid>(build_volume_grid(1.0, static_cast<int>(state.range(0))));
  SolverConfig cfg;
  cfg.method = SolverMethod::Iterative;
  ForwardOperator op(grid, bump(), w, cfg);
  const Direction alpha(Vec3(0, 0, 1));
  for (auto _ : state) benchmark::DoNotOptimize(op.solve(IncidentWave(alpha, Vec3(1, 0, 0), w)));
}
BENCHMARK(BM_ForwardSolveIterative)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
