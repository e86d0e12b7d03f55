#include <benchmark/benchmark.h>

#include "emis/emis.hpp"

using namespace emis;

namespace {

void BM_Reconstruct(benchmark::State& state) {
  const WaveParams w = WaveParams::from_k(3.0);
  const SphereQuadrature q = build_sphere_quadrature(8, 16);
  const MediumSpec m(1.0, {Bump{Vec3::Zero(), 1.0, {0.1, 0.0}, 3}});
  const ScatteringDataSet d = synthesize_dataset(m, w, q, q, build_volume_grid(1.0, 12));
  const VolumeGrid grid = build_volume_grid(1.0, static_cast<int>(state.range(0)));
  InversionConfig cfg;
  cfg.N = 8;
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(d, grid, cfg));
  state.counters["cells"] = static_cast<double>(grid.size());
}
BENCHMARK(BM_Reconstruct)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_DeltaN(benchmark::State& state) {
  double r = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(delta_N(r, 12, 1.0, 3.0));
    r = r < 1.9 ? r + 0.01 : 0.0;
  }
}
BENCHMARK(BM_DeltaN);

}  // namespace
