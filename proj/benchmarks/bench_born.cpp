#include <benchmark/benchmark.h>

#include "emis/emis.hpp"

using namespace emis;

namespace {

void BM_SynthesizeDataset(benchmark::State& state) {
  const WaveParams w = WaveParams::from_k(3.0);
  const int np = static_cast<int>(state.range(0));
  const SphereQuadrature q = build_sphere_quadrature(np, 2 * np);
  const MediumSpec m(1.0, {Bump{Vec3::Zero(), 1.0, {0.1, 0.0}, 3}});
  const VolumeGrid grid = build_volume_grid(1.0, 12);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_dataset(m, w, q, q, grid));
  state.counters["entries"] = static_cast<double>(q.size() * q.size());
}
BENCHMARK(BM_SynthesizeDataset)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
