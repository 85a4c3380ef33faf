#include <vector>

#include <benchmark/benchmark.h>

#include "heisenbound/bounds.hpp"
#include "heisenbound/domains.hpp"
#include "heisenbound/hgeom.hpp"
#include "heisenbound/random.hpp"
#include "heisenbound/spectral.hpp"

using namespace heisenbound;

namespace {

std::vector<GroupPoint> random_points(std::size_t n, double lo, double hi) {
  std::mt19937_64 gen(stream_seed(3, 0));
  std::vector<GroupPoint> out(n);
  for (auto& p : out) p = {uniform(gen, lo, hi), uniform(gen, lo, hi), uniform(gen, lo, hi)};
  return out;
}

void BM_CCDistance(benchmark::State& state) {
  const auto points = random_points(1024, -2.0, 2.0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cc_distance_origin(points[i++ & 1023]));
  }
}
BENCHMARK(BM_CCDistance);

void BM_BoundaryDistance(benchmark::State& state) {
  const DomainSpec spec = state.range(0) == 0 ? DomainSpec::box({0, 0, 0}, {1, 1, 1})
                                              : DomainSpec::cc_ball({0, 0, 0}, 1.0);
  const auto points = random_points(256, 0.05, 0.3);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(boundary_distance(spec, points[i++ & 255]));
  }
  state.SetLabel(to_string(spec.kind));
}
BENCHMARK(BM_BoundaryDistance)->Arg(0)->Arg(1);

void BM_Assemble(benchmark::State& state) {
  const VoxelDomain vox = voxelize(DomainSpec::cc_ball({0, 0, 0}, 1.0), static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble(vox));
  }
  state.counters["unknowns"] = static_cast<double>(vox.occupied_count());
}
BENCHMARK(BM_Assemble)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_LowestEigenvalues(benchmark::State& state) {
  const SparseForm form = assemble(voxelize(DomainSpec::box({0, 0, 0}, {1, 1, 1}), static_cast<int>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lowest_eigenvalues(form, 20));
  }
}
BENCHMARK(BM_LowestEigenvalues)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_BallVolumeQuadrature(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(unit_ball_volume(128));
  }
}
BENCHMARK(BM_BallVolumeQuadrature);

}  // namespace

BENCHMARK_MAIN();
