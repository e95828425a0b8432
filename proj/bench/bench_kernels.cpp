// Parallel kernels against their serial references. Arg(1) runs the OpenMP
// variant, Arg(0) the serial one.
#include <benchmark/benchmark.h>

#include "latinv/acceptance.hpp"
#include "latinv/scattering.hpp"
#include "latinv/spectral.hpp"

using namespace latinv;

static void BM_GreenBatch(benchmark::State& state) {
  const auto L = scattering::free_lattice(LatticeKind::Hexagonal);
  std::vector<scattering::GreenKey> keys;
  for (int d1 = -3; d1 <= 3; ++d1)
    for (int d2 = -3; d2 <= 3; ++d2) keys.push_back(scattering::canonical({0, 1, d1, d2}));
  scattering::GreenOptions opt;
  for (auto _ : state) {
    auto v = state.range(0) ? scattering::green_batch(L, 0.6, keys, opt) : scattering::green_batch_serial(L, 0.6, keys, opt);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_GreenBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Curvature(benchmark::State& state) {
  const auto sample = spectral::fermi_sample(spectral::Periodic::Hexagonal, 0.6, 1, 4096);
  std::vector<spectral::Point> xs;
  for (const auto& c : sample.components) xs.insert(xs.end(), c.points.begin(), c.points.end());
  for (auto _ : state) {
    auto k = spectral::curvature_at(spectral::Periodic::Hexagonal, sample.branch, xs, state.range(0) != 0);
    benchmark::DoNotOptimize(k);
  }
}
BENCHMARK(BM_Curvature)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_RoundTrips(benchmark::State& state) {
  for (auto _ : state) {
    auto s = acceptance::round_trips(4, 8, 1, state.range(0) != 0);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_RoundTrips)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
