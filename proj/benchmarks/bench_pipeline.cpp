#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "satpin/equivalence.hpp"
#include "satpin/fusion.hpp"
#include "satpin/refinement.hpp"
#include "satpin/synth.hpp"

using namespace satpin;

namespace {

const SyntheticScene& scene() {
  static const SyntheticScene s = make_pushbroom_scene(1, {.image_size = 2048});
  return s;
}

void BM_Equate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const EquateOptions opts{.dims = {n, n, 10}};
  for (auto _ : state) benchmark::DoNotOptimize(equate(scene().rpc, scene().image_size, opts));
}
BENCHMARK(BM_Equate)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_FitPolynomialWarp(benchmark::State& state) {
  const EquateResult r = equate(scene().rpc, scene().image_size);
  const VirtualGrid g = equate_grid(scene().rpc, scene().image_size);
  const auto pairs = refinement_correspondences(scene().rpc, r.camera, g);
  for (auto _ : state) benchmark::DoNotOptimize(fit_polynomial(pairs));
}
BENCHMARK(BM_FitPolynomialWarp)->Unit(benchmark::kMicrosecond);

void BM_Resample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Raster img(n, n, 0.0, SampleType::kUInt8);
  std::mt19937_64 rng(3);
  for (double& v : img.values()) v = static_cast<double>(rng() % 256);
  const ImageWarp w = PolynomialWarp::from_coefficients({0.3, 1.0001, 2e-5, 1e-9, -2e-9, 1e-9, -0.4, 1e-5,
                                                         0.9999, 2e-9, 1e-9, -1e-9});
  for (auto _ : state) benchmark::DoNotOptimize(resample(img, w));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Resample)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_FuseViews(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.5);
  std::vector<Raster> views(static_cast<std::size_t>(state.range(0)), Raster(256, 256));
  for (auto& v : views)
    for (double& x : v.values()) x = 100.0 + noise(rng);
  for (auto _ : state) benchmark::DoNotOptimize(fuse_views(views));
}
BENCHMARK(BM_FuseViews)->Arg(3)->Arg(9)->Unit(benchmark::kMillisecond);

}  // namespace
