#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "satpin/geodesy.hpp"
#include "satpin/rpc_model.hpp"
#include "satpin/synth.hpp"

using namespace satpin;

namespace {

const SyntheticScene& scene() {
  static const SyntheticScene s = make_pushbroom_scene(1, {.image_size = 2048});
  return s;
}

std::vector<GeoPoint> ground_points(std::size_t n) {
  const RpcModel& m = scene().rpc;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<GeoPoint> pts(n);
  for (auto& p : pts) {
    p = {m.lat_off + u(rng) * m.lat_scale, m.lon_off + u(rng) * m.lon_scale, m.alt_off + u(rng) * m.alt_scale};
  }
  return pts;
}

void BM_ProjectForward(benchmark::State& state) {
  const auto pts = ground_points(1024);
  const RpcModel& m = scene().rpc;
  for (auto _ : state) {
    for (const auto& p : pts) benchmark::DoNotOptimize(project_forward(m, p));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}
BENCHMARK(BM_ProjectForward);

void BM_ProjectInverse(benchmark::State& state) {
  const auto pts = ground_points(256);
  const RpcModel& m = scene().rpc;
  std::vector<PixelPoint> px;
  for (const auto& p : pts) px.push_back(project_forward(m, p));
  for (auto _ : state) {
    for (std::size_t i = 0; i < pts.size(); ++i) benchmark::DoNotOptimize(project_inverse(m, px[i], pts[i].alt));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}
BENCHMARK(BM_ProjectInverse);

void BM_GeodeticToEnu(benchmark::State& state) {
  const auto pts = ground_points(1024);
  const EnuFrame frame(scene_anchor(scene().rpc));
  for (auto _ : state) {
    for (const auto& p : pts) benchmark::DoNotOptimize(frame.to_enu(p));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}
BENCHMARK(BM_GeodeticToEnu);

}  // namespace
