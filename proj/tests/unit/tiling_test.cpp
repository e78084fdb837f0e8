#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "satpin/error.hpp"
#include "satpin/tiling.hpp"
#include "test_support.hpp"

using namespace satpin;

TEST(Tiling, ThousandBy512With64Overlap) {
  const TilePlan plan = plan_tiles({1000, 1000}, 512, 64);
  ASSERT_EQ(plan.tiles.size(), 9u);
  EXPECT_EQ(plan.tiles[0].origin, (TileOrigin{0, 0}));
  EXPECT_EQ(plan.tiles[1].origin, (TileOrigin{448, 0}));
  EXPECT_EQ(plan.tiles[2].origin, (TileOrigin{488, 0}));  // shifted inward
  EXPECT_EQ(plan.tiles[8].origin, (TileOrigin{488, 488}));
}

TEST(Tiling, PlansCoverEveryPixelWithUniformTiles) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(50, 1500), tile(16, 600);
  for (int trial = 0; trial < 40; ++trial) {
    const ImageSize size{dim(rng), dim(rng)};
    const int t = tile(rng);
    const int overlap = std::uniform_int_distribution<int>(0, t - 1)(rng);
    const TilePlan plan = plan_tiles(size, t, overlap);
    std::vector<int> cover(static_cast<std::size_t>(size.width) * size.height, 0);
    const ImageSize expect{std::min(t, size.width), std::min(t, size.height)};
    for (std::size_t i = 0; i < plan.tiles.size(); ++i) {
      const Tile& tl = plan.tiles[i];
      EXPECT_EQ(tl.index, static_cast<int>(i));
      EXPECT_EQ(tl.size, expect);
      ASSERT_GE(tl.origin.col, 0);
      ASSERT_LE(tl.origin.col + tl.size.width, size.width);
      ASSERT_LE(tl.origin.row + tl.size.height, size.height);
      for (int y = tl.origin.row; y < tl.origin.row + tl.size.height; ++y)
        for (int x = tl.origin.col; x < tl.origin.col + tl.size.width; ++x) ++cover[y * size.width + x];
    }
    for (int c : cover) ASSERT_GE(c, 1);
  }
}

TEST(Tiling, RejectsBadOverlap) {
  EXPECT_THROW(plan_tiles({100, 100}, 10, 10), Error);
  EXPECT_THROW(plan_tiles({100, 100}, 10, -1), Error);
}

TEST(Tiling, CropRpcShiftsPixelFrame) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const RpcModel m = testutil::random_rpc(rng);
  const TileOrigin o{4608, 2560};
  const RpcModel c = crop_rpc(m, o);
  for (int i = 0; i < 100; ++i) {
    const GeoPoint g{m.lat_off + u(rng) * m.lat_scale, m.lon_off + u(rng) * m.lon_scale,
                     m.alt_off + u(rng) * m.alt_scale};
    const PixelPoint a = project_forward(m, g), b = project_forward(c, g);
    EXPECT_NEAR(b.samp, a.samp - o.col, 1e-9);
    EXPECT_NEAR(b.line, a.line - o.row, 1e-9);
  }
  EXPECT_EQ(c.samp_num, m.samp_num);
  EXPECT_EQ(c.lat_off, m.lat_off);
}

TEST(Tiling, CropRasterCopiesWindow) {
  Raster r(10, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 10; ++x) r.at(x, y) = 100 * y + x;
  const Raster c = crop_raster(r, {3, 2}, {4, 5});
  EXPECT_EQ(c.width(), 4);
  EXPECT_EQ(c.at(0, 0), 203);
  EXPECT_EQ(c.at(3, 4), 606);
  EXPECT_THROW(crop_raster(r, {8, 0}, {4, 4}), Error);
}

TEST(Tiling, QuantileInterpolatesAndSkipsNodata) {
  Raster r(5, 1);
  const double v[] = {10, 40, 20, 30, 0};
  for (int i = 0; i < 5; ++i) r.at(i, 0) = v[i];
  r.at(4, 0) = r.nodata();
  EXPECT_DOUBLE_EQ(quantile(r, 0.0), 10.0);
  EXPECT_DOUBLE_EQ(quantile(r, 1.0), 40.0);
  EXPECT_DOUBLE_EQ(quantile(r, 0.5), 25.0);
}

TEST(Tiling, StretchMapsPercentilesToFullRange) {
  // 2nd percentile 10, 98th 90; 250 pushes the 99th past 200.
  Raster r(101, 1, 0.0, SampleType::kUInt8);
  for (int i = 0; i < 101; ++i) r.at(i, 0) = i < 3 ? 10 : (i > 97 ? 250 : 10 + (i - 3) * 80.0 / 94.0);
  ASSERT_NEAR(quantile(r, 0.02), 10.0, 1e-12);
  const double hi = quantile(r, 0.98);
  const Raster out = enhance_brightness(r);
  EXPECT_EQ(out.at(0, 0), 0.0);
  EXPECT_EQ(out.at(100, 0), 255.0);
  const int mid = 50;
  EXPECT_EQ(out.at(mid, 0), std::round((r.at(mid, 0) - 10.0) / (hi - 10.0) * 255.0));
}

TEST(Tiling, StretchExample) {
  Raster r(3, 1, 0.0, SampleType::kUInt8);
  r.at(0, 0) = 10;
  r.at(1, 0) = 90;
  r.at(2, 0) = 50;
  BrightnessOptions opts;
  opts.threshold = 0.0;
  opts.low = 0.0;
  opts.high = 1.0;
  const Raster out = enhance_brightness(r, opts);
  EXPECT_EQ(out.at(0, 0), 0.0);
  EXPECT_EQ(out.at(1, 0), 255.0);
  EXPECT_EQ(out.at(2, 0), 128.0);  // 127.5 rounds away from zero
}

TEST(Tiling, DarkImagesAreLeftAlone) {
  Raster r(10, 10, 80.0, SampleType::kUInt8);
  r.at(0, 0) = 30;
  const Raster out = enhance_brightness(r);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(out.values()[i], r.values()[i]);
}

TEST(Tiling, ManifestRoundTrip) {
  const std::vector<ManifestEntry> entries{{0, {0, 0}, {512, 512}, "tile_000.pgm", "tile_000.rpc"},
                                           {1, {448, 0}, {512, 512}, "tile_001.pgm", "tile_001.rpc"}};
  const std::string text = format_manifest(entries);
  const auto back = parse_manifest(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].origin, (TileOrigin{448, 0}));
  EXPECT_EQ(back[1].rpc_path, "tile_001.rpc");
  EXPECT_EQ(format_manifest(back), text);
  EXPECT_THROW(parse_manifest("0 1 2 3\n"), Error);
}
