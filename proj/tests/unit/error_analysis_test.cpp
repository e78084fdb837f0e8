#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "satpin/equivalence.hpp"
#include "satpin/error.hpp"
#include "satpin/error_analysis.hpp"
#include "satpin/synth.hpp"

using namespace satpin;

TEST(ErrorAnalysis, ThreeFourFive) {
  const std::vector<PixelPoint> ref{{3, 4}}, cand{{0, 0}};
  const EquivalenceReport r = summarize_discrepancies(ref, cand);
  EXPECT_DOUBLE_EQ(r.samp_rmse, 3.0);
  EXPECT_DOUBLE_EQ(r.line_rmse, 4.0);
  EXPECT_DOUBLE_EQ(r.rmse, 5.0);
  EXPECT_DOUBLE_EQ(r.max_error, 5.0);
  EXPECT_EQ(r.n_points, 1u);
}

TEST(ErrorAnalysis, RmseIsRootSumOfAxisSquaresAndBoundedByMax) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 2.0);
  std::vector<PixelPoint> a(500), b(500);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = {n(rng), n(rng)};
    b[i] = {n(rng), n(rng)};
  }
  const EquivalenceReport r = summarize_discrepancies(a, b);
  EXPECT_NEAR(r.rmse * r.rmse, r.samp_rmse * r.samp_rmse + r.line_rmse * r.line_rmse, 1e-12);
  EXPECT_LE(r.rmse, r.max_error);
}

TEST(ErrorAnalysis, RejectsEmptyOrMismatched) {
  const std::vector<PixelPoint> one{{0, 0}}, none;
  EXPECT_THROW(summarize_discrepancies(none, none), Error);
  EXPECT_THROW(summarize_discrepancies(one, none), Error);
}

TEST(ErrorAnalysis, ReportRoundTripIsByteIdentical) {
  const EquivalenceReport r{0.1, 0.2, std::hypot(0.1, 0.2), 0.75, 4000};
  const std::string text = format_report(r);
  const EquivalenceReport back = parse_report(text);
  EXPECT_EQ(back.rmse, r.rmse);
  EXPECT_EQ(back.n_points, r.n_points);
  EXPECT_EQ(format_report(back), text);
}

TEST(ErrorAnalysis, PredictedErrorMatchesWeakPerspectiveToFirstOrder) {
  const double f = 10000.0, z_ref = 600000.0;
  for (double x_cam : {-5000.0, 1000.0, 7000.0}) {
    for (double dz : {-300.0, 50.0, 800.0}) {
      const double x = f * x_cam / z_ref;
      const double gap = oracle::weak_perspective_gap(f, x_cam, z_ref + dz, z_ref);
      const double pred = predict_error(f, x, z_ref + dz, z_ref);
      // Second-order remainder: x (dz / z)^2.
      EXPECT_NEAR(pred, gap, std::abs(x) * (dz / z_ref) * (dz / z_ref) * 1.01 + 1e-12);
    }
  }
  EXPECT_EQ(predict_error(1.0, 100.0, 5.0, 5.0), 0.0);
  EXPECT_THROW(predict_error(1.0, 1.0, 1.0, 0.0), Error);
}

TEST(ErrorAnalysis, ReferenceDepthMeanAndMidRange) {
  PinholeCamera cam;  // identity: depth = up
  VirtualGrid g;
  for (double u : {1.0, 2.0, 9.0}) g.nodes.push_back({{}, {0, 0, u}, {}});
  EXPECT_DOUBLE_EQ(reference_depth(cam, g, DepthReference::kMean), 4.0);
  EXPECT_DOUBLE_EQ(reference_depth(cam, g, DepthReference::kMidRange), 5.0);
}

TEST(ErrorAnalysis, RegionMeansSplitCenterAndPeriphery) {
  ErrorField f{Raster(10, 10), 10, {100, 100}};
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) f.raster.at(c, r) = std::max(std::abs(c - 4.5), std::abs(r - 4.5));
  const RegionMeans m = region_means(f);
  // Central 20% box holds the 2x2 middle cells, periphery the outer ring.
  EXPECT_DOUBLE_EQ(m.center, 0.5);
  EXPECT_DOUBLE_EQ(m.periphery, 4.5);
  f.raster.at(4, 4) = f.raster.nodata();
  f.raster.at(5, 4) = f.raster.nodata();
  f.raster.at(4, 5) = f.raster.nodata();
  f.raster.at(5, 5) = f.raster.nodata();
  EXPECT_THROW(region_means(f), Error);
}

TEST(ErrorAnalysis, ErrorFieldIsFlatZeroForAPinholeScene) {
  const SyntheticScene scene = make_pinhole_scene(1, {.image_size = 512});
  const EquateResult r = equate(scene.rpc, scene.image_size);
  const ErrorField f = error_field(scene.rpc, r.camera, scene.image_size, 64);
  EXPECT_EQ(f.raster.width(), 8);
  int valid = 0;
  for (double v : f.raster.values()) {
    if (f.raster.is_nodata(v)) continue;
    ++valid;
    EXPECT_LT(v, 1e-3);
  }
  // The volume projects inside the image with a margin; corner cells can
  // fall outside it and stay nodata.
  EXPECT_GE(valid, 40);
}

TEST(ErrorAnalysis, MeasureWithIdentityWarpMatchesWithout) {
  const SyntheticScene scene = make_pushbroom_scene(1, {.image_size = 512});
  const EquateResult r = equate(scene.rpc, scene.image_size);
  const VirtualGrid g = build_validation_grid(scene.rpc, scene.image_size, r.fit_dims);
  const ImageWarp id = PolynomialWarp();
  const EquivalenceReport a = measure_equivalence_error(scene.rpc, r.camera, g);
  const EquivalenceReport b = measure_equivalence_error(scene.rpc, r.camera, g, &id);
  EXPECT_DOUBLE_EQ(a.rmse, b.rmse);
  EXPECT_NEAR(a.rmse, r.report.rmse, 1e-12);
}
