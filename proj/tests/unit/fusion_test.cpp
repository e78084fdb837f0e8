#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "satpin/error.hpp"
#include "satpin/fusion.hpp"

using namespace satpin;

TEST(Fusion, MadDropsTheOutlier) {
  const std::vector<double> h{9, 10, 11, 10, 50};
  const std::vector<double> kept = mad_filter(h, 3.0, 0.1);
  EXPECT_EQ(kept, (std::vector<double>{9, 10, 11, 10}));
}

TEST(Fusion, MadFloorKeepsNearIdenticalHeights) {
  // MAD is 0; the floor allows 3 * 1.4826 * 0.1 = 0.445 m.
  const std::vector<double> h{10, 10, 10, 10.4, 10.5};
  EXPECT_EQ(mad_filter(h, 3.0, 0.1).size(), 4u);
}

TEST(Fusion, MedianEvenAndOdd) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
}

TEST(Fusion, RadiusFilterCountsTheCellItself) {
  Raster r(9, 9);
  for (double& v : r.values()) v = r.nodata();
  r.at(4, 4) = 1.0;  // isolated
  r.at(0, 0) = r.at(1, 0) = r.at(0, 1) = r.at(1, 1) = 2.0;  // 4-cluster
  const Raster out = radius_filter(r, 1.5, 4);
  EXPECT_FALSE(out.valid(4, 4));
  EXPECT_TRUE(out.valid(0, 0));
  EXPECT_TRUE(out.valid(1, 1));
}

TEST(Fusion, FuseViewsRejectsOutlierView) {
  std::vector<Raster> views;
  for (double offset : {0.0, 0.05, -0.05, 0.02, 30.0}) {
    Raster r(12, 12);
    for (double& v : r.values()) v = 100.0 + offset;
    views.push_back(r);
  }
  const Raster fused = fuse_views(views);
  for (double v : fused.values()) EXPECT_NEAR(v, 100.0, 0.03);
  FusionConfig mean_cfg;
  mean_cfg.aggregator = Aggregator::kMean;
  const Raster m = fuse_views(views, mean_cfg);
  EXPECT_NEAR(m.at(5, 5), 100.005, 1e-9);
}

TEST(Fusion, FuseViewsRequiresMatchingGeometry) {
  std::vector<Raster> views{Raster(4, 4), Raster(5, 4)};
  EXPECT_THROW(fuse_views(views), Error);
  FusionConfig bad;
  bad.mad_k = 0.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Fusion, MosaicAveragesOverlap) {
  Raster a(4, 2, 1.0), b(4, 2, 3.0);
  a.set_georeference(0, 0, 1);
  b.set_georeference(2, 0, 1);
  const std::vector<Raster> tiles{a, b};
  const Raster m = mosaic_tiles(tiles);
  EXPECT_EQ(m.width(), 6);
  EXPECT_EQ(m.at(0, 0), 1.0);
  EXPECT_EQ(m.at(2, 1), 2.0);
  EXPECT_EQ(m.at(5, 0), 3.0);
}

TEST(Fusion, MetricsHandExample) {
  Raster est(3, 1), truth(3, 1);
  est.at(0, 0) = 2;
  est.at(1, 0) = 2;
  est.at(2, 0) = 5;
  truth.at(0, 0) = 1;
  truth.at(1, 0) = 2;
  truth.at(2, 0) = 3;
  const std::vector<double> th{1.0, 2.0};
  const DsmMetrics m = dsm_metrics(est, truth, th);
  EXPECT_NEAR(m.rmse, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_DOUBLE_EQ(m.me, 1.0);
  EXPECT_DOUBLE_EQ(m.mae, 1.0);
  // Strictly below: 0 < 1, 1 < 2.
  EXPECT_DOUBLE_EQ(m.completeness[0].second, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.completeness[1].second, 2.0 / 3.0);
}

TEST(Fusion, MetricsAgreeWithBruteForceOracle) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.5);
  std::bernoulli_distribution hole(0.15);
  for (int trial = 0; trial < 10; ++trial) {
    Raster est(40, 30), truth(40, 30);
    std::vector<double> e, t;
    std::vector<bool> ev, tv;
    for (std::size_t i = 0; i < est.size(); ++i) {
      const double base = 100 + n(rng);
      truth.values()[i] = base;
      est.values()[i] = base + n(rng);
      if (hole(rng)) truth.values()[i] = truth.nodata();
      if (hole(rng)) est.values()[i] = est.nodata();
      e.push_back(est.values()[i]);
      t.push_back(truth.values()[i]);
      ev.push_back(!est.is_nodata(e.back()));
      tv.push_back(!truth.is_nodata(t.back()));
    }
    const std::vector<double> th{0.5, 1.0, 2.0};
    const DsmMetrics m = dsm_metrics(est, truth, th);
    const oracle::Metrics o = oracle::dsm_metrics(e, t, ev, tv, th);
    EXPECT_NEAR(m.rmse, o.rmse, 1e-12);
    EXPECT_NEAR(m.me, o.me, 1e-12);
    EXPECT_NEAR(m.mae, o.mae, 1e-12);
    for (std::size_t k = 0; k < th.size(); ++k) {
      EXPECT_NEAR(m.completeness[k].second, o.comp[k], 1e-15);
      if (k) EXPECT_GE(m.completeness[k].second, m.completeness[k - 1].second);
    }
    EXPECT_LE(m.completeness.back().second, o.comp_inf);
  }
}

TEST(Fusion, MetricsNeedCommonCells) {
  Raster est(2, 1), truth(2, 1);
  est.at(0, 0) = est.nodata();
  truth.at(1, 0) = truth.nodata();
  const std::vector<double> th{1.0};
  EXPECT_THROW(dsm_metrics(est, truth, th), Error);
}
