#include <gtest/gtest.h>

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "satpin/error.hpp"
#include "satpin/refinement.hpp"
#include "test_support.hpp"

using namespace satpin;

namespace {

// Raw-coefficient evaluation, independent of the normalized storage.
PixelPoint eval_raw(const PolynomialWarp::Coefficients& m, const PixelPoint& p) {
  const double x = p.samp, y = p.line;
  return {m[0] + m[1] * x + m[2] * y + m[3] * x * y + m[4] * x * x + m[5] * y * y,
          m[6] + m[7] * x + m[8] * y + m[9] * x * y + m[10] * x * x + m[11] * y * y};
}

std::vector<PixelPoint> scattered(std::mt19937_64& rng, int n, double size) {
  std::uniform_real_distribution<double> u(0.0, size);
  std::vector<PixelPoint> out(n);
  for (auto& p : out) p = {u(rng), u(rng)};
  return out;
}

}  // namespace

TEST(Refinement, IdentityFit) {
  std::mt19937_64 rng(1);
  std::vector<Correspondence> pairs;
  for (const auto& p : scattered(rng, 50, 2000)) pairs.push_back({p, p});
  const PolynomialWarp w = fit_polynomial(pairs);
  const auto m = w.coefficients();
  const PolynomialWarp::Coefficients id{0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0};
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(m[i], id[i], 1e-10);
}

TEST(Refinement, TranslationFit) {
  std::mt19937_64 rng(2);
  std::vector<Correspondence> pairs;
  for (const auto& p : scattered(rng, 50, 2000)) pairs.push_back({p, {p.samp + 0.7, p.line - 1.3}});
  const auto m = fit_polynomial(pairs).coefficients();
  EXPECT_NEAR(m[0], 0.7, 1e-9);
  EXPECT_NEAR(m[6], -1.3, 1e-9);
  EXPECT_NEAR(m[1], 1.0, 1e-12);
  EXPECT_NEAR(m[4], 0.0, 1e-14);
}

TEST(Refinement, RecoversRandomQuadratic) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const PolynomialWarp::Coefficients m{u(rng) * 5, 1 + u(rng) * 1e-3, u(rng) * 1e-3, u(rng) * 1e-7,
                                         u(rng) * 1e-7, u(rng) * 1e-7, u(rng) * 5, u(rng) * 1e-3,
                                         1 + u(rng) * 1e-3, u(rng) * 1e-7, u(rng) * 1e-7, u(rng) * 1e-7};
    std::vector<Correspondence> pairs;
    for (const auto& p : scattered(rng, 200, 5000)) pairs.push_back({p, eval_raw(m, p)});
    const PolynomialWarp w = fit_polynomial(pairs);
    EXPECT_LT(w.fit_rms_px(), 1e-8);
    for (const auto& p : scattered(rng, 20, 5000)) {
      const PixelPoint a = w.apply(p), b = eval_raw(m, p);
      EXPECT_NEAR(a.samp, b.samp, 1e-7);
      EXPECT_NEAR(a.line, b.line, 1e-7);
      // Expanded raw coefficients reproduce the same map.
      const PixelPoint c = eval_raw(w.coefficients(), p);
      EXPECT_NEAR(a.samp, c.samp, 1e-7);
      EXPECT_NEAR(a.line, c.line, 1e-7);
    }
  }
}

TEST(Refinement, PolynomialNeedsSixNonConicPoints) {
  std::vector<Correspondence> pairs;
  for (int i = 0; i < 5; ++i) pairs.push_back({{double(i), double(i * i)}, {0, 0}});
  EXPECT_THROW(fit_polynomial(pairs), Error);
  // All on the line y = 2x: rank deficient.
  pairs.clear();
  for (int i = 0; i < 30; ++i) pairs.push_back({{double(i), 2.0 * i}, {double(i), 0}});
  try {
    fit_polynomial(pairs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerate);
  }
}

TEST(Refinement, RecoversHomography) {
  std::mt19937_64 rng(4);
  Eigen::Matrix3d h;
  h << 1.01, 0.02, 5.0, -0.01, 0.99, -3.0, 1e-6, -2e-6, 1.0;
  std::vector<Correspondence> pairs;
  for (const auto& p : scattered(rng, 60, 3000)) {
    const Eigen::Vector3d q = h * Eigen::Vector3d(p.samp, p.line, 1.0);
    pairs.push_back({p, {q.x() / q.z(), q.y() / q.z()}});
  }
  const Homography fit = fit_homography(pairs);
  EXPECT_LT((fit.matrix() - h).norm(), 1e-8);
  EXPECT_EQ(fit.matrix()(2, 2), 1.0);
  EXPECT_LT(fit.fit_rms_px(), 1e-8);
}

TEST(Refinement, HomographyRejectsCollinear) {
  std::vector<Correspondence> pairs;
  for (int i = 0; i < 10; ++i) pairs.push_back({{double(i), double(i)}, {double(i), 1.0}});
  EXPECT_THROW(fit_homography(pairs), Error);
  EXPECT_THROW(fit_homography(std::span(pairs).first(3)), Error);
}

TEST(Refinement, ResampleIntegerShiftIsExact) {
  Raster img(20, 10, 0.0, SampleType::kUInt8);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x) img.at(x, y) = (x * 7 + y * 13) % 256;
  const ImageWarp w = PolynomialWarp::from_coefficients({2, 1, 0, 0, 0, 0, -1, 0, 1, 0, 0, 0});
  const Raster out = resample(img, w, 2);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x) {
      const int sx = x + 2, sy = y - 1;
      if (sx < 20 && sy >= 0) {
        EXPECT_EQ(out.at(x, y), img.at(sx, sy));
      } else {
        EXPECT_FALSE(out.valid(x, y)) << x << "," << y;
      }
    }
}

TEST(Refinement, ResampleReproducesLinearRamp) {
  Raster img(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) img.at(x, y) = 3.0 * x - 2.0 * y + 1.0;
  const ImageWarp w = PolynomialWarp::from_coefficients({0.25, 1, 0, 0, 0, 0, 0.6, 0, 1, 0, 0, 0});
  const Raster out = resample(img, w);
  for (int y = 0; y < 31; ++y)
    for (int x = 0; x < 31; ++x)
      EXPECT_NEAR(out.at(x, y), 3.0 * (x + 0.25) - 2.0 * (y + 0.6) + 1.0, 1e-12);
}

TEST(Refinement, ResampleNodataPropagates) {
  Raster img(10, 10, 5.0);
  img.at(5, 5) = img.nodata();
  const ImageWarp w = PolynomialWarp::from_coefficients({0.5, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0});
  const Raster out = resample(img, w);
  EXPECT_FALSE(out.valid(4, 5));
  EXPECT_FALSE(out.valid(5, 5));
  EXPECT_EQ(out.at(3, 5), 5.0);
  // Zero weight on the nodata neighbor: identity leaves (4,5) valid.
  const Raster same = resample(img, ImageWarp(PolynomialWarp()));
  EXPECT_EQ(same.at(4, 5), 5.0);
}

TEST(Refinement, WarpFilesRoundTripByteIdentical) {
  const ImageWarp poly = PolynomialWarp({100, 200, 50, 60}, {0.5, 1, 0.01, 1e-3, -2e-3, 4e-4, -0.25,
                                                             2e-3, 1, 5e-4, 1e-4, -3e-4},
                                        0.0625);
  Eigen::Matrix3d hm;
  hm << 1, 2e-3, 3, -1e-3, 1, 4, 1e-7, 2e-7, 1;
  const ImageWarp homog = Homography(hm, 0.5);
  for (const ImageWarp& w : {poly, homog}) {
    const std::string text = format_warp(w);
    const ImageWarp back = parse_warp(text);
    EXPECT_EQ(back.index(), w.index());
    EXPECT_EQ(format_warp(back), text);
    const PixelPoint p{123.4, 567.8};
    EXPECT_EQ(apply_warp(back, p), apply_warp(w, p));
  }
  EXPECT_EQ(parse_warp_kind("homography"), WarpKind::kHomography);
  EXPECT_THROW(parse_warp_kind("spline"), Error);
}
