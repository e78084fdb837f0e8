#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "satpin/error.hpp"
#include "satpin/geodesy.hpp"

using namespace satpin;

TEST(Geodesy, EquatorAndPole) {
  const Ecef e = geodetic_to_ecef({0, 0, 0});
  EXPECT_NEAR(e.x, wgs84::kSemiMajor, 1e-9);
  EXPECT_NEAR(e.y, 0.0, 1e-9);
  const Ecef p = geodetic_to_ecef({90, 0, 0});
  EXPECT_NEAR(p.z, wgs84::kSemiMinor, 1e-6);
  const GeoPoint back = ecef_to_geodetic({0, 0, wgs84::kSemiMinor + 10});
  EXPECT_NEAR(back.lat, 90.0, 1e-12);
  EXPECT_EQ(back.lon, 0.0);
  EXPECT_NEAR(back.alt, 10.0, 1e-6);
}

TEST(Geodesy, BowringAgreesWithFixedPointOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-180.0, 180.0), alt(-500.0, 9000.0);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint g{lat(rng), lon(rng), alt(rng)};
    const Ecef e = geodetic_to_ecef(g);
    const GeoPoint b = ecef_to_geodetic(e);
    double olat, olon, oalt;
    oracle::ecef_to_geodetic(e.x, e.y, e.z, olat, olon, oalt);
    EXPECT_NEAR(b.lat, olat, 1e-10);
    EXPECT_NEAR(b.lon, olon, 1e-10);
    EXPECT_NEAR(b.alt, oalt, 1e-5);
    EXPECT_NEAR(b.lat, g.lat, 1e-10);
    EXPECT_NEAR(b.alt, g.alt, 1e-5);
  }
}

TEST(Geodesy, CenterOfEarthIsDegenerate) {
  EXPECT_THROW(ecef_to_geodetic({0.1, 0, 0}), Error);
}

TEST(Geodesy, EnuAxesAtAnchor) {
  const EnuAnchor anchor{{45.0, 10.0, 100.0}};
  const EnuPoint o = geodetic_to_enu(anchor.origin, anchor);
  EXPECT_NEAR(o.e, 0, 1e-9);
  EXPECT_NEAR(o.n, 0, 1e-9);
  EXPECT_NEAR(o.u, 0, 1e-9);
  const EnuPoint up = geodetic_to_enu({45.0, 10.0, 150.0}, anchor);
  EXPECT_NEAR(up.u, 50.0, 1e-8);
  EXPECT_NEAR(std::hypot(up.e, up.n), 0.0, 1e-8);
  EXPECT_GT(geodetic_to_enu({45.0001, 10.0, 100.0}, anchor).n, 0.0);
  EXPECT_GT(geodetic_to_enu({45.0, 10.0001, 100.0}, anchor).e, 0.0);
}

TEST(Geodesy, EnuRoundTripAndFrameConsistency) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-0.2, 0.2), h(-300.0, 3000.0);
  const EnuAnchor anchor{{-33.9, 151.2, 40.0}};
  const EnuFrame frame(anchor);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint g{anchor.origin.lat + d(rng), anchor.origin.lon + d(rng), h(rng)};
    const EnuPoint a = geodetic_to_enu(g, anchor);
    const EnuPoint b = frame.to_enu(g);
    EXPECT_NEAR(a.e, b.e, 1e-7);
    EXPECT_NEAR(a.n, b.n, 1e-7);
    EXPECT_NEAR(a.u, b.u, 1e-7);
    const GeoPoint back = frame.to_geodetic(b);
    EXPECT_NEAR(back.lat, g.lat, 1e-11);
    EXPECT_NEAR(back.lon, g.lon, 1e-11);
    EXPECT_NEAR(back.alt, g.alt, 1e-6);
  }
}

TEST(Geodesy, EnuPreservesDistances) {
  const EnuAnchor anchor{{10.0, 20.0, 0.0}};
  const GeoPoint a{10.01, 20.02, 300.0}, b{9.99, 19.97, -40.0};
  const Ecef ea = geodetic_to_ecef(a), eb = geodetic_to_ecef(b);
  const EnuPoint na = geodetic_to_enu(a, anchor), nb = geodetic_to_enu(b, anchor);
  const double d_ecef = std::sqrt((ea.x - eb.x) * (ea.x - eb.x) + (ea.y - eb.y) * (ea.y - eb.y) +
                                  (ea.z - eb.z) * (ea.z - eb.z));
  EXPECT_NEAR((na.vec() - nb.vec()).norm(), d_ecef, 1e-6);
}
