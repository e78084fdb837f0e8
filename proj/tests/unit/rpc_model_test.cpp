#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "satpin/error.hpp"
#include "satpin/rpc_model.hpp"
#include "test_support.hpp"

using namespace satpin;

TEST(RpcModel, ForwardMatchesTermByTermOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int trial = 0; trial < 20; ++trial) {
    const RpcModel m = testutil::random_rpc(rng);
    for (int i = 0; i < 50; ++i) {
      const GeoPoint g{m.lat_off + u(rng) * m.lat_scale, m.lon_off + u(rng) * m.lon_scale,
                       m.alt_off + u(rng) * m.alt_scale};
      const PixelPoint a = project_forward(m, g);
      const PixelPoint b = oracle::rpc_project(m, g);
      EXPECT_NEAR(a.samp, b.samp, 1e-9);
      EXPECT_NEAR(a.line, b.line, 1e-9);
    }
  }
}

TEST(RpcModel, OffsetPointProjectsToPixelOffsets) {
  std::mt19937_64 rng(3);
  RpcModel m = testutil::random_rpc(rng);
  const PixelPoint p = project_forward(m, {m.lat_off, m.lon_off, m.alt_off});
  EXPECT_NEAR(p.samp, m.samp_off + m.samp_scale * m.samp_num[0], 1e-9);
  EXPECT_NEAR(p.line, m.line_off + m.line_scale * m.line_num[0], 1e-9);
}

TEST(RpcModel, ExtrapolationIsFlagged) {
  std::mt19937_64 rng(4);
  const RpcModel m = testutil::random_rpc(rng);
  EXPECT_FALSE(project_forward_checked(m, {m.lat_off, m.lon_off, m.alt_off}).extrapolated);
  EXPECT_TRUE(project_forward_checked(m, {m.lat_off + 2 * m.lat_scale, m.lon_off, m.alt_off}).extrapolated);
}

TEST(RpcModel, SingularDenominatorThrows) {
  std::mt19937_64 rng(5);
  RpcModel m = testutil::random_rpc(rng);
  m.samp_den.fill(0.0);
  m.samp_den[0] = 1.0;
  m.samp_den[1] = -1.0;  // den = 1 - L vanishes at L = 1
  try {
    project_forward(m, {m.lat_off, m.lon_off + m.lon_scale, m.alt_off});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSingular);
  }
}

TEST(RpcModel, InverseRoundTrip) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const RpcModel m = testutil::random_rpc(rng);
    for (int i = 0; i < 100; ++i) {
      const GeoPoint g{m.lat_off + u(rng) * m.lat_scale, m.lon_off + u(rng) * m.lon_scale,
                       m.alt_off + u(rng) * m.alt_scale};
      const PixelPoint p = project_forward(m, g);
      const GeoPoint back = project_inverse(m, p, g.alt);
      const PixelPoint q = project_forward(m, back);
      EXPECT_LT(std::hypot(q.samp - p.samp, q.line - p.line), 1e-6);
      EXPECT_NEAR(back.lat, g.lat, 1e-9);
      EXPECT_NEAR(back.lon, g.lon, 1e-9);
    }
  }
}

TEST(RpcModel, InverseRejectsAltitudeOutsideVolume) {
  std::mt19937_64 rng(7);
  const RpcModel m = testutil::random_rpc(rng);
  EXPECT_THROW(project_inverse(m, {1000, 1000}, m.alt_off + 2 * m.alt_scale), Error);
}

TEST(RpcModel, SerializeRoundTripIsByteIdentical) {
  std::mt19937_64 rng(8);
  const RpcModel m = testutil::random_rpc(rng);
  const std::string a = serialize_rpc(m);
  const RpcModel back = parse_rpc(a);
  EXPECT_EQ(back, m);
  EXPECT_EQ(serialize_rpc(back), a);
}

TEST(RpcModel, ParseErrorsNameMissingKey) {
  std::mt19937_64 rng(9);
  std::string text = serialize_rpc(testutil::random_rpc(rng));
  const auto pos = text.find("SAMP_DEN_COEFF_7");
  text.erase(pos, text.find('\n', pos) - pos + 1);
  try {
    parse_rpc(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("SAMP_DEN_COEFF_7"), std::string::npos);
  }
}

TEST(RpcModel, ValidateRejectsBadModels) {
  std::mt19937_64 rng(10);
  RpcModel m = testutil::random_rpc(rng);
  m.lat_scale = 0.0;
  EXPECT_THROW(m.validate(), Error);
  m = testutil::random_rpc(rng);
  m.line_den[0] = 2.0;
  EXPECT_THROW(m.validate(), Error);
}
