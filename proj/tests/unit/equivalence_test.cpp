#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "satpin/equivalence.hpp"
#include "satpin/error.hpp"
#include "satpin/synth.hpp"

using namespace satpin;

namespace {

PinholeCamera nadir_ish_camera() {
  PinholeCamera c;
  c.k << 20000, 0, 1024, 0, 20000, 1024, 0, 0, 1;
  // Looking down with a small tilt.
  c.r = (Eigen::AngleAxisd(0.12, Eigen::Vector3d::UnitX()) *
         Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()))
            .toRotationMatrix();
  c.t = -c.r * Eigen::Vector3d(0, -1200, 10000);
  c.image_size = {2048, 2048};
  return c;
}

// Grid whose pixels come straight from a known camera.
VirtualGrid grid_from_camera(const PinholeCamera& cam, const Eigen::Matrix3d& q = Eigen::Matrix3d::Identity(),
                             const Eigen::Vector3d& s = Eigen::Vector3d::Zero()) {
  VirtualGrid g;
  g.image_size = cam.image_size;
  g.dims = {8, 8, 4};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 4; ++k) {
        const Eigen::Vector3d x(-500 + i * 1000.0 / 7, -500 + j * 1000.0 / 7, k * 100.0);
        GridNode n;
        n.pixel = cam.project(EnuPoint{x.x(), x.y(), x.z()});
        const Eigen::Vector3d y = q * x + s;
        n.enu = {y.x(), y.y(), y.z()};
        g.nodes.push_back(n);
      }
  return g;
}

}  // namespace

TEST(Equivalence, RqFactorizationIdentity) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = n(rng);
    const RqFactors f = rq_decompose(m);
    EXPECT_LT((f.k * f.r - m).norm() / m.norm(), 1e-12);
    EXPECT_LT((f.r * f.r.transpose() - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    for (int i = 0; i < 3; ++i) EXPECT_GT(f.k(i, i), 0.0);
    EXPECT_EQ(f.k(1, 0), 0.0);
    EXPECT_EQ(f.k(2, 0), 0.0);
    EXPECT_EQ(f.k(2, 1), 0.0);
  }
}

TEST(Equivalence, NormalizedProjectionHasUnitNormAndPositiveDet) {
  Matrix34d p = nadir_ish_camera().projection();
  const Matrix34d n1 = normalize_projection(p);
  const Matrix34d n2 = normalize_projection(-3.0 * p);
  EXPECT_NEAR(n1.norm(), 1.0, 1e-14);
  EXPECT_GT(n1.leftCols<3>().determinant(), 0.0);
  EXPECT_LT((n1 - n2).norm(), 1e-14);
}

TEST(Equivalence, RecoversExactPinhole) {
  const PinholeCamera cam = nadir_ish_camera();
  const VirtualGrid g = grid_from_camera(cam);
  const ProjectionMatrix p = solve_projection(g);
  EXPECT_LT(p.residual_rms_px, 1e-6);
  const PinholeCamera back = decompose_projection(p, g);
  EXPECT_LT((back.k - cam.k).norm() / cam.k.norm(), 1e-8);
  EXPECT_LT((back.r - cam.r).norm(), 1e-8);
  EXPECT_LT((back.t - cam.t).norm() / cam.t.norm(), 1e-8);
  EXPECT_LT((back.k * back.r - cam.k * cam.r).norm() / (cam.k * cam.r).norm(), 1e-9);
}

TEST(Equivalence, NegatedProjectionGivesSameCamera) {
  const PinholeCamera cam = nadir_ish_camera();
  const VirtualGrid g = grid_from_camera(cam);
  ProjectionMatrix p = solve_projection(g);
  const PinholeCamera a = decompose_projection(p, g);
  p.p = -p.p;
  const PinholeCamera b = decompose_projection(p, g);
  EXPECT_LT((a.k - b.k).norm(), 1e-9);
  EXPECT_LT((a.r - b.r).norm(), 1e-12);
  EXPECT_LT((a.t - b.t).norm(), 1e-6);
}

TEST(Equivalence, InvariantUnderRigidMotionOfGround) {
  const PinholeCamera cam = nadir_ish_camera();
  const Eigen::Matrix3d q =
      Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const Eigen::Vector3d s(250.0, -80.0, 40.0);
  const VirtualGrid g = grid_from_camera(cam, q, s);
  const PinholeCamera back = decompose_projection(solve_projection(g), g);
  // X' = Q X + s  =>  K unchanged, R' = R Q^T, t' = t - R Q^T s.
  EXPECT_LT((back.k - cam.k).norm() / cam.k.norm(), 1e-8);
  EXPECT_LT((back.r - cam.r * q.transpose()).norm(), 1e-8);
  const Eigen::Vector3d t_expected = cam.t - cam.r * q.transpose() * s;
  EXPECT_LT((back.t - t_expected).norm() / t_expected.norm(), 1e-8);
}

TEST(Equivalence, CoplanarGridIsDegenerate) {
  VirtualGrid g = grid_from_camera(nadir_ish_camera());
  std::erase_if(g.nodes, [](const GridNode& n) { return n.enu.u != 0.0; });
  try {
    solve_projection(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerate);
  }
}

TEST(Equivalence, NoisyNearPlanarGridIsIllConditioned) {
  // Relief of a millimeter under half-pixel noise: the second-smallest
  // singular value sinks to the noise floor.
  const PinholeCamera cam = nadir_ish_camera();
  VirtualGrid g = grid_from_camera(cam);
  std::erase_if(g.nodes, [](const GridNode& n) { return n.enu.u > 100.0; });
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (auto& n : g.nodes) {
    n.enu.u *= 1e-5;
    n.pixel = cam.project(n.enu);
    n.pixel.samp += noise(rng);
    n.pixel.line += noise(rng);
  }
  try {
    solve_projection(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIllConditioned);
    EXPECT_LT(e.value(), 10.0);
  }
}

TEST(Equivalence, GridBehindCameraIsDegenerate) {
  const PinholeCamera cam = nadir_ish_camera();
  VirtualGrid g = grid_from_camera(cam);
  ProjectionMatrix p = solve_projection(g);
  // Mirror the ground through the camera center: same pixels, negative depth.
  const Eigen::Vector3d c = -cam.r.transpose() * cam.t;
  for (auto& n : g.nodes) {
    const Eigen::Vector3d y = 2 * c - n.enu.vec();
    n.enu = {y.x(), y.y(), y.z()};
  }
  EXPECT_THROW(decompose_projection(p, g), Error);
}

TEST(Equivalence, EquateOnPinholeSceneIsExact) {
  const SyntheticScene scene = make_pinhole_scene(3);
  const EquateResult r = equate(scene.rpc, scene.image_size);
  EXPECT_LT(r.report.rmse, 1e-3);
  const auto& truth = std::get<PinholeCamera>(scene.camera);
  EXPECT_LT((r.camera.k - truth.k).norm() / truth.k.norm(), 1e-5);
  EXPECT_LT((r.camera.r - truth.r).norm(), 1e-5);
  EXPECT_GE(r.fit_points, 6u);
  // Validation grid is twice as dense.
  EXPECT_GT(r.report.n_points, r.fit_points);
}

TEST(Equivalence, DensifiesWhenMostNodesFallOutside) {
  const SyntheticScene scene = make_pushbroom_scene(2, {.image_size = 1024});
  const RpcModel crop = [&] {
    RpcModel m = scene.rpc;
    m.samp_off -= 400;
    m.line_off -= 400;
    return m;
  }();
  const VirtualGrid plain = equate_grid(crop, {128, 128}, {.dims = {20, 20, 10}, .densify = false});
  const VirtualGrid dense = equate_grid(crop, {128, 128}, {.dims = {20, 20, 10}, .densify = true});
  EXPECT_GT(dense.dims.n_lat, 20);
  EXPECT_EQ(dense.dims.n_alt, 10);
  EXPECT_GT(dense.nodes.size(), plain.nodes.size());
}
