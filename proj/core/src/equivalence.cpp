#include "satpin/equivalence.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "satpin/error.hpp"

namespace satpin {
namespace {

constexpr double kMinSingularRatio = 10.0;
constexpr int kMaxDensify = 16;

// Zero centroid, RMS distance from the origin sqrt(dim).
template <int Dim>
Eigen::Matrix<double, Dim + 1, Dim + 1> hartley(const std::vector<Eigen::Matrix<double, Dim, 1>>& pts) {
  using Vec = Eigen::Matrix<double, Dim, 1>;
  Vec mean = Vec::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double ms = 0.0;
  for (const auto& p : pts) ms += (p - mean).squaredNorm();
  const double rms = std::sqrt(ms / static_cast<double>(pts.size()));
  const double s = rms > 0.0 ? std::sqrt(static_cast<double>(Dim)) / rms : 1.0;
  Eigen::Matrix<double, Dim + 1, Dim + 1> t = Eigen::Matrix<double, Dim + 1, Dim + 1>::Identity();
  t.template topLeftCorner<Dim, Dim>() *= s;
  t.template topRightCorner<Dim, 1>() = -s * mean;
  return t;
}

PixelPoint apply_projection(const Matrix34d& p, const Eigen::Vector3d& x) {
  const Eigen::Vector3d q = p * x.homogeneous();
  return {q.x() / q.z(), q.y() / q.z()};
}

}  // namespace

Matrix34d normalize_projection(const Matrix34d& p) {
  const double norm = p.norm();
  if (!(norm > 0.0) || !p.allFinite()) fail(ErrorKind::kSingular, "projection matrix is zero");
  Matrix34d out = p / norm;
  if (out.leftCols<3>().determinant() < 0.0) out = -out;
  return out;
}

ProjectionMatrix solve_projection(const VirtualGrid& grid) {
  check_grid_geometry(grid);
  const std::size_t n = grid.nodes.size();
  std::vector<Eigen::Vector2d> px(n);
  std::vector<Eigen::Vector3d> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = {grid.nodes[i].pixel.samp, grid.nodes[i].pixel.line};
    xs[i] = grid.nodes[i].enu.vec();
  }
  const Eigen::Matrix3d tp = hartley<2>(px);
  const Eigen::Matrix4d tx = hartley<3>(xs);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * static_cast<Eigen::Index>(n), 12);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector4d x = tx * xs[i].homogeneous();
    const Eigen::Vector3d u = tp * px[i].homogeneous();
    const auto r = 2 * static_cast<Eigen::Index>(i);
    a.block<1, 4>(r, 0) = x.transpose();
    a.block<1, 4>(r, 8) = -u.x() * x.transpose();
    a.block<1, 4>(r + 1, 4) = x.transpose();
    a.block<1, 4>(r + 1, 8) = -u.y() * x.transpose();
  }
  // The SVD of the triangular factor has the same singular values and right
  // vectors as the tall system at a fraction of the cost.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Matrix<double, 12, 12> rfac = qr.matrixQR().topRows(12).triangularView<Eigen::Upper>();
  const Eigen::JacobiSVD<Eigen::Matrix<double, 12, 12>> svd(rfac, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double ratio = sv(11) > 0.0 ? sv(10) / sv(11) : std::numeric_limits<double>::infinity();
  if (!(ratio >= kMinSingularRatio)) {
    fail(ErrorKind::kIllConditioned,
         "DLT system is rank deficient (sigma11/sigma12 = " + std::to_string(ratio) + ")", ratio);
  }

  const Eigen::Matrix<double, 12, 1> v = svd.matrixV().col(11);
  Matrix34d pn;
  pn << v.segment<4>(0).transpose(), v.segment<4>(4).transpose(), v.segment<4>(8).transpose();
  ProjectionMatrix out;
  out.p = normalize_projection(tp.inverse() * pn * tx);
  out.singular_value_ratio = ratio;
  const Eigen::JacobiSVD<Eigen::Matrix3d> msvd(out.p.leftCols<3>());
  const auto& ms = msvd.singularValues();
  if (!(ms(2) > 0.0)) fail(ErrorKind::kSingular, "left 3x3 block of P is singular");
  out.condition_number = ms(0) / ms(2);

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PixelPoint q = apply_projection(out.p, xs[i]);
    sum += (q.samp - px[i].x()) * (q.samp - px[i].x()) + (q.line - px[i].y()) * (q.line - px[i].y());
  }
  out.residual_rms_px = std::sqrt(sum / static_cast<double>(n));
  return out;
}

RqFactors rq_decompose(const Eigen::Matrix3d& m) {
  // With J the exchange matrix, QR of (J m)^T gives m = (J U^T J)(J Q^T).
  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
  j(0, 2) = j(1, 1) = j(2, 0) = 1.0;
  const Eigen::HouseholderQR<Eigen::Matrix3d> qr((j * m).transpose());
  const Eigen::Matrix3d q = qr.householderQ();
  const Eigen::Matrix3d u = qr.matrixQR().triangularView<Eigen::Upper>();
  Eigen::Matrix3d k = j * u.transpose() * j;
  Eigen::Matrix3d r = j * q.transpose();
  for (int i = 0; i < 3; ++i) {
    if (k(i, i) < 0.0) {
      k.col(i) = -k.col(i);
      r.row(i) = -r.row(i);
    }
  }
  k(1, 0) = k(2, 0) = k(2, 1) = 0.0;
  return {k, r};
}

PinholeCamera decompose_projection(const ProjectionMatrix& projection, const VirtualGrid& grid) {
  if (grid.nodes.empty()) fail(ErrorKind::kPrecondition, "empty grid");
  Matrix34d p = normalize_projection(projection.p);

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& node : grid.nodes) centroid += node.enu.vec();
  centroid /= static_cast<double>(grid.nodes.size());
  // After normalization K(2,2) > 0, so depth has the sign of p3 . X.
  if (p.row(2).dot(centroid.homogeneous()) <= 0.0) {
    fail(ErrorKind::kDegenerate,
         "cheirality requires a negative-determinant projection; the grid cannot be in front "
         "of a proper camera");
  }

  const Eigen::Matrix3d m = p.leftCols<3>();
  if (!(std::abs(m.determinant()) > 0.0)) fail(ErrorKind::kSingular, "left 3x3 block of P is singular");
  const RqFactors f = rq_decompose(m);

  PinholeCamera cam;
  cam.t = f.k.triangularView<Eigen::Upper>().solve(p.col(3));
  cam.k = f.k / f.k(2, 2);
  cam.k(1, 0) = cam.k(2, 0) = cam.k(2, 1) = 0.0;
  cam.k(2, 2) = 1.0;
  cam.r = f.r;
  cam.anchor = grid.anchor;
  cam.image_size = grid.image_size;

  for (const auto& node : grid.nodes) {
    if (!(cam.depth(node.enu) > 0.0)) {
      fail(ErrorKind::kDegenerate, "grid point behind the equivalent camera");
    }
  }
  return cam;
}

VirtualGrid equate_grid(const RpcModel& model, ImageSize image_size, const EquateOptions& options) {
  GridDims dims = options.dims;
  if (dims.n_lat < 2 || dims.n_lon < 2 || dims.n_alt < 2) {
    fail(ErrorKind::kPrecondition, "grid dimensions must each be at least 2");
  }
  if (image_size.width <= 0 || image_size.height <= 0) {
    fail(ErrorKind::kPrecondition, "image size must be positive");
  }
  const auto project = [&model](const GeoPoint& p) { return project_forward(model, p); };
  const GroundVolume volume = rpc_volume(model);
  const EnuAnchor anchor = scene_anchor(model);

  VirtualGrid grid = sample_virtual_grid(project, volume, anchor, image_size, dims);
  const double kept = static_cast<double>(grid.nodes.size()) / static_cast<double>(dims.count());
  if (options.densify && kept < 0.5) {
    const int factor =
        kept > 0.0 ? std::min(kMaxDensify, static_cast<int>(std::ceil(std::sqrt(1.0 / kept))))
                   : kMaxDensify;
    dims.n_lat *= factor;
    dims.n_lon *= factor;
    grid = sample_virtual_grid(project, volume, anchor, image_size, dims);
  }
  check_grid_geometry(grid);
  return grid;
}

EquateResult equate(const RpcModel& model, ImageSize image_size, const EquateOptions& options) {
  EquateResult out;
  const VirtualGrid grid = equate_grid(model, image_size, options);
  out.fit_dims = grid.dims;
  out.fit_points = grid.nodes.size();
  out.projection = solve_projection(grid);
  out.camera = decompose_projection(out.projection, grid);
  const VirtualGrid validation = build_validation_grid(model, image_size, grid.dims);
  out.report = measure_equivalence_error(model, out.camera, validation);
  return out;
}

}  // namespace satpin
