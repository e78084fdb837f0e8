#include "satpin/camera.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "satpin/error.hpp"
#include "satpin/kv_text.hpp"

namespace satpin {

Matrix34d PinholeCamera::projection() const {
  Matrix34d rt;
  rt << r, t;
  return k * rt;
}

Eigen::Vector3d PinholeCamera::to_camera(const EnuPoint& p) const { return r * p.vec() + t; }

double PinholeCamera::depth(const EnuPoint& p) const { return r.row(2).dot(p.vec()) + t.z(); }

PixelPoint PinholeCamera::project(const EnuPoint& p) const {
  const Eigen::Vector3d x = k * to_camera(p);
  return {x.x() / x.z(), x.y() / x.z()};
}

PixelPoint PinholeCamera::project(const GeoPoint& p) const {
  return project(geodetic_to_enu(p, anchor));
}

void PinholeCamera::validate() const {
  if (k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0 || k(2, 2) != 1.0) {
    fail(ErrorKind::kPrecondition, "intrinsics must be upper triangular with K(2,2) = 1");
  }
  if (!(fx() > 0.0 && fy() > 0.0)) fail(ErrorKind::kPrecondition, "focal lengths must be positive");
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(ortho < 1e-10) || !(r.determinant() > 0.0)) {
    fail(ErrorKind::kPrecondition, "R is not a proper rotation");
  }
}

std::string format_camera(const PinholeCamera& c, double residual_rms_px) {
  std::vector<double> k, r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      k.push_back(c.k(i, j));
      r.push_back(c.r(i, j));
    }
  }
  KvWriter w;
  w.add_text("IMAGE_SIZE", std::to_string(c.image_size.width) + " " +
                               std::to_string(c.image_size.height))
      .add("ANCHOR_LAT", c.anchor.origin.lat)
      .add("ANCHOR_LON", c.anchor.origin.lon)
      .add("ANCHOR_ALT", c.anchor.origin.alt)
      .add("K", k)
      .add("R", r)
      .add("T", std::vector<double>{c.t.x(), c.t.y(), c.t.z()})
      .add("RESIDUAL_RMS_PX", residual_rms_px);
  return w.str();
}

CameraFile parse_camera(std::string_view text) {
  const KvDocument doc = KvDocument::parse(text);
  CameraFile out;
  PinholeCamera& c = out.camera;
  const auto size = doc.numbers("IMAGE_SIZE", 2);
  c.image_size = {static_cast<int>(size[0]), static_cast<int>(size[1])};
  c.anchor.origin = {doc.number("ANCHOR_LAT"), doc.number("ANCHOR_LON"), doc.number("ANCHOR_ALT")};
  const auto k = doc.numbers("K", 9);
  const auto r = doc.numbers("R", 9);
  const auto t = doc.numbers("T", 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      c.k(i, j) = k[3 * i + j];
      c.r(i, j) = r[3 * i + j];
    }
  }
  c.t = {t[0], t[1], t[2]};
  out.residual_rms_px = doc.number("RESIDUAL_RMS_PX");
  c.validate();
  return out;
}

void write_camera_file(const std::filesystem::path& path, const PinholeCamera& camera,
                       double residual_rms_px) {
  write_text_file(path, format_camera(camera, residual_rms_px));
}

CameraFile read_camera_file(const std::filesystem::path& path) {
  return parse_camera(read_text_file(path));
}

}  // namespace satpin
