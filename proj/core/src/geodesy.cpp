#include "satpin/geodesy.hpp"

#include <cmath>
#include <numbers>

#include "satpin/error.hpp"

namespace satpin {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

EnuAnchor scene_anchor(const RpcModel& model) {
  return EnuAnchor{{model.lat_off, model.lon_off, model.alt_off}};
}

Ecef geodetic_to_ecef(const GeoPoint& p) {
  using namespace wgs84;
  const double lat = p.lat * kDegToRad;
  const double lon = p.lon * kDegToRad;
  const double sin_lat = std::sin(lat);
  const double cos_lat = std::cos(lat);
  const double n = kSemiMajor / std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
  return {(n + p.alt) * cos_lat * std::cos(lon), (n + p.alt) * cos_lat * std::sin(lon),
          (n * (1.0 - kEccentricitySq) + p.alt) * sin_lat};
}

GeoPoint ecef_to_geodetic(const Ecef& q) {
  using namespace wgs84;
  const double r = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
  if (r < 1.0) fail(ErrorKind::kDegenerate, "ECEF point within 1 m of the Earth's center");

  const double p = std::hypot(q.x, q.y);
  const double lon = p > 0.0 ? std::atan2(q.y, q.x) : 0.0;
  const double ep2 = kEccentricitySq / (1.0 - kEccentricitySq);

  // Bowring: iterate on the reduced latitude beta.
  double beta = std::atan2(kSemiMajor * q.z, kSemiMinor * p);
  double lat = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double sb = std::sin(beta);
    const double cb = std::cos(beta);
    lat = std::atan2(q.z + ep2 * kSemiMinor * sb * sb * sb,
                     p - kEccentricitySq * kSemiMajor * cb * cb * cb);
    const double next = std::atan2((1.0 - kFlattening) * std::sin(lat), std::cos(lat));
    const double delta = std::abs(next - beta);
    beta = next;
    if (delta < 1e-15) break;
  }
  const double sin_lat = std::sin(lat);
  const double cos_lat = std::cos(lat);
  // Height form that stays well conditioned at the poles.
  const double alt = p * cos_lat + q.z * sin_lat -
                     kSemiMajor * std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
  return {lat * kRadToDeg, lon * kRadToDeg, alt};
}

EnuFrame::EnuFrame(const EnuAnchor& anchor) : anchor_(anchor) {
  const Ecef o = geodetic_to_ecef(anchor.origin);
  origin_ecef_ = {o.x, o.y, o.z};
  const double lat = anchor.origin.lat * kDegToRad;
  const double lon = anchor.origin.lon * kDegToRad;
  const double sl = std::sin(lat), cl = std::cos(lat);
  const double so = std::sin(lon), co = std::cos(lon);
  ecef_to_enu_ << -so, co, 0.0,
                  -sl * co, -sl * so, cl,
                  cl * co, cl * so, sl;
}

EnuPoint EnuFrame::to_enu(const GeoPoint& p) const {
  const Ecef q = geodetic_to_ecef(p);
  const Eigen::Vector3d d = ecef_to_enu_ * (Eigen::Vector3d(q.x, q.y, q.z) - origin_ecef_);
  return {d.x(), d.y(), d.z()};
}

GeoPoint EnuFrame::to_geodetic(const EnuPoint& p) const {
  const Eigen::Vector3d q = origin_ecef_ + ecef_to_enu_.transpose() * p.vec();
  return ecef_to_geodetic({q.x(), q.y(), q.z()});
}

EnuPoint geodetic_to_enu(const GeoPoint& p, const EnuAnchor& anchor) {
  return EnuFrame(anchor).to_enu(p);
}

GeoPoint enu_to_geodetic(const EnuPoint& p, const EnuAnchor& anchor) {
  return EnuFrame(anchor).to_geodetic(p);
}

}  // namespace satpin
