#pragma once

#include <Eigen/Core>

#include "satpin/rpc_model.hpp"

namespace satpin {

namespace wgs84 {
inline constexpr double kSemiMajor = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kSemiMinor = kSemiMajor * (1.0 - kFlattening);
inline constexpr double kEccentricitySq = kFlattening * (2.0 - kFlattening);
}  // namespace wgs84

struct Ecef {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Local east-north-up coordinates in meters.
struct EnuPoint {
  double e = 0.0;
  double n = 0.0;
  double u = 0.0;

  Eigen::Vector3d vec() const { return {e, n, u}; }
};

// Tangent point of an ENU frame. For a scene this is the RPC offset point
// (lat_off, lon_off, alt_off); see scene_anchor().
struct EnuAnchor {
  GeoPoint origin;

  bool operator==(const EnuAnchor&) const = default;
};

EnuAnchor scene_anchor(const RpcModel& model);

Ecef geodetic_to_ecef(const GeoPoint& p);

// Bowring iteration. Longitude is reported as 0 on the polar axis. Throws
// kDegenerate within 1 m of the Earth's center.
GeoPoint ecef_to_geodetic(const Ecef& p);

EnuPoint geodetic_to_enu(const GeoPoint& p, const EnuAnchor& anchor);
GeoPoint enu_to_geodetic(const EnuPoint& p, const EnuAnchor& anchor);

// Cached anchor geometry for bulk conversions.
class EnuFrame {
 public:
  explicit EnuFrame(const EnuAnchor& anchor);

  const EnuAnchor& anchor() const { return anchor_; }
  EnuPoint to_enu(const GeoPoint& p) const;
  GeoPoint to_geodetic(const EnuPoint& p) const;

 private:
  EnuAnchor anchor_;
  Eigen::Vector3d origin_ecef_;
  Eigen::Matrix3d ecef_to_enu_;  // rows: east, north, up
};

}  // namespace satpin
