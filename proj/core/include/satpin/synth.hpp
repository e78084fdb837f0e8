#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "satpin/camera.hpp"
#include "satpin/geodesy.hpp"
#include "satpin/raster.hpp"
#include "satpin/rpc_model.hpp"
#include "satpin/virtual_grid.hpp"

namespace satpin {

// Linear pushbroom camera over homogeneous ENU X~:
//   line = a . X~            (along-track, affine)
//   samp = (b . X~) / (c . X~)  (across-track, perspective)
struct PushbroomCamera {
  Eigen::Vector4d a = Eigen::Vector4d::Zero();
  Eigen::Vector4d b = Eigen::Vector4d::Zero();
  Eigen::Vector4d c = Eigen::Vector4d::Zero();
  EnuAnchor anchor;

  PixelPoint project(const EnuPoint& p) const;
};

using SceneCamera = std::variant<PinholeCamera, PushbroomCamera>;

PixelPoint project(const SceneCamera& camera, const EnuPoint& p);

// Generator camera as key-value text: the camera export format for a pinhole,
// KIND/ANCHOR_*/A/B/C for a pushbroom.
std::string format_scene_camera(const SceneCamera& camera);
const EnuAnchor& camera_anchor(const SceneCamera& camera);

struct SyntheticScene {
  Raster terrain;  // ellipsoidal heights, georeferenced in degrees (x = lon, y = lat)
  GroundVolume volume;
  SceneCamera camera;
  ImageSize image_size;
  RpcModel rpc;
  double fit_rms_px = 0.0;
};

// Midpoint-displacement height field, size x size cells, scaled to
// [0, relief]. Pure function of the seed.
Raster make_terrain(std::uint64_t seed, int size, double relief);

struct RpcFit {
  RpcModel model;
  double fit_rms_px = 0.0;
};

inline constexpr GridDims kRpcFitDims{30, 30, 15};

// Linearized rational least squares, per axis: minimize
// sum (num(x) - target * den(x))^2 with the denominator constant fixed at 1.
// Throws kIllConditioned for a constant projection or a denominator that
// approaches zero inside the volume.
RpcFit fit_rpc(const GroundToPixel& project, const GroundVolume& volume,
               GridDims dims = kRpcFitDims);

// RMS of |model - project| over cell centers of `dims` (a grid disjoint from
// the fitting nodes).
double rpc_holdout_rms(const RpcModel& model, const GroundToPixel& project,
                       const GroundVolume& volume, GridDims dims = {29, 29, 14});

struct SceneOptions {
  int image_size = 2048;
  std::optional<double> relief;  // meters; drawn from the seed when unset
  int terrain_cells = 257;
};

// Tilted frame camera over a small footprint.
SyntheticScene make_pinhole_scene(std::uint64_t seed, const SceneOptions& options = {});

// Rolled linear pushbroom from orbit height with a 15-25 km footprint.
SyntheticScene make_pushbroom_scene(std::uint64_t seed, const SceneOptions& options = {});

GroundToPixel scene_projection(const SceneCamera& camera);

// Checkerboard on the ground (period in meters) shaded by the terrain,
// sampled at each pixel's ground intersection; 8-bit, nodata where the line
// of sight misses the terrain.
Raster render_image(const SyntheticScene& scene, const SceneCamera& camera, ImageSize size,
                    double checker_period_m = 100.0);

}  // namespace satpin
