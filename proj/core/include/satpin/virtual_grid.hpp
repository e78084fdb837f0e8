#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "satpin/camera.hpp"
#include "satpin/geodesy.hpp"
#include "satpin/rpc_model.hpp"

namespace satpin {

// Axis-aligned geodetic box.
struct GroundVolume {
  double lat_min = 0.0, lat_max = 0.0;
  double lon_min = 0.0, lon_max = 0.0;
  double alt_min = 0.0, alt_max = 0.0;

  GeoPoint center() const {
    return {(lat_min + lat_max) / 2, (lon_min + lon_max) / 2, (alt_min + alt_max) / 2};
  }
};

// off +- scale on every axis.
GroundVolume rpc_volume(const RpcModel& model);

struct GridDims {
  int n_lat = 20;
  int n_lon = 20;
  int n_alt = 10;

  std::size_t count() const {
    return static_cast<std::size_t>(n_lat) * static_cast<std::size_t>(n_lon) *
           static_cast<std::size_t>(n_alt);
  }
  bool operator==(const GridDims&) const = default;
};

inline constexpr GridDims kDefaultGridDims{20, 20, 10};

enum class GridSampling {
  kNodes,        // n nodes per axis including both box faces
  kCellCenters,  // centers of n equal cells per axis (half-cell offset)
};

struct GridNode {
  GeoPoint geo;
  EnuPoint enu;
  PixelPoint pixel;
};

struct VirtualGrid {
  std::vector<GridNode> nodes;
  GridDims dims;
  EnuAnchor anchor;
  ImageSize image_size;
  std::size_t n_filtered = 0;  // nodes dropped for projecting outside the image
};

using GroundToPixel = std::function<PixelPoint(const GeoPoint&)>;

// Samples the volume, projects every node, drops nodes whose pixel falls
// outside [0, w) x [0, h), and converts survivors to ENU at `anchor`.
// Does not check degeneracy.
VirtualGrid sample_virtual_grid(const GroundToPixel& project, const GroundVolume& volume,
                                const EnuAnchor& anchor, ImageSize image_size, GridDims dims,
                                GridSampling sampling = GridSampling::kNodes);

// Throws kDegenerate when fewer than 6 nodes survive or survivors are coplanar
// (smallest singular value of centered ENU < 1e-9 x largest).
void check_grid_geometry(const VirtualGrid& grid);

// The hierarchical grid over the RPC volume, anchored at scene_anchor(model).
// Throws kPrecondition for dims < 2 or non-positive image size.
VirtualGrid build_virtual_grid(const RpcModel& model, ImageSize image_size, GridDims dims);

// Independent validation grid: twice the density, half-cell offset.
VirtualGrid build_validation_grid(const RpcModel& model, ImageSize image_size, GridDims fit_dims);

}  // namespace satpin
