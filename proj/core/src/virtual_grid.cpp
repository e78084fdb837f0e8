#include "satpin/virtual_grid.hpp"

#include <Eigen/Dense>

#include "satpin/error.hpp"
#include "satpin/parallel.hpp"

namespace satpin {
namespace {

double axis_value(double lo, double hi, int i, int n, GridSampling sampling) {
  if (sampling == GridSampling::kNodes) {
    return n == 1 ? (lo + hi) / 2 : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  }
  return lo + (hi - lo) * (static_cast<double>(i) + 0.5) / n;
}

void check_inputs(ImageSize image_size, GridDims dims) {
  if (dims.n_lat < 2 || dims.n_lon < 2 || dims.n_alt < 2) {
    fail(ErrorKind::kPrecondition, "grid dimensions must each be at least 2");
  }
  if (image_size.width <= 0 || image_size.height <= 0) {
    fail(ErrorKind::kPrecondition, "image size must be positive");
  }
}

}  // namespace

GroundVolume rpc_volume(const RpcModel& m) {
  return {m.lat_off - m.lat_scale, m.lat_off + m.lat_scale, m.lon_off - m.lon_scale,
          m.lon_off + m.lon_scale, m.alt_off - m.alt_scale, m.alt_off + m.alt_scale};
}

VirtualGrid sample_virtual_grid(const GroundToPixel& project, const GroundVolume& volume,
                                const EnuAnchor& anchor, ImageSize image_size, GridDims dims,
                                GridSampling sampling) {
  const std::size_t total = dims.count();
  std::vector<GridNode> all(total);
  std::vector<char> keep(total, 0);
  const EnuFrame frame(anchor);
  const double w = image_size.width;
  const double h = image_size.height;

  parallel_for(0, static_cast<std::size_t>(dims.n_alt), [&](std::size_t k) {
    const double alt = axis_value(volume.alt_min, volume.alt_max, static_cast<int>(k), dims.n_alt, sampling);
    for (int i = 0; i < dims.n_lat; ++i) {
      const double lat = axis_value(volume.lat_min, volume.lat_max, i, dims.n_lat, sampling);
      for (int j = 0; j < dims.n_lon; ++j) {
        const double lon = axis_value(volume.lon_min, volume.lon_max, j, dims.n_lon, sampling);
        const std::size_t idx = (k * dims.n_lat + i) * dims.n_lon + j;
        GridNode& node = all[idx];
        node.geo = {lat, lon, alt};
        node.pixel = project(node.geo);
        if (node.pixel.samp >= 0.0 && node.pixel.samp < w && node.pixel.line >= 0.0 &&
            node.pixel.line < h) {
          node.enu = frame.to_enu(node.geo);
          keep[idx] = 1;
        }
      }
    }
  });

  VirtualGrid grid;
  grid.dims = dims;
  grid.anchor = anchor;
  grid.image_size = image_size;
  grid.nodes.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    if (keep[i]) grid.nodes.push_back(all[i]);
  }
  grid.n_filtered = total - grid.nodes.size();
  return grid;
}

void check_grid_geometry(const VirtualGrid& grid) {
  const std::size_t n = grid.nodes.size();
  if (n < 6) {
    fail(ErrorKind::kDegenerate,
         "only " + std::to_string(n) + " grid points project inside the image (need 6)");
  }
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& node : grid.nodes) mean += node.enu.vec();
  mean /= static_cast<double>(n);
  Eigen::MatrixX3d centered(static_cast<Eigen::Index>(n), 3);
  for (std::size_t i = 0; i < n; ++i) centered.row(static_cast<Eigen::Index>(i)) = grid.nodes[i].enu.vec() - mean;
  // Through a QR factor rather than the scatter matrix, which would square
  // the condition number and blur anything below ~1e-8.
  const Eigen::HouseholderQR<Eigen::MatrixX3d> qr(centered);
  const Eigen::Matrix3d r = qr.matrixQR().topRows<3>().triangularView<Eigen::Upper>();
  const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3d>(r).singularValues();
  const Eigen::Vector3d ev(sv(2), sv(1), sv(0));
  if (!(ev(0) >= 1e-9 * ev(2))) fail(ErrorKind::kDegenerate, "grid points are coplanar");
}

VirtualGrid build_virtual_grid(const RpcModel& model, ImageSize image_size, GridDims dims) {
  check_inputs(image_size, dims);
  VirtualGrid grid = sample_virtual_grid(
      [&model](const GeoPoint& p) { return project_forward(model, p); }, rpc_volume(model),
      scene_anchor(model), image_size, dims, GridSampling::kNodes);
  check_grid_geometry(grid);
  return grid;
}

VirtualGrid build_validation_grid(const RpcModel& model, ImageSize image_size, GridDims fit_dims) {
  check_inputs(image_size, fit_dims);
  const GridDims dims{2 * fit_dims.n_lat, 2 * fit_dims.n_lon, 2 * fit_dims.n_alt};
  VirtualGrid grid = sample_virtual_grid(
      [&model](const GeoPoint& p) { return project_forward(model, p); }, rpc_volume(model),
      scene_anchor(model), image_size, dims, GridSampling::kCellCenters);
  if (grid.nodes.empty()) fail(ErrorKind::kDegenerate, "validation grid is empty");
  return grid;
}

}  // namespace satpin
