#include "satpin/error_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "satpin/equivalence.hpp"
#include "satpin/error.hpp"
#include "satpin/kv_text.hpp"
#include "satpin/tiling.hpp"

namespace satpin {

EquivalenceReport summarize_discrepancies(std::span<const PixelPoint> reference,
                                          std::span<const PixelPoint> candidate) {
  if (reference.empty()) fail(ErrorKind::kPrecondition, "no points to compare");
  if (reference.size() != candidate.size()) {
    fail(ErrorKind::kPrecondition, "point sets differ in size");
  }
  double ss = 0.0, sl = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double ds = reference[i].samp - candidate[i].samp;
    const double dl = reference[i].line - candidate[i].line;
    ss += ds * ds;
    sl += dl * dl;
    mx = std::max(mx, std::hypot(ds, dl));
  }
  const double n = static_cast<double>(reference.size());
  EquivalenceReport r;
  r.samp_rmse = std::sqrt(ss / n);
  r.line_rmse = std::sqrt(sl / n);
  r.rmse = std::hypot(r.samp_rmse, r.line_rmse);
  r.max_error = mx;
  r.n_points = reference.size();
  return r;
}

EquivalenceReport measure_equivalence_error(const RpcModel& model, const PinholeCamera& camera,
                                            const VirtualGrid& grid, const ImageWarp* warp) {
  if (grid.nodes.empty()) fail(ErrorKind::kPrecondition, "empty grid");
  std::vector<PixelPoint> rpc, pin;
  rpc.reserve(grid.nodes.size());
  pin.reserve(grid.nodes.size());
  for (const auto& node : grid.nodes) {
    rpc.push_back(project_forward(model, node.geo));
    const PixelPoint q = camera.project(node.enu);
    pin.push_back(warp ? apply_warp(*warp, q) : q);
  }
  return summarize_discrepancies(rpc, pin);
}

std::string format_report(const EquivalenceReport& r) {
  KvWriter w;
  w.add("SAMP_RMSE_PX", r.samp_rmse)
      .add("LINE_RMSE_PX", r.line_rmse)
      .add("RMSE_PX", r.rmse)
      .add("MAX_ERROR_PX", r.max_error)
      .add_int("N_POINTS", static_cast<long long>(r.n_points));
  return w.str();
}

EquivalenceReport parse_report(std::string_view text) {
  const KvDocument doc = KvDocument::parse(text);
  EquivalenceReport r;
  r.samp_rmse = doc.number("SAMP_RMSE_PX");
  r.line_rmse = doc.number("LINE_RMSE_PX");
  r.rmse = doc.number("RMSE_PX");
  r.max_error = doc.number("MAX_ERROR_PX");
  r.n_points = static_cast<std::size_t>(doc.number("N_POINTS"));
  return r;
}

ErrorField error_field(const RpcModel& model, const PinholeCamera& camera, ImageSize image_size,
                       int cell_px, const ImageWarp* warp) {
  if (cell_px < 1) fail(ErrorKind::kPrecondition, "cell size must be at least 1 pixel");
  if (image_size.width <= 0 || image_size.height <= 0) {
    fail(ErrorKind::kPrecondition, "image size must be positive");
  }
  const int cols = (image_size.width + cell_px - 1) / cell_px;
  const int rows = (image_size.height + cell_px - 1) / cell_px;
  const auto project = [&model](const GeoPoint& p) { return project_forward(model, p); };
  const GroundVolume volume = rpc_volume(model);
  const EnuAnchor anchor = scene_anchor(model);
  // Roughly three samples per cell along each image axis, scaled up when the
  // image sees only part of the volume (tiles, crops).
  const GridDims probe{20, 20, 2};
  const double kept =
      static_cast<double>(sample_virtual_grid(project, volume, anchor, image_size, probe).nodes.size()) /
      static_cast<double>(probe.count());
  const double boost = kept > 0.0 ? std::sqrt(1.0 / kept) : 16.0;
  const int lateral = std::clamp(static_cast<int>(3 * std::max(cols, rows) * boost), 40, 800);
  const VirtualGrid grid = sample_virtual_grid(project, volume, anchor, image_size,
                                               GridDims{lateral, lateral, 10}, GridSampling::kCellCenters);

  std::vector<double> sum(static_cast<std::size_t>(cols) * rows, 0.0);
  std::vector<int> count(sum.size(), 0);
  for (const auto& node : grid.nodes) {
    const PixelPoint p = project_forward(model, node.geo);
    PixelPoint q = camera.project(node.enu);
    if (warp) q = apply_warp(*warp, q);
    const int c = std::min(static_cast<int>(p.samp) / cell_px, cols - 1);
    const int r = std::min(static_cast<int>(p.line) / cell_px, rows - 1);
    const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
    sum[idx] += std::hypot(p.samp - q.samp, p.line - q.line);
    ++count[idx];
  }

  ErrorField field;
  field.cell_px = cell_px;
  field.image_size = image_size;
  field.raster = Raster(cols, rows, Raster::kDefaultNodata);
  field.raster.set_georeference(0.0, -static_cast<double>(rows) * cell_px, cell_px);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
      if (count[idx] > 0) field.raster.at(c, r) = sum[idx] / count[idx];
    }
  }
  return field;
}

RegionMeans region_means(const ErrorField& field, double inner, double outer) {
  if (!(inner > 0.0 && inner <= outer && outer <= 1.0)) {
    fail(ErrorKind::kPrecondition, "region fractions must satisfy 0 < inner <= outer <= 1");
  }
  const double w = field.image_size.width;
  const double h = field.image_size.height;
  double cs = 0.0, ps = 0.0;
  int cn = 0, pn = 0;
  for (int r = 0; r < field.raster.height(); ++r) {
    for (int c = 0; c < field.raster.width(); ++c) {
      if (!field.raster.valid(c, r)) continue;
      const double x = std::min((c + 0.5) * field.cell_px, w) / w - 0.5;
      const double y = std::min((r + 0.5) * field.cell_px, h) / h - 0.5;
      const double v = field.raster.at(c, r);
      if (std::abs(x) <= inner / 2 && std::abs(y) <= inner / 2) {
        cs += v;
        ++cn;
      }
      if (std::abs(x) > outer / 2 || std::abs(y) > outer / 2) {
        ps += v;
        ++pn;
      }
    }
  }
  if (cn == 0 || pn == 0) fail(ErrorKind::kDegenerate, "error field has an empty region");
  return {cs / cn, ps / pn};
}

double predict_error(double /*fx*/, double x, double z_cam, double z_mean) {
  if (!(z_mean > 0.0)) fail(ErrorKind::kPrecondition, "reference depth must be positive");
  return -x * (z_cam - z_mean) / z_mean;
}

double reference_depth(const PinholeCamera& camera, const VirtualGrid& grid, DepthReference kind) {
  if (grid.nodes.empty()) fail(ErrorKind::kPrecondition, "empty grid");
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& node : grid.nodes) {
    const double z = camera.depth(node.enu);
    sum += z;
    lo = std::min(lo, z);
    hi = std::max(hi, z);
  }
  return kind == DepthReference::kMean ? sum / static_cast<double>(grid.nodes.size())
                                       : (lo + hi) / 2;
}

std::vector<SweepEntry> size_sweep(const RpcModel& model, ImageSize image_size,
                                   std::span<const int> crop_sizes,
                                   const EquateOptions& options) {
  std::vector<SweepEntry> out;
  for (int size : crop_sizes) {
    if (size <= 0 || size > std::max(image_size.width, image_size.height)) {
      fail(ErrorKind::kPrecondition, "crop size " + std::to_string(size) + " outside the image");
    }
    const ImageSize crop{std::min(size, image_size.width), std::min(size, image_size.height)};
    const TileOrigin origin{(image_size.width - crop.width) / 2,
                            (image_size.height - crop.height) / 2};
    const EquateResult r = equate(crop_rpc(model, origin), crop, options);
    out.push_back({size, crop, r.report});
  }
  return out;
}

}  // namespace satpin
