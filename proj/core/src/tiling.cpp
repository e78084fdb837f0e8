#include "satpin/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "satpin/error.hpp"
#include "satpin/kv_text.hpp"

namespace satpin {
namespace {

std::vector<int> axis_origins(int extent, int tile, int overlap) {
  if (tile >= extent) return {0};
  const int stride = tile - overlap;
  const int n = (extent - overlap + stride - 1) / stride;
  std::vector<int> out;
  for (int i = 0; i < n; ++i) out.push_back(std::min(i * stride, extent - tile));
  return out;
}

}  // namespace

TilePlan plan_tiles(ImageSize image_size, int tile_size, int overlap) {
  if (image_size.width <= 0 || image_size.height <= 0) {
    fail(ErrorKind::kPrecondition, "image size must be positive");
  }
  if (tile_size <= 0) fail(ErrorKind::kPrecondition, "tile size must be positive");
  if (overlap < 0 || overlap >= tile_size) {
    fail(ErrorKind::kPrecondition, "overlap must satisfy 0 <= overlap < tile size");
  }
  const int tw = std::min(tile_size, image_size.width);
  const int th = std::min(tile_size, image_size.height);
  TilePlan plan;
  plan.parent_size = image_size;
  plan.overlap = overlap;
  int index = 0;
  for (int row : axis_origins(image_size.height, th, std::min(overlap, th - 1))) {
    for (int col : axis_origins(image_size.width, tw, std::min(overlap, tw - 1))) {
      plan.tiles.push_back({index++, {col, row}, {tw, th}});
    }
  }
  return plan;
}

RpcModel crop_rpc(const RpcModel& model, TileOrigin origin) {
  RpcModel out = model;
  out.samp_off -= origin.col;
  out.line_off -= origin.row;
  return out;
}

Raster crop_raster(const Raster& image, TileOrigin origin, ImageSize size) {
  if (origin.col < 0 || origin.row < 0 || size.width <= 0 || size.height <= 0 ||
      origin.col + size.width > image.width() || origin.row + size.height > image.height()) {
    fail(ErrorKind::kPrecondition, "crop window outside the image");
  }
  Raster out(size.width, size.height, 0.0, image.sample_type());
  out.set_nodata(image.nodata());
  const double bottom_row = image.height() - (origin.row + size.height);
  out.set_georeference(image.origin_x() + origin.col * image.cell_size(),
                       image.origin_y() + bottom_row * image.cell_size(), image.cell_size());
  for (int r = 0; r < size.height; ++r) {
    for (int c = 0; c < size.width; ++c) out.at(c, r) = image.at(origin.col + c, origin.row + r);
  }
  return out;
}

double quantile(const Raster& image, double q) {
  std::vector<double> v;
  v.reserve(image.size());
  for (double x : image.values()) {
    if (!image.is_nodata(x)) v.push_back(x);
  }
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Raster enhance_brightness(const Raster& image, const BrightnessOptions& options) {
  const double trigger = quantile(image, options.trigger_percentile);
  if (std::isnan(trigger) || !(trigger > options.threshold)) return image;
  const double lo = quantile(image, options.low);
  const double hi = quantile(image, options.high);
  if (!(hi > lo)) return image;

  const double top = full_range_max(image.sample_type());
  const bool integral = image.sample_type() != SampleType::kFloat64;
  Raster out = image;
  for (double& x : out.values()) {
    if (image.is_nodata(x)) continue;
    const double y = std::clamp((x - lo) / (hi - lo), 0.0, 1.0) * top;
    x = integral ? std::round(y) : y;  // half away from zero
  }
  return out;
}

std::string format_manifest(std::span<const ManifestEntry> entries) {
  std::string out = "# index col row width height image rpc\n";
  for (const auto& e : entries) {
    for (const auto* p : {&e.image_path, &e.rpc_path}) {
      if (p->empty() || p->find_first_of(" \t\r\n") != std::string::npos) {
        fail(ErrorKind::kPrecondition, "manifest paths must be non-empty without whitespace");
      }
    }
    out += std::to_string(e.index) + ' ' + std::to_string(e.origin.col) + ' ' +
           std::to_string(e.origin.row) + ' ' + std::to_string(e.size.width) + ' ' +
           std::to_string(e.size.height) + ' ' + e.image_path + ' ' + e.rpc_path + '\n';
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::vector<ManifestEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    ManifestEntry e;
    std::string extra;
    if (!(fields >> e.index >> e.origin.col >> e.origin.row >> e.size.width >> e.size.height >>
          e.image_path >> e.rpc_path) ||
        (fields >> extra)) {
      fail(ErrorKind::kParse, "malformed manifest line " + std::to_string(line_no));
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
  write_text_file(path, format_manifest(entries));
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path));
}

}  // namespace satpin
