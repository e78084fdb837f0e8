#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satpin/camera.hpp"
#include "satpin/raster.hpp"
#include "satpin/rpc_model.hpp"

namespace satpin {

struct TileOrigin {
  int col = 0;
  int row = 0;

  bool operator==(const TileOrigin&) const = default;
};

struct Tile {
  int index = 0;
  TileOrigin origin;
  ImageSize size;
};

struct TilePlan {
  std::vector<Tile> tiles;  // row-major
  ImageSize parent_size;
  int overlap = 0;
};

inline constexpr int kDefaultTileSize = 5120;
inline constexpr int kDefaultOverlap = kDefaultTileSize / 10;

// Regular overlapping grid; the last tile of each row and column is shifted
// inward so every tile has the same size. A tile larger than the image is
// clamped to it. Throws kPrecondition unless 0 <= overlap < tile_size.
TilePlan plan_tiles(ImageSize image_size, int tile_size, int overlap);

// The same model expressed in the pixel frame of a crop at `origin`.
RpcModel crop_rpc(const RpcModel& model, TileOrigin origin);

Raster crop_raster(const Raster& image, TileOrigin origin, ImageSize size);

// Linear-interpolated quantile of the valid (non-nodata) values; NaN if none.
double quantile(const Raster& image, double q);

struct BrightnessOptions {
  double trigger_percentile = 0.99;
  double threshold = 200.0;  // DN
  double low = 0.02;
  double high = 0.98;
};

// Percentile stretch to the full DN range of the raster's depth, applied only
// when the trigger quantile exceeds the threshold. Integer depths round half
// away from zero; nodata is left alone.
Raster enhance_brightness(const Raster& image, const BrightnessOptions& options = {});

struct ManifestEntry {
  int index = 0;
  TileOrigin origin;
  ImageSize size;
  std::string image_path;  // relative to the manifest's directory
  std::string rpc_path;
};

std::string format_manifest(std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> parse_manifest(std::string_view text);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace satpin
