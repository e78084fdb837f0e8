#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satpin/raster.hpp"

namespace satpin {

enum class Aggregator { kMedian, kMean };

std::string_view to_string(Aggregator a);
Aggregator parse_aggregator(std::string_view name);

inline constexpr double kMadScale = 1.4826;

struct FusionConfig {
  double mad_k = 3.0;
  double mad_floor = 0.1;            // meters
  std::optional<double> radius;      // georeference units; unset means 3 cells
  int min_neighbors = 4;             // counts the cell itself
  Aggregator aggregator = Aggregator::kMedian;

  void validate() const;
};

// Union of the tiles' extents; overlapping valid cells are averaged. Tiles
// must share a cell size and lattice (to 1e-6 cell).
Raster mosaic_tiles(std::span<const Raster> tiles);

double median(std::vector<double> values);

// Keeps heights within mad_k * 1.4826 * max(MAD, floor) of the median.
std::vector<double> mad_filter(std::span<const double> heights, double mad_k, double mad_floor);

// Clears cells with fewer than min_neighbors valid cells within `radius_cells`
// (Euclidean, the cell itself included).
Raster radius_filter(const Raster& raster, double radius_cells, int min_neighbors);

Raster fuse_views(std::span<const Raster> dsms, const FusionConfig& config = {});

struct DsmMetrics {
  double rmse = 0.0;
  double me = 0.0;   // median absolute residual
  double mae = 0.0;  // mean absolute residual
  std::size_t n_common = 0;
  std::size_t n_truth = 0;
  std::vector<std::pair<double, double>> completeness;  // (threshold, fraction)
};

// Residuals over cells valid in both rasters; completeness counts residuals
// strictly below each threshold over all truth-valid cells.
DsmMetrics dsm_metrics(const Raster& estimate, const Raster& truth,
                       std::span<const double> thresholds);

std::string format_metrics(const DsmMetrics& m);

}  // namespace satpin
