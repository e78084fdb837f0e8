#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "satpin/fusion.hpp"
#include "satpin/refinement.hpp"
#include "satpin/tiling.hpp"
#include "satpin/virtual_grid.hpp"

namespace satpin::cli {

// Every tunable of the pipeline in one document. Command-line flags override
// whatever a config file sets.
struct PipelineConfig {
  int tile_size = kDefaultTileSize;
  int overlap = kDefaultOverlap;
  GridDims dims = kDefaultGridDims;
  bool densify = true;
  WarpKind refinement = WarpKind::kPolynomial;
  FusionConfig fusion;
  std::vector<double> thresholds{1.0, 2.0};
  bool enhance = true;
  BrightnessOptions brightness;
  int cell_px = 32;
  unsigned workers = 0;  // 0: SATPIN_WORKERS or hardware concurrency
};

// JSON with any subset of the fields, e.g.
//   {"tile_size": 512, "overlap": 64, "grid_dims": [20, 20, 10],
//    "fusion": {"mad_k": 3, "radius": 3.0, "min_neighbors": 4}}
// Unknown keys are rejected so typos do not silently fall back to defaults.
PipelineConfig parse_config(std::string_view json_text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
std::string dump_config(const PipelineConfig& config);

GridDims parse_dims(std::string_view text);
std::vector<double> parse_number_list(std::string_view text);

}  // namespace satpin::cli
