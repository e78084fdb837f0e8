#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satpin/camera.hpp"
#include "satpin/raster.hpp"
#include "satpin/refinement.hpp"
#include "satpin/rpc_model.hpp"
#include "satpin/virtual_grid.hpp"

namespace satpin {

struct EquivalenceReport {
  double samp_rmse = 0.0;
  double line_rmse = 0.0;
  double rmse = 0.0;  // sqrt(samp_rmse^2 + line_rmse^2)
  double max_error = 0.0;
  std::size_t n_points = 0;
};

// Aggregates reference[i] - candidate[i]. Throws kPrecondition on empty or
// mismatched input.
EquivalenceReport summarize_discrepancies(std::span<const PixelPoint> reference,
                                          std::span<const PixelPoint> candidate);

// RPC projection p against pinhole projection p' (or warp(p') when a warp is
// given) over every grid node.
EquivalenceReport measure_equivalence_error(const RpcModel& model, const PinholeCamera& camera,
                                            const VirtualGrid& grid,
                                            const ImageWarp* warp = nullptr);

std::string format_report(const EquivalenceReport& report);
EquivalenceReport parse_report(std::string_view text);

// Mean per-cell equivalence error; cells without samples are nodata.
struct ErrorField {
  Raster raster;  // cell_px pixels per cell, row 0 = image row 0
  int cell_px = 1;
  ImageSize image_size;
};

ErrorField error_field(const RpcModel& model, const PinholeCamera& camera, ImageSize image_size,
                       int cell_px, const ImageWarp* warp = nullptr);

struct RegionMeans {
  double center = 0.0;     // cells centered in the central box
  double periphery = 0.0;  // cells centered outside the outer box
};

// Central box spans `inner` of each image dimension; the periphery is
// everything outside the box spanning `outer`. With the defaults that is the
// central 20% box and the outer 20% annulus.
RegionMeans region_means(const ErrorField& field, double inner = 0.2, double outer = 0.8);

// First-order weak-perspective error, -x (z_cam - z_mean) / z_mean. fx is
// accepted for the closed form's signature; the f_x X_cam / z_mean ~ x
// simplification removes it. Throws kPrecondition for z_mean <= 0.
double predict_error(double fx, double x, double z_cam, double z_mean);

enum class DepthReference { kMean, kMidRange };

// Reference depth of the grid in the camera frame.
double reference_depth(const PinholeCamera& camera, const VirtualGrid& grid,
                       DepthReference kind = DepthReference::kMean);

struct EquateOptions;

struct SweepEntry {
  int crop_size = 0;
  ImageSize crop;
  EquivalenceReport report;
};

// Centered square crops, each re-anchored and re-equated.
std::vector<SweepEntry> size_sweep(const RpcModel& model, ImageSize image_size,
                                   std::span<const int> crop_sizes,
                                   const EquateOptions& options);

}  // namespace satpin
