#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "satpin/camera.hpp"
#include "satpin/error_analysis.hpp"
#include "satpin/rpc_model.hpp"
#include "satpin/virtual_grid.hpp"

namespace satpin {

// P up to scale, stored with unit Frobenius norm and det(M) > 0 for the left
// 3x3 block M.
struct ProjectionMatrix {
  Matrix34d p = Matrix34d::Zero();
  double condition_number = 0.0;      // of M
  double singular_value_ratio = 0.0;  // sigma_11 / sigma_12 of the DLT system
  double residual_rms_px = 0.0;
};

Matrix34d normalize_projection(const Matrix34d& p);

// Hartley-normalized DLT. Throws kIllConditioned (value = sigma ratio) when
// sigma_11 / sigma_12 < 10.
ProjectionMatrix solve_projection(const VirtualGrid& grid);

struct RqFactors {
  Eigen::Matrix3d k;  // upper triangular, positive diagonal
  Eigen::Matrix3d r;  // orthonormal
};

// m = k * r.
RqFactors rq_decompose(const Eigen::Matrix3d& m);

// K with K(2,2) = 1, det(R) = +1, sign fixed so the grid lies in front of the
// camera. Throws kDegenerate when no sign satisfies cheirality.
PinholeCamera decompose_projection(const ProjectionMatrix& p, const VirtualGrid& grid);

struct EquateOptions {
  GridDims dims = kDefaultGridDims;
  // Refine the lateral grid when fewer than half of the nodes land in the
  // image, as happens for crops of a larger scene.
  bool densify = true;
};

struct EquateResult {
  PinholeCamera camera;
  ProjectionMatrix projection;
  EquivalenceReport report;  // on the validation grid
  GridDims fit_dims;
  std::size_t fit_points = 0;
};

EquateResult equate(const RpcModel& model, ImageSize image_size,
                    const EquateOptions& options = {});

// Fit grid used by equate(), including densification.
VirtualGrid equate_grid(const RpcModel& model, ImageSize image_size,
                        const EquateOptions& options = {});

}  // namespace satpin
