#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "satpin/camera.hpp"
#include "satpin/raster.hpp"
#include "satpin/rpc_model.hpp"
#include "satpin/virtual_grid.hpp"

namespace satpin {

// Affine map of source pixels onto [-1, 1]^2: xn = (x - cx) / sx.
struct WarpNormalization {
  double cx = 0.0;
  double cy = 0.0;
  double sx = 1.0;
  double sy = 1.0;

  bool operator==(const WarpNormalization&) const = default;
};

// Second-order image warp
//   x' = m0 + m1 x + m2 y + m3 xy + m4 x^2  + m5 y^2
//   y' = m6 + m7 x + m8 y + m9 xy + m10 x^2 + m11 y^2
// stored with its coefficients in the normalized source frame; coefficients()
// expands them back to raw pixel coordinates.
class PolynomialWarp {
 public:
  using Coefficients = std::array<double, 12>;

  PolynomialWarp();  // identity
  PolynomialWarp(const WarpNormalization& norm, const Coefficients& normalized,
                 double fit_rms_px = 0.0);

  // Raw-coordinate coefficients with the identity normalization.
  static PolynomialWarp from_coefficients(const Coefficients& m);

  PixelPoint apply(const PixelPoint& p) const;
  Coefficients coefficients() const;
  const Coefficients& normalized_coefficients() const { return coeffs_; }
  const WarpNormalization& normalization() const { return norm_; }
  double fit_rms_px() const { return fit_rms_px_; }

 private:
  WarpNormalization norm_;
  Coefficients coeffs_;
  double fit_rms_px_ = 0.0;
};

// Projective baseline, h(2,2) = 1.
class Homography {
 public:
  Homography() : h_(Eigen::Matrix3d::Identity()) {}
  explicit Homography(const Eigen::Matrix3d& h, double fit_rms_px = 0.0);

  PixelPoint apply(const PixelPoint& p) const;
  const Eigen::Matrix3d& matrix() const { return h_; }
  double fit_rms_px() const { return fit_rms_px_; }

 private:
  Eigen::Matrix3d h_;
  double fit_rms_px_ = 0.0;
};

using ImageWarp = std::variant<PolynomialWarp, Homography>;

PixelPoint apply_warp(const ImageWarp& warp, const PixelPoint& p);
double warp_fit_rms(const ImageWarp& warp);

enum class WarpKind { kPolynomial, kHomography };

std::string_view to_string(WarpKind kind);
WarpKind parse_warp_kind(std::string_view name);

struct Correspondence {
  PixelPoint src;
  PixelPoint dst;
};

// Two independent 6-coefficient least-squares problems over sources scaled
// to [-1, 1]^2. Throws kPrecondition for fewer than 6 pairs and kDegenerate
// when the design matrix is rank deficient (sources on one conic).
PolynomialWarp fit_polynomial(std::span<const Correspondence> pairs);

// Hartley-normalized DLT. Throws kPrecondition for fewer than 4 pairs and
// kDegenerate for collinear sources.
Homography fit_homography(std::span<const Correspondence> pairs);

// Correspondences (src = pinhole projection, dst = RPC projection) over the
// grid. The fitted warp maps corrected-image coordinates to original-image
// coordinates, which is what backward resampling needs.
std::vector<Correspondence> refinement_correspondences(const RpcModel& model,
                                                       const PinholeCamera& camera,
                                                       const VirtualGrid& grid);
ImageWarp build_refinement(const RpcModel& model, const PinholeCamera& camera,
                           const VirtualGrid& grid, WarpKind kind);

// Backward bilinear resampling: out(x', y') = in(M(x', y')). Sources more than
// half a pixel outside the image, or touching a nodata neighbor with non-zero
// weight, give nodata. Output has the input's size and depth.
Raster resample(const Raster& image, const ImageWarp& warp, unsigned workers = 0);

std::string format_warp(const ImageWarp& warp);
ImageWarp parse_warp(std::string_view text);
void write_warp_file(const std::filesystem::path& path, const ImageWarp& warp);
ImageWarp read_warp_file(const std::filesystem::path& path);

}  // namespace satpin
