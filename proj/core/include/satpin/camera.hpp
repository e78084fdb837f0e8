#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "satpin/geodesy.hpp"
#include "satpin/rpc_model.hpp"

namespace satpin {

struct ImageSize {
  int width = 0;
  int height = 0;

  bool operator==(const ImageSize&) const = default;
};

using Matrix34d = Eigen::Matrix<double, 3, 4>;

// Central projection x ~ K [R | t] X with X in the ENU frame of `anchor`.
struct PinholeCamera {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  EnuAnchor anchor;
  ImageSize image_size;

  double fx() const { return k(0, 0); }
  double fy() const { return k(1, 1); }
  double cx() const { return k(0, 2); }
  double cy() const { return k(1, 2); }

  Matrix34d projection() const;

  // Z in the camera frame.
  double depth(const EnuPoint& p) const;
  Eigen::Vector3d to_camera(const EnuPoint& p) const;
  PixelPoint project(const EnuPoint& p) const;
  PixelPoint project(const GeoPoint& p) const;

  // Throws kPrecondition when K is not upper triangular with K(2,2) = 1 and
  // positive focal lengths, or R is not a proper rotation to 1e-10.
  void validate() const;
};

// Camera export: the hand-off file for external SfM/MVS pipelines.
struct CameraFile {
  PinholeCamera camera;
  double residual_rms_px = 0.0;
};

std::string format_camera(const PinholeCamera& camera, double residual_rms_px);
CameraFile parse_camera(std::string_view text);
void write_camera_file(const std::filesystem::path& path, const PinholeCamera& camera,
                       double residual_rms_px);
CameraFile read_camera_file(const std::filesystem::path& path);

}  // namespace satpin
