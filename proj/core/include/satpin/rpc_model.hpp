#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

namespace satpin {

// WGS-84 geodetic position. Altitude is ellipsoidal.
struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
  double alt = 0.0;  // meters

  bool operator==(const GeoPoint&) const = default;
};

void validate(const GeoPoint& p);

// Image position; samp is the column (u), line is the row (v). Integer values
// address pixel centers.
struct PixelPoint {
  double samp = 0.0;
  double line = 0.0;

  bool operator==(const PixelPoint&) const = default;
};

using RpcCoefficients = std::array<double, 20>;

// Rational polynomial camera: 10 normalizers plus four 20-term cubics in
// RPC00B monomial order (1, L, P, H, LP, LH, PH, L^2, P^2, H^2, PLH, L^3,
// LP^2, LH^2, L^2P, P^3, PH^2, L^2H, P^2H, H^3), with P, L, H the normalized
// latitude, longitude and height.
struct RpcModel {
  double line_off = 0.0;
  double samp_off = 0.0;
  double lat_off = 0.0;
  double lon_off = 0.0;
  double alt_off = 0.0;
  double line_scale = 1.0;
  double samp_scale = 1.0;
  double lat_scale = 1.0;
  double lon_scale = 1.0;
  double alt_scale = 1.0;
  RpcCoefficients line_num{};
  RpcCoefficients line_den{};
  RpcCoefficients samp_num{};
  RpcCoefficients samp_den{};

  // Throws kPrecondition when a scale is not strictly positive or a
  // denominator constant term is not exactly 1.
  void validate() const;

  bool operator==(const RpcModel&) const = default;
};

// Normalized ground coordinates (P, L, H) of a geodetic point.
struct NormalizedGround {
  double p = 0.0;
  double l = 0.0;
  double h = 0.0;
};

NormalizedGround normalize(const RpcModel& model, const GeoPoint& p);
RpcCoefficients rpc_monomials(double p, double l, double h);
double evaluate_cubic(const RpcCoefficients& coeffs, const RpcCoefficients& monomials);

// Normalized coordinates beyond this magnitude are extrapolation.
inline constexpr double kSoftBound = 1.5;

struct ForwardProjection {
  PixelPoint pixel;
  bool extrapolated = false;
};

// Ground to image. Throws kSingular when a denominator magnitude drops below
// 1e-10.
ForwardProjection project_forward_checked(const RpcModel& model, const GeoPoint& p);
PixelPoint project_forward(const RpcModel& model, const GeoPoint& p);

// Image to ground at a fixed altitude: damped Newton on normalized (lat, lon)
// with a central-difference Jacobian. Throws kPrecondition when alt is outside
// alt_off +- 1.5 * alt_scale and kDivergence (value = last residual in pixels)
// after 50 iterations without convergence.
GeoPoint project_inverse(const RpcModel& model, const PixelPoint& px, double alt);

RpcModel parse_rpc(std::string_view text);
std::string serialize_rpc(const RpcModel& model);
RpcModel read_rpc_file(const std::filesystem::path& path);
void write_rpc_file(const std::filesystem::path& path, const RpcModel& model);

}  // namespace satpin
