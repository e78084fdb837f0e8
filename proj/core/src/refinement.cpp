#include "satpin/refinement.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "satpin/error.hpp"
#include "satpin/kv_text.hpp"
#include "satpin/parallel.hpp"

namespace satpin {
namespace {

constexpr double kRankTolerance = 1e-10;

std::array<double, 6> quadratic_terms(double x, double y) {
  return {1.0, x, y, x * y, x * x, y * y};
}

// Similarity taking points to zero centroid and RMS distance sqrt(2).
Eigen::Matrix3d hartley_2d(std::span<const PixelPoint> pts) {
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.samp;
    my += p.line;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double ms = 0.0;
  for (const auto& p : pts) ms += (p.samp - mx) * (p.samp - mx) + (p.line - my) * (p.line - my);
  const double rms = std::sqrt(ms / static_cast<double>(pts.size()));
  const double s = rms > 0.0 ? std::sqrt(2.0) / rms : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * mx, 0, s, -s * my, 0, 0, 1;
  return t;
}

double rms_residual(std::span<const Correspondence> pairs, const auto& warp) {
  double sum = 0.0;
  for (const auto& c : pairs) {
    const PixelPoint q = warp.apply(c.src);
    sum += (q.samp - c.dst.samp) * (q.samp - c.dst.samp) +
           (q.line - c.dst.line) * (q.line - c.dst.line);
  }
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

}  // namespace

PolynomialWarp::PolynomialWarp() : coeffs_{0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0} {}

PolynomialWarp::PolynomialWarp(const WarpNormalization& norm, const Coefficients& normalized,
                               double fit_rms_px)
    : norm_(norm), coeffs_(normalized), fit_rms_px_(fit_rms_px) {
  if (!(norm.sx > 0.0 && norm.sy > 0.0)) {
    fail(ErrorKind::kPrecondition, "warp normalization scales must be positive");
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) fail(ErrorKind::kPrecondition, "warp coefficient is not finite");
  }
}

PolynomialWarp PolynomialWarp::from_coefficients(const Coefficients& m) {
  return PolynomialWarp(WarpNormalization{}, m);
}

PixelPoint PolynomialWarp::apply(const PixelPoint& p) const {
  const auto t = quadratic_terms((p.samp - norm_.cx) / norm_.sx, (p.line - norm_.cy) / norm_.sy);
  double x = 0.0, y = 0.0;
  for (int i = 0; i < 6; ++i) {
    x += coeffs_[i] * t[i];
    y += coeffs_[6 + i] * t[i];
  }
  return {x, y};
}

PolynomialWarp::Coefficients PolynomialWarp::coefficients() const {
  // xn = a x + b, yn = g y + d
  const double a = 1.0 / norm_.sx, b = -norm_.cx / norm_.sx;
  const double g = 1.0 / norm_.sy, d = -norm_.cy / norm_.sy;
  Coefficients m{};
  for (int axis = 0; axis < 2; ++axis) {
    const double* c = coeffs_.data() + 6 * axis;
    double* out = m.data() + 6 * axis;
    out[0] = c[0] + c[1] * b + c[2] * d + c[3] * b * d + c[4] * b * b + c[5] * d * d;
    out[1] = c[1] * a + c[3] * a * d + 2.0 * c[4] * a * b;
    out[2] = c[2] * g + c[3] * b * g + 2.0 * c[5] * g * d;
    out[3] = c[3] * a * g;
    out[4] = c[4] * a * a;
    out[5] = c[5] * g * g;
  }
  return m;
}

Homography::Homography(const Eigen::Matrix3d& h, double fit_rms_px) : fit_rms_px_(fit_rms_px) {
  if (!h.allFinite() || h(2, 2) == 0.0) fail(ErrorKind::kPrecondition, "invalid homography");
  h_ = h / h(2, 2);
  if (std::abs(h_.determinant()) < 1e-300) fail(ErrorKind::kSingular, "singular homography");
}

PixelPoint Homography::apply(const PixelPoint& p) const {
  const Eigen::Vector3d q = h_ * Eigen::Vector3d(p.samp, p.line, 1.0);
  return {q.x() / q.z(), q.y() / q.z()};
}

PixelPoint apply_warp(const ImageWarp& warp, const PixelPoint& p) {
  return std::visit([&p](const auto& w) { return w.apply(p); }, warp);
}

double warp_fit_rms(const ImageWarp& warp) {
  return std::visit([](const auto& w) { return w.fit_rms_px(); }, warp);
}

std::string_view to_string(WarpKind kind) {
  return kind == WarpKind::kPolynomial ? "polynomial" : "homography";
}

WarpKind parse_warp_kind(std::string_view name) {
  if (name == "polynomial") return WarpKind::kPolynomial;
  if (name == "homography") return WarpKind::kHomography;
  fail(ErrorKind::kUsage, "unknown warp kind '" + std::string(name) + "'");
}

PolynomialWarp fit_polynomial(std::span<const Correspondence> pairs) {
  if (pairs.size() < 6) fail(ErrorKind::kPrecondition, "polynomial warp needs at least 6 pairs");

  double xmin = pairs[0].src.samp, xmax = xmin, ymin = pairs[0].src.line, ymax = ymin;
  for (const auto& c : pairs) {
    xmin = std::min(xmin, c.src.samp);
    xmax = std::max(xmax, c.src.samp);
    ymin = std::min(ymin, c.src.line);
    ymax = std::max(ymax, c.src.line);
  }
  WarpNormalization norm{(xmin + xmax) / 2, (ymin + ymax) / 2, (xmax - xmin) / 2,
                         (ymax - ymin) / 2};
  if (!(norm.sx > 0.0 && norm.sy > 0.0)) {
    fail(ErrorKind::kDegenerate, "polynomial warp sources span no area");
  }

  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd a(n, 6);
  Eigen::MatrixXd rhs(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = pairs[static_cast<std::size_t>(i)];
    const auto t = quadratic_terms((c.src.samp - norm.cx) / norm.sx, (c.src.line - norm.cy) / norm.sy);
    for (int j = 0; j < 6; ++j) a(i, j) = t[j];
    rhs(i, 0) = c.dst.samp;
    rhs(i, 1) = c.dst.line;
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Matrix<double, 6, 6> r =
      qr.matrixQR().topRows(6).triangularView<Eigen::Upper>();
  const Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(r);
  const auto& sv = svd.singularValues();
  if (!(sv(5) > kRankTolerance * sv(0))) {
    fail(ErrorKind::kDegenerate, "polynomial warp design is rank deficient");
  }
  const Eigen::MatrixXd qtb = (qr.householderQ().transpose() * rhs).topRows(6);
  const Eigen::Matrix<double, 6, 2> sol = r.triangularView<Eigen::Upper>().solve(qtb);

  PolynomialWarp::Coefficients coeffs{};
  for (int j = 0; j < 6; ++j) {
    coeffs[j] = sol(j, 0);
    coeffs[6 + j] = sol(j, 1);
  }
  PolynomialWarp provisional(norm, coeffs);
  return PolynomialWarp(norm, coeffs, rms_residual(pairs, provisional));
}

Homography fit_homography(std::span<const Correspondence> pairs) {
  if (pairs.size() < 4) fail(ErrorKind::kPrecondition, "homography needs at least 4 pairs");

  std::vector<PixelPoint> src, dst;
  src.reserve(pairs.size());
  dst.reserve(pairs.size());
  for (const auto& c : pairs) {
    src.push_back(c.src);
    dst.push_back(c.dst);
  }
  {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : src) mean += Eigen::Vector2d(p.samp, p.line);
    mean /= static_cast<double>(src.size());
    Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
    for (const auto& p : src) {
      const Eigen::Vector2d d = Eigen::Vector2d(p.samp, p.line) - mean;
      scatter += d * d.transpose();
    }
    const Eigen::Vector2d ev =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(scatter).eigenvalues().cwiseMax(0.0);
    if (!(std::sqrt(ev(0)) > 1e-9 * std::sqrt(ev(1)))) {
      fail(ErrorKind::kDegenerate, "homography sources are collinear");
    }
  }

  const Eigen::Matrix3d ts = hartley_2d(src);
  const Eigen::Matrix3d td = hartley_2d(dst);
  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = pairs[static_cast<std::size_t>(i)];
    const Eigen::Vector3d x = ts * Eigen::Vector3d(c.src.samp, c.src.line, 1.0);
    const Eigen::Vector3d y = td * Eigen::Vector3d(c.dst.samp, c.dst.line, 1.0);
    a.block<1, 3>(2 * i, 0) = x.transpose();
    a.block<1, 3>(2 * i, 6) = -y.x() * x.transpose();
    a.block<1, 3>(2 * i + 1, 3) = x.transpose();
    a.block<1, 3>(2 * i + 1, 6) = -y.y() * x.transpose();
  }
  Eigen::Matrix<double, 9, 9> r;
  if (a.rows() >= 9) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    r = qr.matrixQR().topRows(9).triangularView<Eigen::Upper>();
  } else {
    r.setZero();
    r.topRows(a.rows()) = a;
  }
  const Eigen::JacobiSVD<Eigen::Matrix<double, 9, 9>> svd(r, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Eigen::Matrix3d hm = td.inverse() * hn * ts;
  if (std::abs(hm(2, 2)) < 1e-14 * hm.norm()) {
    fail(ErrorKind::kDegenerate, "homography maps the origin to infinity");
  }
  const Homography provisional(hm);
  return Homography(hm, rms_residual(pairs, provisional));
}

std::vector<Correspondence> refinement_correspondences(const RpcModel& model,
                                                       const PinholeCamera& camera,
                                                       const VirtualGrid& grid) {
  std::vector<Correspondence> pairs;
  pairs.reserve(grid.nodes.size());
  for (const auto& node : grid.nodes) {
    pairs.push_back({camera.project(node.enu), project_forward(model, node.geo)});
  }
  return pairs;
}

ImageWarp build_refinement(const RpcModel& model, const PinholeCamera& camera,
                           const VirtualGrid& grid, WarpKind kind) {
  const auto pairs = refinement_correspondences(model, camera, grid);
  if (kind == WarpKind::kPolynomial) return fit_polynomial(pairs);
  return fit_homography(pairs);
}

Raster resample(const Raster& image, const ImageWarp& warp, unsigned workers) {
  Raster out = image;
  const int w = image.width();
  const int h = image.height();
  parallel_for(
      0, static_cast<std::size_t>(h),
      [&](std::size_t row_index) {
        const int row = static_cast<int>(row_index);
        for (int col = 0; col < w; ++col) {
          const PixelPoint s = apply_warp(warp, {static_cast<double>(col), static_cast<double>(row)});
          double& dst = out.at(col, row);
          if (!(s.samp >= -0.5 && s.samp <= w - 0.5 && s.line >= -0.5 && s.line <= h - 0.5)) {
            dst = image.nodata();
            continue;
          }
          const double x = std::clamp(s.samp, 0.0, static_cast<double>(w - 1));
          const double y = std::clamp(s.line, 0.0, static_cast<double>(h - 1));
          const int x0 = std::min(static_cast<int>(std::floor(x)), w - 1);
          const int y0 = std::min(static_cast<int>(std::floor(y)), h - 1);
          const int x1 = std::min(x0 + 1, w - 1);
          const int y1 = std::min(y0 + 1, h - 1);
          const double fx = x - x0;
          const double fy = y - y0;
          const double weights[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
          const double values[4] = {image.at(x0, y0), image.at(x1, y0), image.at(x0, y1),
                                    image.at(x1, y1)};
          double sum = 0.0;
          bool missing = false;
          for (int i = 0; i < 4; ++i) {
            if (weights[i] == 0.0) continue;
            if (image.is_nodata(values[i])) {
              missing = true;
              break;
            }
            sum += weights[i] * values[i];
          }
          dst = missing ? image.nodata() : sum;
        }
      },
      workers);
  return out;
}

std::string format_warp(const ImageWarp& warp) {
  KvWriter w;
  if (const auto* poly = std::get_if<PolynomialWarp>(&warp)) {
    const auto& n = poly->normalization();
    const auto& c = poly->normalized_coefficients();
    const auto m = poly->coefficients();
    w.add_text("KIND", "polynomial")
        .add("NORM_CX", n.cx)
        .add("NORM_CY", n.cy)
        .add("NORM_SX", n.sx)
        .add("NORM_SY", n.sy)
        .add("NORMALIZED_COEFFS", std::vector<double>(c.begin(), c.end()))
        .add("M", std::vector<double>(m.begin(), m.end()))
        .add("FIT_RMS_PX", poly->fit_rms_px());
  } else {
    const auto& hom = std::get<Homography>(warp);
    std::vector<double> h;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h.push_back(hom.matrix()(i, j));
    w.add_text("KIND", "homography").add("H", h).add("FIT_RMS_PX", hom.fit_rms_px());
  }
  return w.str();
}

ImageWarp parse_warp(std::string_view text) {
  const KvDocument doc = KvDocument::parse(text);
  const std::string kind = doc.text("KIND");
  if (kind == "polynomial") {
    const WarpNormalization n{doc.number("NORM_CX"), doc.number("NORM_CY"),
                              doc.number("NORM_SX"), doc.number("NORM_SY")};
    const auto values = doc.numbers("NORMALIZED_COEFFS", 12);
    PolynomialWarp::Coefficients c{};
    std::copy(values.begin(), values.end(), c.begin());
    return PolynomialWarp(n, c, doc.number("FIT_RMS_PX"));
  }
  if (kind == "homography") {
    const auto v = doc.numbers("H", 9);
    Eigen::Matrix3d h;
    h << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
    return Homography(h, doc.number("FIT_RMS_PX"));
  }
  fail(ErrorKind::kParse, "unknown warp KIND '" + kind + "'");
}

void write_warp_file(const std::filesystem::path& path, const ImageWarp& warp) {
  write_text_file(path, format_warp(warp));
}

ImageWarp read_warp_file(const std::filesystem::path& path) {
  return parse_warp(read_text_file(path));
}

}  // namespace satpin
