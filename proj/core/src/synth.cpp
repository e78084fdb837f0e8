#include "satpin/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "satpin/error.hpp"
#include "satpin/kv_text.hpp"
#include "satpin/parallel.hpp"

namespace satpin {
namespace {

constexpr double kMetersPerDegree = 111320.0;
constexpr double kDenominatorFloor = 1e-3;
constexpr double kTruncation = 1e-13;

// Portable uniform draw in [0, 1): the top 53 bits of mt19937_64.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform(rng); }

double rad(double degrees) { return degrees * std::numbers::pi / 180.0; }

struct SceneFrame {
  GroundVolume volume;
  Raster terrain;
  EnuAnchor anchor;
};

// Square lat/lon box of `footprint_m` around a random center, terrain on top.
SceneFrame make_frame(std::mt19937_64& rng, std::uint64_t seed, double footprint_m,
                      double relief, int cells) {
  const double lat0 = uniform(rng, 20.0, 50.0);
  const double lon0 = uniform(rng, 100.0, 120.0);
  const double base = uniform(rng, 100.0, 600.0);
  const double span = footprint_m / kMetersPerDegree;

  SceneFrame f;
  f.terrain = make_terrain(seed, cells, relief);
  for (double& h : f.terrain.values()) h += base;
  f.terrain.set_georeference(lon0 - span / 2, lat0 - span / 2, span / cells);
  const double margin = 0.05 * relief + 20.0;
  f.volume = {lat0 - span / 2, lat0 + span / 2, lon0 - span / 2, lon0 + span / 2,
              base - margin, base + relief + margin};
  f.anchor = EnuAnchor{f.volume.center()};
  return f;
}

std::vector<EnuPoint> volume_samples(const GroundVolume& v, const EnuAnchor& anchor) {
  const EnuFrame frame(anchor);
  std::vector<EnuPoint> out;
  for (int i = 0; i <= 4; ++i) {
    for (int j = 0; j <= 4; ++j) {
      for (int k = 0; k <= 2; ++k) {
        out.push_back(frame.to_enu({v.lat_min + (v.lat_max - v.lat_min) * i / 4,
                                    v.lon_min + (v.lon_max - v.lon_min) * j / 4,
                                    v.alt_min + (v.alt_max - v.alt_min) * k / 2}));
      }
    }
  }
  return out;
}

// Scale and offset taking [lo, hi] onto the image extent minus a 5% margin.
std::pair<double, double> fit_axis(double lo, double hi, int extent) {
  const double margin = 0.05 * extent;
  const double scale = (extent - 1 - 2 * margin) / (hi - lo);
  return {scale, margin - scale * lo};
}

double terrain_height(const Raster& t, double lat, double lon, bool* inside) {
  const double x = (lon - t.origin_x()) / t.cell_size() - 0.5;
  const double top = t.origin_y() + t.height() * t.cell_size();
  const double y = (top - lat) / t.cell_size() - 0.5;
  *inside = x >= -0.5 && y >= -0.5 && x <= t.width() - 0.5 && y <= t.height() - 0.5;
  const double cx = std::clamp(x, 0.0, t.width() - 1.0);
  const double cy = std::clamp(y, 0.0, t.height() - 1.0);
  const int x0 = std::min(static_cast<int>(cx), t.width() - 2);
  const int y0 = std::min(static_cast<int>(cy), t.height() - 2);
  const double fx = cx - x0, fy = cy - y0;
  return (1 - fx) * (1 - fy) * t.at(x0, y0) + fx * (1 - fy) * t.at(x0 + 1, y0) +
         (1 - fx) * fy * t.at(x0, y0 + 1) + fx * fy * t.at(x0 + 1, y0 + 1);
}

// Lambertian shading of the terrain cells, light from the north-west at 45 degrees.
Raster hillshade(const Raster& t) {
  Raster out(t.width(), t.height(), 0.0);
  out.set_georeference(t.origin_x(), t.origin_y(), t.cell_size());
  const double cell_m = t.cell_size() * kMetersPerDegree;
  const Eigen::Vector3d light = Eigen::Vector3d(-1.0, 1.0, std::sqrt(2.0)).normalized();
  for (int r = 0; r < t.height(); ++r) {
    for (int c = 0; c < t.width(); ++c) {
      const int c0 = std::max(c - 1, 0), c1 = std::min(c + 1, t.width() - 1);
      const int r0 = std::max(r - 1, 0), r1 = std::min(r + 1, t.height() - 1);
      const double dzdx = (t.at(c1, r) - t.at(c0, r)) / ((c1 - c0) * cell_m);
      const double dzdy = (t.at(c, r0) - t.at(c, r1)) / ((r1 - r0) * cell_m);  // north is up
      const Eigen::Vector3d n = Eigen::Vector3d(-dzdx, -dzdy, 1.0).normalized();
      out.at(c, r) = std::max(0.0, n.dot(light));
    }
  }
  return out;
}

// Two planes whose intersection is the line of sight of pixel (u, v).
std::pair<Eigen::Vector4d, Eigen::Vector4d> sight_planes(const SceneCamera& camera, double u,
                                                         double v) {
  if (const auto* pin = std::get_if<PinholeCamera>(&camera)) {
    const Matrix34d p = pin->projection();
    return {(u * p.row(2) - p.row(0)).transpose(), (v * p.row(2) - p.row(1)).transpose()};
  }
  const auto& pb = std::get<PushbroomCamera>(camera);
  Eigen::Vector4d line = pb.a;
  line(3) -= v;
  return {line, pb.b - u * pb.c};
}

}  // namespace

PixelPoint PushbroomCamera::project(const EnuPoint& p) const {
  const Eigen::Vector4d x(p.e, p.n, p.u, 1.0);
  return {b.dot(x) / c.dot(x), a.dot(x)};
}

PixelPoint project(const SceneCamera& camera, const EnuPoint& p) {
  return std::visit([&p](const auto& cam) { return cam.project(p); }, camera);
}

std::string format_scene_camera(const SceneCamera& camera) {
  if (const auto* pin = std::get_if<PinholeCamera>(&camera)) return format_camera(*pin, 0.0);
  const auto& pb = std::get<PushbroomCamera>(camera);
  auto vec = [](const Eigen::Vector4d& v) { return std::vector<double>(v.data(), v.data() + 4); };
  KvWriter w;
  w.add_text("KIND", "pushbroom")
      .add("ANCHOR_LAT", pb.anchor.origin.lat)
      .add("ANCHOR_LON", pb.anchor.origin.lon)
      .add("ANCHOR_ALT", pb.anchor.origin.alt)
      .add("A", vec(pb.a))
      .add("B", vec(pb.b))
      .add("C", vec(pb.c));
  return w.str();
}

const EnuAnchor& camera_anchor(const SceneCamera& camera) {
  return std::visit([](const auto& cam) -> const EnuAnchor& { return cam.anchor; }, camera);
}

GroundToPixel scene_projection(const SceneCamera& camera) {
  return [camera, frame = EnuFrame(camera_anchor(camera))](const GeoPoint& g) {
    return project(camera, frame.to_enu(g));
  };
}

Raster make_terrain(std::uint64_t seed, int size, double relief) {
  if (size < 2) fail(ErrorKind::kPrecondition, "terrain size must be at least 2");
  if (!(relief >= 0.0)) fail(ErrorKind::kPrecondition, "relief must be non-negative");
  int n = 2;
  while (n + 1 < size) n *= 2;
  const int dim = n + 1;
  std::vector<double> h(static_cast<std::size_t>(dim) * dim, 0.0);
  auto at = [&](int x, int y) -> double& { return h[static_cast<std::size_t>(y) * dim + x]; };

  std::mt19937_64 rng(seed);
  auto noise = [&rng](double amp) { return amp * (2.0 * uniform(rng) - 1.0); };
  at(0, 0) = noise(1.0);
  at(n, 0) = noise(1.0);
  at(0, n) = noise(1.0);
  at(n, n) = noise(1.0);
  double amp = 1.0;
  for (int step = n; step > 1; step /= 2) {
    const int half = step / 2;
    for (int y = half; y < dim; y += step) {
      for (int x = half; x < dim; x += step) {
        at(x, y) = (at(x - half, y - half) + at(x + half, y - half) + at(x - half, y + half) +
                    at(x + half, y + half)) / 4 + noise(amp);
      }
    }
    for (int y = 0; y < dim; y += half) {
      for (int x = (y / half) % 2 == 0 ? half : 0; x < dim; x += step) {
        double sum = 0.0;
        int count = 0;
        if (x >= half) sum += at(x - half, y), ++count;
        if (x + half < dim) sum += at(x + half, y), ++count;
        if (y >= half) sum += at(x, y - half), ++count;
        if (y + half < dim) sum += at(x, y + half), ++count;
        at(x, y) = sum / count + noise(amp);
      }
    }
    amp *= 0.55;
  }

  Raster out(size, size, 0.0);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      lo = std::min(lo, at(x, y));
      hi = std::max(hi, at(x, y));
    }
  }
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      out.at(x, y) = hi > lo ? std::clamp((at(x, y) - lo) / (hi - lo), 0.0, 1.0) * relief : 0.0;
    }
  }
  return out;
}

RpcFit fit_rpc(const GroundToPixel& project, const GroundVolume& volume, GridDims dims) {
  if (!(volume.lat_max > volume.lat_min && volume.lon_max > volume.lon_min &&
        volume.alt_max > volume.alt_min)) {
    fail(ErrorKind::kPrecondition, "fit volume must have positive extent on every axis");
  }
  if (dims.n_lat < 4 || dims.n_lon < 4 || dims.n_alt < 4) {
    fail(ErrorKind::kPrecondition, "fit grid needs at least 4 nodes per axis");
  }
  RpcModel m;
  const GeoPoint center = volume.center();
  m.lat_off = center.lat;
  m.lon_off = center.lon;
  m.alt_off = center.alt;
  m.lat_scale = (volume.lat_max - volume.lat_min) / 2;
  m.lon_scale = (volume.lon_max - volume.lon_min) / 2;
  m.alt_scale = (volume.alt_max - volume.alt_min) / 2;

  const std::size_t n = dims.count();
  std::vector<GeoPoint> geo(n);
  std::vector<PixelPoint> px(n);
  std::vector<RpcCoefficients> mono(n);
  parallel_for(0, static_cast<std::size_t>(dims.n_alt), [&](std::size_t k) {
    for (int i = 0; i < dims.n_lat; ++i) {
      for (int j = 0; j < dims.n_lon; ++j) {
        const std::size_t idx = (k * dims.n_lat + i) * dims.n_lon + j;
        const double p = -1.0 + 2.0 * i / (dims.n_lat - 1);
        const double l = -1.0 + 2.0 * j / (dims.n_lon - 1);
        const double h = -1.0 + 2.0 * static_cast<double>(k) / (dims.n_alt - 1);
        geo[idx] = {m.lat_off + p * m.lat_scale, m.lon_off + l * m.lon_scale,
                    m.alt_off + h * m.alt_scale};
        px[idx] = project(geo[idx]);
        mono[idx] = rpc_monomials(p, l, h);
      }
    }
  });

  double smin = px[0].samp, smax = smin, lmin = px[0].line, lmax = lmin;
  for (const auto& q : px) {
    if (!std::isfinite(q.samp) || !std::isfinite(q.line)) {
      fail(ErrorKind::kIllConditioned, "projection is not finite inside the volume");
    }
    smin = std::min(smin, q.samp);
    smax = std::max(smax, q.samp);
    lmin = std::min(lmin, q.line);
    lmax = std::max(lmax, q.line);
  }
  if (!(smax > smin) || !(lmax > lmin)) {
    fail(ErrorKind::kIllConditioned, "projection is constant along an image axis", 0.0);
  }
  m.samp_off = (smin + smax) / 2;
  m.samp_scale = (smax - smin) / 2;
  m.line_off = (lmin + lmax) / 2;
  m.line_scale = (lmax - lmin) / 2;

  auto solve_axis = [&](bool samp, RpcCoefficients& num, RpcCoefficients& den) {
    const double off = samp ? m.samp_off : m.line_off;
    const double scale = samp ? m.samp_scale : m.line_scale;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), 39);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      const double t = ((samp ? px[r].samp : px[r].line) - off) / scale;
      const auto row = static_cast<Eigen::Index>(r);
      for (int j = 0; j < 20; ++j) a(row, j) = mono[r][j];
      for (int j = 1; j < 20; ++j) a(row, 19 + j) = -t * mono[r][j];
      rhs(row) = t;
    }
    // Minimum-norm truncated solution: the cubic numerator and denominator
    // of a perspective map share near-common factors.
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(39).triangularView<Eigen::Upper>();
    const Eigen::VectorXd qtb = (qr.householderQ().transpose() * rhs).head(39);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(39);
    const Eigen::VectorXd utb = svd.matrixU().transpose() * qtb;
    for (int i = 0; i < 39; ++i) {
      if (sv(i) > kTruncation * sv(0)) coef += svd.matrixV().col(i) * (utb(i) / sv(i));
    }
    for (int j = 0; j < 20; ++j) num[j] = coef(j);
    den[0] = 1.0;
    for (int j = 1; j < 20; ++j) den[j] = coef(19 + j);
  };
  solve_axis(true, m.samp_num, m.samp_den);
  solve_axis(false, m.line_num, m.line_den);

  double min_den = std::numeric_limits<double>::infinity();
  for (const auto& mo : mono) {
    min_den = std::min({min_den, evaluate_cubic(m.samp_den, mo), evaluate_cubic(m.line_den, mo)});
  }
  if (!(min_den > kDenominatorFloor)) {
    fail(ErrorKind::kIllConditioned, "fitted denominator approaches zero inside the volume", min_den);
  }

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PixelPoint q = project_forward(m, geo[i]);
    ss += (q.samp - px[i].samp) * (q.samp - px[i].samp) + (q.line - px[i].line) * (q.line - px[i].line);
  }
  return {m, std::sqrt(ss / static_cast<double>(n))};
}

double rpc_holdout_rms(const RpcModel& model, const GroundToPixel& project,
                       const GroundVolume& volume, GridDims dims) {
  double ss = 0.0;
  std::size_t n = 0;
  for (int k = 0; k < dims.n_alt; ++k) {
    for (int i = 0; i < dims.n_lat; ++i) {
      for (int j = 0; j < dims.n_lon; ++j) {
        const GeoPoint g{volume.lat_min + (volume.lat_max - volume.lat_min) * (i + 0.5) / dims.n_lat,
                         volume.lon_min + (volume.lon_max - volume.lon_min) * (j + 0.5) / dims.n_lon,
                         volume.alt_min + (volume.alt_max - volume.alt_min) * (k + 0.5) / dims.n_alt};
        const PixelPoint a = project_forward(model, g);
        const PixelPoint b = project(g);
        ss += (a.samp - b.samp) * (a.samp - b.samp) + (a.line - b.line) * (a.line - b.line);
        ++n;
      }
    }
  }
  if (n == 0) fail(ErrorKind::kPrecondition, "empty hold-out grid");
  return std::sqrt(ss / static_cast<double>(n));
}

SyntheticScene make_pinhole_scene(std::uint64_t seed, const SceneOptions& options) {
  if (options.image_size < 16) fail(ErrorKind::kPrecondition, "image size must be at least 16");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const double relief = options.relief.value_or(uniform(rng, 100.0, 500.0));
  SceneFrame f = make_frame(rng, seed, 2000.0, relief, options.terrain_cells);

  const double height = uniform(rng, 8000.0, 15000.0);
  const double tilt = rad(uniform(rng, 5.0, 15.0));
  const double azimuth = rad(uniform(rng, 0.0, 360.0));
  const double heading = rad(uniform(rng, 0.0, 360.0));
  const Eigen::Vector3d center(height * std::tan(tilt) * std::sin(azimuth),
                               height * std::tan(tilt) * std::cos(azimuth), height);
  const Eigen::Vector3d z = (-center).normalized();
  const Eigen::Vector3d x = z.cross(Eigen::Vector3d(std::sin(heading), std::cos(heading), 0.0)).normalized();
  const Eigen::Vector3d y = z.cross(x);

  PinholeCamera cam;
  cam.r.row(0) = x.transpose();
  cam.r.row(1) = y.transpose();
  cam.r.row(2) = z.transpose();
  cam.t = -cam.r * center;
  cam.anchor = f.anchor;
  cam.image_size = {options.image_size, options.image_size};

  double umin = std::numeric_limits<double>::infinity(), umax = -umin, vmin = umin, vmax = -umin;
  for (const auto& p : volume_samples(f.volume, f.anchor)) {
    const Eigen::Vector3d c = cam.to_camera(p);
    umin = std::min(umin, c.x() / c.z());
    umax = std::max(umax, c.x() / c.z());
    vmin = std::min(vmin, c.y() / c.z());
    vmax = std::max(vmax, c.y() / c.z());
  }
  const auto [sx, ox] = fit_axis(umin, umax, options.image_size);
  const auto [sy, oy] = fit_axis(vmin, vmax, options.image_size);
  cam.k << sx, 0.0, ox, 0.0, sy, oy, 0.0, 0.0, 1.0;

  SyntheticScene scene;
  scene.terrain = std::move(f.terrain);
  scene.volume = f.volume;
  scene.camera = cam;
  scene.image_size = cam.image_size;
  RpcFit fit = fit_rpc(scene_projection(scene.camera), scene.volume);
  scene.rpc = fit.model;
  scene.fit_rms_px = fit.fit_rms_px;
  return scene;
}

SyntheticScene make_pushbroom_scene(std::uint64_t seed, const SceneOptions& options) {
  if (options.image_size < 16) fail(ErrorKind::kPrecondition, "image size must be at least 16");
  std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ULL);
  const double relief = options.relief.value_or(uniform(rng, 300.0, 1500.0));
  const double footprint = uniform(rng, 15000.0, 25000.0);
  SceneFrame f = make_frame(rng, seed, footprint, relief, options.terrain_cells);

  const double height = uniform(rng, 480e3, 700e3);
  const double roll = rad(uniform(rng, 15.0, 30.0)) * (uniform(rng) < 0.5 ? -1.0 : 1.0);
  const double yaw = rad(uniform(rng, -10.0, 10.0));
  const double pitch = rad(uniform(rng, -5.0, 5.0));

  const Eigen::Vector3d up(0.0, 0.0, 1.0);
  // Descending pass: lines advance southward, so across x along points down
  // the line of sight and the image is not mirrored.
  const Eigen::Vector3d along(-std::sin(yaw), -std::cos(yaw), 0.0);
  const Eigen::Vector3d across(std::cos(yaw), -std::sin(yaw), 0.0);
  const Eigen::Vector3d sat = height * (up - std::tan(roll) * across);
  const Eigen::Vector3d view = (-sat).normalized();
  const Eigen::Vector3d across_img = (across - across.dot(view) * view).normalized();

  auto plane = [](const Eigen::Vector3d& n, double d) {
    Eigen::Vector4d v;
    v << n, d;
    return v;
  };
  PushbroomCamera cam;
  cam.anchor = f.anchor;
  cam.a = plane(along - std::tan(pitch) * up, 0.0);
  cam.b = plane(across_img, -across_img.dot(sat));
  cam.c = plane(view, -view.dot(sat));

  double umin = std::numeric_limits<double>::infinity(), umax = -umin, vmin = umin, vmax = -umin;
  for (const auto& p : volume_samples(f.volume, f.anchor)) {
    const PixelPoint q = cam.project(p);
    umin = std::min(umin, q.samp);
    umax = std::max(umax, q.samp);
    vmin = std::min(vmin, q.line);
    vmax = std::max(vmax, q.line);
  }
  const auto [ss, os] = fit_axis(umin, umax, options.image_size);
  const auto [sl, ol] = fit_axis(vmin, vmax, options.image_size);
  cam.b = ss * cam.b + os * cam.c;
  cam.a = sl * cam.a;
  cam.a(3) += ol;

  SyntheticScene scene;
  scene.terrain = std::move(f.terrain);
  scene.volume = f.volume;
  scene.camera = cam;
  scene.image_size = {options.image_size, options.image_size};
  RpcFit fit = fit_rpc(scene_projection(scene.camera), scene.volume);
  scene.rpc = fit.model;
  scene.fit_rms_px = fit.fit_rms_px;
  return scene;
}

Raster render_image(const SyntheticScene& scene, const SceneCamera& camera, ImageSize size,
                    double checker_period_m) {
  if (size.width <= 0 || size.height <= 0) fail(ErrorKind::kPrecondition, "image size must be positive");
  if (!(checker_period_m > 0.0)) fail(ErrorKind::kPrecondition, "checker period must be positive");
  const EnuFrame frame(camera_anchor(camera));
  const Raster shade = hillshade(scene.terrain);
  const double base_alt = frame.anchor().origin.alt;
  // ENU up differs from altitude by the Earth's curvature over the footprint.
  const double lo = scene.volume.alt_min - base_alt - 500.0;
  const double hi = scene.volume.alt_max - base_alt + 500.0;

  Raster out(size.width, size.height, 0.0, SampleType::kUInt8);
  parallel_for(0, static_cast<std::size_t>(size.height), [&](std::size_t row_index) {
    const int row = static_cast<int>(row_index);
    for (int col = 0; col < size.width; ++col) {
      const auto [p1, p2] = sight_planes(camera, col, row);
      const double det = p1(0) * p2(1) - p1(1) * p2(0);
      double& dst = out.at(col, row);
      dst = out.nodata();
      if (std::abs(det) < 1e-300) continue;
      auto point_at = [&](double u) {
        const double r1 = -(p1(2) * u + p1(3));
        const double r2 = -(p2(2) * u + p2(3));
        return EnuPoint{(r1 * p2(1) - r2 * p1(1)) / det, (p1(0) * r2 - p2(0) * r1) / det, u};
      };
      auto gap = [&](double u) {
        const GeoPoint g = frame.to_geodetic(point_at(u));
        bool in = false;
        return g.alt - terrain_height(scene.terrain, g.lat, g.lon, &in);
      };
      double a = lo, b = hi;
      double fa = gap(a), fb = gap(b);
      if (!(fa < 0.0 && fb > 0.0)) continue;
      // Illinois regula falsi.
      int side = 0;
      for (int it = 0; it < 100 && b - a > 1e-6; ++it) {
        const double c = (a * fb - b * fa) / (fb - fa);
        const double fc = gap(c);
        if (fc == 0.0) {
          a = b = c;
          break;
        }
        if (fc < 0.0) {
          a = c;
          fa = fc;
          if (side == -1) fb /= 2;
          side = -1;
        } else {
          b = c;
          fb = fc;
          if (side == 1) fa /= 2;
          side = 1;
        }
      }
      bool inside = false;
      const double u = (a + b) / 2;
      const EnuPoint hit = point_at(u);
      const GeoPoint g = frame.to_geodetic(hit);
      terrain_height(scene.terrain, g.lat, g.lon, &inside);
      if (!inside) continue;
      bool unused = false;
      const double s = terrain_height(shade, g.lat, g.lon, &unused);
      const long cell = static_cast<long>(std::floor(hit.e / checker_period_m)) +
                        static_cast<long>(std::floor(hit.n / checker_period_m));
      const double albedo = (cell & 1L) ? 180.0 : 70.0;
      dst = std::round(albedo * (0.55 + 0.45 * s));
    }
  });
  return out;
}

}  // namespace satpin
