#include "satpin/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "satpin/error.hpp"
#include "satpin/kv_text.hpp"
#include "satpin/parallel.hpp"

namespace satpin {
namespace {

constexpr double kLatticeTolerance = 1e-6;

int lattice_offset(double delta, double cell) {
  const double cells = delta / cell;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > kLatticeTolerance) {
    fail(ErrorKind::kPrecondition, "tiles are not on a common lattice");
  }
  return static_cast<int>(rounded);
}

}  // namespace

std::string_view to_string(Aggregator a) { return a == Aggregator::kMedian ? "median" : "mean"; }

Aggregator parse_aggregator(std::string_view name) {
  if (name == "median") return Aggregator::kMedian;
  if (name == "mean") return Aggregator::kMean;
  fail(ErrorKind::kUsage, "unknown aggregator '" + std::string(name) + "'");
}

void FusionConfig::validate() const {
  if (!(mad_k > 0.0)) fail(ErrorKind::kPrecondition, "mad_k must be positive");
  if (!(mad_floor >= 0.0)) fail(ErrorKind::kPrecondition, "mad_floor must be non-negative");
  if (radius && !(*radius > 0.0)) fail(ErrorKind::kPrecondition, "radius must be positive");
  if (min_neighbors < 1) fail(ErrorKind::kPrecondition, "min_neighbors must be at least 1");
}

Raster mosaic_tiles(std::span<const Raster> tiles) {
  if (tiles.empty()) fail(ErrorKind::kPrecondition, "no tiles to mosaic");
  const double cell = tiles[0].cell_size();
  double x0 = tiles[0].origin_x();
  double y0 = tiles[0].origin_y();
  for (const auto& t : tiles) {
    if (std::abs(t.cell_size() - cell) > 1e-12 * cell) {
      fail(ErrorKind::kPrecondition, "tiles have different cell sizes");
    }
    x0 = std::min(x0, t.origin_x());
    y0 = std::min(y0, t.origin_y());
  }
  struct Placement {
    int col, bottom;
  };
  std::vector<Placement> place;
  int width = 0, height = 0;
  for (const auto& t : tiles) {
    const Placement p{lattice_offset(t.origin_x() - x0, cell), lattice_offset(t.origin_y() - y0, cell)};
    width = std::max(width, p.col + t.width());
    height = std::max(height, p.bottom + t.height());
    place.push_back(p);
  }

  std::vector<double> sum(static_cast<std::size_t>(width) * height, 0.0);
  std::vector<int> count(sum.size(), 0);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const Raster& t = tiles[i];
    const int top = height - (place[i].bottom + t.height());
    for (int r = 0; r < t.height(); ++r) {
      for (int c = 0; c < t.width(); ++c) {
        if (!t.valid(c, r)) continue;
        const std::size_t idx = static_cast<std::size_t>(top + r) * width + place[i].col + c;
        sum[idx] += t.at(c, r);
        ++count[idx];
      }
    }
  }
  Raster out(width, height, tiles[0].nodata(), tiles[0].sample_type());
  out.set_nodata(tiles[0].nodata());
  out.set_georeference(x0, y0, cell);
  auto values = out.values();
  for (std::size_t i = 0; i < sum.size(); ++i) {
    if (count[i] > 0) values[i] = count[i] == 1 ? sum[i] : sum[i] / count[i];
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) fail(ErrorKind::kPrecondition, "median of an empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2;
}

std::vector<double> mad_filter(std::span<const double> heights, double mad_k, double mad_floor) {
  if (heights.empty()) return {};
  const double m = median({heights.begin(), heights.end()});
  std::vector<double> dev;
  dev.reserve(heights.size());
  for (double h : heights) dev.push_back(std::abs(h - m));
  const double threshold = mad_k * kMadScale * std::max(median(dev), mad_floor);
  std::vector<double> kept;
  for (double h : heights) {
    if (std::abs(h - m) <= threshold) kept.push_back(h);
  }
  return kept;
}

Raster radius_filter(const Raster& raster, double radius_cells, int min_neighbors) {
  if (!(radius_cells >= 0.0)) fail(ErrorKind::kPrecondition, "radius must be non-negative");
  const int reach = static_cast<int>(std::floor(radius_cells));
  const double r2 = radius_cells * radius_cells;
  Raster out = raster;
  parallel_for(0, static_cast<std::size_t>(raster.height()), [&](std::size_t row_index) {
    const int row = static_cast<int>(row_index);
    for (int col = 0; col < raster.width(); ++col) {
      if (!raster.valid(col, row)) continue;
      int n = 0;
      for (int dr = -reach; dr <= reach && n < min_neighbors; ++dr) {
        const int r = row + dr;
        if (r < 0 || r >= raster.height()) continue;
        for (int dc = -reach; dc <= reach; ++dc) {
          const int c = col + dc;
          if (c < 0 || c >= raster.width() || dr * dr + dc * dc > r2) continue;
          if (raster.valid(c, r)) ++n;
        }
      }
      if (n < min_neighbors) out.at(col, row) = raster.nodata();
    }
  });
  return out;
}

Raster fuse_views(std::span<const Raster> dsms, const FusionConfig& config) {
  config.validate();
  if (dsms.empty()) fail(ErrorKind::kPrecondition, "no DSMs to fuse");
  for (const auto& d : dsms) {
    if (!d.same_geometry(dsms[0])) fail(ErrorKind::kPrecondition, "DSMs do not share a lattice");
  }
  Raster fused = dsms[0];
  parallel_for(0, static_cast<std::size_t>(fused.height()), [&](std::size_t row_index) {
    const int row = static_cast<int>(row_index);
    std::vector<double> heights;
    for (int col = 0; col < fused.width(); ++col) {
      heights.clear();
      for (const auto& d : dsms) {
        if (d.valid(col, row)) heights.push_back(d.at(col, row));
      }
      const auto kept = mad_filter(heights, config.mad_k, config.mad_floor);
      double& out = fused.at(col, row);
      if (kept.empty()) {
        out = fused.nodata();
      } else if (config.aggregator == Aggregator::kMedian) {
        out = median(kept);
      } else {
        double s = 0.0;
        for (double h : kept) s += h;
        out = s / static_cast<double>(kept.size());
      }
    }
  });
  const double radius_cells = config.radius ? *config.radius / fused.cell_size() : 3.0;
  return radius_filter(fused, radius_cells, config.min_neighbors);
}

DsmMetrics dsm_metrics(const Raster& estimate, const Raster& truth,
                       std::span<const double> thresholds) {
  if (!estimate.same_geometry(truth)) {
    fail(ErrorKind::kPrecondition, "estimate and truth do not share a lattice");
  }
  std::vector<double> abs_res;
  double ss = 0.0, sa = 0.0;
  std::size_t n_truth = 0;
  const auto e = estimate.values();
  const auto t = truth.values();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (truth.is_nodata(t[i])) continue;
    ++n_truth;
    if (estimate.is_nodata(e[i])) continue;
    const double r = e[i] - t[i];
    ss += r * r;
    sa += std::abs(r);
    abs_res.push_back(std::abs(r));
  }
  if (abs_res.empty()) fail(ErrorKind::kPrecondition, "no cells valid in both rasters");
  DsmMetrics m;
  const double n = static_cast<double>(abs_res.size());
  m.rmse = std::sqrt(ss / n);
  m.mae = sa / n;
  m.me = median(abs_res);
  m.n_common = abs_res.size();
  m.n_truth = n_truth;
  for (double th : thresholds) {
    const auto below = std::count_if(abs_res.begin(), abs_res.end(), [th](double r) { return r < th; });
    m.completeness.emplace_back(th, static_cast<double>(below) / static_cast<double>(n_truth));
  }
  return m;
}

std::string format_metrics(const DsmMetrics& m) {
  KvWriter w;
  w.add("RMSE", m.rmse)
      .add("ME", m.me)
      .add("MAE", m.mae)
      .add_int("N_COMMON", static_cast<long long>(m.n_common))
      .add_int("N_TRUTH", static_cast<long long>(m.n_truth));
  for (const auto& [th, frac] : m.completeness) {
    char key[64];
    std::snprintf(key, sizeof key, "COMP_%g", th);
    w.add(key, frac);
  }
  return w.str();
}

}  // namespace satpin
