#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace satpin {

// Storage depth of the DNs a raster represents. Values are always held as
// doubles; the depth only controls rounding and the full DN range.
enum class SampleType { kUInt8, kUInt16, kFloat64 };

double full_range_max(SampleType type);

// Row-major grid; row 0 is the top (north) row. The origin is the lower-left
// corner of the lower-left cell, matching ESRI ASCII xllcorner/yllcorner.
class Raster {
 public:
  static constexpr double kDefaultNodata = -9999.0;

  Raster() = default;
  Raster(int width, int height, double fill = 0.0, SampleType type = SampleType::kFloat64);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }

  double& at(int col, int row) { return values_[index(col, row)]; }
  double at(int col, int row) const { return values_[index(col, row)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double nodata() const { return nodata_; }
  void set_nodata(double value) { nodata_ = value; }
  bool is_nodata(double v) const { return v == nodata_ || v != v; }
  bool valid(int col, int row) const { return !is_nodata(at(col, row)); }

  SampleType sample_type() const { return type_; }
  void set_sample_type(SampleType type) { type_ = type; }

  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double cell_size() const { return cell_size_; }
  void set_georeference(double origin_x, double origin_y, double cell_size);

  // Georeferenced center of a cell.
  double center_x(int col) const { return origin_x_ + (col + 0.5) * cell_size_; }
  double center_y(int row) const { return origin_y_ + (height_ - row - 0.5) * cell_size_; }

  bool same_geometry(const Raster& other) const;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
  double nodata_ = kDefaultNodata;
  SampleType type_ = SampleType::kFloat64;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  double cell_size_ = 1.0;
};

// ESRI ASCII grid. Accepts xllcenter/yllcenter on read; always writes
// xllcorner/yllcorner and values with 17 significant digits.
Raster parse_esri_ascii(std::string_view text);
std::string format_esri_ascii(const Raster& raster);
Raster read_esri_ascii(const std::filesystem::path& path);
void write_esri_ascii(const std::filesystem::path& path, const Raster& raster);

// Binary PGM (P5), 8 or 16 bit. Nodata is written as 0.
Raster read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Raster& raster);

// Color-ramped 8-bit PPM (P6) preview over [0, max_value]; nodata is black.
void write_color_preview(const std::filesystem::path& path, const Raster& raster,
                         double max_value);

}  // namespace satpin
