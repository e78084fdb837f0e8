#include "satpin/raster.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "satpin/error.hpp"
#include "satpin/kv_text.hpp"

namespace satpin {

double full_range_max(SampleType type) {
  switch (type) {
    case SampleType::kUInt8: return 255.0;
    case SampleType::kUInt16: return 65535.0;
    case SampleType::kFloat64: return 1.0;
  }
  return 1.0;
}

Raster::Raster(int width, int height, double fill, SampleType type)
    : width_(width), height_(height), type_(type) {
  if (width < 0 || height < 0) fail(ErrorKind::kPrecondition, "negative raster dimensions");
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

void Raster::set_georeference(double origin_x, double origin_y, double cell_size) {
  if (!(cell_size > 0.0)) fail(ErrorKind::kPrecondition, "cell size must be positive");
  origin_x_ = origin_x;
  origin_y_ = origin_y;
  cell_size_ = cell_size;
}

bool Raster::same_geometry(const Raster& other) const {
  return width_ == other.width_ && height_ == other.height_ && origin_x_ == other.origin_x_ &&
         origin_y_ == other.origin_y_ && cell_size_ == other.cell_size_;
}

Raster parse_esri_ascii(std::string_view text) {
  std::istringstream in{std::string(text)};
  int ncols = -1, nrows = -1;
  double x = 0.0, y = 0.0, cell = 0.0, nodata = Raster::kDefaultNodata;
  bool x_center = false, y_center = false;
  bool have_x = false, have_y = false, have_cell = false;

  // Header keys come first; the first numeric token ends the header.
  std::string token;
  std::streampos data_start = in.tellg();
  while (in >> token) {
    std::string key = token;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!key.empty() && (std::isdigit(static_cast<unsigned char>(key[0])) || key[0] == '-' ||
                         key[0] == '+' || key[0] == '.')) {
      break;
    }
    std::string value;
    if (!(in >> value)) fail(ErrorKind::kParse, "ESRI header key " + token + " has no value");
    if (key == "ncols") ncols = static_cast<int>(parse_double(value, token));
    else if (key == "nrows") nrows = static_cast<int>(parse_double(value, token));
    else if (key == "xllcorner") { x = parse_double(value, token); have_x = true; }
    else if (key == "xllcenter") { x = parse_double(value, token); have_x = x_center = true; }
    else if (key == "yllcorner") { y = parse_double(value, token); have_y = true; }
    else if (key == "yllcenter") { y = parse_double(value, token); have_y = y_center = true; }
    else if (key == "cellsize") { cell = parse_double(value, token); have_cell = true; }
    else if (key == "nodata_value") nodata = parse_double(value, token);
    else fail(ErrorKind::kParse, "unknown ESRI header key " + token);
    data_start = in.tellg();
  }
  if (ncols <= 0 || nrows <= 0 || !have_x || !have_y || !have_cell) {
    fail(ErrorKind::kParse, "incomplete ESRI ASCII header");
  }
  if (x_center) x -= 0.5 * cell;
  if (y_center) y -= 0.5 * cell;

  Raster r(ncols, nrows);
  r.set_georeference(x, y, cell);
  r.set_nodata(nodata);
  in.clear();
  in.seekg(data_start);
  auto values = r.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(in >> token)) fail(ErrorKind::kParse, "ESRI grid truncated");
    values[i] = parse_double(token, "cell value");
  }
  return r;
}

std::string format_esri_ascii(const Raster& r) {
  std::string out;
  out += "ncols " + std::to_string(r.width()) + "\n";
  out += "nrows " + std::to_string(r.height()) + "\n";
  out += "xllcorner " + format_double(r.origin_x()) + "\n";
  out += "yllcorner " + format_double(r.origin_y()) + "\n";
  out += "cellsize " + format_double(r.cell_size()) + "\n";
  out += "NODATA_value " + format_double(r.nodata()) + "\n";
  for (int row = 0; row < r.height(); ++row) {
    for (int col = 0; col < r.width(); ++col) {
      if (col) out += ' ';
      const double v = r.at(col, row);
      out += format_double(r.is_nodata(v) ? r.nodata() : v);
    }
    out += '\n';
  }
  return out;
}

Raster read_esri_ascii(const std::filesystem::path& path) {
  return parse_esri_ascii(read_text_file(path));
}

void write_esri_ascii(const std::filesystem::path& path, const Raster& raster) {
  write_text_file(path, format_esri_ascii(raster));
}

Raster read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  auto next_token = [&]() {
    std::string tok;
    for (;;) {
      int c = in.get();
      if (c == EOF) break;
      if (c == '#') {
        while (c != EOF && c != '\n') c = in.get();
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok += static_cast<char>(c);
    }
    return tok;
  };
  if (next_token() != "P5") fail(ErrorKind::kParse, path.string() + ": not a binary PGM");
  const int w = static_cast<int>(parse_double(next_token(), "width"));
  const int h = static_cast<int>(parse_double(next_token(), "height"));
  const int maxval = static_cast<int>(parse_double(next_token(), "maxval"));
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
    fail(ErrorKind::kParse, path.string() + ": bad PGM header");
  }
  const bool wide = maxval > 255;
  Raster r(w, h, 0.0, wide ? SampleType::kUInt16 : SampleType::kUInt8);
  r.set_nodata(-1.0);
  std::vector<unsigned char> buf(r.size() * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) fail(ErrorKind::kParse, path.string() + ": PGM data truncated");
  auto values = r.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = wide ? static_cast<double>((buf[2 * i] << 8) | buf[2 * i + 1]) : buf[i];
  }
  return r;
}

void write_pgm(const std::filesystem::path& path, const Raster& r) {
  const bool wide = r.sample_type() == SampleType::kUInt16;
  const double maxval = wide ? 65535.0 : 255.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << "P5\n" << r.width() << ' ' << r.height() << '\n' << (wide ? 65535 : 255) << '\n';
  std::vector<unsigned char> buf;
  buf.reserve(r.size() * (wide ? 2 : 1));
  for (double v : r.values()) {
    double q = r.is_nodata(v) ? 0.0 : std::clamp(std::round(v), 0.0, maxval);
    const auto iv = static_cast<std::uint16_t>(q);
    if (wide) buf.push_back(static_cast<unsigned char>(iv >> 8));
    buf.push_back(static_cast<unsigned char>(iv & 0xff));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

void write_color_preview(const std::filesystem::path& path, const Raster& r, double max_value) {
  // Blue -> cyan -> green -> yellow -> red.
  static constexpr std::array<std::array<double, 3>, 5> kRamp{{
      {0, 0, 255}, {0, 255, 255}, {0, 255, 0}, {255, 255, 0}, {255, 0, 0}}};
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << "P6\n" << r.width() << ' ' << r.height() << "\n255\n";
  std::vector<unsigned char> buf;
  buf.reserve(r.size() * 3);
  for (double v : r.values()) {
    if (r.is_nodata(v)) {
      buf.insert(buf.end(), {0, 0, 0});
      continue;
    }
    const double t = max_value > 0.0 ? std::clamp(v / max_value, 0.0, 1.0) : 0.0;
    const double pos = t * (kRamp.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), kRamp.size() - 2);
    const double f = pos - static_cast<double>(i);
    for (int c = 0; c < 3; ++c) {
      const double value = kRamp[i][c] * (1.0 - f) + kRamp[i + 1][c] * f;
      buf.push_back(static_cast<unsigned char>(std::lround(value)));
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

}  // namespace satpin
