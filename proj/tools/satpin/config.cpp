#include "satpin/config.hpp"

#include <charconv>
#include <set>

#include <json.hpp>

#include "satpin/error.hpp"
#include "satpin/kv_text.hpp"

namespace satpin::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) fail(ErrorKind::kParse, "unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kParse, std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

PipelineConfig parse_config(std::string_view json_text, PipelineConfig cfg) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kParse, "config must be a JSON object");
  reject_unknown(doc,
                 {"tile_size", "overlap", "grid_dims", "densify", "refinement", "fusion",
                  "thresholds", "enhance", "brightness", "cell_px", "workers"},
                 "");
  read(doc, "tile_size", cfg.tile_size);
  read(doc, "overlap", cfg.overlap);
  if (doc.contains("grid_dims")) {
    std::vector<int> d;
    read(doc, "grid_dims", d);
    if (d.size() != 3) fail(ErrorKind::kParse, "grid_dims needs three integers");
    cfg.dims = {d[0], d[1], d[2]};
  }
  read(doc, "densify", cfg.densify);
  if (doc.contains("refinement")) {
    std::string kind;
    read(doc, "refinement", kind);
    cfg.refinement = parse_warp_kind(kind);
  }
  if (doc.contains("fusion")) {
    const json& f = doc.at("fusion");
    if (!f.is_object()) fail(ErrorKind::kParse, "fusion must be an object");
    reject_unknown(f, {"mad_k", "mad_floor", "radius", "min_neighbors", "aggregator"}, "fusion.");
    read(f, "mad_k", cfg.fusion.mad_k);
    read(f, "mad_floor", cfg.fusion.mad_floor);
    if (f.contains("radius")) {
      double r = 0.0;
      read(f, "radius", r);
      cfg.fusion.radius = r;
    }
    read(f, "min_neighbors", cfg.fusion.min_neighbors);
    if (f.contains("aggregator")) {
      std::string a;
      read(f, "aggregator", a);
      cfg.fusion.aggregator = parse_aggregator(a);
    }
  }
  read(doc, "thresholds", cfg.thresholds);
  read(doc, "enhance", cfg.enhance);
  if (doc.contains("brightness")) {
    const json& b = doc.at("brightness");
    if (!b.is_object()) fail(ErrorKind::kParse, "brightness must be an object");
    reject_unknown(b, {"trigger_percentile", "threshold", "low", "high"}, "brightness.");
    read(b, "trigger_percentile", cfg.brightness.trigger_percentile);
    read(b, "threshold", cfg.brightness.threshold);
    read(b, "low", cfg.brightness.low);
    read(b, "high", cfg.brightness.high);
  }
  read(doc, "cell_px", cfg.cell_px);
  read(doc, "workers", cfg.workers);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  return parse_config(read_text_file(path), base);
}

std::string dump_config(const PipelineConfig& c) {
  json f = {{"mad_k", c.fusion.mad_k},
            {"mad_floor", c.fusion.mad_floor},
            {"min_neighbors", c.fusion.min_neighbors},
            {"aggregator", std::string(to_string(c.fusion.aggregator))}};
  if (c.fusion.radius) f["radius"] = *c.fusion.radius;
  const json doc = {{"tile_size", c.tile_size},
                    {"overlap", c.overlap},
                    {"grid_dims", {c.dims.n_lat, c.dims.n_lon, c.dims.n_alt}},
                    {"densify", c.densify},
                    {"refinement", std::string(to_string(c.refinement))},
                    {"fusion", f},
                    {"thresholds", c.thresholds},
                    {"enhance", c.enhance},
                    {"brightness",
                     {{"trigger_percentile", c.brightness.trigger_percentile},
                      {"threshold", c.brightness.threshold},
                      {"low", c.brightness.low},
                      {"high", c.brightness.high}}},
                    {"cell_px", c.cell_px},
                    {"workers", c.workers}};
  return doc.dump(2) + "\n";
}

GridDims parse_dims(std::string_view text) {
  int v[3] = {0, 0, 0};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find_first_of(",x", pos) : text.size();
    if (end == std::string_view::npos) fail(ErrorKind::kUsage, "dims must look like 20,20,10");
    const auto field = text.substr(pos, end - pos);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v[i]);
    if (ec != std::errc() || ptr != field.data() + field.size() || v[i] < 2) {
      fail(ErrorKind::kUsage, "dims must be three integers >= 2, got '" + std::string(text) + "'");
    }
    pos = end + 1;
  }
  return {v[0], v[1], v[2]};
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const auto field = text.substr(pos, end - pos);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      fail(ErrorKind::kUsage, "expected a comma-separated number list, got '" + std::string(text) + "'");
    }
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

}  // namespace satpin::cli
