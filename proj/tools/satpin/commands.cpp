#include "satpin/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "satpin/config.hpp"
#include "satpin/equivalence.hpp"
#include "satpin/error_analysis.hpp"
#include "satpin/fusion.hpp"
#include "satpin/kv_text.hpp"
#include "satpin/parallel.hpp"
#include "satpin/raster.hpp"
#include "satpin/refinement.hpp"
#include "satpin/synth.hpp"
#include "satpin/tiling.hpp"

namespace satpin::cli {
namespace fs = std::filesystem;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return 2;
    case ErrorKind::kIo: return 3;
    case ErrorKind::kParse: return 4;
    case ErrorKind::kPrecondition: return 5;
    case ErrorKind::kSingular:
    case ErrorKind::kDivergence:
    case ErrorKind::kDegenerate:
    case ErrorKind::kIllConditioned: return 6;
  }
  return 1;
}

namespace {

// Flags shared by every subcommand; each value is optional so that only flags
// the user actually passed override the config document.
struct CommonFlags {
  std::string config_path;
  std::optional<unsigned> workers;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "JSON pipeline config");
  sub->add_option("--workers", f.workers, "worker threads (default: SATPIN_WORKERS or all cores)");
}

PipelineConfig base_config(const CommonFlags& f) {
  PipelineConfig cfg;
  if (!f.config_path.empty()) cfg = load_config(f.config_path);
  if (f.workers) cfg.workers = *f.workers;
  return cfg;
}

unsigned workers_of(const PipelineConfig& cfg) {
  return cfg.workers > 0 ? cfg.workers : default_worker_count();
}

ImageSize parse_size(const std::string& text) {
  ImageSize s;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%dx%d%c", &s.width, &s.height, &tail) == 2) {
  } else if (std::sscanf(text.c_str(), "%d%c", &s.width, &tail) == 1) {
    s.height = s.width;
  } else {
    fail(ErrorKind::kUsage, "size must look like 2048 or 2048x1024, got '" + text + "'");
  }
  if (s.width <= 0 || s.height <= 0) fail(ErrorKind::kUsage, "size must be positive");
  return s;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create directory " + dir.string() + ": " + ec.message());
}

std::string tile_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "tile_%03d", index);
  return buf;
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

ImageSize size_of(const Raster& r) { return {r.width(), r.height()}; }

EquateOptions equate_options(const PipelineConfig& cfg) { return {cfg.dims, cfg.densify}; }

// Error-field preview stretched over [0, field max].
void write_field(const fs::path& raster_path, const ErrorField& field) {
  write_esri_ascii(raster_path, field.raster);
  double top = 0.0;
  for (double v : field.raster.values()) {
    if (!field.raster.is_nodata(v)) top = std::max(top, v);
  }
  fs::path preview = raster_path;
  preview.replace_extension(".ppm");
  write_color_preview(preview, field.raster, top > 0.0 ? top : 1.0);
}

// ---- inspect ---------------------------------------------------------------

void cmd_inspect(const std::string& rpc_path, std::ostream& out) {
  const RpcModel m = read_rpc_file(rpc_path);
  m.validate();
  const GroundVolume v = rpc_volume(m);
  auto largest = [](const RpcCoefficients& c) {
    double best = 0.0;
    for (double x : c) best = std::max(best, std::abs(x));
    return best;
  };
  const PixelPoint center = project_forward(m, v.center());
  KvWriter w;
  w.add("LINE_OFF", m.line_off)
      .add("SAMP_OFF", m.samp_off)
      .add("LINE_SCALE", m.line_scale)
      .add("SAMP_SCALE", m.samp_scale)
      .add("LAT_RANGE", std::vector<double>{v.lat_min, v.lat_max})
      .add("LON_RANGE", std::vector<double>{v.lon_min, v.lon_max})
      .add("ALT_RANGE", std::vector<double>{v.alt_min, v.alt_max})
      .add("LINE_NUM_MAX_ABS", largest(m.line_num))
      .add("LINE_DEN_MAX_ABS", largest(m.line_den))
      .add("SAMP_NUM_MAX_ABS", largest(m.samp_num))
      .add("SAMP_DEN_MAX_ABS", largest(m.samp_den))
      .add("CENTER_PIXEL", std::vector<double>{center.samp, center.line});
  out << w.str();
}

// ---- equate ----------------------------------------------------------------

struct EquateFlags {
  std::string rpc;
  std::string size;
  std::string dims;
  std::optional<int> crop;
  std::string out;
  std::string report;
  std::string manifest;
  std::string out_dir;
  bool no_densify = false;
};

void apply_dims(PipelineConfig& cfg, const std::string& dims, bool no_densify) {
  if (!dims.empty()) cfg.dims = parse_dims(dims);
  if (no_densify) cfg.densify = false;
}

EquateResult equate_to_files(const RpcModel& model, ImageSize size, const PipelineConfig& cfg,
                             const fs::path& camera_path, const fs::path& report_path) {
  const EquateResult r = equate(model, size, equate_options(cfg));
  write_camera_file(camera_path, r.camera, r.projection.residual_rms_px);
  if (!report_path.empty()) write_text_file(report_path, format_report(r.report));
  return r;
}

void cmd_equate(const EquateFlags& f, PipelineConfig cfg, std::ostream& out) {
  apply_dims(cfg, f.dims, f.no_densify);
  if (!f.manifest.empty()) {
    if (f.out_dir.empty()) fail(ErrorKind::kUsage, "--manifest needs --out-dir");
    const fs::path base = fs::path(f.manifest).parent_path();
    const auto entries = read_manifest(f.manifest);
    std::vector<EquivalenceReport> reports(entries.size());
    parallel_for(0, entries.size(), [&](std::size_t i) {
      const auto& e = entries[i];
      const fs::path dir = fs::path(f.out_dir) / tile_name(e.index);
      ensure_dir(dir);
      reports[i] = equate_to_files(read_rpc_file(resolve(base, e.rpc_path)), e.size, cfg,
                                   dir / "camera.txt", dir / "report.txt")
                       .report;
    }, workers_of(cfg));
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out << tile_name(entries[i].index) << " RMSE_PX " << format_double(reports[i].rmse)
          << " MAX_ERROR_PX " << format_double(reports[i].max_error) << '\n';
    }
    return;
  }
  if (f.rpc.empty() || f.size.empty() || f.out.empty()) {
    fail(ErrorKind::kUsage, "equate needs RPC, --size and --out (or --manifest and --out-dir)");
  }
  RpcModel model = read_rpc_file(f.rpc);
  ImageSize size = parse_size(f.size);
  if (f.crop) {
    if (*f.crop <= 0 || *f.crop > std::max(size.width, size.height)) {
      fail(ErrorKind::kUsage, "--crop must be between 1 and the image size");
    }
    const ImageSize crop{std::min(*f.crop, size.width), std::min(*f.crop, size.height)};
    model = crop_rpc(model, {(size.width - crop.width) / 2, (size.height - crop.height) / 2});
    size = crop;
  }
  const EquateResult r = equate_to_files(model, size, cfg, f.out, f.report);
  out << format_report(r.report);
  out << "FIT_RESIDUAL_RMS_PX: " << format_double(r.projection.residual_rms_px) << '\n';
}

// ---- refine ----------------------------------------------------------------

struct RefineFlags {
  std::string rpc;
  std::string image;
  std::string out_dir;
  std::string camera;
  std::string kind;
  std::string dims;
  std::string manifest;
  bool no_densify = false;
};

struct RefineOutcome {
  EquivalenceReport before;
  EquivalenceReport after;
};

RefineOutcome refine_to_dir(const RpcModel& model, const Raster& image, const fs::path& dir,
                            const std::optional<PinholeCamera>& given, const PipelineConfig& cfg,
                            unsigned resample_workers) {
  ensure_dir(dir);
  const ImageSize size = size_of(image);
  const VirtualGrid grid = equate_grid(model, size, equate_options(cfg));
  PinholeCamera camera;
  if (given) {
    camera = *given;
  } else {
    const ProjectionMatrix p = solve_projection(grid);
    camera = decompose_projection(p, grid);
    write_camera_file(dir / "camera.txt", camera, p.residual_rms_px);
  }
  const ImageWarp warp = build_refinement(model, camera, grid, cfg.refinement);
  const VirtualGrid validation = build_validation_grid(model, size, grid.dims);
  RefineOutcome r{measure_equivalence_error(model, camera, validation),
                  measure_equivalence_error(model, camera, validation, &warp)};
  write_warp_file(dir / "warp.txt", warp);
  write_text_file(dir / "report_before.txt", format_report(r.before));
  write_text_file(dir / "report_after.txt", format_report(r.after));
  write_pgm(dir / "corrected.pgm", resample(image, warp, resample_workers));
  return r;
}

void cmd_refine(const RefineFlags& f, PipelineConfig cfg, std::ostream& out) {
  apply_dims(cfg, f.dims, f.no_densify);
  if (!f.kind.empty()) cfg.refinement = parse_warp_kind(f.kind);
  if (f.out_dir.empty()) fail(ErrorKind::kUsage, "refine needs --out-dir");
  if (!f.manifest.empty()) {
    const fs::path base = fs::path(f.manifest).parent_path();
    const auto entries = read_manifest(f.manifest);
    std::vector<RefineOutcome> results(entries.size());
    parallel_for(0, entries.size(), [&](std::size_t i) {
      const auto& e = entries[i];
      const fs::path dir = fs::path(f.out_dir) / tile_name(e.index);
      std::optional<PinholeCamera> cam;
      if (fs::exists(dir / "camera.txt")) cam = read_camera_file(dir / "camera.txt").camera;
      results[i] = refine_to_dir(read_rpc_file(resolve(base, e.rpc_path)),
                                 read_pgm(resolve(base, e.image_path)), dir, cam, cfg, 1);
    }, workers_of(cfg));
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out << tile_name(entries[i].index) << " BEFORE_RMSE_PX " << format_double(results[i].before.rmse)
          << " AFTER_RMSE_PX " << format_double(results[i].after.rmse) << '\n';
    }
    return;
  }
  if (f.rpc.empty() || f.image.empty()) fail(ErrorKind::kUsage, "refine needs RPC and IMAGE");
  std::optional<PinholeCamera> cam;
  if (!f.camera.empty()) cam = read_camera_file(f.camera).camera;
  const RefineOutcome r = refine_to_dir(read_rpc_file(f.rpc), read_pgm(f.image), f.out_dir, cam,
                                        cfg, workers_of(cfg));
  out << "BEFORE\n" << format_report(r.before) << "AFTER\n" << format_report(r.after);
}

// ---- partition -------------------------------------------------------------

struct PartitionFlags {
  std::string rpc;
  std::string image;
  std::string out_dir;
  std::optional<int> tile_size;
  std::optional<int> overlap;
  bool no_enhance = false;
  std::optional<double> trigger;
  std::optional<double> threshold;
};

void cmd_partition(const PartitionFlags& f, PipelineConfig cfg, std::ostream& out) {
  if (f.tile_size) cfg.tile_size = *f.tile_size;
  if (f.overlap) cfg.overlap = *f.overlap;
  if (f.no_enhance) cfg.enhance = false;
  if (f.trigger) cfg.brightness.trigger_percentile = *f.trigger;
  if (f.threshold) cfg.brightness.threshold = *f.threshold;

  const RpcModel model = read_rpc_file(f.rpc);
  const Raster image = read_pgm(f.image);
  const TilePlan plan = plan_tiles(size_of(image), cfg.tile_size, cfg.overlap);
  ensure_dir(f.out_dir);
  std::vector<ManifestEntry> entries(plan.tiles.size());
  parallel_for(0, plan.tiles.size(), [&](std::size_t i) {
    const Tile& t = plan.tiles[i];
    Raster tile = crop_raster(image, t.origin, t.size);
    if (cfg.enhance) tile = enhance_brightness(tile, cfg.brightness);
    const std::string name = tile_name(t.index);
    write_pgm(fs::path(f.out_dir) / (name + ".pgm"), tile);
    write_rpc_file(fs::path(f.out_dir) / (name + ".rpc"), crop_rpc(model, t.origin));
    entries[i] = {t.index, t.origin, t.size, name + ".pgm", name + ".rpc"};
  }, workers_of(cfg));
  write_manifest(fs::path(f.out_dir) / "manifest.txt", entries);
  out << "TILES: " << entries.size() << '\n';
}

// ---- error-map -------------------------------------------------------------

struct ErrorMapFlags {
  std::string rpc;
  std::string camera;
  std::string out;
  std::string warp;
  std::optional<int> cell;
  std::string manifest;
  std::string work_dir;
  bool with_warp = false;
};

void cmd_error_map(const ErrorMapFlags& f, PipelineConfig cfg, std::ostream& out) {
  if (f.cell) cfg.cell_px = *f.cell;
  if (!f.manifest.empty()) {
    if (f.work_dir.empty()) fail(ErrorKind::kUsage, "--manifest needs --work-dir");
    const fs::path base = fs::path(f.manifest).parent_path();
    const auto entries = read_manifest(f.manifest);
    std::vector<RegionMeans> means(entries.size());
    parallel_for(0, entries.size(), [&](std::size_t i) {
      const auto& e = entries[i];
      const fs::path dir = fs::path(f.work_dir) / tile_name(e.index);
      const RpcModel model = read_rpc_file(resolve(base, e.rpc_path));
      const PinholeCamera cam = read_camera_file(dir / "camera.txt").camera;
      const int cell = std::min({cfg.cell_px, e.size.width, e.size.height});
      const ErrorField before = error_field(model, cam, e.size, cell);
      write_field(dir / "error_map.asc", before);
      if (f.with_warp) {
        const ImageWarp warp = read_warp_file(dir / "warp.txt");
        write_field(dir / "error_map_after.asc", error_field(model, cam, e.size, cell, &warp));
      }
      // Edge tiles can miss the ground entirely in their center or border.
      try {
        means[i] = region_means(before);
      } catch (const Error&) {
        means[i] = {std::nan(""), std::nan("")};
      }
    }, workers_of(cfg));
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out << tile_name(entries[i].index) << " CENTER_MEAN_PX " << format_double(means[i].center)
          << " PERIPHERY_MEAN_PX " << format_double(means[i].periphery) << '\n';
    }
    return;
  }
  if (f.rpc.empty() || f.camera.empty() || f.out.empty()) {
    fail(ErrorKind::kUsage, "error-map needs RPC, CAMERA and --out (or --manifest and --work-dir)");
  }
  const RpcModel model = read_rpc_file(f.rpc);
  const PinholeCamera cam = read_camera_file(f.camera).camera;
  std::optional<ImageWarp> warp;
  if (!f.warp.empty()) warp = read_warp_file(f.warp);
  const ErrorField field =
      error_field(model, cam, cam.image_size, cfg.cell_px, warp ? &*warp : nullptr);
  write_field(f.out, field);
  const RegionMeans m = region_means(field);
  out << "CENTER_MEAN_PX: " << format_double(m.center) << '\n'
      << "PERIPHERY_MEAN_PX: " << format_double(m.periphery) << '\n';
}

// ---- fuse / mosaic / metrics -------------------------------------------------

struct FuseFlags {
  std::vector<std::string> inputs;
  std::string out;
  std::optional<double> mad_k;
  std::optional<double> mad_floor;
  std::optional<double> radius;
  std::optional<int> min_neighbors;
  std::string aggregator;
};

std::vector<Raster> read_rasters(const std::vector<std::string>& paths) {
  std::vector<Raster> out;
  for (const auto& p : paths) out.push_back(read_esri_ascii(p));
  return out;
}

void cmd_fuse(const FuseFlags& f, PipelineConfig cfg, std::ostream& out) {
  if (f.mad_k) cfg.fusion.mad_k = *f.mad_k;
  if (f.mad_floor) cfg.fusion.mad_floor = *f.mad_floor;
  if (f.radius) cfg.fusion.radius = *f.radius;
  if (f.min_neighbors) cfg.fusion.min_neighbors = *f.min_neighbors;
  if (!f.aggregator.empty()) cfg.fusion.aggregator = parse_aggregator(f.aggregator);
  const auto dsms = read_rasters(f.inputs);
  const Raster fused = fuse_views(dsms, cfg.fusion);
  write_esri_ascii(f.out, fused);
  std::size_t valid = 0;
  for (double v : fused.values()) valid += fused.is_nodata(v) ? 0 : 1;
  out << "VALID_CELLS: " << valid << '\n' << "TOTAL_CELLS: " << fused.size() << '\n';
}

void cmd_mosaic(const std::vector<std::string>& inputs, const std::string& out_path, std::ostream& out) {
  const auto tiles = read_rasters(inputs);
  const Raster m = mosaic_tiles(tiles);
  write_esri_ascii(out_path, m);
  out << "SIZE: " << m.width() << ' ' << m.height() << '\n';
}

void cmd_metrics(const std::string& estimate, const std::string& truth,
                 const std::string& thresholds, const std::string& out_path,
                 PipelineConfig cfg, std::ostream& out) {
  if (!thresholds.empty()) cfg.thresholds = parse_number_list(thresholds);
  const DsmMetrics m = dsm_metrics(read_esri_ascii(estimate), read_esri_ascii(truth), cfg.thresholds);
  const std::string text = format_metrics(m);
  if (!out_path.empty()) write_text_file(out_path, text);
  out << text;
}

// ---- synth -----------------------------------------------------------------

struct SynthFlags {
  std::string scene = "pushbroom";
  std::uint64_t seed = 1;
  std::optional<double> relief;
  int size = 2048;
  std::string out_dir;
};

void cmd_synth(const SynthFlags& f, std::ostream& out) {
  if (f.scene != "pinhole" && f.scene != "pushbroom") {
    fail(ErrorKind::kUsage, "--scene must be pinhole or pushbroom, got '" + f.scene + "'");
  }
  SceneOptions opts;
  opts.image_size = f.size;
  opts.relief = f.relief;
  const SyntheticScene scene =
      f.scene == "pinhole" ? make_pinhole_scene(f.seed, opts) : make_pushbroom_scene(f.seed, opts);
  const fs::path dir(f.out_dir);
  ensure_dir(dir);
  write_rpc_file(dir / "scene.rpc", scene.rpc);
  write_pgm(dir / "image.pgm", render_image(scene, scene.camera, scene.image_size));
  write_esri_ascii(dir / "truth_dsm.asc", scene.terrain);
  write_text_file(dir / "camera.txt", format_scene_camera(scene.camera));
  const double holdout = rpc_holdout_rms(scene.rpc, scene_projection(scene.camera), scene.volume);
  KvWriter w;
  w.add_text("KIND", f.scene)
      .add_int("SEED", static_cast<long long>(f.seed))
      .add_int("IMAGE_SIZE", f.size)
      .add("FIT_RMS_PX", scene.fit_rms_px)
      .add("HOLDOUT_RMS_PX", holdout);
  write_text_file(dir / "scene.txt", w.str());
  out << w.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"satpin: equivalent pinhole cameras for RPC satellite imagery", "satpin"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  CommonFlags common;

  std::string inspect_rpc;
  auto* inspect = app.add_subcommand("inspect", "Summarize an RPC sidecar");
  inspect->add_option("rpc", inspect_rpc, "RPC file")->required();
  add_common(inspect, common);

  EquateFlags eq;
  auto* equate_cmd = app.add_subcommand("equate", "Fit the equivalent pinhole camera of an RPC");
  equate_cmd->add_option("rpc", eq.rpc, "RPC file");
  equate_cmd->add_option("--size", eq.size, "image size, WIDTHxHEIGHT or N");
  equate_cmd->add_option("--dims", eq.dims, "grid dims lat,lon,alt (default 20,20,10)");
  equate_cmd->add_option("--crop", eq.crop, "equate a centered square crop of this size");
  equate_cmd->add_option("--out", eq.out, "camera file to write");
  equate_cmd->add_option("--report", eq.report, "equivalence report to write");
  equate_cmd->add_option("--manifest", eq.manifest, "tile manifest (per-tile mode)");
  equate_cmd->add_option("--out-dir", eq.out_dir, "per-tile output directory");
  equate_cmd->add_flag("--no-densify", eq.no_densify, "keep the grid dims even for crops");
  add_common(equate_cmd, common);

  RefineFlags rf;
  auto* refine = app.add_subcommand("refine", "Fit the image refinement warp and resample");
  refine->add_option("rpc", rf.rpc, "RPC file");
  refine->add_option("image", rf.image, "PGM image");
  refine->add_option("--out-dir", rf.out_dir, "output directory")->required();
  refine->add_option("--camera", rf.camera, "equivalent camera (computed when omitted)");
  refine->add_option("--kind", rf.kind, "polynomial or homography");
  refine->add_option("--dims", rf.dims, "grid dims lat,lon,alt");
  refine->add_option("--manifest", rf.manifest, "tile manifest (per-tile mode)");
  refine->add_flag("--no-densify", rf.no_densify, "keep the grid dims even for crops");
  add_common(refine, common);

  PartitionFlags pf;
  auto* partition = app.add_subcommand("partition", "Split an image and its RPC into tiles");
  partition->add_option("rpc", pf.rpc, "RPC file")->required();
  partition->add_option("image", pf.image, "PGM image")->required();
  partition->add_option("--out-dir", pf.out_dir, "output directory")->required();
  partition->add_option("--tile-size", pf.tile_size, "tile size in pixels (default 5120)");
  partition->add_option("--overlap", pf.overlap, "overlap in pixels (default 512)");
  partition->add_flag("--no-enhance", pf.no_enhance, "skip the brightness stretch");
  partition->add_option("--trigger", pf.trigger, "stretch trigger quantile (default 0.99)");
  partition->add_option("--threshold", pf.threshold, "stretch trigger DN (default 200)");
  add_common(partition, common);

  ErrorMapFlags ef;
  auto* emap = app.add_subcommand("error-map", "Rasterize the equivalence error");
  emap->add_option("rpc", ef.rpc, "RPC file");
  emap->add_option("camera", ef.camera, "camera file");
  emap->add_option("--out", ef.out, "ESRI ASCII output; a .ppm preview is written beside it");
  emap->add_option("--warp", ef.warp, "measure after this refinement warp");
  emap->add_option("--cell", ef.cell, "cell size in pixels (default 32)");
  emap->add_option("--manifest", ef.manifest, "tile manifest (per-tile mode)");
  emap->add_option("--work-dir", ef.work_dir, "directory holding tile_NNN/camera.txt");
  emap->add_flag("--with-warp", ef.with_warp, "also map the error after each tile's warp");
  add_common(emap, common);

  FuseFlags ff;
  auto* fuse = app.add_subcommand("fuse", "Fuse multi-view DSMs with MAD and radius filtering");
  fuse->add_option("dsm", ff.inputs, "ESRI ASCII DSMs")->required();
  fuse->add_option("--out", ff.out, "fused DSM")->required();
  fuse->add_option("--mad-k", ff.mad_k, "MAD multiplier (default 3)");
  fuse->add_option("--mad-floor", ff.mad_floor, "MAD floor in meters (default 0.1)");
  fuse->add_option("--radius", ff.radius, "radius filter radius in georeference units (default 3 cells)");
  fuse->add_option("--min-neighbors", ff.min_neighbors, "radius filter minimum count (default 4)");
  fuse->add_option("--aggregator", ff.aggregator, "median or mean");
  add_common(fuse, common);

  std::vector<std::string> mosaic_in;
  std::string mosaic_out;
  auto* mosaic = app.add_subcommand("mosaic", "Mosaic DSM tiles of one view");
  mosaic->add_option("dsm", mosaic_in, "ESRI ASCII tiles")->required();
  mosaic->add_option("--out", mosaic_out, "mosaic DSM")->required();
  add_common(mosaic, common);

  std::string m_est, m_truth, m_thresholds, m_out;
  auto* metrics = app.add_subcommand("metrics", "DSM accuracy against a reference");
  metrics->add_option("estimate", m_est, "estimated DSM")->required();
  metrics->add_option("truth", m_truth, "reference DSM")->required();
  metrics->add_option("--thresholds", m_thresholds, "completeness thresholds, e.g. 1,2");
  metrics->add_option("--out", m_out, "report file");
  add_common(metrics, common);

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene bundle");
  synth->add_option("--scene", sf.scene, "pinhole or pushbroom");
  synth->add_option("--seed", sf.seed, "generator seed");
  synth->add_option("--relief", sf.relief, "terrain relief in meters (drawn from the seed if unset)");
  synth->add_option("--size", sf.size, "image size in pixels");
  synth->add_option("--out-dir", sf.out_dir, "output directory")->required();
  add_common(synth, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (msg.empty()) msg = e.get_name();
    err << "error: usage: " << msg << '\n';
    return exit_code(ErrorKind::kUsage);
  }

  try {
    PipelineConfig cfg = base_config(common);
    if (*inspect) {
      cmd_inspect(inspect_rpc, out);
    } else if (*equate_cmd) {
      cmd_equate(eq, cfg, out);
    } else if (*refine) {
      cmd_refine(rf, cfg, out);
    } else if (*partition) {
      cmd_partition(pf, cfg, out);
    } else if (*emap) {
      cmd_error_map(ef, cfg, out);
    } else if (*fuse) {
      cmd_fuse(ff, cfg, out);
    } else if (*mosaic) {
      cmd_mosaic(mosaic_in, mosaic_out, out);
    } else if (*metrics) {
      cmd_metrics(m_est, m_truth, m_thresholds, m_out, cfg, out);
    } else if (*synth) {
      cmd_synth(sf, out);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: io: " << e.what() << '\n';
    return exit_code(ErrorKind::kIo);
  } catch (const std::bad_alloc&) {
    err << "error: io: out of memory\n";
    return 1;
  }
  return 0;
}

}  // namespace satpin::cli
