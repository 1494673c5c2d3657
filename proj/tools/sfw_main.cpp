// sfw: WiFi-RSSI geometric mapping from a trajectory and k-visibility.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "sfw/dense_inverse.hpp"
#include "sfw/error.hpp"
#include "sfw/eval.hpp"
#include "sfw/keyvalue.hpp"
#include "sfw/kvis.hpp"
#include "sfw/pgm.hpp"
#include "sfw/render.hpp"
#include "sfw/rssi.hpp"
#include "sfw/sim.hpp"
#include "sfw/sparse_inverse.hpp"
#include "sfw/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::pair<double, double> parse_pair(const std::string& text,
                                     const std::string& flag) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw UsageError(flag + " expects two comma-separated numbers");
  }
  try {
    return {sfw::parse_double(text.substr(0, comma)),
            sfw::parse_double(text.substr(comma + 1))};
  } catch (const sfw::Error&) {
    throw UsageError(flag + " expects two comma-separated numbers");
  }
}

sfw::CellIndex parse_cell(const std::string& text, const std::string& flag) {
  const auto [c, r] = parse_pair(text, flag);
  if (c != static_cast<int>(c) || r != static_cast<int>(r)) {
    throw UsageError(flag + " expects integer cell coordinates");
  }
  return {static_cast<int>(c), static_cast<int>(r)};
}

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SFW_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
  spdlog::set_pattern("[%l] %v");
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 1;
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string scenario;
  std::string map_path;
  std::string router;
  std::string trajectory_path;
  std::string config_path;
  std::size_t samples = 5000;
  double rate = 10.0;
  sfw::PathLossParams params;
  std::string out_dir;
};

std::vector<sfw::WorldPoint> load_waypoints(const fs::path& path) {
  const auto records = sfw::load_trace_csv(path);
  std::vector<sfw::WorldPoint> points;
  for (const auto& r : records) points.push_back(r.position);
  return points;
}

void write_scenario_meta(const sfw::GridGeometry& g, sfw::WorldPoint router,
                         const fs::path& path) {
  sfw::KeyValueFile kv;
  kv.set("width", g.width);
  kv.set("height", g.height);
  kv.set("resolution", g.resolution);
  kv.set("origin_x", g.origin.x);
  kv.set("origin_y", g.origin.y);
  kv.set("router_x", router.x);
  kv.set("router_y", router.y);
  kv.save(path);
}

int run_simulate(const SimulateOptions& o, const GlobalOptions& g) {
  sfw::PathLossParams params = o.params;
  params.seed = g.seed;
  if (!o.config_path.empty()) {
    const auto kv = sfw::KeyValueFile::load(o.config_path);
    if (kv.has("p0")) params.p0 = kv.get_double("p0");
    if (kv.has("d0")) params.d0 = kv.get_double("d0");
    if (kv.has("exponent")) params.exponent = kv.get_double("exponent");
    if (kv.has("wall_loss")) params.wall_loss = kv.get_double("wall_loss");
    if (kv.has("noise_sigma")) params.noise_sigma = kv.get_double("noise_sigma");
  }

  sfw::Scenario s;
  if (o.scenario == "three-room") {
    s = sfw::three_room_scenario(o.samples);
  } else if (!o.scenario.empty()) {
    throw UsageError("unknown scenario '" + o.scenario + "'");
  } else {
    if (o.map_path.empty() || o.router.empty() || o.trajectory_path.empty()) {
      throw UsageError("simulate needs --scenario or --map, --router and --trajectory");
    }
    s.map = sfw::load_pgm(o.map_path);
    const auto [rx, ry] = parse_pair(o.router, "--router");
    s.router = {rx, ry};
    const auto waypoints = load_waypoints(o.trajectory_path);
    s.trajectory = sfw::resample_polyline(waypoints, o.samples);
  }

  const auto trace =
      sfw::generate_trace(s.map, s.router, s.trajectory, o.rate, params);
  const fs::path out(o.out_dir);
  fs::create_directories(out);
  sfw::save_pgm(s.map, out / "map.pgm");
  sfw::save_sidecar(s.map.geometry(), out / "map.pgm");
  sfw::save_trace_csv(trace, out / "trace.csv");
  write_scenario_meta(s.map.geometry(), s.router, out / "scenario.meta");
  std::cout << "samples=" << trace.size() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// kvis / dense-invert

int run_kvis(const std::string& map_path, const std::string& router,
             const std::string& out_path, const std::string& png_path,
             const GlobalOptions& g) {
  const auto map = sfw::load_pgm(map_path);
  const auto kgrid = sfw::kvis_plot(map, parse_cell(router, "--router"), g.threads);
  sfw::save_kgrid(kgrid, out_path);
  if (!png_path.empty()) sfw::save_png(sfw::render_kgrid(kgrid), png_path);
  return 0;
}

int run_dense_invert(const std::string& kgrid_path, const std::string& router,
                     const std::string& out_path) {
  const auto kgrid = sfw::load_kgrid(kgrid_path);
  sfw::DenseInverseStats stats;
  const auto walls =
      sfw::invert_dense(kgrid, parse_cell(router, "--router"), &stats);
  sfw::save_pgm(walls, out_path);
  sfw::save_sidecar(walls.geometry(), out_path);
  std::cout << "skipped_jumps=" << stats.skipped_jumps << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyOptions {
  std::string trace_path;
  std::string out_path;
  std::string model_in;
  std::string model_out;
  int window = sfw::kDefaultSmoothingWindow;
  int kmax = sfw::kDefaultMaxWalls;
};

// Smooths the raw RSSI column, fits (or reuses) a classifier and writes k.
sfw::RssiClassifier classify_trace(std::vector<sfw::TraceRecord>& records,
                                   int window, int kmax,
                                   const std::string& model_in) {
  std::vector<sfw::RssiSample> raw;
  raw.reserve(records.size());
  for (const auto& r : records) {
    if (!r.rssi) {
      throw sfw::Error(sfw::ErrorCode::kMalformedFile,
                       "trace has no rssi column to classify");
    }
    raw.push_back({r.t, *r.rssi});
  }
  const auto smooth = sfw::smooth_rssi(raw, window);
  std::vector<double> values;
  values.reserve(smooth.size());
  for (const auto& s : smooth) values.push_back(s.rssi);
  const auto classifier = model_in.empty()
                              ? sfw::RssiClassifier::fit(values, kmax)
                              : sfw::RssiClassifier::load(model_in);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].rssi_filtered = values[i];
    records[i].k = classifier.classify(values[i]);
  }
  return classifier;
}

int run_classify(const ClassifyOptions& o) {
  auto records = sfw::load_trace_csv(o.trace_path);
  const auto classifier = classify_trace(records, o.window, o.kmax, o.model_in);
  sfw::save_trace_csv(records, o.out_path);
  if (!o.model_out.empty()) classifier.save(o.model_out);
  sfw::KeyValueFile kv;
  kv.set("K", classifier.max_walls());
  kv.set("centroids", classifier.centroids());
  kv.set("thresholds", classifier.thresholds());
  kv.write(std::cout);
  return 0;
}

// ---------------------------------------------------------------------------
// sparse-invert

struct SparseOptions {
  std::string trace_path;
  std::string router;
  std::string meta_path;
  std::string origin = "0,0";
  double resolution = 0.0;
  int width = 0;
  int height = 0;
  std::string mode = "gaussian-midpoint";
  int window = sfw::kDefaultSmoothingWindow;
  int kmax = sfw::kDefaultMaxWalls;
  bool use_true_k = false;
  int step = sfw::kDefaultScoreStep;
  int free_threshold = sfw::kDefaultFreeThreshold;
  double wall_threshold = sfw::kDefaultWallThreshold;
  std::string out_dir;
};

void write_belief_csv(const sfw::WallBeliefGrid& beliefs, const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw sfw::Error(sfw::ErrorCode::kIoFailure, "cannot write " + path.string());
  }
  out << "col,row,mu,sigma\n";
  const auto& g = beliefs.geometry();
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const auto c = g.cell_at(i);
    if (!beliefs.seen(c)) continue;
    out << c.col << ',' << c.row << ',' << sfw::format_double(beliefs.belief(c))
        << ',' << sfw::format_double(beliefs.raw(c).sigma) << '\n';
  }
}

int run_sparse_invert(const SparseOptions& o, const GlobalOptions& glob) {
  sfw::GridGeometry geometry;
  std::optional<sfw::WorldPoint> router;
  if (!o.meta_path.empty()) {
    const auto kv = sfw::KeyValueFile::load(o.meta_path);
    geometry.width = kv.get_int("width");
    geometry.height = kv.get_int("height");
    geometry.resolution = kv.get_double("resolution");
    geometry.origin = {kv.has("origin_x") ? kv.get_double("origin_x") : 0.0,
                       kv.has("origin_y") ? kv.get_double("origin_y") : 0.0};
    if (kv.has("router_x") && kv.has("router_y")) {
      router = sfw::WorldPoint{kv.get_double("router_x"), kv.get_double("router_y")};
    }
  }
  if (o.resolution > 0.0) geometry.resolution = o.resolution;
  if (o.width > 0) geometry.width = o.width;
  if (o.height > 0) geometry.height = o.height;
  if (o.meta_path.empty()) {
    const auto [ox, oy] = parse_pair(o.origin, "--origin");
    geometry.origin = {ox, oy};
  }
  if (!o.router.empty()) {
    const auto [rx, ry] = parse_pair(o.router, "--router");
    router = sfw::WorldPoint{rx, ry};
  }
  if (!router) throw UsageError("router position needed (--router or --meta)");
  if (geometry.width <= 0 || geometry.height <= 0 || geometry.resolution <= 0) {
    throw UsageError("map extent needed (--meta or --width/--height/--resolution)");
  }

  sfw::SparseParams params;
  if (o.mode == "gaussian-midpoint") {
    params.mode = sfw::WallModel::kGaussianMidpoint;
  } else if (o.mode == "literal-eq4") {
    params.mode = sfw::WallModel::kLiteralEq4;
  } else {
    throw UsageError("--mode must be gaussian-midpoint or literal-eq4");
  }
  params.score_step = o.step;
  params.free_threshold = o.free_threshold;
  params.wall_threshold = o.wall_threshold;
  params.threads = glob.threads;

  const fs::path out(o.out_dir);
  fs::create_directories(out);

  auto records = sfw::load_trace_csv(o.trace_path);
  if (records.empty()) {
    throw sfw::Error(sfw::ErrorCode::kEmptyTrajectory, "trace has no rows");
  }
  const bool has_k = records.front().k.has_value();
  if (!has_k) {
    if (o.use_true_k) {
      for (auto& r : records) {
        if (!r.k_true) {
          throw sfw::Error(sfw::ErrorCode::kMalformedFile,
                           "--use-true-k given but trace has no k_true column");
        }
        r.k = r.k_true;
      }
    } else {
      const auto classifier = classify_trace(records, o.window, o.kmax, "");
      classifier.save(out / "classifier.kv");
    }
  }

  std::vector<sfw::TrajectorySample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) samples.push_back({r.position, *r.k, r.collision});

  const auto result = sfw::build_sparse_map(samples, *router, geometry, params);

  sfw::save_pgm(result.occupancy, out / "occupancy.pgm");
  sfw::save_sidecar(geometry, out / "occupancy.pgm");
  sfw::save_pgm(result.free_space.to_image(), out / "free_score.pgm");

  sfw::GridMap belief_img(geometry, std::uint8_t{0});
  sfw::GridMap coverage(geometry, std::uint8_t{0});
  for (std::size_t i = 0; i < geometry.cell_count(); ++i) {
    const auto c = geometry.cell_at(i);
    belief_img.mutable_cells()[i] = static_cast<std::uint8_t>(
        std::lround(255.0 * result.beliefs.belief(c)));
    if (result.free_space.touched(c)) coverage.mutable_cells()[i] = 255;
  }
  sfw::save_pgm(belief_img, out / "belief.pgm");
  sfw::save_pgm(coverage, out / "coverage.pgm");
  write_belief_csv(result.beliefs, out / "belief.csv");
  sfw::save_trace_csv(records, out / "trace_k.csv");
  sfw::save_png(sfw::render_reconstruction(result, samples), out / "figure.png");

  sfw::KeyValueFile kv;
  kv.set("samples", static_cast<int>(samples.size()));
  kv.set("rays", static_cast<int>(result.stats.rays));
  kv.set("skipped_rays", static_cast<int>(result.stats.skipped_rays));
  kv.set("degenerate_rays", static_cast<int>(result.stats.degenerate_rays));
  kv.set("empty_segments", static_cast<int>(result.stats.empty_segments));
  kv.set("telescoping_violations",
         static_cast<int>(result.stats.telescoping_violations));
  kv.set("max_belief", result.beliefs.max_belief());
  kv.save(out / "summary.kv");
  kv.write(std::cout);
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate / render

int run_evaluate(const std::string& result_path, const std::string& truth_path,
                 const std::string& region_path, int tolerance, bool json,
                 const std::string& out_path) {
  const auto result = sfw::load_pgm(result_path);
  const auto truth = sfw::load_pgm(truth_path);
  std::vector<std::uint8_t> region;
  if (!region_path.empty()) {
    const auto mask = sfw::load_pgm(region_path);
    region.assign(mask.cells().begin(), mask.cells().end());
  }
  const auto report = sfw::evaluate(result, truth, tolerance, region);
  std::ostringstream text;
  if (json) {
    text << sfw::report_to_json(report) << '\n';
  } else {
    sfw::report_to_kv(report).write(text);
  }
  std::cout << text.str();
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << text.str();
  }
  return 0;
}

int run_render(const std::string& kind, const std::string& in_path,
               const std::string& trace_path, const std::string& out_path) {
  sfw::GridMap grid = sfw::load_pgm(in_path);
  std::optional<sfw::Image> image;
  if (kind == "occupancy") {
    image = sfw::render_occupancy(grid);
  } else if (kind == "kgrid") {
    image = sfw::render_kgrid(sfw::kgrid_from_image(grid));
  } else if (kind == "belief") {
    sfw::WallBeliefGrid beliefs(grid.geometry());
    for (std::size_t i = 0; i < grid.cells().size(); ++i) {
      if (grid.cells()[i] > 0) {
        beliefs.fuse_beliefs(grid.geometry().cell_at(i), grid.cells()[i] / 255.0, 1.0);
      }
    }
    image = sfw::render_belief(beliefs);
  } else {
    throw sfw::Error(sfw::ErrorCode::kUnsupportedGridKind,
                     "unknown grid kind '" + kind + "'");
  }
  if (!trace_path.empty()) {
    std::vector<sfw::TrajectorySample> samples;
    for (const auto& r : sfw::load_trace_csv(trace_path)) {
      samples.push_back({r.position, r.k.value_or(r.k_true.value_or(0)), false});
    }
    sfw::overlay_trajectory(*image, grid.geometry(), samples);
  }
  sfw::save_png(*image, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"sfw - occupancy maps from a trajectory and WiFi RSSI"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions glob;
  app.add_option("--seed", glob.seed, "Seed for simulated noise")->capture_default_str();
  app.add_option("--threads", glob.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic RSSI trace");
  simulate->add_option("--scenario", sim.scenario, "Built-in scenario (three-room)");
  simulate->add_option("--map", sim.map_path, "Ground-truth map PGM");
  simulate->add_option("--router", sim.router, "Router position X,Y in meters");
  simulate->add_option("--trajectory", sim.trajectory_path,
                       "CSV with x,y waypoints (t column required, ignored)");
  simulate->add_option("--samples", sim.samples, "Samples along the trajectory")
      ->capture_default_str();
  simulate->add_option("--rate", sim.rate, "Sample rate in Hz")->capture_default_str();
  simulate->add_option("--p0", sim.params.p0, "dBm at 1 m")->capture_default_str();
  simulate->add_option("--exponent", sim.params.exponent, "Path-loss exponent")
      ->capture_default_str();
  simulate->add_option("--wall-loss", sim.params.wall_loss, "dB per wall")
      ->capture_default_str();
  simulate->add_option("--noise", sim.params.noise_sigma, "Noise std-dev in dB")
      ->capture_default_str();
  simulate->add_option("--config", sim.config_path, "key=value path-loss parameters");
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();

  std::string kvis_map, kvis_router, kvis_out, kvis_png;
  auto* kvis = app.add_subcommand("kvis", "k-visibility plot of a known map");
  kvis->add_option("--map", kvis_map, "Map PGM")->required();
  kvis->add_option("--router", kvis_router, "Router cell COL,ROW")->required();
  kvis->add_option("--out", kvis_out, "KGrid PGM")->required();
  kvis->add_option("--png", kvis_png, "Colored rendering");

  std::string dense_kgrid, dense_router, dense_out;
  auto* dense = app.add_subcommand("dense-invert", "Wall outline from a full k-plot");
  dense->add_option("--kgrid", dense_kgrid, "KGrid PGM")->required();
  dense->add_option("--router", dense_router, "Router cell COL,ROW")->required();
  dense->add_option("--out", dense_out, "Wall map PGM")->required();

  ClassifyOptions cls;
  auto* classify = app.add_subcommand("classify", "RSSI trace to wall counts");
  classify->add_option("--trace", cls.trace_path, "Trace CSV with rssi")->required();
  classify->add_option("--out", cls.out_path, "Classified trace CSV")->required();
  classify->add_option("--window", cls.window, "Median window (odd)")->capture_default_str();
  classify->add_option("--kmax", cls.kmax, "Maximum wall count K")->capture_default_str();
  classify->add_option("--model", cls.model_in, "Reuse a saved classifier");
  classify->add_option("--model-out", cls.model_out, "Save the fitted classifier");

  SparseOptions sp;
  auto* sparse = app.add_subcommand("sparse-invert", "Map from trajectory k-values");
  sparse->add_option("--trace", sp.trace_path, "Trace CSV")->required();
  sparse->add_option("--router", sp.router, "Router X,Y in meters");
  sparse->add_option("--meta", sp.meta_path, "key=value map extent (and router)");
  sparse->add_option("--resolution", sp.resolution, "Meters per cell");
  sparse->add_option("--width", sp.width, "Cells");
  sparse->add_option("--height", sp.height, "Cells");
  sparse->add_option("--origin", sp.origin, "World X,Y of cell (0,0) corner")
      ->capture_default_str();
  sparse->add_option("--mode", sp.mode, "gaussian-midpoint | literal-eq4")
      ->capture_default_str();
  sparse->add_option("--window", sp.window, "Median window (odd)")->capture_default_str();
  sparse->add_option("--kmax", sp.kmax, "Maximum wall count K")->capture_default_str();
  sparse->add_flag("--use-true-k", sp.use_true_k, "Use the k_true column");
  sparse->add_option("--step", sp.step, "Free-score step")->capture_default_str();
  sparse->add_option("--free-threshold", sp.free_threshold, "Free score cutoff")
      ->capture_default_str();
  sparse->add_option("--wall-threshold", sp.wall_threshold,
                     "Wall cutoff as a fraction of the largest belief")
      ->capture_default_str();
  sparse->add_option("--out", sp.out_dir, "Output directory")->required();

  std::string ev_result, ev_truth, ev_region, ev_out;
  int ev_tol = 1;
  bool ev_json = false;
  auto* eval = app.add_subcommand("evaluate", "Compare a map against ground truth");
  eval->add_option("--result", ev_result, "Reconstructed map PGM")->required();
  eval->add_option("--truth", ev_truth, "Ground-truth map PGM")->required();
  eval->add_option("--region", ev_region, "Mask PGM restricting the comparison");
  eval->add_option("--tolerance", ev_tol, "Wall match radius in cells")
      ->capture_default_str();
  eval->add_flag("--json", ev_json, "Emit JSON instead of key=value");
  eval->add_option("--out", ev_out, "Also write the report here");

  std::string r_kind, r_in, r_trace, r_out;
  auto* render = app.add_subcommand("render", "PGM grid to PNG");
  render->add_option("--kind", r_kind, "occupancy | kgrid | belief")->required();
  render->add_option("--in", r_in, "Input PGM")->required();
  render->add_option("--trace", r_trace, "Overlay this trace colored by k");
  render->add_option("--out", r_out, "PNG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(sim, glob);
    if (*kvis) return run_kvis(kvis_map, kvis_router, kvis_out, kvis_png, glob);
    if (*dense) return run_dense_invert(dense_kgrid, dense_router, dense_out);
    if (*classify) return run_classify(cls);
    if (*sparse) return run_sparse_invert(sp, glob);
    if (*eval) return run_evaluate(ev_result, ev_truth, ev_region, ev_tol, ev_json, ev_out);
    if (*render) return run_render(r_kind, r_in, r_trace, r_out);
  } catch (const UsageError& e) {
    std::cerr << "error=Usage message=\"" << e.what() << "\"\n";
    return kExitUsage;
  } catch (const sfw::Error& e) {
    std::cerr << "error=" << sfw::error_code_name(e.code()) << " message=\""
              << e.what() << "\"\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error=Internal message=\"" << e.what() << "\"\n";
    return kExitFailure;
  }
  return kExitUsage;
}
