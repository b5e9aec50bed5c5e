/**
  @file
  @brief Command-line driver: tile+fill rasters, verify against the serial
         reference, benchmark scaling, and generate synthetic terrain.
*/
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "tileflood/io.hpp"
#include "tileflood/manifest.hpp"
#include "tileflood/orchestrator.hpp"
#include "tileflood/synth.hpp"
#include "tileflood/verify.hpp"

namespace fs = std::filesystem;
using namespace tileflood;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  if (out.empty()) throw std::runtime_error("empty list: " + s);
  return out;
}

int cmd_fill(const std::string& input, const std::string& manifest, int tile_w, int tile_h,
             const std::string& strategy, int workers, const std::string& output,
             std::string cache_dir, const std::string& stats_path, const std::string& ascii_dtype) {
  TileLayout layout;
  if (!input.empty()) {
    if (tile_w < 1 || tile_h < 1)
      throw std::runtime_error("--input requires --tile-width and --tile-height");
    layout = tile_monolithic(input, tile_w, tile_h, (fs::path(output) / "input_tiles").string(),
                             nullptr, dtype_from_name(ascii_dtype));
  } else {
    layout = read_manifest(manifest);
  }

  RunConfig cfg;
  cfg.strategy = strategy_from_name(strategy);
  cfg.workers = workers;
  cfg.output_dir = output;
  if (cache_dir.empty()) cache_dir = (fs::path(output) / "cache").string();
  cfg.cache_dir = cache_dir;

  const RunStats stats = run_fill_any(layout, cfg);

  if (stats_path.empty()) {
    write_stats_report(stats, std::cout);
  } else {
    std::ofstream out(stats_path);
    if (!out) throw std::runtime_error("cannot create stats file " + stats_path);
    write_stats_report(stats, out);
  }
  std::cerr << "filled " << stats.total_cells() << " cells across " << stats.tiles.size()
            << " tiles -> " << output << "\n";
  return 0;
}

int cmd_verify(const std::string& input, int width, int height, const std::string& dtype,
               std::uint64_t seed, int workers, const std::string& work_dir,
               const std::string& ascii_dtype) {
  AnyGrid dem = input.empty()
                    ? synth_dem_any(height, width, dtype_from_name(dtype), seed)
                    : read_raster(input, nullptr, dtype_from_name(ascii_dtype));

  const std::uint64_t cells = std::visit([](const auto& g) { return (std::uint64_t)g.size(); }, dem);
  if (cells > 4000000)
    throw std::runtime_error("verify input too large for the serial oracle (max 4e6 cells)");

  VerifyConfig cfg;
  cfg.workers = workers;
  cfg.work_dir = work_dir;

  const VerifyOutcome outcome =
      std::visit([&](const auto& g) { return verify_dem(g, cfg); }, dem);
  for (const auto& line : outcome.lines) std::cout << line << "\n";
  std::cout << (outcome.pass ? "VERIFY PASS" : "VERIFY FAIL") << " (" << outcome.lines.size()
            << " configurations)\n";
  return outcome.pass ? 0 : 1;
}

int cmd_bench(const std::string& input, std::uint64_t synth_cells, std::uint64_t seed,
              const std::string& workers_list, int tile_w, int tile_h,
              const std::string& strategy, const std::string& work_dir,
              const std::string& ascii_dtype) {
  const fs::path work = work_dir.empty() ? fs::temp_directory_path() / "tileflood_bench"
                                         : fs::path(work_dir);
  fs::create_directories(work);

  std::string dem_path = input;
  if (dem_path.empty()) {
    int side = 1;
    while ((std::uint64_t)(side + 1) * (side + 1) <= synth_cells) side++;
    const AnyGrid dem = synth_dem_any(side, side, DType::F32, seed);
    dem_path = (work / "bench_input.rdtl").string();
    write_raster(dem, dem_path);
  }

  const TileLayout layout =
      tile_monolithic(dem_path, tile_w, tile_h, (work / "tiles").string(), nullptr,
                      dtype_from_name(ascii_dtype));
  const std::uint64_t cells = layout.total_cells();

  // speed-up and efficiency are defined against the measured 1-worker time
  std::vector<int> workers = parse_int_list(workers_list);
  if (std::find(workers.begin(), workers.end(), 1) == workers.end())
    workers.insert(workers.begin(), 1);

  double t1 = 0.0;
  for (int p : workers) {
    RunConfig cfg;
    cfg.strategy = strategy_from_name(strategy);
    cfg.workers = p;
    cfg.output_dir = (work / ("out_p" + std::to_string(p))).string();
    cfg.cache_dir = (work / ("cache_p" + std::to_string(p))).string();
    const RunStats stats = run_fill_any(layout, cfg);
    if (p == 1) t1 = stats.wall_ms;
    const double speedup = t1 / stats.wall_ms;
    const double efficiency = t1 / (p * stats.wall_ms);
    std::cout << "bench workers " << p << " cells " << cells << " wall_ms " << stats.wall_ms
              << " speedup " << speedup << " efficiency " << efficiency << " cells_per_sec "
              << (1000.0 * cells / stats.wall_ms) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tiled Priority-Flood depression filling"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic DEM");
  std::string sy_output;
  int sy_width = 200, sy_height = 200;
  std::string sy_dtype = "f32";
  std::uint64_t sy_seed = 1;
  synth->add_option("--output", sy_output, "output raster (.rdtl or .asc)")->required();
  synth->add_option("--width", sy_width, "cells per row");
  synth->add_option("--height", sy_height, "rows");
  synth->add_option("--dtype", sy_dtype, "i16|i32|f32|f64");
  synth->add_option("--seed", sy_seed, "random seed");

  // fill
  auto* fill = app.add_subcommand("fill", "depression-fill a raster or pre-tiled layout");
  std::string fi_input, fi_manifest, fi_strategy = "evict", fi_output, fi_cache, fi_stats;
  std::string fi_ascii_dtype = "f32";
  int fi_tw = 0, fi_th = 0, fi_workers = 1;
  fill->add_option("--input", fi_input, "monolithic input raster (.rdtl or .asc)");
  fill->add_option("--manifest", fi_manifest, "pre-tiled layout manifest");
  fill->add_option("--tile-width", fi_tw, "tile width when tiling --input");
  fill->add_option("--tile-height", fi_th, "tile height when tiling --input");
  fill->add_option("--strategy", fi_strategy, "evict|cache|cachec|retain");
  fill->add_option("--workers", fi_workers, "consumer count")->check(CLI::PositiveNumber);
  fill->add_option("--output", fi_output, "output directory")->required();
  fill->add_option("--cache-dir", fi_cache, "intermediate cache directory")
      ->envname("TILEFLOOD_CACHE_DIR");
  fill->add_option("--stats", fi_stats, "write the per-tile stats report here");
  fill->add_option("--ascii-dtype", fi_ascii_dtype, "cell type for .asc inputs");

  // verify
  auto* verify = app.add_subcommand("verify", "check tiled output against the serial reference");
  std::string ve_input, ve_dtype = "f32", ve_work, ve_ascii_dtype = "f32";
  int ve_width = 120, ve_height = 96, ve_workers = 2;
  std::uint64_t ve_seed = 1;
  verify->add_option("--input", ve_input, "input raster; omitted = synthesize");
  verify->add_option("--width", ve_width, "synthetic width");
  verify->add_option("--height", ve_height, "synthetic height");
  verify->add_option("--dtype", ve_dtype, "synthetic dtype");
  verify->add_option("--seed", ve_seed, "synthetic seed");
  verify->add_option("--workers", ve_workers, "consumer count")->check(CLI::PositiveNumber);
  verify->add_option("--work-dir", ve_work, "scratch directory");
  verify->add_option("--ascii-dtype", ve_ascii_dtype, "cell type for .asc inputs");

  // bench
  auto* bench = app.add_subcommand("bench", "measure wall time and scaling");
  std::string be_input, be_workers = "1,2,4,8", be_strategy = "retain", be_work;
  std::string be_ascii_dtype = "f32";
  std::uint64_t be_cells = 1000000, be_seed = 1;
  int be_tw = 500, be_th = 500;
  bench->add_option("--input", be_input, "input raster; omitted = synthesize");
  bench->add_option("--synth-cells", be_cells, "synthetic DEM size in cells");
  bench->add_option("--seed", be_seed, "synthetic seed");
  bench->add_option("--workers", be_workers, "comma-separated worker counts");
  bench->add_option("--tile-width", be_tw, "tile width");
  bench->add_option("--tile-height", be_th, "tile height");
  bench->add_option("--strategy", be_strategy, "evict|cache|cachec|retain");
  bench->add_option("--work-dir", be_work, "scratch directory");
  bench->add_option("--ascii-dtype", be_ascii_dtype, "cell type for .asc inputs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      write_raster(synth_dem_any(sy_height, sy_width, dtype_from_name(sy_dtype), sy_seed),
                   sy_output);
      std::cerr << "wrote " << sy_output << " (" << sy_width << "x" << sy_height << ")\n";
      return 0;
    }
    if (fill->parsed()) {
      if (fi_input.empty() == fi_manifest.empty())
        throw std::runtime_error("fill needs exactly one of --input / --manifest");
      return cmd_fill(fi_input, fi_manifest, fi_tw, fi_th, fi_strategy, fi_workers, fi_output,
                      fi_cache, fi_stats, fi_ascii_dtype);
    }
    if (verify->parsed())
      return cmd_verify(ve_input, ve_width, ve_height, ve_dtype, ve_seed, ve_workers, ve_work,
                        ve_ascii_dtype);
    if (bench->parsed())
      return cmd_bench(be_input, be_cells, be_seed, be_workers, be_tw, be_th, be_strategy,
                       be_work, be_ascii_dtype);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
