/**
  @file
  @brief Correctness harness: bitwise grid comparison, surface-property
         checks, and the tiled-vs-serial sweep over many tile dimensions.
*/
#ifndef tileflood_verify_hpp
#define tileflood_verify_hpp

#include <bit>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tileflood/fixpoint.hpp"
#include "tileflood/io.hpp"
#include "tileflood/manifest.hpp"
#include "tileflood/orchestrator.hpp"
#include "tileflood/tile_fill.hpp"

namespace tileflood {

namespace detail {
template <class T>
auto cell_bits(T v) {
  using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>,
      std::conditional_t<sizeof(T) == 4, std::int32_t, std::int64_t>, T>>;
  return std::bit_cast<U>(v);
}
}  // namespace detail

/// First cell (row-major) at which the grids differ bitwise, with formatted
/// values; or a dimension/sentinel complaint; or nullopt when identical.
template <class T>
std::optional<std::string> compare_grids(const Grid<T>& a, const Grid<T>& b) {
  if (a.width() != b.width() || a.height() != b.height())
    return "dimensions differ: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
           " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height());
  if (detail::cell_bits(a.nodata) != detail::cell_bits(b.nodata))
    return std::string("NoData sentinels differ");
  for (int r = 0; r < a.height(); r++)
    for (int c = 0; c < a.width(); c++)
      if (detail::cell_bits(a.cells(r, c)) != detail::cell_bits(b.cells(r, c))) {
        std::ostringstream os;
        os << "first difference at (" << r << "," << c << "): "
           << detail::format_cell(a.cells(r, c)) << " vs " << detail::format_cell(b.cells(r, c));
        return os.str();
      }
  return std::nullopt;
}

/// W >= Z cellwise, and NoData cells are untouched in both directions.
template <class T>
bool filled_covers_input(const Grid<T>& w, const Grid<T>& z) {
  if (w.width() != z.width() || w.height() != z.height()) return false;
  const FloodOrder<T> ord{z.nodata};
  for (std::size_t i = 0; i < z.size(); i++) {
    const T zv = z.cells.data()[i];
    const T wv = w.cells.data()[i];
    if (ord.is_nodata(zv) != ord.is_nodata(wv)) return false;
    if (!ord.is_nodata(zv) && ord.less(wv, zv)) return false;
  }
  return true;
}

/// Every data cell has a non-ascending path to an outlet (the DEM border or
/// a NoData cell). Checked by growing the reached set from the outlets
/// across steps that never ascend toward them.
template <class T>
bool drains_everywhere(const Grid<T>& w) {
  const int width = w.width();
  const int height = w.height();
  const FloodOrder<T> ord{w.nodata};

  Array2D<std::uint8_t> reached(height, width, 0);
  std::queue<std::pair<int, int>> todo;
  for (int r = 0; r < height; r++)
    for (int c = 0; c < width; c++)
      if (r == 0 || r == height - 1 || c == 0 || c == width - 1 ||
          ord.is_nodata(w.cells(r, c))) {
        reached(r, c) = 1;
        todo.emplace(r, c);
      }

  while (!todo.empty()) {
    const auto [r, c] = todo.front();
    todo.pop();
    for_each_neighbor(r, c, height, width, [&](int nr, int nc) {
      // nr,nc can step down onto r,c iff its elevation is not below ours
      if (!reached(nr, nc) && ord.leq(w.cells(r, c), w.cells(nr, nc))) {
        reached(nr, nc) = 1;
        todo.emplace(nr, nc);
      }
    });
  }

  for (std::size_t i = 0; i < reached.size(); i++)
    if (!reached.data()[i]) return false;
  return true;
}

struct VerifyConfig {
  std::vector<std::pair<int, int>> tile_dims;  // empty = default sweep
  std::vector<Strategy> strategies = {Strategy::Evict, Strategy::Cache, Strategy::CacheC,
                                      Strategy::Retain};
  int workers = 2;
  std::string work_dir;  // scratch space; created and reused
};

/// Tile-dimension sweep covering degenerate, square, ragged, single-row and
/// single-column layouts.
inline std::vector<std::pair<int, int>> default_tile_sweep(int dem_w, int dem_h) {
  auto ceil_div = [](int a, int b) { return (a + b - 1) / b; };
  std::vector<std::pair<int, int>> dims = {
      {dem_w, dem_h},                              // whole DEM as one tile
      {ceil_div(dem_w, 2), ceil_div(dem_h, 2)},    // 2x2
      {ceil_div(dem_w, 3), ceil_div(dem_h, 3)},    // 3x3, usually ragged
      {ceil_div(dem_w, 4), dem_h},                 // single row of tiles
      {dem_w, ceil_div(dem_h, 4)},                 // single column of tiles
      {dem_w / 7 > 0 ? dem_w / 7 : 1, dem_h / 5 > 0 ? dem_h / 5 : 1},  // uneven ragged
      {dem_w < 8 ? (dem_w < 2 ? 1 : 2) : 8, dem_h < 8 ? (dem_h < 2 ? 1 : 2) : 8},  // small tiles
      {ceil_div(2 * dem_w, 3), ceil_div(2 * dem_h, 3)},  // very ragged 2x2
      {1, dem_h},                                  // width-1 tiles
      {dem_w, 1},                                  // height-1 tiles
  };
  std::vector<std::pair<int, int>> out;
  for (auto d : dims) {
    bool dup = false;
    for (auto e : out) dup |= d == e;
    if (!dup) out.push_back(d);
  }
  return out;
}

struct VerifyOutcome {
  bool pass = true;
  std::vector<std::string> lines;
};

/**
  @brief Checks the tiled algorithm against the serial filler on one DEM.

  Establishes the authoritative answer with serial_priority_flood (itself
  cross-checked against the brute-force fixpoint filler when the input is
  small), then runs every tile-dimension/strategy combination and compares
  the reassembled mosaic bitwise.
*/
template <class T>
VerifyOutcome verify_dem(const Grid<T>& dem, const VerifyConfig& cfg) {
  namespace fs = std::filesystem;
  VerifyOutcome outcome;

  const Grid<T> authoritative = serial_priority_flood(dem);

  if (dem.size() <= 10000) {
    const Grid<T> oracle = fixpoint_fill_oracle(dem);
    if (auto diff = compare_grids(authoritative, oracle)) {
      outcome.pass = false;
      outcome.lines.push_back("MISMATCH serial vs fixpoint oracle: " + *diff);
    } else {
      outcome.lines.push_back("ok serial == fixpoint oracle");
    }
  }

  const fs::path work = cfg.work_dir.empty() ? fs::temp_directory_path() / "tileflood_verify"
                                             : fs::path(cfg.work_dir);
  fs::create_directories(work);
  const std::string dem_path = (work / "input.rdtl").string();
  write_rdtl(dem, dem_path);

  const auto dims = cfg.tile_dims.empty() ? default_tile_sweep(dem.width(), dem.height())
                                          : cfg.tile_dims;

  int run_id = 0;
  for (const auto& [tw, th] : dims) {
    for (Strategy strategy : cfg.strategies) {
      const fs::path run_dir = work / ("run" + std::to_string(run_id++));
      fs::remove_all(run_dir);
      const TileLayout layout =
          tile_monolithic(dem_path, tw, th, (run_dir / "tiles").string());

      RunConfig rc;
      rc.strategy = strategy;
      rc.workers = cfg.workers;
      rc.output_dir = (run_dir / "out").string();
      rc.cache_dir = (run_dir / "cache").string();
      run_fill<T>(layout, rc);

      const TileLayout out_layout = read_manifest(rc.output_dir + "/tiles.txt");
      const Grid<T> got = mosaic_as<T>(out_layout);

      std::ostringstream tag;
      tag << "tiles " << tw << "x" << th << " (" << layout.tiles_wide() << "x"
          << layout.tiles_high() << " grid) strategy " << strategy_name(strategy)
          << " workers " << cfg.workers;
      if (auto diff = compare_grids(got, authoritative)) {
        outcome.pass = false;
        outcome.lines.push_back("MISMATCH " + tag.str() + ": " + *diff);
      } else {
        outcome.lines.push_back("ok " + tag.str());
      }
      fs::remove_all(run_dir);
    }
  }
  return outcome;
}

}  // namespace tileflood

#endif
