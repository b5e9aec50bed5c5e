/**
  @file
  @brief Layout manifests, splitting monolithic rasters into tiles, and the
         mosaic used to reassemble outputs.

  Manifest format: first line `tiles <grid_width> <grid_height>`, then one
  line per tile `tile <row> <col> <width> <height> <path>`. Paths are stored
  relative to the manifest and resolved on load.
*/
#ifndef tileflood_manifest_hpp
#define tileflood_manifest_hpp

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tileflood/io.hpp"
#include "tileflood/tiling.hpp"

namespace tileflood {

inline void write_manifest(const TileLayout& layout, const std::string& path) {
  std::ostringstream out;
  out << "tiles " << layout.tiles_wide() << " " << layout.tiles_high() << "\n";
  const auto base = std::filesystem::path(path).parent_path();
  for (int r = 0; r < layout.tiles_high(); r++) {
    for (int c = 0; c < layout.tiles_wide(); c++) {
      const TileSpec& t = layout.at(r, c);
      out << "tile " << r << " " << c << " " << t.width << " " << t.height << " "
          << std::filesystem::relative(t.path, base.empty() ? "." : base).generic_string()
          << "\n";
    }
  }
  const std::string s = out.str();
  spew_file(path, reinterpret_cast<const unsigned char*>(s.data()), s.size());
}

inline TileLayout read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path);
  const auto base = std::filesystem::path(path).parent_path();

  std::string word;
  int gw = 0, gh = 0;
  if (!(in >> word >> gw >> gh) || word != "tiles" || gw < 1 || gh < 1)
    throw std::runtime_error(path + ": manifest must start with 'tiles <gw> <gh>'");

  TileLayout layout(gh, gw);
  int seen = 0;
  TileSpec t;
  while (in >> word) {
    if (word != "tile") throw std::runtime_error(path + ": expected 'tile' line");
    std::string rel;
    if (!(in >> t.row >> t.col >> t.width >> t.height >> rel))
      throw std::runtime_error(path + ": malformed tile line");
    t.path = (base / rel).lexically_normal().string();
    layout.at(t.row, t.col) = t;
    seen++;
  }
  if (seen != layout.tile_count())
    throw std::runtime_error(path + ": manifest lists " + std::to_string(seen) + " tiles, layout needs " +
                             std::to_string(layout.tile_count()));
  layout.validate();
  return layout;
}

/// Computes the tile grid for a monolithic raster: ceil(W/tw) x ceil(H/th)
/// tiles with a ragged last row/column.
inline TileLayout plan_tiles(int dem_width, int dem_height, int tile_w, int tile_h) {
  if (tile_w < 1 || tile_h < 1)
    throw std::invalid_argument("tile dimensions must be >= 1");
  const int gw = (dem_width + tile_w - 1) / tile_w;
  const int gh = (dem_height + tile_h - 1) / tile_h;
  TileLayout layout(gh, gw);
  for (int r = 0; r < gh; r++) {
    for (int c = 0; c < gw; c++) {
      TileSpec& t = layout.at(r, c);
      t.row = r;
      t.col = c;
      t.width = c == gw - 1 ? dem_width - tile_w * (gw - 1) : tile_w;
      t.height = r == gh - 1 ? dem_height - tile_h * (gh - 1) : tile_h;
    }
  }
  return layout;
}

/**
  @brief Splits a monolithic raster into tile files plus a manifest.

  @return the resulting layout, with tile paths `<out_dir>/<row>_<col>.rdtl`
          and manifest `<out_dir>/tiles.txt`.
*/
inline TileLayout tile_monolithic(const std::string& input_path, int tile_w, int tile_h,
                                  const std::string& out_dir, CellCounter* counter = nullptr,
                                  DType ascii_dtype = DType::F32) {
  const AnyGrid any = read_raster(input_path, counter, ascii_dtype);
  std::filesystem::create_directories(out_dir);

  return std::visit([&](const auto& dem) {
    using T = std::decay_t<decltype(dem.nodata)>;
    TileLayout layout = plan_tiles(dem.width(), dem.height(), tile_w, tile_h);
    for (int r = 0; r < layout.tiles_high(); r++) {
      for (int c = 0; c < layout.tiles_wide(); c++) {
        TileSpec& t = layout.at(r, c);
        const int r0 = r * tile_h;
        const int c0 = c * tile_w;
        Grid<T> tile(t.height, t.width, dem.nodata);
        for (int rr = 0; rr < t.height; rr++)
          for (int cc = 0; cc < t.width; cc++)
            tile.cells(rr, cc) = dem.cells(r0 + rr, c0 + cc);
        t.path = (std::filesystem::path(out_dir) /
                  (std::to_string(r) + "_" + std::to_string(c) + ".rdtl")).string();
        write_rdtl(tile, t.path, counter);
      }
    }
    write_manifest(layout, (std::filesystem::path(out_dir) / "tiles.txt").string());
    return layout;
  }, any);
}

/// Reassembles a layout's tiles into one grid (verification harness use).
template <class T>
Grid<T> mosaic_as(const TileLayout& layout, CellCounter* counter = nullptr) {
  layout.validate();
  const int W = layout.dem_width();
  const int H = layout.dem_height();

  Grid<T> first = read_rdtl_as<T>(layout.at(0, 0).path, counter);
  Grid<T> out(H, W, first.nodata);

  int r0 = 0;
  for (int r = 0; r < layout.tiles_high(); r++) {
    int c0 = 0;
    for (int c = 0; c < layout.tiles_wide(); c++) {
      const TileSpec& t = layout.at(r, c);
      const Grid<T> tile = (r == 0 && c == 0) ? std::move(first)
                                              : read_rdtl_as<T>(t.path, counter);
      if (tile.width() != t.width || tile.height() != t.height)
        throw std::runtime_error(t.path + ": tile dimensions disagree with layout");
      if (tile.nodata != out.nodata)
        throw std::runtime_error(t.path + ": tile NoData sentinel differs from layout");
      for (int rr = 0; rr < t.height; rr++)
        for (int cc = 0; cc < t.width; cc++)
          out.cells(r0 + rr, c0 + cc) = tile.cells(rr, cc);
      c0 += t.width;
    }
    r0 += layout.at(r, 0).height;
  }
  return out;
}

inline AnyGrid mosaic(const TileLayout& layout, CellCounter* counter = nullptr) {
  switch (peek_rdtl_dtype(layout.at(0, 0).path)) {
    case DType::I16: return mosaic_as<std::int16_t>(layout, counter);
    case DType::I32: return mosaic_as<std::int32_t>(layout, counter);
    case DType::F32: return mosaic_as<float>(layout, counter);
    case DType::F64: return mosaic_as<double>(layout, counter);
  }
  throw std::runtime_error("unknown dtype in layout");
}

}  // namespace tileflood

#endif
