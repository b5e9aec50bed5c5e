/**
  @file
  @brief Tile layout geometry and perimeter extraction.

  A layout is a rectangular grid of tiles in which tiles in a row share their
  height and tiles in a column share their width, so any two adjacent tiles
  share the entire length of their adjoining edge.
*/
#ifndef tileflood_tiling_hpp
#define tileflood_tiling_hpp

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tileflood/raster.hpp"

namespace tileflood {

/// Which sides of a tile lie on the boundary of the whole DEM.
struct EdgeFlags {
  bool north = false;
  bool south = false;
  bool west = false;
  bool east = false;
};

struct TileSpec {
  int row = 0;   // tile coordinate within the layout
  int col = 0;
  int width = 0;   // pixel dimensions
  int height = 0;
  std::string path;  // source raster for this tile
};

class TileLayout {
 public:
  TileLayout() = default;
  TileLayout(int tiles_high, int tiles_wide)
      : tiles_high_(tiles_high), tiles_wide_(tiles_wide),
        tiles_(static_cast<std::size_t>(tiles_high) * tiles_wide) {
    if (tiles_high < 1 || tiles_wide < 1)
      throw std::invalid_argument("layout must have at least one tile");
  }

  int tiles_high() const { return tiles_high_; }
  int tiles_wide() const { return tiles_wide_; }
  int tile_count() const { return tiles_high_ * tiles_wide_; }

  TileSpec& at(int trow, int tcol) { return tiles_[index(trow, tcol)]; }
  const TileSpec& at(int trow, int tcol) const { return tiles_[index(trow, tcol)]; }
  TileSpec& at_index(int idx) { return tiles_[idx]; }
  const TileSpec& at_index(int idx) const { return tiles_[idx]; }

  int index(int trow, int tcol) const {
    if (trow < 0 || trow >= tiles_high_ || tcol < 0 || tcol >= tiles_wide_)
      throw std::out_of_range("tile coordinate outside layout");
    return trow * tiles_wide_ + tcol;
  }

  EdgeFlags edge_flags(int trow, int tcol) const {
    EdgeFlags f;
    f.north = trow == 0;
    f.south = trow == tiles_high_ - 1;
    f.west = tcol == 0;
    f.east = tcol == tiles_wide_ - 1;
    return f;
  }

  std::uint64_t total_cells() const {
    std::uint64_t n = 0;
    for (const auto& t : tiles_)
      n += static_cast<std::uint64_t>(t.width) * t.height;
    return n;
  }

  int dem_width() const {
    int w = 0;
    for (int c = 0; c < tiles_wide_; c++) w += at(0, c).width;
    return w;
  }
  int dem_height() const {
    int h = 0;
    for (int r = 0; r < tiles_high_; r++) h += at(r, 0).height;
    return h;
  }

  /// Checks the tiling constraints: every slot filled, positive dimensions,
  /// consistent row heights and column widths.
  void validate() const {
    for (int r = 0; r < tiles_high_; r++) {
      for (int c = 0; c < tiles_wide_; c++) {
        const TileSpec& t = at(r, c);
        if (t.row != r || t.col != c)
          throw std::runtime_error("layout slot (" + std::to_string(r) + "," +
                                   std::to_string(c) + ") holds tile (" +
                                   std::to_string(t.row) + "," + std::to_string(t.col) + ")");
        if (t.width < 1 || t.height < 1)
          throw std::runtime_error("tile (" + std::to_string(r) + "," + std::to_string(c) +
                                   ") has non-positive dimensions");
        if (t.height != at(r, 0).height)
          throw std::runtime_error("tiles in row " + std::to_string(r) +
                                   " do not share a height");
        if (t.width != at(0, c).width)
          throw std::runtime_error("tiles in column " + std::to_string(c) +
                                   " do not share a width");
      }
    }
  }

 private:
  int tiles_high_ = 0;
  int tiles_wide_ = 0;
  std::vector<TileSpec> tiles_;
};

/// One side of a tile perimeter: elevations and labels in scan order
/// (west->east for north/south, north->south for west/east).
template <class T>
struct SideVectors {
  std::vector<T> elev;
  std::vector<std::uint32_t> label;
};

/// All four perimeter sides. Corner cells appear in both adjoining sides, so
/// the total number of slots is 2*width + 2*height.
template <class T>
struct EdgeVectors {
  SideVectors<T> north, south, west, east;
};

template <class T>
EdgeVectors<T> extract_edges(const Grid<T>& dem, const LabelGrid& labels) {
  if (dem.width() != labels.width() || dem.height() != labels.height())
    throw std::invalid_argument("extract_edges: dem and labels dimensions differ");

  const int w = dem.width();
  const int h = dem.height();
  EdgeVectors<T> out;
  out.north.elev.reserve(w); out.north.label.reserve(w);
  out.south.elev.reserve(w); out.south.label.reserve(w);
  out.west.elev.reserve(h);  out.west.label.reserve(h);
  out.east.elev.reserve(h);  out.east.label.reserve(h);

  for (int c = 0; c < w; c++) {
    out.north.elev.push_back(dem.cells(0, c));
    out.north.label.push_back(labels(0, c));
    out.south.elev.push_back(dem.cells(h - 1, c));
    out.south.label.push_back(labels(h - 1, c));
  }
  for (int r = 0; r < h; r++) {
    out.west.elev.push_back(dem.cells(r, 0));
    out.west.label.push_back(labels(r, 0));
    out.east.elev.push_back(dem.cells(r, w - 1));
    out.east.label.push_back(labels(r, w - 1));
  }
  return out;
}

}  // namespace tileflood

#endif
