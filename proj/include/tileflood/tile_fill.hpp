/**
  @file
  @brief Per-tile depression filling with watershed labeling and
         spillover-graph construction, plus the serial whole-DEM filler used
         as the reference answer.

  The tile fill floods inward from a min-first priority queue seeded with the
  tile perimeter and every NoData cell. NoData regions are outlets: they sort
  below all data, flood first, keep their sentinel value, and their labels
  are connected to the virtual edge node at the bottom sentinel. A plain
  queue accelerates cells raised to the current flood level.
*/
#ifndef tileflood_tile_fill_hpp
#define tileflood_tile_fill_hpp

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "tileflood/graph.hpp"
#include "tileflood/raster.hpp"
#include "tileflood/tiling.hpp"

namespace tileflood {

template <class T>
struct FilledTile {
  Grid<T> filled;
  LabelGrid labels;
  SpilloverGraph<T> graph;
  std::uint32_t max_label = kEdgeLabel;  // labels used are 2..max_label
};

namespace detail {

template <class T>
struct FloodEntry {
  std::uint8_t rank;  // 0 = NoData level, 1 = data
  T z;                // imposed elevation
  std::uint64_t seq;  // FIFO tie-break
  std::int32_t row, col;
};

// Min-first on (rank, z for data, insertion sequence).
template <class T>
struct FloodEntryAfter {
  bool operator()(const FloodEntry<T>& a, const FloodEntry<T>& b) const {
    if (a.rank != b.rank) return a.rank > b.rank;
    if (a.rank == 1 && a.z != b.z) return a.z > b.z;
    return a.seq > b.seq;
  }
};

template <class T>
using FloodQueue =
    std::priority_queue<FloodEntry<T>, std::vector<FloodEntry<T>>, FloodEntryAfter<T>>;

template <class T>
struct PitEntry {
  T z;
  std::int32_t row, col;
};

}  // namespace detail

/**
  @brief Fills all depressions of one tile, labels its watersheds, and
         builds the tile's spillover graph.

  Every border cell and every NoData cell seeds the flood. A popped cell with
  no label inherits the label of the first neighbour (in the fixed D8 order)
  that is labeled and not above it, else receives a fresh label. When two
  differently-labeled cells meet, the maximum of their elevations is recorded
  against the pair, keeping the minimum over all meetings. Unlabeled
  neighbours at or below the flood level are raised to it and continue
  through the plain queue.

  After the flood, each side named in dem_edges connects its cells' labels to
  the reserved edge label 1 at the cell's (filled) elevation, and every label
  holding a NoData cell connects to label 1 at the bottom sentinel, keeping
  minima throughout.

  @param dem        Elevations with NoData sentinel; not modified.
  @param dem_edges  Which tile sides lie on the DEM boundary.

  @post filled >= dem cellwise; NoData cells unchanged; every cell labeled
        (labels 2..max_label); no internal depression remains with respect to
        the outlets (tile border and NoData regions).
*/
template <class T>
FilledTile<T> fill_tile(const Grid<T>& dem, EdgeFlags dem_edges) {
  if (dem.size() == 0) throw std::invalid_argument("fill_tile: empty dem");

  const int w = dem.width();
  const int h = dem.height();
  const FloodOrder<T> ord{dem.nodata};

  FilledTile<T> out;
  out.filled = dem;
  out.labels = LabelGrid(h, w, kUnlabeled);
  std::uint32_t next_label = kFirstLabel;

  Array2D<T>& z = out.filled.cells;
  LabelGrid& labels = out.labels;
  SpilloverGraph<T>& graph = out.graph;

  detail::FloodQueue<T> open;
  std::queue<detail::PitEntry<T>> pit;
  std::uint64_t seq = 0;

  auto push_open = [&](int r, int c, T v) {
    open.push(detail::FloodEntry<T>{static_cast<std::uint8_t>(ord.is_nodata(v) ? 0 : 1),
                                    v, seq++, r, c});
  };

  // Seeds: the tile perimeter plus all NoData cells (outlets flood first).
  for (int r = 0; r < h; r++)
    for (int c = 0; c < w; c++)
      if (r == 0 || r == h - 1 || c == 0 || c == w - 1 || ord.is_nodata(z(r, c)))
        push_open(r, c, z(r, c));

  while (!open.empty() || !pit.empty()) {
    int row, col;
    T cz;
    if (!pit.empty()) {
      row = pit.front().row;
      col = pit.front().col;
      cz = pit.front().z;
      pit.pop();
    } else {
      row = open.top().row;
      col = open.top().col;
      cz = open.top().z;
      open.pop();
    }

    if (labels(row, col) == kUnlabeled) {
      std::uint32_t inherited = kUnlabeled;
      for_each_neighbor(row, col, h, w, [&](int nr, int nc) {
        if (inherited == kUnlabeled && labels(nr, nc) != kUnlabeled &&
            ord.leq(z(nr, nc), z(row, col)))
          inherited = labels(nr, nc);
      });
      labels(row, col) = inherited != kUnlabeled ? inherited : next_label++;
    }
    const std::uint32_t clabel = labels(row, col);

    for_each_neighbor(row, col, h, w, [&](int nr, int nc) {
      const std::uint32_t nlabel = labels(nr, nc);
      if (nlabel != kUnlabeled) {
        if (nlabel == clabel) return;
        graph.lower(clabel, nlabel,
                    Spill<T>::max(Spill<T>::of_cell(z(row, col), ord),
                                  Spill<T>::of_cell(z(nr, nc), ord)));
      } else {
        labels(nr, nc) = clabel;
        if (ord.leq(z(nr, nc), cz)) {
          if (ord.less(z(nr, nc), cz)) z(nr, nc) = cz;  // never hit for NoData: those are labeled seeds
          pit.push(detail::PitEntry<T>{cz, nr, nc});
        } else {
          push_open(nr, nc, z(nr, nc));
        }
      }
    });
  }

  auto connect_to_edge = [&](int r, int c) {
    const T v = z(r, c);
    graph.lower(labels(r, c), kEdgeLabel,
                ord.is_nodata(v) ? Spill<T>::bottom() : Spill<T>::data(v));
  };
  if (dem_edges.north) for (int c = 0; c < w; c++) connect_to_edge(0, c);
  if (dem_edges.south) for (int c = 0; c < w; c++) connect_to_edge(h - 1, c);
  if (dem_edges.west)  for (int r = 0; r < h; r++) connect_to_edge(r, 0);
  if (dem_edges.east)  for (int r = 0; r < h; r++) connect_to_edge(r, w - 1);

  // NoData regions drain off the DEM no matter where they sit.
  for (int r = 0; r < h; r++)
    for (int c = 0; c < w; c++)
      if (ord.is_nodata(z(r, c)))
        graph.lower(labels(r, c), kEdgeLabel, Spill<T>::bottom());

  out.max_label = next_label - 1;
  return out;
}

/**
  @brief Depression-fills an entire DEM with a single Priority-Flood.

  The simple whole-DEM implementation used to establish authoritative
  answers. Shares the outlet semantics of fill_tile (border plus NoData
  seeds) but tracks no labels and builds no graph.
*/
template <class T>
Grid<T> serial_priority_flood(const Grid<T>& dem) {
  if (dem.size() == 0) throw std::invalid_argument("serial_priority_flood: empty dem");

  const int w = dem.width();
  const int h = dem.height();
  const FloodOrder<T> ord{dem.nodata};

  Grid<T> out = dem;
  Array2D<T>& z = out.cells;
  Array2D<std::uint8_t> closed(h, w, 0);

  detail::FloodQueue<T> open;
  std::queue<detail::PitEntry<T>> pit;
  std::uint64_t seq = 0;

  for (int r = 0; r < h; r++)
    for (int c = 0; c < w; c++)
      if (r == 0 || r == h - 1 || c == 0 || c == w - 1 || ord.is_nodata(z(r, c))) {
        open.push(detail::FloodEntry<T>{
            static_cast<std::uint8_t>(ord.is_nodata(z(r, c)) ? 0 : 1), z(r, c), seq++, r, c});
        closed(r, c) = 1;
      }

  while (!open.empty() || !pit.empty()) {
    int row, col;
    T cz;
    if (!pit.empty()) {
      row = pit.front().row;
      col = pit.front().col;
      cz = pit.front().z;
      pit.pop();
    } else {
      row = open.top().row;
      col = open.top().col;
      cz = open.top().z;
      open.pop();
    }

    for_each_neighbor(row, col, h, w, [&](int nr, int nc) {
      if (closed(nr, nc)) return;
      closed(nr, nc) = 1;
      if (ord.leq(z(nr, nc), cz)) {
        if (ord.less(z(nr, nc), cz)) z(nr, nc) = cz;
        pit.push(detail::PitEntry<T>{cz, nr, nc});
      } else {
        open.push(detail::FloodEntry<T>{1, z(nr, nc), seq++, nr, nc});
      }
    });
  }

  return out;
}

}  // namespace tileflood

#endif
