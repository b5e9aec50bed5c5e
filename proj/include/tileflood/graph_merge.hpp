/**
  @file
  @brief Producer-side global solution: label uniquification, edge/corner
         joining, and the minimax flood over the master spillover graph.
*/
#ifndef tileflood_graph_merge_hpp
#define tileflood_graph_merge_hpp

#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "tileflood/graph.hpp"
#include "tileflood/raster.hpp"

namespace tileflood {

/// Per-tile label offsets making labels globally unique. Tile-local label x
/// (x >= 2) maps to x + offset; the reserved edge label 1 is global already.
struct LabelOffsets {
  std::vector<std::uint32_t> offset;     // by tile index
  std::uint32_t total_labels = kEdgeLabel;  // highest global label in use

  std::uint32_t to_global(int tile, std::uint32_t local) const {
    return local == kEdgeLabel ? kEdgeLabel : local + offset[tile];
  }
  std::uint32_t to_local(int tile, std::uint32_t global) const {
    return global == kEdgeLabel ? kEdgeLabel : global - offset[tile];
  }
};

/// Assigns disjoint global label ranges given each tile's highest local
/// label (tiles use 2..max_label). Throws if the 4-byte label space would
/// overflow.
inline LabelOffsets uniquify_labels(std::span<const std::uint32_t> max_labels) {
  LabelOffsets out;
  out.offset.reserve(max_labels.size());
  std::uint64_t next = 0;  // global label for local 2 is 2 + offset
  for (std::uint32_t ml : max_labels) {
    out.offset.push_back(static_cast<std::uint32_t>(next));
    if (ml >= kFirstLabel) next += ml - kEdgeLabel;
    if (next + kEdgeLabel > std::numeric_limits<std::uint32_t>::max())
      throw std::overflow_error("uniquify_labels: 32-bit label space exhausted");
  }
  out.total_labels = static_cast<std::uint32_t>(next + kEdgeLabel);
  return out;
}

/**
  @brief Joins two adjoining tile edges into the master graph.

  Each cell of edge A is compared against the 2-3 cells of edge B within one
  index of it. Differently-labeled pairs record the maximum of the two
  elevations, keeping the minimum over all meetings. Inputs are not modified.
*/
template <class T>
void handle_edge(const std::vector<T>& dem_a, const std::vector<std::uint32_t>& labels_a,
                 const std::vector<T>& dem_b, const std::vector<std::uint32_t>& labels_b,
                 const FloodOrder<T>& ord, SpilloverGraph<T>& graph) {
  const std::size_t len = dem_a.size();
  if (labels_a.size() != len || dem_b.size() != len || labels_b.size() != len)
    throw std::invalid_argument("handle_edge: adjoining edges differ in length");

  for (std::size_t i = 0; i < len; i++) {
    for (int d = -1; d <= 1; d++) {
      if (d < 0 && i == 0) continue;
      const std::size_t ni = i + d;
      if (ni >= len) continue;
      if (labels_a[i] == labels_b[ni]) continue;
      graph.lower(labels_a[i], labels_b[ni],
                  Spill<T>::max(Spill<T>::of_cell(dem_a[i], ord),
                                Spill<T>::of_cell(dem_b[ni], ord)));
    }
  }
}

/// Joins the single corner-cell pair of two diagonally adjacent tiles.
template <class T>
void handle_corner(T dem_a, std::uint32_t label_a, T dem_b, std::uint32_t label_b,
                   const FloodOrder<T>& ord, SpilloverGraph<T>& graph) {
  if (label_a == label_b) return;
  graph.lower(label_a, label_b,
              Spill<T>::max(Spill<T>::of_cell(dem_a, ord), Spill<T>::of_cell(dem_b, ord)));
}

/// Tie-break rule for flood_graph's priority queue. The result is provably
/// identical for any rule; exposing two lets tests assert that.
enum class GraphTieBreak { InsertionOrder, HighLabelFirst };

/**
  @brief Minimax flood over the master spillover graph.

  Seeds the reserved edge node 1 at the bottom sentinel, then repeatedly
  finalizes the lowest-elevation open node; each neighbour's tentative
  elevation is the maximum of the popped node's elevation and the connecting
  spill, keeping the minimum tentative. The result maps every label to the
  lowest spillover elevation by which it can be reached from the DEM edge.

  @param graph        master graph over global labels
  @param total_labels labels in use are 1..total_labels
  @return elevation per label, indexed by label (index 0 unused)
  @throws std::runtime_error if any label is unreachable from node 1, which
          indicates a corrupted tiling or merge.
*/
template <class T>
std::vector<Spill<T>> flood_graph(const SpilloverGraph<T>& graph, std::uint32_t total_labels,
                                  GraphTieBreak tie = GraphTieBreak::InsertionOrder) {
  struct Adj {
    std::uint32_t to;
    Spill<T> spill;
  };
  std::vector<std::vector<Adj>> adj(static_cast<std::size_t>(total_labels) + 1);
  for (const auto& e : graph.sorted_entries()) {
    if (e.a < 1 || e.a > total_labels || e.b < 1 || e.b > total_labels)
      throw std::runtime_error("flood_graph: edge references an unknown label");
    adj[e.a].push_back(Adj{e.b, e.spill});
    adj[e.b].push_back(Adj{e.a, e.spill});
  }

  struct QEntry {
    Spill<T> spill;
    std::uint64_t order;
    std::uint32_t label;
  };
  auto after = [tie](const QEntry& x, const QEntry& y) {
    if (x.spill == y.spill)
      return tie == GraphTieBreak::InsertionOrder ? x.order > y.order : x.label < y.label;
    return y.spill < x.spill;
  };
  std::priority_queue<QEntry, std::vector<QEntry>, decltype(after)> open(after);

  std::vector<Spill<T>> elevation(static_cast<std::size_t>(total_labels) + 1);
  std::vector<std::uint8_t> finalized(static_cast<std::size_t>(total_labels) + 1, 0);
  std::vector<std::uint8_t> tentative(static_cast<std::size_t>(total_labels) + 1, 0);
  std::uint64_t order = 0;

  elevation[kEdgeLabel] = Spill<T>::bottom();
  tentative[kEdgeLabel] = 1;
  open.push(QEntry{Spill<T>::bottom(), order++, kEdgeLabel});

  while (!open.empty()) {
    const QEntry top = open.top();
    open.pop();
    if (finalized[top.label]) continue;
    finalized[top.label] = 1;
    for (const Adj& a : adj[top.label]) {
      if (finalized[a.to]) continue;
      const Spill<T> cand = Spill<T>::max(top.spill, a.spill);
      if (!tentative[a.to] || cand < elevation[a.to]) {
        elevation[a.to] = cand;
        tentative[a.to] = 1;
        open.push(QEntry{cand, order++, a.to});
      }
    }
  }

  for (std::uint32_t l = kEdgeLabel; l <= total_labels; l++)
    if (!finalized[l])
      throw std::runtime_error("flood_graph: label " + std::to_string(l) +
                               " is unreachable from the DEM edge");

  return elevation;
}

}  // namespace tileflood

#endif
