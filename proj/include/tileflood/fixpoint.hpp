/**
  @file
  @brief Brute-force depression-filling oracle, independent of Priority-Flood.

  Starts every interior data cell at "above everything" and relaxes
  W(c) <- max(Z(c), min over neighbours of W(n)) until nothing changes.
  Border cells and NoData cells are fixed seeds with W = Z. This is the
  textbook definition of the epsilon=0 filled surface and shares no code
  path with the flood implementations it checks.
*/
#ifndef tileflood_fixpoint_hpp
#define tileflood_fixpoint_hpp

#include <cstdint>
#include <stdexcept>

#include "tileflood/raster.hpp"

namespace tileflood {

/// Intended for small inputs (the relaxation is O(N^2) in the worst case).
template <class T>
Grid<T> fixpoint_fill_oracle(const Grid<T>& dem) {
  if (dem.size() == 0) throw std::invalid_argument("fixpoint_fill_oracle: empty dem");

  const int w = dem.width();
  const int h = dem.height();
  const FloodOrder<T> ord{dem.nodata};

  auto is_seed = [&](int r, int c) {
    return r == 0 || r == h - 1 || c == 0 || c == w - 1 || ord.is_nodata(dem.cells(r, c));
  };

  Grid<T> out = dem;
  Array2D<std::uint8_t> at_top(h, w, 0);  // 1 = still "above everything"
  for (int r = 0; r < h; r++)
    for (int c = 0; c < w; c++)
      if (!is_seed(r, c)) at_top(r, c) = 1;

  auto relax = [&](int r, int c) {
    if (is_seed(r, c)) return false;
    // min over neighbours of W(n), where unresolved cells count as top
    bool best_top = true;
    T best{};
    for_each_neighbor(r, c, h, w, [&](int nr, int nc) {
      if (at_top(nr, nc)) return;
      if (best_top || ord.less(out.cells(nr, nc), best)) {
        best = out.cells(nr, nc);
        best_top = false;
      }
    });
    if (best_top) return false;
    const T cand = ord.max(dem.cells(r, c), best);
    if (at_top(r, c) || ord.less(cand, out.cells(r, c))) {
      out.cells(r, c) = cand;
      at_top(r, c) = 0;
      return true;
    }
    return false;
  };

  bool changed = true;
  std::uint64_t rounds = 0;
  while (changed) {
    changed = false;
    if (++rounds > 4 * dem.size() + 8)
      throw std::runtime_error("fixpoint_fill_oracle failed to converge");
    const std::size_t total = dem.size();
    const auto uw = static_cast<std::size_t>(w);
    if (rounds % 2) {
      for (std::size_t i = 0; i < total; i++)
        changed |= relax(static_cast<int>(i / uw), static_cast<int>(i % uw));
    } else {  // alternate sweep direction; converges far faster on corridors
      for (std::size_t i = total; i-- > 0;)
        changed |= relax(static_cast<int>(i / uw), static_cast<int>(i % uw));
    }
  }

  for (int r = 0; r < h; r++)
    for (int c = 0; c < w; c++)
      if (at_top(r, c))
        throw std::runtime_error("fixpoint_fill_oracle: unreachable cell");

  return out;
}

}  // namespace tileflood

#endif
