#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "tileflood/raster.hpp"
#include "tileflood/tiling.hpp"

using namespace tileflood;

TEST_CASE("neighbors clips to the grid in fixed scan order") {
  using P = std::pair<int, int>;

  CHECK(neighbors({0, 0}, 3, 3) == std::vector<P>{{0, 1}, {1, 0}, {1, 1}});
  CHECK(neighbors({1, 1}, 3, 3) ==
        std::vector<P>{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}, {2, 2}});
  CHECK(neighbors({0, 1}, 1, 3) == std::vector<P>{{0, 0}, {0, 2}});
  CHECK(neighbors({0, 0}, 1, 1).empty());
}

TEST_CASE("neighbors is symmetric") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; trial++) {
    const int h = 1 + static_cast<int>(rng() % 6);
    const int w = 1 + static_cast<int>(rng() % 6);
    for (int r = 0; r < h; r++)
      for (int c = 0; c < w; c++)
        for (auto [nr, nc] : neighbors({r, c}, h, w)) {
          const auto back = neighbors({nr, nc}, h, w);
          CHECK(std::find(back.begin(), back.end(), std::pair{r, c}) != back.end());
        }
  }
}

TEST_CASE("flood order puts NoData below every data value") {
  FloodOrder<float> ord{-9999.0f};
  CHECK(ord.less(-9999.0f, -32000.0f));  // sentinel below even smaller data
  CHECK(ord.less(-9999.0f, 0.0f));
  CHECK_FALSE(ord.less(0.0f, -9999.0f));
  CHECK_FALSE(ord.less(-9999.0f, -9999.0f));
  CHECK(ord.leq(-9999.0f, -9999.0f));
  CHECK(ord.max(-9999.0f, 3.0f) == 3.0f);
  CHECK(ord.min(-9999.0f, 3.0f) == -9999.0f);
}

TEST_CASE("extract_edges copies the four sides verbatim") {
  SUBCASE("1x1 tile: all four sides are the single cell") {
    auto g = tftest::make_grid<int32_t>(1, 1, -9999, {7});
    LabelGrid labels(1, 1, 5);
    auto e = extract_edges(g, labels);
    for (const auto* side : {&e.north, &e.south, &e.west, &e.east}) {
      CHECK(side->elev == std::vector<int32_t>{7});
      CHECK(side->label == std::vector<uint32_t>{5});
    }
  }

  SUBCASE("3x3 with distinct values") {
    auto g = tftest::make_grid<int32_t>(3, 3, -9999, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    LabelGrid labels(3, 3, 2);
    auto e = extract_edges(g, labels);
    CHECK(e.north.elev == std::vector<int32_t>{1, 2, 3});
    CHECK(e.south.elev == std::vector<int32_t>{7, 8, 9});
    CHECK(e.west.elev == std::vector<int32_t>{1, 4, 7});
    CHECK(e.east.elev == std::vector<int32_t>{3, 6, 9});
  }

  SUBCASE("7x7 tile gives side vectors of length 7") {
    Grid<float> g(7, 7, -9999.0f, 1.0f);
    LabelGrid labels(7, 7, 2);
    auto e = extract_edges(g, labels);
    CHECK(e.north.elev.size() == 7);
    CHECK(e.south.elev.size() == 7);
    CHECK(e.west.elev.size() == 7);
    CHECK(e.east.elev.size() == 7);
  }

  SUBCASE("dimension mismatch is an error") {
    Grid<float> g(3, 3, -9999.0f);
    LabelGrid labels(3, 4, 0);
    CHECK_THROWS(extract_edges(g, labels));
  }
}

TEST_CASE("edge extraction reassembles the exact grid border") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; trial++) {
    const int h = 1 + static_cast<int>(rng() % 8);
    const int w = 1 + static_cast<int>(rng() % 8);
    auto g = tftest::random_grid<int32_t>(rng, h, w);
    LabelGrid labels(h, w, 0);
    for (auto& l : labels.data()) l = static_cast<uint32_t>(rng() % 50);

    auto e = extract_edges(g, labels);
    // corners are duplicated into both adjoining sides
    CHECK(e.north.elev.size() + e.south.elev.size() + e.west.elev.size() + e.east.elev.size() ==
          static_cast<std::size_t>(2 * w + 2 * h));
    for (int c = 0; c < w; c++) {
      CHECK(e.north.elev[c] == g.cells(0, c));
      CHECK(e.south.elev[c] == g.cells(h - 1, c));
      CHECK(e.north.label[c] == labels(0, c));
      CHECK(e.south.label[c] == labels(h - 1, c));
    }
    for (int r = 0; r < h; r++) {
      CHECK(e.west.elev[r] == g.cells(r, 0));
      CHECK(e.east.elev[r] == g.cells(r, w - 1));
      CHECK(e.west.label[r] == labels(r, 0));
      CHECK(e.east.label[r] == labels(r, w - 1));
    }
  }
}

TEST_CASE("tile layout validation") {
  TileLayout layout(2, 2);
  for (int r = 0; r < 2; r++)
    for (int c = 0; c < 2; c++)
      layout.at(r, c) = TileSpec{r, c, c == 0 ? 10 : 6, r == 0 ? 4 : 8, ""};
  CHECK_NOTHROW(layout.validate());
  CHECK(layout.dem_width() == 16);
  CHECK(layout.dem_height() == 12);
  CHECK(layout.total_cells() == 16 * 12);

  SUBCASE("row with inconsistent heights is rejected") {
    layout.at(1, 1).height = 7;
    CHECK_THROWS(layout.validate());
  }
  SUBCASE("column with inconsistent widths is rejected") {
    layout.at(1, 0).width = 9;
    CHECK_THROWS(layout.validate());
  }

  SUBCASE("edge flags mark the DEM boundary") {
    const EdgeFlags nw = layout.edge_flags(0, 0);
    CHECK(nw.north);
    CHECK(nw.west);
    CHECK_FALSE(nw.south);
    CHECK_FALSE(nw.east);
    const EdgeFlags se = layout.edge_flags(1, 1);
    CHECK(se.south);
    CHECK(se.east);
    CHECK_FALSE(se.north);
    CHECK_FALSE(se.west);
  }
}

TEST_CASE("grids reject degenerate dimensions") {
  CHECK_THROWS(Array2D<float>(0, 3));
  CHECK_THROWS(Array2D<float>(3, 0));
}
