// Shared test utilities: literal grid construction, random grids with NoData
// speckle, and a self-cleaning scratch directory.
#ifndef tileflood_tests_helpers_hpp
#define tileflood_tests_helpers_hpp

#include <unistd.h>

#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "tileflood/raster.hpp"

namespace tftest {

template <class T>
tileflood::Grid<T> make_grid(int height, int width, T nodata, std::initializer_list<T> cells) {
  tileflood::Grid<T> g(height, width, nodata);
  if (cells.size() != g.size()) throw std::logic_error("make_grid: wrong cell count");
  std::size_t i = 0;
  for (T v : cells) g.cells.data()[i++] = v;
  return g;
}

/// Random terrain with occasional NoData; value range is small so ties and
/// flat regions are common.
template <class T>
tileflood::Grid<T> random_grid(std::mt19937_64& rng, int height, int width,
                               int value_span = 12, int nodata_percent = 10) {
  tileflood::Grid<T> g(height, width, static_cast<T>(-9999));
  for (auto& v : g.cells.data()) {
    if (static_cast<int>(rng() % 100) < nodata_percent)
      v = g.nodata;
    else if constexpr (std::is_floating_point_v<T>)
      v = static_cast<T>(rng() % (value_span * 4)) / 4;
    else
      v = static_cast<T>(rng() % value_span);
  }
  return g;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tileflood_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& sub = "") const {
    return sub.empty() ? path_.string() : (path_ / sub).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace tftest

#endif
