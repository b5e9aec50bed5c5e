/**
  @file
  @brief Elevation/label grids, cell dtypes, NoData flood ordering, and the
         fixed D8 neighbourhood used by every algorithm in the library.
*/
#ifndef tileflood_raster_hpp
#define tileflood_raster_hpp

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tileflood {

/// Cell data types supported by the raster formats. The numeric codes are
/// part of the binary file format and must not change.
enum class DType : std::uint8_t { I16 = 1, I32 = 2, F32 = 3, F64 = 4 };

inline int dtype_width(DType t) {
  switch (t) {
    case DType::I16: return 2;
    case DType::I32: return 4;
    case DType::F32: return 4;
    case DType::F64: return 8;
  }
  throw std::invalid_argument("unknown dtype code");
}

inline const char* dtype_name(DType t) {
  switch (t) {
    case DType::I16: return "i16";
    case DType::I32: return "i32";
    case DType::F32: return "f32";
    case DType::F64: return "f64";
  }
  throw std::invalid_argument("unknown dtype code");
}

inline DType dtype_from_name(const std::string& s) {
  if (s == "i16") return DType::I16;
  if (s == "i32") return DType::I32;
  if (s == "f32") return DType::F32;
  if (s == "f64") return DType::F64;
  throw std::invalid_argument("unknown dtype name: " + s);
}

template <class T> struct dtype_of;
template <> struct dtype_of<std::int16_t> { static constexpr DType value = DType::I16; };
template <> struct dtype_of<std::int32_t> { static constexpr DType value = DType::I32; };
template <> struct dtype_of<float>        { static constexpr DType value = DType::F32; };
template <> struct dtype_of<double>       { static constexpr DType value = DType::F64; };

/// Row-major 2D array addressed as (row, col).
template <class T>
class Array2D {
 public:
  Array2D() = default;
  Array2D(int height, int width, T init = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), init) {
    if (width < 1 || height < 1)
      throw std::invalid_argument("Array2D dimensions must be >= 1");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int row, int col) {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  const T& operator()(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  bool in_grid(int row, int col) const {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Array2D&, const Array2D&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Watershed labels. 0 = unlabeled, 1 = reserved for the DEM edge,
/// real labels start at 2.
using LabelGrid = Array2D<std::uint32_t>;
inline constexpr std::uint32_t kUnlabeled  = 0;
inline constexpr std::uint32_t kEdgeLabel  = 1;
inline constexpr std::uint32_t kFirstLabel = 2;

/// A DEM tile: elevations plus the NoData sentinel they were stored with.
/// The sentinel is kept verbatim in the cells; ordering against data values
/// goes through FloodOrder.
template <class T>
struct Grid {
  Array2D<T> cells;
  T nodata{};

  Grid() = default;
  Grid(int height, int width, T nodata_value, T init = T{})
      : cells(height, width, init), nodata(nodata_value) {}

  int width() const { return cells.width(); }
  int height() const { return cells.height(); }
  std::size_t size() const { return cells.size(); }
  bool is_nodata(T v) const { return v == nodata; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Total order used by every flood: NoData sorts below every data value,
/// data values compare numerically. Cell values are never rewritten to
/// achieve this.
template <class T>
struct FloodOrder {
  T nodata{};

  bool is_nodata(T v) const { return v == nodata; }

  bool less(T a, T b) const {
    const bool na = is_nodata(a);
    const bool nb = is_nodata(b);
    if (na != nb) return na;
    if (na) return false;
    return a < b;
  }
  bool leq(T a, T b) const { return !less(b, a); }
  T max(T a, T b) const { return less(a, b) ? b : a; }
  T min(T a, T b) const { return less(b, a) ? b : a; }
};

// D8 neighbourhood in fixed order: row-major scan of the 3x3 window with the
// center excluded. Iteration order is part of the reproducibility contract.
inline constexpr int kNeighborCount = 8;
inline constexpr int kNeighborDr[kNeighborCount] = {-1, -1, -1, 0, 0, 1, 1, 1};
inline constexpr int kNeighborDc[kNeighborCount] = {-1, 0, 1, -1, 1, -1, 0, 1};

template <class Fn>
inline void for_each_neighbor(int row, int col, int height, int width, Fn&& fn) {
  for (int i = 0; i < kNeighborCount; i++) {
    const int nr = row + kNeighborDr[i];
    const int nc = col + kNeighborDc[i];
    if (nr < 0 || nr >= height || nc < 0 || nc >= width) continue;
    fn(nr, nc);
  }
}

/// D8 neighbourhood of a cell clipped to the grid, in the fixed order above.
inline std::vector<std::pair<int, int>> neighbors(std::pair<int, int> cell,
                                                  int height, int width) {
  std::vector<std::pair<int, int>> out;
  out.reserve(kNeighborCount);
  for_each_neighbor(cell.first, cell.second, height, width,
                    [&](int r, int c) { out.emplace_back(r, c); });
  return out;
}

}  // namespace tileflood

#endif
