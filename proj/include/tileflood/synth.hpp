/**
  @file
  @brief Seeded synthetic DEMs for verification and benchmarking: fractal
         value noise plus nested crater depressions and NoData blobs.

  Everything derives from the seed through std::mt19937_64 raw draws and
  plain arithmetic (no libm calls), so the same seed yields the same DEM on
  any platform.
*/
#ifndef tileflood_synth_hpp
#define tileflood_synth_hpp

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tileflood/io.hpp"
#include "tileflood/raster.hpp"

namespace tileflood {

namespace detail {

inline double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// One octave of bilinear value noise with the given lattice spacing.
inline void add_value_noise(std::vector<double>& field, int h, int w, int spacing,
                            double amplitude, std::mt19937_64& rng) {
  const int lh = h / spacing + 2;
  const int lw = w / spacing + 2;
  std::vector<double> lattice(static_cast<std::size_t>(lh) * lw);
  for (auto& v : lattice) v = unit(rng);

  for (int r = 0; r < h; r++) {
    const int lr = r / spacing;
    const double fr = smoothstep(static_cast<double>(r % spacing) / spacing);
    for (int c = 0; c < w; c++) {
      const int lc = c / spacing;
      const double fc = smoothstep(static_cast<double>(c % spacing) / spacing);
      const double v00 = lattice[static_cast<std::size_t>(lr) * lw + lc];
      const double v01 = lattice[static_cast<std::size_t>(lr) * lw + lc + 1];
      const double v10 = lattice[static_cast<std::size_t>(lr + 1) * lw + lc];
      const double v11 = lattice[static_cast<std::size_t>(lr + 1) * lw + lc + 1];
      const double top = v00 + (v01 - v00) * fc;
      const double bot = v10 + (v11 - v10) * fc;
      field[static_cast<std::size_t>(r) * w + c] += amplitude * (top + (bot - top) * fr);
    }
  }
}

}  // namespace detail

/// Deterministic synthetic terrain. The NoData sentinel is -9999 (fits every
/// supported dtype).
template <class T>
Grid<T> synth_dem(int height, int width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> field(static_cast<std::size_t>(height) * width, 0.0);

  const int mind = width < height ? width : height;
  const int s0 = mind / 4 < 4 ? 4 : mind / 4;

  detail::add_value_noise(field, height, width, s0, 400.0, rng);
  detail::add_value_noise(field, height, width, s0 / 2 < 2 ? 2 : s0 / 2, 180.0, rng);
  detail::add_value_noise(field, height, width, s0 / 4 < 2 ? 2 : s0 / 4, 80.0, rng);

  // Gentle tilt so borders are not symmetric.
  const double gr = detail::unit(rng) * 2.0 - 1.0;
  const double gc = detail::unit(rng) * 2.0 - 1.0;
  for (int r = 0; r < height; r++)
    for (int c = 0; c < width; c++)
      field[static_cast<std::size_t>(r) * width + c] += 60.0 * (gr * r + gc * c) / mind;

  // Nested craters: concentric wall/floor pairs produce depressions whose
  // fill levels depend on several spill points.
  const int groups = 2 + static_cast<int>(rng() % 4);
  for (int g = 0; g < groups; g++) {
    const double cr = detail::unit(rng) * height;
    const double cc = detail::unit(rng) * width;
    double radius = (0.08 + 0.2 * detail::unit(rng)) * mind;
    const int levels = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < levels; k++) {
      if (radius < 1.5) break;
      const double depth = 40.0 + 70.0 * detail::unit(rng);
      const double wall = 25.0 + 45.0 * detail::unit(rng);
      const double r2_floor = (0.85 * radius) * (0.85 * radius);
      const double r2_wall = (1.1 * radius) * (1.1 * radius);
      for (int r = 0; r < height; r++) {
        for (int c = 0; c < width; c++) {
          const double dr = r - cr;
          const double dc = c - cc;
          const double d2 = dr * dr + dc * dc;
          if (d2 <= r2_floor)
            field[static_cast<std::size_t>(r) * width + c] -= depth;
          else if (d2 <= r2_wall)
            field[static_cast<std::size_t>(r) * width + c] += wall;
        }
      }
      radius *= 0.55;
    }
  }

  Grid<T> out(height, width, static_cast<T>(-9999));
  for (std::size_t i = 0; i < field.size(); i++) {
    if constexpr (std::is_integral_v<T>)
      out.cells.data()[i] = static_cast<T>(std::llround(field[i]));
    else
      out.cells.data()[i] = static_cast<T>(field[i]);
  }

  // NoData blobs last; they behave as outlets wherever they land.
  const int blobs = 1 + static_cast<int>(rng() % 3);
  for (int b = 0; b < blobs; b++) {
    const double cr = detail::unit(rng) * height;
    const double cc = detail::unit(rng) * width;
    double rr = (0.04 + 0.12 * detail::unit(rng)) * mind;
    double rc = (0.04 + 0.12 * detail::unit(rng)) * mind;
    if (rr < 1.2) rr = 1.2;  // a blob always covers at least its center cell
    if (rc < 1.2) rc = 1.2;
    for (int r = 0; r < height; r++) {
      for (int c = 0; c < width; c++) {
        const double dr = (r - cr) / rr;
        const double dc = (c - cc) / rc;
        if (dr * dr + dc * dc <= 1.0) out.cells(r, c) = out.nodata;
      }
    }
  }
  return out;
}

inline AnyGrid synth_dem_any(int height, int width, DType dtype, std::uint64_t seed) {
  switch (dtype) {
    case DType::I16: return synth_dem<std::int16_t>(height, width, seed);
    case DType::I32: return synth_dem<std::int32_t>(height, width, seed);
    case DType::F32: return synth_dem<float>(height, width, seed);
    case DType::F64: return synth_dem<double>(height, width, seed);
  }
  throw std::invalid_argument("unknown dtype");
}

}  // namespace tileflood

#endif
