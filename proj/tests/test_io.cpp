#include <doctest.h>

#include <filesystem>
#include <random>

#include "helpers.hpp"
#include "tileflood/codec.hpp"
#include "tileflood/io.hpp"
#include "tileflood/manifest.hpp"
#include "tileflood/verify.hpp"

using namespace tileflood;
namespace fs = std::filesystem;

TEST_CASE("binary raster round-trips bit-exactly for every dtype") {
  tftest::TempDir dir("io");
  std::mt19937_64 rng(11);

  auto check_roundtrip = [&]<class T>(T) {
    for (int trial = 0; trial < 8; trial++) {
      const auto g = tftest::random_grid<T>(rng, 1 + rng() % 12, 1 + rng() % 12);
      const std::string path = dir.str("rt.rdtl");
      write_rdtl(g, path);
      const auto back = read_rdtl_as<T>(path);
      CHECK_FALSE(compare_grids(back, g).has_value());
    }
  };
  check_roundtrip(std::int16_t{});
  check_roundtrip(std::int32_t{});
  check_roundtrip(float{});
  check_roundtrip(double{});
}

TEST_CASE("binary file size is 14 + E*(1 + cells)") {
  tftest::TempDir dir("iosz");
  Grid<float> g(2, 2, -9999.0f, 1.5f);
  const std::string path = dir.str("size.rdtl");
  write_rdtl(g, path);
  CHECK(fs::file_size(path) == 34);  // 14 + 4*5

  Grid<int16_t> g16(3, 5, -9999, 7);
  const std::string path16 = dir.str("size16.rdtl");
  write_rdtl(g16, path16);
  CHECK(fs::file_size(path16) == 14 + 2 * (1 + 15));
}

TEST_CASE("ascii and binary encodings parse to the identical grid") {
  tftest::TempDir dir("ioasc");
  std::mt19937_64 rng(23);

  SUBCASE("f32 with awkward fractions") {
    Grid<float> g(3, 4, -9999.0f);
    for (auto& v : g.cells.data())
      v = static_cast<float>(rng() % 1000) / 7.0f - 30.0f;
    g.cells(1, 2) = g.nodata;
    write_rdtl(g, dir.str("a.rdtl"));
    write_asc(g, dir.str("a.asc"));
    const auto from_bin = read_rdtl_as<float>(dir.str("a.rdtl"));
    const auto from_asc = read_asc_as<float>(dir.str("a.asc"));
    CHECK_FALSE(compare_grids(from_bin, from_asc).has_value());
  }
  SUBCASE("f64 keeps all digits") {
    Grid<double> g(2, 2, -1.0);
    g.cells(0, 0) = 0.1;
    g.cells(0, 1) = 1.0 / 3.0;
    g.cells(1, 0) = -123456.789012345;
    g.cells(1, 1) = 5e-300;
    write_asc(g, dir.str("d.asc"));
    CHECK_FALSE(compare_grids(read_asc_as<double>(dir.str("d.asc")), g).has_value());
  }
  SUBCASE("i16 grid") {
    const auto g = tftest::random_grid<int16_t>(rng, 5, 6);
    write_asc(g, dir.str("i.asc"));
    CHECK_FALSE(compare_grids(read_asc_as<int16_t>(dir.str("i.asc")), g).has_value());
  }
}

TEST_CASE("malformed rasters are rejected") {
  tftest::TempDir dir("iobad");
  Grid<float> g(2, 2, -9999.0f, 1.0f);
  const std::string path = dir.str("ok.rdtl");
  write_rdtl(g, path);

  SUBCASE("bad magic") {
    auto bytes = slurp_file(path);
    bytes[0] = 'X';
    spew_file(dir.str("bad.rdtl"), bytes.data(), bytes.size());
    CHECK_THROWS(read_rdtl(dir.str("bad.rdtl")));
  }
  SUBCASE("unknown dtype code") {
    auto bytes = slurp_file(path);
    bytes[5] = 9;
    spew_file(dir.str("bad.rdtl"), bytes.data(), bytes.size());
    CHECK_THROWS(read_rdtl(dir.str("bad.rdtl")));
  }
  SUBCASE("truncated cell data") {
    auto bytes = slurp_file(path);
    bytes.resize(bytes.size() - 3);
    spew_file(dir.str("bad.rdtl"), bytes.data(), bytes.size());
    CHECK_THROWS(read_rdtl(dir.str("bad.rdtl")));
  }
  SUBCASE("dtype mismatch on typed read") {
    CHECK_THROWS(read_rdtl_as<double>(path));
  }
  SUBCASE("ascii with missing header") {
    spew_file(dir.str("bad.asc"), reinterpret_cast<const unsigned char*>("1 2 3"), 5);
    CHECK_THROWS(read_asc_as<float>(dir.str("bad.asc")));
  }
  SUBCASE("ascii with truncated cells") {
    const char* s = "ncols 3\nnrows 2\nNODATA_value -9999\n1 2 3\n4 5\n";
    spew_file(dir.str("bad.asc"), reinterpret_cast<const unsigned char*>(s), strlen(s));
    CHECK_THROWS(read_asc_as<float>(dir.str("bad.asc")));
  }
  SUBCASE("missing file") {
    CHECK_THROWS(read_rdtl(dir.str("nope.rdtl")));
  }
}

TEST_CASE("cell counters account for reads and writes") {
  tftest::TempDir dir("ioctr");
  const Grid<int32_t> g(6, 7, -9999, 3);
  CellCounter counter;
  write_rdtl(g, dir.str("c.rdtl"), &counter);
  CHECK(counter.cell_writes.load() == 42);
  CHECK(counter.cell_reads.load() == 0);
  (void)read_rdtl_as<int32_t>(dir.str("c.rdtl"), &counter);
  CHECK(counter.cell_reads.load() == 42);
}

TEST_CASE("tiling a monolithic raster") {
  tftest::TempDir dir("iotile");
  std::mt19937_64 rng(31);

  SUBCASE("tiles as large as the DEM give a single tile") {
    Grid<float> g(100, 100, -9999.0f, 2.0f);
    write_rdtl(g, dir.str("in.rdtl"));
    const auto layout = tile_monolithic(dir.str("in.rdtl"), 100, 100, dir.str("tiles"));
    CHECK(layout.tile_count() == 1);
    CHECK(layout.at(0, 0).width == 100);
  }
  SUBCASE("30x30 tiles on 100x100 give a ragged 4x4 grid") {
    Grid<float> g(100, 100, -9999.0f, 2.0f);
    write_rdtl(g, dir.str("in.rdtl"));
    const auto layout = tile_monolithic(dir.str("in.rdtl"), 30, 30, dir.str("tiles"));
    CHECK(layout.tiles_wide() == 4);
    CHECK(layout.tiles_high() == 4);
    CHECK(layout.at(0, 0).width == 30);
    CHECK(layout.at(3, 3).width == 10);
    CHECK(layout.at(3, 3).height == 10);
    CHECK_NOTHROW(layout.validate());
  }
  SUBCASE("mosaic of the tiles reproduces the original") {
    for (int trial = 0; trial < 6; trial++) {
      const int h = 5 + static_cast<int>(rng() % 40);
      const int w = 5 + static_cast<int>(rng() % 40);
      const auto g = tftest::random_grid<float>(rng, h, w);
      const std::string in = dir.str("m" + std::to_string(trial) + ".rdtl");
      write_rdtl(g, in);
      const int tw = 1 + static_cast<int>(rng() % w);
      const int th = 1 + static_cast<int>(rng() % h);
      const auto layout =
          tile_monolithic(in, tw, th, dir.str("mt" + std::to_string(trial)));
      const auto back = mosaic_as<float>(layout);
      CHECK_FALSE(compare_grids(back, g).has_value());
    }
  }
  SUBCASE("non-positive tile dims are rejected") {
    Grid<float> g(10, 10, -9999.0f, 2.0f);
    write_rdtl(g, dir.str("in.rdtl"));
    CHECK_THROWS(tile_monolithic(dir.str("in.rdtl"), 0, 5, dir.str("tiles0")));
  }
}

TEST_CASE("manifests round-trip and validate") {
  tftest::TempDir dir("ioman");
  Grid<int16_t> g(24, 36, -9999, 1);
  write_rdtl(g, dir.str("in.rdtl"));
  const auto layout = tile_monolithic(dir.str("in.rdtl"), 10, 10, dir.str("tiles"));

  const auto loaded = read_manifest(dir.str("tiles/tiles.txt"));
  CHECK(loaded.tiles_wide() == layout.tiles_wide());
  CHECK(loaded.tiles_high() == layout.tiles_high());
  for (int r = 0; r < layout.tiles_high(); r++)
    for (int c = 0; c < layout.tiles_wide(); c++) {
      CHECK(loaded.at(r, c).width == layout.at(r, c).width);
      CHECK(loaded.at(r, c).height == layout.at(r, c).height);
      CHECK(fs::equivalent(loaded.at(r, c).path, layout.at(r, c).path));
    }

  SUBCASE("missing tile lines are rejected") {
    const char* bad = "tiles 2 1\ntile 0 0 5 5 a.rdtl\n";
    spew_file(dir.str("bad.txt"), reinterpret_cast<const unsigned char*>(bad), strlen(bad));
    CHECK_THROWS(read_manifest(dir.str("bad.txt")));
  }
  SUBCASE("garbage header is rejected") {
    const char* bad = "grid 2 1\n";
    spew_file(dir.str("bad.txt"), reinterpret_cast<const unsigned char*>(bad), strlen(bad));
    CHECK_THROWS(read_manifest(dir.str("bad.txt")));
  }
}

TEST_CASE("codec round-trips and stays self-identifying") {
  std::mt19937_64 rng(47);
  SUBCASE("byte streams") {
    for (int trial = 0; trial < 20; trial++) {
      std::vector<unsigned char> raw(rng() % 5000);
      for (auto& b : raw) b = static_cast<unsigned char>(rng() % (trial % 3 ? 7 : 256));
      CHECK(inflate_bytes(deflate_bytes(raw)) == raw);
    }
  }
  SUBCASE("compressed rasters") {
    tftest::TempDir dir("iocod");
    for (int trial = 0; trial < 6; trial++) {
      const auto g = tftest::random_grid<float>(rng, 2 + rng() % 30, 2 + rng() % 30);
      write_rdtl_compressed(g, dir.str("c.rdtlz"));
      CHECK_FALSE(compare_grids(read_rdtl_compressed_as<float>(dir.str("c.rdtlz")), g).has_value());
    }
  }
  SUBCASE("corrupt stream is rejected") {
    std::vector<unsigned char> raw{1, 2, 3, 4, 5};
    auto packed = deflate_bytes(raw);
    packed[0] = 'x';
    CHECK_THROWS(inflate_bytes(packed));
  }
}
