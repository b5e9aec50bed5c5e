/**
  @file
  @brief Raster file formats with counted cell access.

  Binary format ("RDTL"): magic, version byte 1, dtype code byte, width and
  height as 4-byte little-endian unsigned, the NoData value in the dtype's
  width, then row-major little-endian cell data. File size is therefore
  14 + E*(1 + width*height) bytes for an E-byte dtype.

  ASCII format: ESRI ASCII grid (ncols/nrows/xllcorner/yllcorner/cellsize/
  NODATA_value header, whitespace-separated rows). Carries no dtype, so
  readers take the target dtype; geospatial header fields are accepted and
  ignored.
*/
#ifndef tileflood_io_hpp
#define tileflood_io_hpp

#include <atomic>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "tileflood/raster.hpp"

namespace tileflood {

/// Contention-safe accumulator for cell-granularity disk access.
struct CellCounter {
  std::atomic<std::uint64_t> cell_reads{0};
  std::atomic<std::uint64_t> cell_writes{0};

  void add_reads(std::uint64_t n) { cell_reads.fetch_add(n, std::memory_order_relaxed); }
  void add_writes(std::uint64_t n) { cell_writes.fetch_add(n, std::memory_order_relaxed); }
};

using AnyGrid = std::variant<Grid<std::int16_t>, Grid<std::int32_t>, Grid<float>, Grid<double>>;

inline DType dtype_of_grid(const AnyGrid& g) {
  return std::visit([](const auto& t) {
    return dtype_of<typename std::decay_t<decltype(t.nodata)>>::value;
  }, g);
}

namespace detail {

inline constexpr char kRdtlMagic[4] = {'R', 'D', 'T', 'L'};
inline constexpr std::uint8_t kRdtlVersion = 1;

template <class T>
void put_le(std::vector<unsigned char>& buf, T v) {
  using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>,
      std::conditional_t<sizeof(T) == 4, std::int32_t, std::int64_t>, T>>;
  U u = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(U); i++)
    buf.push_back(static_cast<unsigned char>((u >> (8 * i)) & 0xff));
}

template <class T>
T get_le(const unsigned char* p) {
  using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>,
      std::conditional_t<sizeof(T) == 4, std::int32_t, std::int64_t>, T>>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); i++)
    u |= static_cast<U>(static_cast<U>(p[i]) << (8 * i));
  return std::bit_cast<T>(u);
}

}  // namespace detail

/// Encodes a grid in the binary format. Counts one cell write per cell.
template <class T>
std::vector<unsigned char> encode_rdtl(const Grid<T>& g, CellCounter* counter = nullptr) {
  std::vector<unsigned char> buf;
  buf.reserve(14 + sizeof(T) * (1 + g.size()));
  buf.insert(buf.end(), detail::kRdtlMagic, detail::kRdtlMagic + 4);
  buf.push_back(detail::kRdtlVersion);
  buf.push_back(static_cast<unsigned char>(dtype_of<T>::value));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.width()));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(g.height()));
  detail::put_le<T>(buf, g.nodata);
  if constexpr (std::endian::native == std::endian::little) {
    const auto* p = reinterpret_cast<const unsigned char*>(g.cells.data().data());
    buf.insert(buf.end(), p, p + sizeof(T) * g.size());
  } else {
    for (T v : g.cells.data()) detail::put_le<T>(buf, v);
  }
  if (counter) counter->add_writes(g.size());
  return buf;
}

/// Decodes the binary format, requiring dtype T. Counts one cell read per cell.
template <class T>
Grid<T> decode_rdtl_as(const unsigned char* data, std::size_t len, const std::string& what,
                       CellCounter* counter = nullptr) {
  if (len < 14 || std::memcmp(data, detail::kRdtlMagic, 4) != 0)
    throw std::runtime_error(what + ": not a raster file (bad magic)");
  if (data[4] != detail::kRdtlVersion)
    throw std::runtime_error(what + ": unsupported raster version");
  const auto code = data[5];
  if (code < 1 || code > 4) throw std::runtime_error(what + ": unknown dtype code");
  if (static_cast<DType>(code) != dtype_of<T>::value)
    throw std::runtime_error(what + ": dtype is " + dtype_name(static_cast<DType>(code)) +
                             ", expected " + dtype_name(dtype_of<T>::value));
  const auto width = detail::get_le<std::uint32_t>(data + 6);
  const auto height = detail::get_le<std::uint32_t>(data + 10);
  if (width < 1 || height < 1) throw std::runtime_error(what + ": empty raster");
  const std::uint64_t cells = static_cast<std::uint64_t>(width) * height;
  if (len != 14 + sizeof(T) * (1 + cells))
    throw std::runtime_error(what + ": truncated or oversized raster data");

  Grid<T> g(static_cast<int>(height), static_cast<int>(width),
            detail::get_le<T>(data + 14));
  const unsigned char* p = data + 14 + sizeof(T);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(g.cells.data().data(), p, sizeof(T) * cells);
  } else {
    for (std::uint64_t i = 0; i < cells; i++)
      g.cells.data()[i] = detail::get_le<T>(p + sizeof(T) * i);
  }
  if (counter) counter->add_reads(cells);
  return g;
}

inline std::vector<unsigned char> slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  return buf;
}

inline void spew_file(const std::string& path, const unsigned char* data, std::size_t len) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create " + path);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
  if (!out) throw std::runtime_error("write failed for " + path);
}

template <class T>
void write_rdtl(const Grid<T>& g, const std::string& path, CellCounter* counter = nullptr) {
  const auto buf = encode_rdtl(g, counter);
  spew_file(path, buf.data(), buf.size());
}

template <class T>
Grid<T> read_rdtl_as(const std::string& path, CellCounter* counter = nullptr) {
  const auto buf = slurp_file(path);
  return decode_rdtl_as<T>(buf.data(), buf.size(), path, counter);
}

/// Reads the header dtype without touching cell data.
inline DType peek_rdtl_dtype(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char hdr[6];
  if (!in.read(reinterpret_cast<char*>(hdr), 6) || std::memcmp(hdr, detail::kRdtlMagic, 4) != 0)
    throw std::runtime_error(path + ": not a raster file (bad magic)");
  if (hdr[5] < 1 || hdr[5] > 4) throw std::runtime_error(path + ": unknown dtype code");
  return static_cast<DType>(hdr[5]);
}

inline AnyGrid read_rdtl(const std::string& path, CellCounter* counter = nullptr) {
  switch (peek_rdtl_dtype(path)) {
    case DType::I16: return read_rdtl_as<std::int16_t>(path, counter);
    case DType::I32: return read_rdtl_as<std::int32_t>(path, counter);
    case DType::F32: return read_rdtl_as<float>(path, counter);
    case DType::F64: return read_rdtl_as<double>(path, counter);
  }
  throw std::runtime_error(path + ": unknown dtype code");
}

namespace detail {

template <class T>
std::string format_cell(T v) {
  char buf[40];
  if constexpr (std::is_same_v<T, float>)
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
  else if constexpr (std::is_same_v<T, double>)
    std::snprintf(buf, sizeof buf, "%.17g", v);
  else
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  return buf;
}

template <class T>
T parse_cell(const std::string& tok, const std::string& what) {
  try {
    if constexpr (std::is_same_v<T, float>) return std::stof(tok);
    else if constexpr (std::is_same_v<T, double>) return std::stod(tok);
    else {
      const long long v = std::stoll(tok);
      if (v < std::numeric_limits<T>::min() || v > std::numeric_limits<T>::max())
        throw std::out_of_range(tok);
      return static_cast<T>(v);
    }
  } catch (const std::exception&) {
    throw std::runtime_error(what + ": bad cell value '" + tok + "'");
  }
}

}  // namespace detail

template <class T>
void write_asc(const Grid<T>& g, const std::string& path, CellCounter* counter = nullptr) {
  std::ostringstream out;
  out << "ncols " << g.width() << "\n"
      << "nrows " << g.height() << "\n"
      << "xllcorner 0\n"
      << "yllcorner 0\n"
      << "cellsize 1\n"
      << "NODATA_value " << detail::format_cell(g.nodata) << "\n";
  for (int r = 0; r < g.height(); r++) {
    for (int c = 0; c < g.width(); c++) {
      if (c) out << ' ';
      out << detail::format_cell(g.cells(r, c));
    }
    out << '\n';
  }
  const std::string s = out.str();
  spew_file(path, reinterpret_cast<const unsigned char*>(s.data()), s.size());
  if (counter) counter->add_writes(g.size());
}

template <class T>
Grid<T> read_asc_as(const std::string& path, CellCounter* counter = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  long ncols = -1, nrows = -1;
  bool have_nodata = false;
  T nodata{};
  std::string tok;

  // Header: keyword/value pairs until the first bare number.
  while (in >> tok) {
    if (!tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) ||
                         tok[0] == '-' || tok[0] == '+' || tok[0] == '.'))
      break;
    std::string key;
    for (char ch : tok) key += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    std::string val;
    if (!(in >> val)) throw std::runtime_error(path + ": header key without value");
    if (key == "ncols") ncols = std::stol(val);
    else if (key == "nrows") nrows = std::stol(val);
    else if (key == "nodata_value") { nodata = detail::parse_cell<T>(val, path); have_nodata = true; }
    else if (key == "xllcorner" || key == "yllcorner" || key == "cellsize" ||
             key == "xllcenter" || key == "yllcenter") { /* lattice only */ }
    else throw std::runtime_error(path + ": unknown header field '" + tok + "'");
  }
  if (ncols < 1 || nrows < 1) throw std::runtime_error(path + ": missing ncols/nrows");
  if (!have_nodata) throw std::runtime_error(path + ": missing NODATA_value");

  Grid<T> g(static_cast<int>(nrows), static_cast<int>(ncols), nodata);
  std::uint64_t i = 0;
  const std::uint64_t cells = g.size();
  while (i < cells) {
    g.cells.data()[i++] = detail::parse_cell<T>(tok, path);
    if (i < cells && !(in >> tok))
      throw std::runtime_error(path + ": truncated cell data");
  }
  if (in >> tok) throw std::runtime_error(path + ": trailing data after cells");
  if (counter) counter->add_reads(cells);
  return g;
}

inline bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

/// Reads a raster by extension (.rdtl binary, .asc ASCII). ASCII carries no
/// dtype, so ascii_dtype names the cell type to parse into.
inline AnyGrid read_raster(const std::string& path, CellCounter* counter = nullptr,
                           DType ascii_dtype = DType::F32) {
  if (has_suffix(path, ".asc")) {
    switch (ascii_dtype) {
      case DType::I16: return read_asc_as<std::int16_t>(path, counter);
      case DType::I32: return read_asc_as<std::int32_t>(path, counter);
      case DType::F32: return read_asc_as<float>(path, counter);
      case DType::F64: return read_asc_as<double>(path, counter);
    }
    throw std::runtime_error("unknown ascii dtype");
  }
  return read_rdtl(path, counter);
}

inline void write_raster(const AnyGrid& g, const std::string& path,
                         CellCounter* counter = nullptr) {
  std::visit([&](const auto& t) {
    if (has_suffix(path, ".asc")) write_asc(t, path, counter);
    else write_rdtl(t, path, counter);
  }, g);
}

}  // namespace tileflood

#endif
