/**
  @file
  @brief Lossless stream codec for cached intermediates (deflate via zlib).

  Streams are self-identifying: a 4-byte magic and the raw size precede the
  deflate data, so a reader can reject anything that is not a compressed
  cache file.
*/
#ifndef tileflood_codec_hpp
#define tileflood_codec_hpp

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

#include "tileflood/io.hpp"

namespace tileflood {

namespace detail {
inline constexpr char kCodecMagic[4] = {'T', 'F', 'Z', '1'};
}

inline std::vector<unsigned char> deflate_bytes(const std::vector<unsigned char>& raw) {
  uLongf cap = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> out(12 + cap);
  std::memcpy(out.data(), detail::kCodecMagic, 4);
  const std::uint64_t n = raw.size();
  for (int i = 0; i < 8; i++) out[4 + i] = static_cast<unsigned char>((n >> (8 * i)) & 0xff);
  if (compress2(out.data() + 12, &cap, raw.data(), static_cast<uLong>(raw.size()),
                Z_DEFAULT_COMPRESSION) != Z_OK)
    throw std::runtime_error("deflate failed");
  out.resize(12 + cap);
  return out;
}

inline std::vector<unsigned char> inflate_bytes(const std::vector<unsigned char>& packed) {
  if (packed.size() < 12 || std::memcmp(packed.data(), detail::kCodecMagic, 4) != 0)
    throw std::runtime_error("not a compressed stream (bad magic)");
  std::uint64_t n = 0;
  for (int i = 0; i < 8; i++) n |= static_cast<std::uint64_t>(packed[4 + i]) << (8 * i);
  std::vector<unsigned char> out(n);
  uLongf got = static_cast<uLongf>(n);
  const int rc = uncompress(out.data(), &got, packed.data() + 12,
                            static_cast<uLong>(packed.size() - 12));
  if (rc != Z_OK || got != n) throw std::runtime_error("inflate failed");
  return out;
}

template <class T>
void write_rdtl_compressed(const Grid<T>& g, const std::string& path,
                           CellCounter* counter = nullptr) {
  const auto raw = encode_rdtl(g, counter);  // counted pre-compression
  const auto packed = deflate_bytes(raw);
  spew_file(path, packed.data(), packed.size());
}

template <class T>
Grid<T> read_rdtl_compressed_as(const std::string& path, CellCounter* counter = nullptr) {
  const auto raw = inflate_bytes(slurp_file(path));
  return decode_rdtl_as<T>(raw.data(), raw.size(), path, counter);
}

}  // namespace tileflood

#endif
