/**
  @file
  @brief Spillover elevations and the watershed spillover graph.

  Spill values live in a three-level total order: the bottom sentinel (the
  virtual DEM-edge level, below everything), the NoData level, and data
  values ordered numerically. The bottom sentinel exists only inside graphs;
  it is never written to a raster.
*/
#ifndef tileflood_graph_hpp
#define tileflood_graph_hpp

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "tileflood/raster.hpp"

namespace tileflood {

enum class SpillLevel : std::uint8_t { Bottom = 0, NoData = 1, Data = 2 };

template <class T>
struct Spill {
  SpillLevel level = SpillLevel::Bottom;
  T value{};  // meaningful at Data level; carries the sentinel at NoData level

  static Spill bottom() { return Spill{SpillLevel::Bottom, T{}}; }
  static Spill data(T v) { return Spill{SpillLevel::Data, v}; }
  static Spill of_cell(T v, const FloodOrder<T>& ord) {
    return ord.is_nodata(v) ? Spill{SpillLevel::NoData, v} : Spill{SpillLevel::Data, v};
  }

  bool is_data() const { return level == SpillLevel::Data; }

  friend bool operator<(const Spill& a, const Spill& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.level == SpillLevel::Data) return a.value < b.value;
    return false;  // Bottom == Bottom, NoData == NoData
  }
  friend bool operator==(const Spill& a, const Spill& b) {
    if (a.level != b.level) return false;
    return a.level != SpillLevel::Data || a.value == b.value;
  }

  static Spill max(const Spill& a, const Spill& b) { return a < b ? b : a; }
  static Spill min(const Spill& a, const Spill& b) { return b < a ? b : a; }
};

/// Association from unordered label pairs to the minimum spillover elevation
/// observed between the two watersheds. Keys are canonicalized (lo, hi);
/// self-pairs are rejected.
template <class T>
class SpilloverGraph {
 public:
  struct Entry {
    std::uint32_t a = 0;  // a < b
    std::uint32_t b = 0;
    Spill<T> spill;
  };

  static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
    if (a == b) throw std::logic_error("spillover graph: self-pair");
    const std::uint32_t lo = std::min(a, b);
    const std::uint32_t hi = std::max(a, b);
    return (static_cast<std::uint64_t>(lo) << 32) | hi;
  }

  /// Records a meeting of two watersheds, keeping the lowest spill seen.
  void lower(std::uint32_t a, std::uint32_t b, Spill<T> s) {
    auto [it, inserted] = edges_.try_emplace(key(a, b), s);
    if (!inserted && s < it->second) it->second = s;
  }

  std::optional<Spill<T>> lookup(std::uint32_t a, std::uint32_t b) const {
    auto it = edges_.find(key(a, b));
    if (it == edges_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  /// Entries sorted by (a, b); the deterministic order used for
  /// serialization and merging.
  std::vector<Entry> sorted_entries() const {
    std::vector<Entry> out;
    out.reserve(edges_.size());
    for (const auto& [k, s] : edges_)
      out.push_back(Entry{static_cast<std::uint32_t>(k >> 32),
                          static_cast<std::uint32_t>(k & 0xffffffffu), s});
    std::sort(out.begin(), out.end(), [](const Entry& x, const Entry& y) {
      return x.a != y.a ? x.a < y.a : x.b < y.b;
    });
    return out;
  }

  /// Unions another graph into this one, remapping its labels through fn.
  template <class MapFn>
  void merge_from(const SpilloverGraph& other, MapFn&& fn) {
    for (const auto& [k, s] : other.edges_)
      lower(fn(static_cast<std::uint32_t>(k >> 32)),
            fn(static_cast<std::uint32_t>(k & 0xffffffffu)), s);
  }

  friend bool operator==(const SpilloverGraph& x, const SpilloverGraph& y) {
    return x.edges_ == y.edges_;
  }

 private:
  std::unordered_map<std::uint64_t, Spill<T>> edges_;
};

}  // namespace tileflood

#endif
