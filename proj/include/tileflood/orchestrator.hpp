/**
  @file
  @brief Single-producer/multi-consumer execution of the tiled fill.

  Phase 1 dispatches fill jobs round-robin to a pool of workers; each worker
  fills its tile, returns a serialized summary (perimeter elevations and
  labels plus the tile's spillover graph), and keeps, caches, or drops its
  intermediate per the chosen strategy. The producer merges the summaries
  into a master graph, floods it, and in phase 2 sends every tile its
  label-to-elevation slice; the same worker (round-robin is stable) reloads
  or recomputes the intermediate, raises cells, and writes the output tile.

  Producer and workers communicate only by value through message queues; the
  producer never touches raster cell data between the phases.
*/
#ifndef tileflood_orchestrator_hpp
#define tileflood_orchestrator_hpp

#include <bit>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "tileflood/codec.hpp"
#include "tileflood/graph_merge.hpp"
#include "tileflood/io.hpp"
#include "tileflood/manifest.hpp"
#include "tileflood/tile_fill.hpp"
#include "tileflood/tiling.hpp"

namespace tileflood {

enum class Strategy { Evict, Cache, CacheC, Retain };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Evict: return "evict";
    case Strategy::Cache: return "cache";
    case Strategy::CacheC: return "cachec";
    case Strategy::Retain: return "retain";
  }
  throw std::invalid_argument("unknown strategy");
}

inline Strategy strategy_from_name(const std::string& s) {
  if (s == "evict") return Strategy::Evict;
  if (s == "cache") return Strategy::Cache;
  if (s == "cachec") return Strategy::CacheC;
  if (s == "retain") return Strategy::Retain;
  throw std::invalid_argument("unknown strategy '" + s + "' (want evict|cache|cachec|retain)");
}

/// What one consumer sends back after filling a tile: the four perimeter
/// sides and the tile's spillover graph.
template <class T>
struct TileSummary {
  int row = 0, col = 0;
  int width = 0, height = 0;
  T nodata{};
  std::uint32_t max_label = kEdgeLabel;
  EdgeVectors<T> edges;
  SpilloverGraph<T> graph;
};

// ---------------------------------------------------------------------------
// Wire encoding (little-endian, deterministic entry order)

namespace wire {

struct Reader {
  const unsigned char* p;
  const unsigned char* end;

  explicit Reader(const std::vector<unsigned char>& buf)
      : p(buf.data()), end(buf.data() + buf.size()) {}

  template <class T>
  T get() {
    if (p + sizeof(T) > end) throw std::runtime_error("truncated message");
    T v = detail::get_le<T>(p);
    p += sizeof(T);
    return v;
  }
  void expect_end() const {
    if (p != end) throw std::runtime_error("trailing bytes in message");
  }
};

template <class T>
void put_side(std::vector<unsigned char>& buf, const SideVectors<T>& s) {
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(s.elev.size()));
  for (T v : s.elev) detail::put_le<T>(buf, v);
  for (std::uint32_t l : s.label) detail::put_le<std::uint32_t>(buf, l);
}

template <class T>
SideVectors<T> get_side(Reader& r) {
  SideVectors<T> s;
  const auto n = r.get<std::uint32_t>();
  s.elev.reserve(n);
  s.label.reserve(n);
  for (std::uint32_t i = 0; i < n; i++) s.elev.push_back(r.get<T>());
  for (std::uint32_t i = 0; i < n; i++) s.label.push_back(r.get<std::uint32_t>());
  return s;
}

template <class T>
void put_spill(std::vector<unsigned char>& buf, const Spill<T>& s) {
  buf.push_back(static_cast<unsigned char>(s.level));
  detail::put_le<T>(buf, s.value);
}

template <class T>
Spill<T> get_spill(Reader& r) {
  const auto level = r.get<std::uint8_t>();
  if (level > 2) throw std::runtime_error("bad spill level in message");
  Spill<T> s;
  s.level = static_cast<SpillLevel>(level);
  s.value = r.get<T>();
  return s;
}

}  // namespace wire

template <class T>
std::vector<unsigned char> encode_summary(const TileSummary<T>& s) {
  std::vector<unsigned char> buf;
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(s.row));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(s.col));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(s.width));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(s.height));
  buf.push_back(static_cast<unsigned char>(dtype_of<T>::value));
  detail::put_le<T>(buf, s.nodata);
  detail::put_le<std::uint32_t>(buf, s.max_label);
  wire::put_side(buf, s.edges.north);
  wire::put_side(buf, s.edges.south);
  wire::put_side(buf, s.edges.west);
  wire::put_side(buf, s.edges.east);
  const auto entries = s.graph.sorted_entries();
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    detail::put_le<std::uint32_t>(buf, e.a);
    detail::put_le<std::uint32_t>(buf, e.b);
    wire::put_spill(buf, e.spill);
  }
  return buf;
}

template <class T>
TileSummary<T> decode_summary(const std::vector<unsigned char>& buf) {
  wire::Reader r(buf);
  TileSummary<T> s;
  s.row = static_cast<int>(r.get<std::uint32_t>());
  s.col = static_cast<int>(r.get<std::uint32_t>());
  s.width = static_cast<int>(r.get<std::uint32_t>());
  s.height = static_cast<int>(r.get<std::uint32_t>());
  if (r.get<std::uint8_t>() != static_cast<std::uint8_t>(dtype_of<T>::value))
    throw std::runtime_error("summary dtype mismatch");
  s.nodata = r.get<T>();
  s.max_label = r.get<std::uint32_t>();
  s.edges.north = wire::get_side<T>(r);
  s.edges.south = wire::get_side<T>(r);
  s.edges.west = wire::get_side<T>(r);
  s.edges.east = wire::get_side<T>(r);
  const auto n = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; i++) {
    const auto a = r.get<std::uint32_t>();
    const auto b = r.get<std::uint32_t>();
    s.graph.lower(a, b, wire::get_spill<T>(r));
  }
  r.expect_end();
  return s;
}

/// Phase-2 payload: this tile's local label -> final drainage elevation.
template <class T>
using LabelSlice = std::vector<std::pair<std::uint32_t, Spill<T>>>;

template <class T>
std::vector<unsigned char> encode_slice(const LabelSlice<T>& slice) {
  std::vector<unsigned char> buf;
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(slice.size()));
  for (const auto& [label, spill] : slice) {
    detail::put_le<std::uint32_t>(buf, label);
    wire::put_spill(buf, spill);
  }
  return buf;
}

template <class T>
LabelSlice<T> decode_slice(const std::vector<unsigned char>& buf) {
  wire::Reader r(buf);
  LabelSlice<T> slice;
  const auto n = r.get<std::uint32_t>();
  slice.reserve(n);
  for (std::uint32_t i = 0; i < n; i++) {
    const auto label = r.get<std::uint32_t>();
    slice.emplace_back(label, wire::get_spill<T>(r));
  }
  r.expect_end();
  return slice;
}

/// Relabels summaries to globally unique labels (the reserved edge label 1
/// is preserved) and returns the per-tile offset table. Summaries must be in
/// row-major tile order.
template <class T>
LabelOffsets uniquify_labels(std::vector<TileSummary<T>>& summaries) {
  std::vector<std::uint32_t> maxes;
  maxes.reserve(summaries.size());
  for (const auto& s : summaries) maxes.push_back(s.max_label);
  const LabelOffsets off = uniquify_labels(std::span<const std::uint32_t>(maxes));

  for (std::size_t i = 0; i < summaries.size(); i++) {
    auto remap = [&](std::uint32_t l) { return off.to_global(static_cast<int>(i), l); };
    for (SideVectors<T>* side : {&summaries[i].edges.north, &summaries[i].edges.south,
                                 &summaries[i].edges.west, &summaries[i].edges.east})
      for (auto& l : side->label) l = remap(l);
    SpilloverGraph<T> g;
    g.merge_from(summaries[i].graph, remap);
    summaries[i].graph = std::move(g);
  }
  return off;
}

// ---------------------------------------------------------------------------
// Run statistics

struct TileStats {
  int row = 0, col = 0;
  std::uint64_t cells = 0;
  std::uint64_t cell_reads = 0;
  std::uint64_t cell_writes = 0;
  std::uint64_t summary_bytes = 0;  // consumer -> producer
  std::uint64_t payload_bytes = 0;  // producer -> consumer (phase 2)
  double ms_phase1 = 0.0;
  double ms_phase2 = 0.0;

  std::uint64_t bytes_tx() const { return summary_bytes + payload_bytes; }
};

struct RunStats {
  std::vector<TileStats> tiles;  // row-major
  double producer_ms = 0.0;      // merge + graph flood between the phases
  double wall_ms = 0.0;

  std::uint64_t total_reads() const {
    std::uint64_t n = 0;
    for (const auto& t : tiles) n += t.cell_reads;
    return n;
  }
  std::uint64_t total_writes() const {
    std::uint64_t n = 0;
    for (const auto& t : tiles) n += t.cell_writes;
    return n;
  }
  std::uint64_t total_cells() const {
    std::uint64_t n = 0;
    for (const auto& t : tiles) n += t.cells;
    return n;
  }
};

/// One record per tile, flat key-value text.
inline void write_stats_report(const RunStats& stats, std::ostream& out) {
  for (const auto& t : stats.tiles)
    out << "tile " << t.row << " " << t.col
        << " reads " << t.cell_reads
        << " writes " << t.cell_writes
        << " bytes_tx " << t.bytes_tx()
        << " ms_phase1 " << t.ms_phase1
        << " ms_phase2 " << t.ms_phase2 << "\n";
  out << "producer_ms " << stats.producer_ms << "\n";
  out << "wall_ms " << stats.wall_ms << "\n";
  out << "total reads " << stats.total_reads() << " writes " << stats.total_writes()
      << " cells " << stats.total_cells() << "\n";
}

struct CheckReport {
  bool pass = true;
  std::vector<std::string> findings;
};

/// Verifies the per-cell disk-access counts of a completed run:
/// retain 1R/1W, evict 2R/1W, cache and cachec (pre-compression) 3R/3W.
inline CheckReport io_counters_check(const RunStats& stats, const TileLayout& layout,
                                     Strategy strategy) {
  int reads_per_cell = 0, writes_per_cell = 0;
  switch (strategy) {
    case Strategy::Retain: reads_per_cell = 1; writes_per_cell = 1; break;
    case Strategy::Evict:  reads_per_cell = 2; writes_per_cell = 1; break;
    case Strategy::Cache:
    case Strategy::CacheC: reads_per_cell = 3; writes_per_cell = 3; break;
  }
  CheckReport report;
  for (const auto& t : stats.tiles) {
    const std::uint64_t cells =
        static_cast<std::uint64_t>(layout.at(t.row, t.col).width) * layout.at(t.row, t.col).height;
    const std::uint64_t want_r = reads_per_cell * cells;
    const std::uint64_t want_w = writes_per_cell * cells;
    if (t.cell_reads != want_r)
      report.findings.push_back("tile (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                "): counted " + std::to_string(t.cell_reads) + " cell reads, " +
                                strategy_name(strategy) + " requires " + std::to_string(want_r));
    if (t.cell_writes != want_w)
      report.findings.push_back("tile (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                "): counted " + std::to_string(t.cell_writes) + " cell writes, " +
                                strategy_name(strategy) + " requires " + std::to_string(want_w));
  }
  report.pass = report.findings.empty();
  return report;
}

/// Per-tile communication bound: summary plus phase-2 payload must fit in
/// (4*sqrt(n))*(3E+17) bytes plus fixed framing. Meaningful for near-square
/// tiles, which is how production layouts are shaped.
inline CheckReport comm_bound_check(const RunStats& stats, const TileLayout& layout,
                                    int elev_bytes, std::uint64_t framing_allowance = 256) {
  CheckReport report;
  for (const auto& t : stats.tiles) {
    const auto& spec = layout.at(t.row, t.col);
    const double n = static_cast<double>(spec.width) * spec.height;
    const double bound = 4.0 * std::sqrt(n) * (3.0 * elev_bytes + 17.0) +
                         static_cast<double>(framing_allowance);
    if (static_cast<double>(t.bytes_tx()) > bound)
      report.findings.push_back("tile (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                "): " + std::to_string(t.bytes_tx()) + " bytes exceeds bound " +
                                std::to_string(static_cast<std::uint64_t>(bound)));
  }
  report.pass = report.findings.empty();
  return report;
}

// ---------------------------------------------------------------------------
// Message plumbing

template <class M>
class MessageQueue {
 public:
  void push(M m) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      q_.push_back(std::move(m));
    }
    cv_.notify_one();
  }
  M pop() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return !q_.empty(); });
    M m = std::move(q_.front());
    q_.pop_front();
    return m;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<M> q_;
};

struct RunConfig {
  Strategy strategy = Strategy::Evict;
  int workers = 1;
  std::string output_dir;
  std::string cache_dir;  // required for cache/cachec
};

namespace detail {

struct FillJob {
  int tile_idx = 0;
  TileSpec spec;
  EdgeFlags flags;
};
struct FinalizeJob {
  int tile_idx = 0;
  TileSpec spec;
  EdgeFlags flags;  // evict recomputes phase 1 with identical inputs
  std::vector<unsigned char> slice;
  std::string output_path;
};
struct StopJob {};
using Job = std::variant<FillJob, FinalizeJob, StopJob>;

struct Reply {
  int tile_idx = 0;
  int phase = 0;
  std::vector<unsigned char> summary;  // phase 1 only
  std::uint64_t cell_reads = 0;
  std::uint64_t cell_writes = 0;
  double ms = 0.0;
  std::string error;  // nonempty aborts the run
};

inline Grid<std::int32_t> labels_as_grid(const LabelGrid& labels) {
  Grid<std::int32_t> g(labels.height(), labels.width(), 0);
  for (std::size_t i = 0; i < labels.size(); i++)
    g.cells.data()[i] = std::bit_cast<std::int32_t>(labels.data()[i]);
  return g;
}

inline LabelGrid grid_as_labels(const Grid<std::int32_t>& g) {
  LabelGrid labels(g.height(), g.width(), 0);
  for (std::size_t i = 0; i < g.size(); i++)
    labels.data()[i] = std::bit_cast<std::uint32_t>(g.cells.data()[i]);
  return labels;
}

template <class T>
class Consumer {
 public:
  Consumer(const RunConfig& cfg, MessageQueue<Reply>* results)
      : cfg_(cfg), results_(results) {}

  MessageQueue<Job>& inbox() { return inbox_; }

  void start() {
    thread_ = std::thread([this] { loop(); });
  }
  void join() {
    if (thread_.joinable()) thread_.join();
  }

 private:
  void loop() {
    for (;;) {
      Job job = inbox_.pop();
      if (std::holds_alternative<StopJob>(job)) return;
      Reply reply;
      try {
        if (auto* fill = std::get_if<FillJob>(&job)) {
          reply = run_fill_job(*fill);
        } else {
          reply = run_finalize_job(std::get<FinalizeJob>(job));
        }
      } catch (const std::exception& e) {
        reply.tile_idx = std::holds_alternative<FillJob>(job)
                             ? std::get<FillJob>(job).tile_idx
                             : std::get<FinalizeJob>(job).tile_idx;
        reply.error = e.what();
      }
      results_->push(std::move(reply));
    }
  }

  std::string cache_path(const TileSpec& spec, const char* ext) const {
    return (std::filesystem::path(cfg_.cache_dir) /
            (std::to_string(spec.row) + "_" + std::to_string(spec.col) + "." + ext)).string();
  }

  Reply run_fill_job(const FillJob& job) {
    const auto t0 = std::chrono::steady_clock::now();
    CellCounter counter;

    Grid<T> dem = read_rdtl_as<T>(job.spec.path, &counter);
    if (dem.width() != job.spec.width || dem.height() != job.spec.height)
      throw std::runtime_error(job.spec.path + ": dimensions disagree with layout");
    FilledTile<T> filled = fill_tile(dem, job.flags);

    TileSummary<T> summary;
    summary.row = job.spec.row;
    summary.col = job.spec.col;
    summary.width = dem.width();
    summary.height = dem.height();
    summary.nodata = dem.nodata;
    summary.max_label = filled.max_label;
    summary.edges = extract_edges(filled.filled, filled.labels);
    summary.graph = filled.graph;  // graph itself is not needed past the summary

    Reply reply;
    reply.tile_idx = job.tile_idx;
    reply.phase = 1;
    reply.summary = encode_summary(summary);

    switch (cfg_.strategy) {
      case Strategy::Retain:
        filled.graph = SpilloverGraph<T>{};  // only elevations and labels are needed later
        retained_[job.tile_idx] = std::move(filled);
        break;
      case Strategy::Cache:
        write_rdtl(filled.filled, cache_path(job.spec, "fill"), &counter);
        write_rdtl(labels_as_grid(filled.labels), cache_path(job.spec, "lbl"), &counter);
        break;
      case Strategy::CacheC:
        write_rdtl_compressed(filled.filled, cache_path(job.spec, "fill"), &counter);
        write_rdtl_compressed(labels_as_grid(filled.labels), cache_path(job.spec, "lbl"), &counter);
        break;
      case Strategy::Evict:
        break;  // dropped; phase 2 recomputes
    }

    reply.cell_reads = counter.cell_reads.load();
    reply.cell_writes = counter.cell_writes.load();
    reply.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return reply;
  }

  Reply run_finalize_job(const FinalizeJob& job) {
    const auto t0 = std::chrono::steady_clock::now();
    CellCounter counter;

    Grid<T> filled;
    LabelGrid labels;
    switch (cfg_.strategy) {
      case Strategy::Retain: {
        auto it = retained_.find(job.tile_idx);
        if (it == retained_.end())
          throw std::runtime_error("retain: no retained intermediate for tile " +
                                   std::to_string(job.tile_idx));
        filled = std::move(it->second.filled);
        labels = std::move(it->second.labels);
        retained_.erase(it);
        break;
      }
      case Strategy::Cache:
        filled = read_rdtl_as<T>(cache_path(job.spec, "fill"), &counter);
        labels = grid_as_labels(read_rdtl_as<std::int32_t>(cache_path(job.spec, "lbl"), &counter));
        break;
      case Strategy::CacheC:
        filled = read_rdtl_compressed_as<T>(cache_path(job.spec, "fill"), &counter);
        labels = grid_as_labels(
            read_rdtl_compressed_as<std::int32_t>(cache_path(job.spec, "lbl"), &counter));
        break;
      case Strategy::Evict: {
        Grid<T> dem = read_rdtl_as<T>(job.spec.path, &counter);
        FilledTile<T> redo = fill_tile(dem, job.flags);
        filled = std::move(redo.filled);
        labels = std::move(redo.labels);
        break;
      }
    }

    // Raise every data cell to its label's global drainage elevation.
    const LabelSlice<T> slice = decode_slice<T>(job.slice);
    std::vector<Spill<T>> by_label;
    for (const auto& [label, spill] : slice) {
      if (label >= by_label.size()) by_label.resize(label + 1);
      by_label[label] = spill;
    }
    const FloodOrder<T> ord{filled.nodata};
    for (std::size_t i = 0; i < filled.size(); i++) {
      T& v = filled.cells.data()[i];
      if (ord.is_nodata(v)) continue;
      const std::uint32_t l = labels.data()[i];
      if (l >= by_label.size())
        throw std::runtime_error("finalize: label " + std::to_string(l) + " missing from slice");
      const Spill<T>& sp = by_label[l];
      if (sp.is_data() && v < sp.value) v = sp.value;
    }

    write_rdtl(filled, job.output_path, &counter);

    Reply reply;
    reply.tile_idx = job.tile_idx;
    reply.phase = 2;
    reply.cell_reads = counter.cell_reads.load();
    reply.cell_writes = counter.cell_writes.load();
    reply.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return reply;
  }

  RunConfig cfg_;
  MessageQueue<Reply>* results_;
  MessageQueue<Job> inbox_;
  std::map<int, FilledTile<T>> retained_;
  std::thread thread_;
};

}  // namespace detail

/**
  @brief Runs the full two-phase fill over a tiled layout.

  Writes one output tile per input tile under cfg.output_dir (named
  `<row>_<col>.rdtl`) plus a `tiles.txt` manifest, and returns per-tile
  counters. Output bytes are identical for every strategy and worker count.
*/
template <class T>
RunStats run_fill(const TileLayout& layout, const RunConfig& cfg) {
  layout.validate();
  if (cfg.workers < 1) throw std::invalid_argument("need at least one worker");
  if (cfg.output_dir.empty()) throw std::invalid_argument("output directory required");
  if ((cfg.strategy == Strategy::Cache || cfg.strategy == Strategy::CacheC) &&
      cfg.cache_dir.empty())
    throw std::invalid_argument("cache/cachec strategies require a cache directory");

  const auto wall0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  if (cfg.strategy == Strategy::Cache || cfg.strategy == Strategy::CacheC)
    std::filesystem::create_directories(cfg.cache_dir);

  const int n_tiles = layout.tile_count();
  const int n_workers = cfg.workers;

  MessageQueue<detail::Reply> results;
  std::vector<std::unique_ptr<detail::Consumer<T>>> pool;
  pool.reserve(n_workers);
  for (int i = 0; i < n_workers; i++)
    pool.push_back(std::make_unique<detail::Consumer<T>>(cfg, &results));

  struct Shutdown {
    std::vector<std::unique_ptr<detail::Consumer<T>>>* pool;
    ~Shutdown() {
      for (auto& w : *pool) w->inbox().push(detail::StopJob{});
      for (auto& w : *pool) w->join();
    }
  } shutdown{&pool};

  for (auto& w : pool) w->start();

  // Phase 1: round-robin dispatch. The mapping tile -> worker must be stable
  // so retain's phase-2 jobs land on the worker holding the intermediate.
  auto worker_of = [&](int tile_idx) { return tile_idx % n_workers; };
  for (int idx = 0; idx < n_tiles; idx++) {
    detail::FillJob job;
    job.tile_idx = idx;
    job.spec = layout.at_index(idx);
    job.flags = layout.edge_flags(job.spec.row, job.spec.col);
    pool[worker_of(idx)]->inbox().push(std::move(job));
  }

  RunStats stats;
  stats.tiles.resize(n_tiles);
  std::vector<std::vector<unsigned char>> summary_bytes(n_tiles);
  std::vector<std::uint8_t> seen(n_tiles, 0);
  for (int i = 0; i < n_tiles; i++) {
    detail::Reply r = results.pop();
    if (!r.error.empty())
      throw std::runtime_error("worker failed on tile " + std::to_string(r.tile_idx) + ": " + r.error);
    if (r.phase != 1 || seen[r.tile_idx]++)
      throw std::runtime_error("protocol violation: duplicate or out-of-phase summary");
    TileStats& t = stats.tiles[r.tile_idx];
    const TileSpec& spec = layout.at_index(r.tile_idx);
    t.row = spec.row;
    t.col = spec.col;
    t.cells = static_cast<std::uint64_t>(spec.width) * spec.height;
    t.cell_reads = r.cell_reads;
    t.cell_writes = r.cell_writes;
    t.ms_phase1 = r.ms;
    t.summary_bytes = r.summary.size();
    summary_bytes[r.tile_idx] = std::move(r.summary);
  }

  // Producer: merge summaries, flood the master graph, slice the result.
  // Works on summaries only; raster cells are never touched here.
  const auto prod0 = std::chrono::steady_clock::now();
  std::vector<TileSummary<T>> summaries;
  summaries.reserve(n_tiles);
  for (int idx = 0; idx < n_tiles; idx++)
    summaries.push_back(decode_summary<T>(summary_bytes[idx]));
  summary_bytes.clear();

  const T nodata = summaries[0].nodata;
  for (const auto& s : summaries)
    if (!(s.nodata == nodata))
      throw std::runtime_error("tiles disagree on the NoData sentinel");
  const FloodOrder<T> ord{nodata};

  const LabelOffsets offsets = uniquify_labels(summaries);

  SpilloverGraph<T> master;
  for (const auto& s : summaries) master.merge_from(s.graph, [](std::uint32_t l) { return l; });

  const int gh = layout.tiles_high();
  const int gw = layout.tiles_wide();
  auto summary_at = [&](int r, int c) -> const TileSummary<T>& {
    return summaries[layout.index(r, c)];
  };
  for (int r = 0; r < gh; r++) {
    for (int c = 0; c < gw; c++) {
      const TileSummary<T>& here = summary_at(r, c);
      if (c + 1 < gw) {
        const TileSummary<T>& right = summary_at(r, c + 1);
        handle_edge(here.edges.east.elev, here.edges.east.label,
                    right.edges.west.elev, right.edges.west.label, ord, master);
      }
      if (r + 1 < gh) {
        const TileSummary<T>& below = summary_at(r + 1, c);
        handle_edge(here.edges.south.elev, here.edges.south.label,
                    below.edges.north.elev, below.edges.north.label, ord, master);
      }
      if (r + 1 < gh && c + 1 < gw) {
        const TileSummary<T>& right = summary_at(r, c + 1);
        const TileSummary<T>& below = summary_at(r + 1, c);
        const TileSummary<T>& diag = summary_at(r + 1, c + 1);
        // SE corner of (r,c) against NW corner of (r+1,c+1)
        handle_corner(here.edges.south.elev.back(), here.edges.south.label.back(),
                      diag.edges.north.elev.front(), diag.edges.north.label.front(), ord, master);
        // SW corner of (r,c+1) against NE corner of (r+1,c)
        handle_corner(right.edges.south.elev.front(), right.edges.south.label.front(),
                      below.edges.north.elev.back(), below.edges.north.label.back(), ord, master);
      }
    }
  }

  const std::vector<Spill<T>> elevations = flood_graph(master, offsets.total_labels);

  std::vector<std::vector<unsigned char>> slices(n_tiles);
  for (int idx = 0; idx < n_tiles; idx++) {
    LabelSlice<T> slice;
    slice.reserve(summaries[idx].max_label);
    for (std::uint32_t local = kFirstLabel; local <= summaries[idx].max_label; local++)
      slice.emplace_back(local, elevations[offsets.to_global(idx, local)]);
    slices[idx] = encode_slice(slice);
  }
  summaries.clear();
  stats.producer_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - prod0).count();

  // Phase 2: same worker mapping; each tile gets its slice and is finalized.
  TileLayout out_layout(gh, gw);
  for (int idx = 0; idx < n_tiles; idx++) {
    const TileSpec& spec = layout.at_index(idx);
    detail::FinalizeJob job;
    job.tile_idx = idx;
    job.spec = spec;
    job.flags = layout.edge_flags(spec.row, spec.col);
    job.output_path = (std::filesystem::path(cfg.output_dir) /
                       (std::to_string(spec.row) + "_" + std::to_string(spec.col) + ".rdtl")).string();
    stats.tiles[idx].payload_bytes = slices[idx].size();
    job.slice = std::move(slices[idx]);

    TileSpec out_spec = spec;
    out_spec.path = job.output_path;
    out_layout.at(spec.row, spec.col) = out_spec;

    pool[worker_of(idx)]->inbox().push(std::move(job));
  }

  std::vector<std::uint8_t> seen2(n_tiles, 0);
  for (int i = 0; i < n_tiles; i++) {
    detail::Reply r = results.pop();
    if (!r.error.empty())
      throw std::runtime_error("worker failed on tile " + std::to_string(r.tile_idx) + ": " + r.error);
    if (r.phase != 2 || seen2[r.tile_idx]++)
      throw std::runtime_error("protocol violation: duplicate or out-of-phase finalize reply");
    TileStats& t = stats.tiles[r.tile_idx];
    t.cell_reads += r.cell_reads;
    t.cell_writes += r.cell_writes;
    t.ms_phase2 = r.ms;
  }

  write_manifest(out_layout, (std::filesystem::path(cfg.output_dir) / "tiles.txt").string());
  stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall0).count();
  return stats;
}

/// Dtype-dispatching wrapper: reads the layout's cell type from the first
/// tile's header.
inline RunStats run_fill_any(const TileLayout& layout, const RunConfig& cfg) {
  switch (peek_rdtl_dtype(layout.at(0, 0).path)) {
    case DType::I16: return run_fill<std::int16_t>(layout, cfg);
    case DType::I32: return run_fill<std::int32_t>(layout, cfg);
    case DType::F32: return run_fill<float>(layout, cfg);
    case DType::F64: return run_fill<double>(layout, cfg);
  }
  throw std::runtime_error("unknown dtype in layout");
}

}  // namespace tileflood

#endif
