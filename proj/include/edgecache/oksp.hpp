#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "edgecache/cache_table.hpp"
#include "edgecache/ksp_reference.hpp"
#include "edgecache/model.hpp"

namespace edgecache {

/// Raised when a solver invariant (reduced-cost non-negativity, monotone
/// path costs, capacity or replica bookkeeping) fails.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A way for the path to reach MEC j straight from s: cache `tile` on j,
/// with or without collecting the tile's global profit.
struct PathEntry {
  Nanos profit = 0;
  TileId tile = 0;
  bool uses_global = false;

  friend bool operator==(const PathEntry&, const PathEntry&) = default;
};

/// Descending candidates for the s -> j edge. The bulk lives in a sorted
/// array consumed through a cursor; entries that become feasible again after
/// a tile leaves j go to a small max-heap merged at the head.
class PathArray {
 public:
  PathArray() = default;
  explicit PathArray(std::vector<PathEntry> sorted);

  bool empty() const { return cursor_ == sorted_.size() && restored_.empty(); }
  const PathEntry& head() const;
  void pop_head();
  void restore(const PathEntry& entry);

  std::size_t size() const { return sorted_.size() - cursor_ + restored_.size(); }
  const std::vector<PathEntry>& sorted_entries() const { return sorted_; }

  /// Ordering used everywhere: profit desc, tile asc, global-using entry last on ties.
  static bool before(const PathEntry& a, const PathEntry& b);

 private:
  struct After {
    bool operator()(const PathEntry& a, const PathEntry& b) const { return before(b, a); }
  };
  std::vector<PathEntry> sorted_;
  std::size_t cursor_ = 0;
  std::priority_queue<PathEntry, std::vector<PathEntry>, After> restored_;
};

struct LossEntry {
  Nanos loss = 0;
  TileId tile = 0;

  friend bool operator==(const LossEntry&, const LossEntry&) = default;
};

/// Min-ordered transfer losses for one ordered MEC pair, lazily purged.
class LossQueue {
 public:
  bool empty() const { return heap_.empty(); }
  const LossEntry& head() const { return heap_.top(); }
  void push(LossEntry e) { heap_.push(e); }
  void pop() { heap_.pop(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Greater {
    bool operator()(const LossEntry& a, const LossEntry& b) const {
      return a.loss != b.loss ? a.loss > b.loss : a.tile > b.tile;
    }
  };
  std::priority_queue<LossEntry, std::vector<LossEntry>, Greater> heap_;
};

struct SolverCounters {
  std::int64_t iterations = 0;
  std::int64_t dijkstra_relaxations = 0;
  std::int64_t loss_queue_pushes = 0;
  std::int64_t loss_queue_pops = 0;
  std::int64_t path_array_pops = 0;
  std::int64_t path_array_restores = 0;
};

/// Working state of one solve.
struct SolverState {
  int tile_count = 0;
  int mec_count = 0;
  const ProfitTable* profits = nullptr;

  /// holders[i] has bit j set iff MEC j caches tile i (M <= 64).
  std::vector<std::uint64_t> holders;
  std::vector<int> replicas;
  std::vector<std::int64_t> remaining;
  std::vector<std::int64_t> used;
  std::vector<PathArray> path_arrays;
  /// Row-major M x M; the diagonal is unused. Allocated on first push.
  std::vector<std::optional<LossQueue>> loss_queues;
  std::vector<Nanos> potentials;  // M + 2 entries, see CompactGraph
  std::int64_t iteration = 0;
  Nanos profit = 0;
  SolverCounters counters;

  SolverState(const ProfitTable& profits, const std::vector<std::int64_t>& capacities);

  bool caches(MecId j, TileId i) const { return (holders[i] >> j) & 1u; }
  LossQueue* loss_queue(MecId from, MecId to);
  const LossQueue* loss_queue(MecId from, MecId to) const;
  LossQueue& loss_queue_for_push(MecId from, MecId to);

  CacheTable cache_table(const std::vector<std::int64_t>& capacities) const;
};

/// Collapsed graph over the M MEC nodes plus s (index M) and t (index M+1).
struct CompactGraph {
  static constexpr Nanos kAbsent = std::numeric_limits<Nanos>::max();

  int mec_count = 0;
  Matrix<Nanos> weight;  // (M+2) x (M+2), kAbsent where no edge
  Matrix<TileId> via;    // tile realising s->j and j->k edges
  std::vector<bool> first_uses_global;

  int source() const { return mec_count; }
  int sink() const { return mec_count + 1; }
  int node_count() const { return mec_count + 2; }
  bool has_edge(int u, int v) const { return weight(u, v) != kAbsent; }
};

struct Transfer {
  MecId from;
  MecId to;
  TileId tile;
  friend bool operator==(const Transfer&, const Transfer&) = default;
};

/// An augmenting path in G': s -> first_mec, transfers, last_mec -> t.
struct AugmentingPath {
  MecId first_mec = 0;
  TileId first_tile = 0;
  bool uses_global = false;
  std::vector<Transfer> transfers;
  MecId last_mec = 0;
  Nanos cost = 0;

  std::size_t edge_count() const { return transfers.size() + 2; }
};

std::vector<PathArray> initialize_possible_paths(const ProfitTable& profits);

bool path_entry_feasible(const SolverState& state, MecId j, const PathEntry& e);
void maintain_path_array(SolverState& state, MecId j);
void maintain_path_arrays(SolverState& state);

/// Commits an accepted path to the state and inserts the newly enabled
/// transfer entries, then drops stale LossQueue heads.
void maintain_loss_queues(SolverState& state, const AugmentingPath& path);

CompactGraph setup_graph(const SolverState& state);

struct ShortestPathResult {
  AugmentingPath path;
  std::vector<Nanos> distances;  // true distances from s; kAbsent if unreachable
};

/// Dijkstra on reduced costs w + pi(u) - pi(v). Throws InvariantViolation if
/// any present edge has a negative reduced cost. On success, potentials are
/// advanced by the reduced distances (capped at the distance of t).
std::optional<ShortestPathResult> shortest_augmenting_path(const CompactGraph& g,
                                                           std::vector<Nanos>& potentials,
                                                           SolverCounters* counters = nullptr);

/// Label-correcting bootstrap for the first iteration, when s -> j edges are
/// negative. Sets potentials from scratch.
std::optional<ShortestPathResult> bootstrap_augmenting_path(const CompactGraph& g,
                                                            std::vector<Nanos>& potentials,
                                                            SolverCounters* counters = nullptr);

struct OkspOptions {
  StopRule stop = StopRule::NonNegativeCost;
  /// Re-check capacity/replica bookkeeping after every iteration.
  bool check_state = false;
};

struct OkspResult {
  CacheTable table;
  Nanos profit = 0;
  std::vector<Nanos> path_costs;
  std::vector<std::size_t> path_edges;
  SolverCounters counters;
};

OkspResult oksp_solve(const ProfitTable& profits, const std::vector<std::int64_t>& capacities,
                      OkspOptions options = {});

}  // namespace edgecache
