#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "edgecache/cache_table.hpp"
#include "edgecache/model.hpp"

namespace edgecache {

/// When successive shortest path iterations stop.
enum class StopRule {
  /// Stop at the first augmenting path with cost >= 0 (zero-profit replicas are churn).
  NonNegativeCost,
  /// Keep zero-cost paths, stop only when a path would lose profit.
  PositiveCost,
};

/// Layered placement graph: s -> tiles -> MEC servers -> t, weights negated
/// so that a minimum-cost path maximises profit. Parallel edges are explicit.
class FlowGraph {
 public:
  struct Edge {
    int from;
    int to;
    Nanos weight;
    bool reversed = false;
  };

  FlowGraph(int tile_count, int mec_count, std::vector<std::int64_t> capacities);

  int tile_count() const { return tile_count_; }
  int mec_count() const { return mec_count_; }
  int node_count() const { return tile_count_ + mec_count_ + 2; }
  const std::vector<std::int64_t>& capacities() const { return capacities_; }

  int source() const { return 0; }
  int sink() const { return tile_count_ + mec_count_ + 1; }
  int tile_node(TileId i) const { return 1 + i; }
  int mec_node(MecId j) const { return 1 + tile_count_ + j; }
  bool is_tile_node(int v) const { return v >= 1 && v <= tile_count_; }
  bool is_mec_node(int v) const { return v > tile_count_ && v < sink(); }
  TileId tile_of(int v) const { return v - 1; }
  MecId mec_of(int v) const { return v - 1 - tile_count_; }

  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t add_edge(int from, int to, Nanos weight);
  /// Flips direction and negates the weight of one edge.
  void reverse(std::size_t edge);

  std::size_t edge_count(int from, int to) const;

 private:
  int tile_count_;
  int mec_count_;
  std::vector<std::int64_t> capacities_;
  std::vector<Edge> edges_;
};

FlowGraph build_graph(const ProfitTable& profits, const std::vector<std::int64_t>& capacities);

/// One accepted augmenting path: node sequence and true (negated-profit) cost.
struct PathTrace {
  std::vector<int> nodes;
  Nanos cost = 0;
};

struct KspResult {
  CacheTable table;
  Nanos profit = 0;
  std::vector<PathTrace> paths;
};

/// Successive shortest paths on `graph` with a label-correcting search.
/// Runs at most `k` iterations. `graph` is left in its final residual state.
KspResult ksp_solve(FlowGraph& graph, std::int64_t k, StopRule stop = StopRule::NonNegativeCost);

/// Cache table encoded by the reversed tile -> MEC edges of a residual graph.
CacheTable decode_placement(const FlowGraph& graph);

class InstanceTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BruteForceLimits {
  int max_tiles = 10;
  int max_mecs = 3;
  std::int64_t max_capacity = 3;
};

/// Exhaustive maximiser of placement_profit over every per-MEC subset
/// combination (including the empty placement). Ties go to the
/// lexicographically smallest table.
std::pair<CacheTable, Nanos> brute_force_optimal(const ProfitTable& profits,
                                                 const std::vector<std::int64_t>& capacities,
                                                 BruteForceLimits limits = {});

}  // namespace edgecache
