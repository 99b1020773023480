#include "edgecache/ksp_reference.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <tuple>

namespace edgecache {

FlowGraph::FlowGraph(int tile_count, int mec_count, std::vector<std::int64_t> capacities)
    : tile_count_(tile_count), mec_count_(mec_count), capacities_(std::move(capacities)) {
  if (tile_count < 1 || mec_count < 1) throw InvalidConfig("graph needs tiles and MEC servers");
  if (capacities_.size() != static_cast<std::size_t>(mec_count))
    throw InvalidConfig("one capacity per MEC server expected");
}

std::size_t FlowGraph::add_edge(int from, int to, Nanos weight) {
  edges_.push_back({from, to, weight, false});
  return edges_.size() - 1;
}

void FlowGraph::reverse(std::size_t edge) {
  auto& e = edges_.at(edge);
  std::swap(e.from, e.to);
  e.weight = -e.weight;
  e.reversed = !e.reversed;
}

std::size_t FlowGraph::edge_count(int from, int to) const {
  return static_cast<std::size_t>(std::count_if(
      edges_.begin(), edges_.end(), [&](const Edge& e) { return e.from == from && e.to == to; }));
}

FlowGraph build_graph(const ProfitTable& profits, const std::vector<std::int64_t>& capacities) {
  const int n = profits.tile_count();
  const int m = profits.mec_count();
  if (static_cast<int>(capacities.size()) != m)
    throw InvalidConfig("profit table and capacities disagree on the MEC count");

  FlowGraph g(n, m, capacities);
  for (TileId i = 0; i < n; ++i) {
    // Global profit rides on the first of M parallel edges only.
    g.add_edge(g.source(), g.tile_node(i), -profits.global(i));
    for (int r = 1; r < m; ++r) g.add_edge(g.source(), g.tile_node(i), 0);
  }
  for (TileId i = 0; i < n; ++i)
    for (MecId j = 0; j < m; ++j) g.add_edge(g.tile_node(i), g.mec_node(j), -profits.local(i, j));
  for (MecId j = 0; j < m; ++j)
    for (std::int64_t r = 0; r < capacities[j]; ++r) g.add_edge(g.mec_node(j), g.sink(), 0);
  return g;
}

namespace {

struct Label {
  Nanos cost = std::numeric_limits<Nanos>::max();
  int hops = std::numeric_limits<int>::max();
  friend bool operator<(const Label& a, const Label& b) {
    return std::tie(a.cost, a.hops) < std::tie(b.cost, b.hops);
  }
  friend bool operator==(const Label&, const Label&) = default;
};

constexpr std::size_t kNoEdge = std::numeric_limits<std::size_t>::max();

// Label-correcting (queue-based Bellman-Ford) search from s. Returns the
// edge indices of the s -> t path, empty if t is unreachable.
std::vector<std::size_t> shortest_path(const FlowGraph& g, Nanos& cost) {
  const int nodes = g.node_count();
  const auto& edges = g.edges();
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(nodes));
  for (std::size_t e = 0; e < edges.size(); ++e) out[edges[e].from].push_back(e);

  std::vector<Label> label(static_cast<std::size_t>(nodes));
  std::vector<std::size_t> pred(static_cast<std::size_t>(nodes), kNoEdge);
  std::vector<char> queued(static_cast<std::size_t>(nodes), 0);
  std::deque<int> queue;
  label[g.source()] = {0, 0};
  queue.push_back(g.source());
  queued[g.source()] = 1;

  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    queued[u] = 0;
    for (auto e : out[u]) {
      const int v = edges[e].to;
      const Label cand{label[u].cost + edges[e].weight, label[u].hops + 1};
      const bool better = cand < label[v];
      const bool tie_break = cand == label[v] && pred[v] != kNoEdge &&
                             std::tie(u, e) < std::tie(edges[pred[v]].from, pred[v]);
      if (better || tie_break) {
        label[v] = cand;
        pred[v] = e;
        if (better && !queued[v]) {
          queued[v] = 1;
          queue.push_back(v);
        }
      }
    }
  }

  std::vector<std::size_t> path;
  if (pred[g.sink()] == kNoEdge) return path;
  cost = label[g.sink()].cost;
  for (int v = g.sink(); v != g.source(); v = edges[pred[v]].from) path.push_back(pred[v]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

CacheTable decode_placement(const FlowGraph& g) {
  CacheTable table(g.capacities());
  for (const auto& e : g.edges())
    if (e.reversed && g.is_mec_node(e.from) && g.is_tile_node(e.to))
      table.insert(g.mec_of(e.from), g.tile_of(e.to));
  return table;
}

KspResult ksp_solve(FlowGraph& graph, std::int64_t k, StopRule stop) {
  std::int64_t total_capacity = 0;
  for (auto c : graph.capacities()) total_capacity += c;
  k = std::min(k, total_capacity);

  KspResult result;
  for (std::int64_t l = 0; l < k; ++l) {
    Nanos cost = 0;
    const auto path = shortest_path(graph, cost);
    if (path.empty()) break;
    if (cost > 0 || (cost == 0 && stop == StopRule::NonNegativeCost)) break;

    PathTrace trace;
    trace.cost = cost;
    trace.nodes.push_back(graph.source());
    for (auto e : path) trace.nodes.push_back(graph.edges()[e].to);
    for (auto e : path) graph.reverse(e);
    result.profit -= cost;
    result.paths.push_back(std::move(trace));
  }
  result.table = decode_placement(graph);
  return result;
}

namespace {

// All subsets of {0..n-1} with at most `limit` elements, as bitmasks, in
// lexicographic order of their sorted element sequences.
void lex_subsets(int n, std::int64_t limit, int next, std::uint32_t mask, int size,
                 std::vector<std::uint32_t>& out) {
  out.push_back(mask);
  if (size >= limit) return;
  for (int i = next; i < n; ++i) lex_subsets(n, limit, i + 1, mask | (1u << i), size + 1, out);
}

}  // namespace

std::pair<CacheTable, Nanos> brute_force_optimal(const ProfitTable& profits,
                                                 const std::vector<std::int64_t>& capacities,
                                                 BruteForceLimits limits) {
  const int n = profits.tile_count();
  const int m = profits.mec_count();
  if (static_cast<int>(capacities.size()) != m)
    throw InvalidConfig("profit table and capacities disagree on the MEC count");
  if (n > limits.max_tiles || m > limits.max_mecs ||
      std::any_of(capacities.begin(), capacities.end(),
                  [&](auto c) { return c > limits.max_capacity; }))
    throw InstanceTooLarge("brute force is limited to N <= " + std::to_string(limits.max_tiles) +
                           ", M <= " + std::to_string(limits.max_mecs) +
                           ", P <= " + std::to_string(limits.max_capacity));
  if (n > 20) throw InstanceTooLarge("brute force bitmasks support at most 20 tiles");

  std::vector<Nanos> global_of_mask(std::size_t{1} << n, 0);
  for (std::uint32_t mask = 1; mask < global_of_mask.size(); ++mask) {
    const int low = __builtin_ctz(mask);
    global_of_mask[mask] = global_of_mask[mask & (mask - 1)] + profits.global(low);
  }

  std::vector<std::vector<std::uint32_t>> options(static_cast<std::size_t>(m));
  std::vector<std::vector<Nanos>> option_local(static_cast<std::size_t>(m));
  for (MecId j = 0; j < m; ++j) {
    lex_subsets(n, capacities[j], 0, 0, 0, options[j]);
    for (auto mask : options[j]) {
      Nanos sum = 0;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) sum += profits.local(i, j);
      option_local[j].push_back(sum);
    }
  }

  std::vector<std::size_t> choice(static_cast<std::size_t>(m), 0);
  std::vector<std::size_t> best_choice = choice;
  Nanos best = std::numeric_limits<Nanos>::min();
  // Odometer over the per-MEC option lists; MEC 0 is the most significant
  // digit so combinations are visited in lexicographic table order.
  for (;;) {
    std::uint32_t covered = 0;
    Nanos value = 0;
    for (MecId j = 0; j < m; ++j) {
      covered |= options[j][choice[j]];
      value += option_local[j][choice[j]];
    }
    value += global_of_mask[covered];
    if (value > best) {
      best = value;
      best_choice = choice;
    }
    int d = m - 1;
    while (d >= 0 && ++choice[d] == options[d].size()) choice[d--] = 0;
    if (d < 0) break;
  }

  CacheTable table(capacities);
  for (MecId j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      if (options[j][best_choice[j]] & (1u << i)) table.insert(j, i);
  return {table, best};
}

}  // namespace edgecache
