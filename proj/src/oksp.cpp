#include "edgecache/oksp.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <tuple>

namespace edgecache {

// ---- PathArray ----------------------------------------------------------

bool PathArray::before(const PathEntry& a, const PathEntry& b) {
  if (a.profit != b.profit) return a.profit > b.profit;
  if (a.tile != b.tile) return a.tile < b.tile;
  return !a.uses_global && b.uses_global;
}

PathArray::PathArray(std::vector<PathEntry> sorted) : sorted_(std::move(sorted)) {}

const PathEntry& PathArray::head() const {
  if (restored_.empty()) return sorted_[cursor_];
  if (cursor_ == sorted_.size()) return restored_.top();
  return before(restored_.top(), sorted_[cursor_]) ? restored_.top() : sorted_[cursor_];
}

void PathArray::pop_head() {
  if (restored_.empty()) {
    ++cursor_;
  } else if (cursor_ == sorted_.size() || before(restored_.top(), sorted_[cursor_])) {
    restored_.pop();
  } else {
    ++cursor_;
  }
}

void PathArray::restore(const PathEntry& entry) { restored_.push(entry); }

// ---- SolverState --------------------------------------------------------

SolverState::SolverState(const ProfitTable& p, const std::vector<std::int64_t>& capacities)
    : tile_count(p.tile_count()),
      mec_count(p.mec_count()),
      profits(&p),
      holders(static_cast<std::size_t>(p.tile_count()), 0),
      replicas(static_cast<std::size_t>(p.tile_count()), 0),
      remaining(capacities),
      used(capacities.size(), 0),
      loss_queues(static_cast<std::size_t>(p.mec_count()) * p.mec_count()),
      potentials(static_cast<std::size_t>(p.mec_count()) + 2, 0) {
  if (mec_count < 1 || mec_count > 64)
    throw InvalidConfig("OKSP supports between 1 and 64 MEC servers");
  if (static_cast<int>(capacities.size()) != mec_count)
    throw InvalidConfig("profit table and capacities disagree on the MEC count");
  for (auto c : capacities)
    if (c < 0) throw InvalidConfig("capacities must be non-negative");
}

LossQueue* SolverState::loss_queue(MecId from, MecId to) {
  auto& q = loss_queues[static_cast<std::size_t>(from) * mec_count + to];
  return q ? &*q : nullptr;
}

const LossQueue* SolverState::loss_queue(MecId from, MecId to) const {
  const auto& q = loss_queues[static_cast<std::size_t>(from) * mec_count + to];
  return q ? &*q : nullptr;
}

LossQueue& SolverState::loss_queue_for_push(MecId from, MecId to) {
  auto& q = loss_queues[static_cast<std::size_t>(from) * mec_count + to];
  if (!q) q.emplace();
  return *q;
}

CacheTable SolverState::cache_table(const std::vector<std::int64_t>& capacities) const {
  CacheTable table(capacities);
  for (TileId i = 0; i < tile_count; ++i)
    for (auto mask = holders[i]; mask != 0; mask &= mask - 1)
      table.insert(std::countr_zero(mask), i);
  return table;
}

// ---- PathArray maintenance ---------------------------------------------

std::vector<PathArray> initialize_possible_paths(const ProfitTable& profits) {
  const int n = profits.tile_count();
  std::vector<PathArray> arrays;
  arrays.reserve(static_cast<std::size_t>(profits.mec_count()));
  for (MecId j = 0; j < profits.mec_count(); ++j) {
    std::vector<PathEntry> entries;
    entries.reserve(2 * static_cast<std::size_t>(n));
    for (TileId i = 0; i < n; ++i) {
      entries.push_back({profits.local(i, j) + profits.global(i), i, true});
      entries.push_back({profits.local(i, j), i, false});
    }
    std::sort(entries.begin(), entries.end(), PathArray::before);
    arrays.emplace_back(std::move(entries));
  }
  return arrays;
}

bool path_entry_feasible(const SolverState& state, MecId j, const PathEntry& e) {
  if (state.caches(j, e.tile)) return false;
  return !e.uses_global || state.replicas[e.tile] == 0;
}

void maintain_path_array(SolverState& state, MecId j) {
  auto& array = state.path_arrays[j];
  while (!array.empty() && !path_entry_feasible(state, j, array.head())) {
    array.pop_head();
    ++state.counters.path_array_pops;
  }
}

void maintain_path_arrays(SolverState& state) {
  for (MecId j = 0; j < state.mec_count; ++j) maintain_path_array(state, j);
}

// ---- LossQueue maintenance ---------------------------------------------

namespace {

void fail(const std::string& what) { throw InvariantViolation("oksp: " + what); }

void check_path_against_state(const SolverState& state, const AugmentingPath& path) {
  const int m = state.mec_count;
  auto valid_mec = [m](MecId j) { return j >= 0 && j < m; };
  if (!valid_mec(path.first_mec) || !valid_mec(path.last_mec)) fail("path MEC out of range");
  if (state.caches(path.first_mec, path.first_tile)) fail("first edge caches a present tile");
  if (path.uses_global && state.replicas[path.first_tile] != 0)
    fail("first edge collects an already accrued global profit");
  MecId at = path.first_mec;
  std::uint64_t visited = std::uint64_t{1} << at;
  for (const auto& t : path.transfers) {
    if (t.from != at || !valid_mec(t.to)) fail("transfer chain is broken");
    if (!state.caches(t.from, t.tile) || state.caches(t.to, t.tile))
      fail("transfer violates the holder condition");
    if ((visited >> t.to) & 1u) fail("path revisits a MEC node");
    visited |= std::uint64_t{1} << t.to;
    at = t.to;
  }
  if (at != path.last_mec) fail("last MEC does not terminate the chain");
  if (state.remaining[path.last_mec] <= 0) fail("terminal MEC has no capacity left");
}

void push_gain(SolverState& state, MecId gainer, TileId i) {
  const auto& local = state.profits->local;
  for (MecId other = 0; other < state.mec_count; ++other) {
    if (other == gainer || state.caches(other, i)) continue;
    state.loss_queue_for_push(gainer, other).push({local(i, gainer) - local(i, other), i});
    ++state.counters.loss_queue_pushes;
  }
}

void push_loss(SolverState& state, MecId loser, TileId i) {
  const auto& local = state.profits->local;
  for (MecId holder = 0; holder < state.mec_count; ++holder) {
    if (holder == loser || !state.caches(holder, i)) continue;
    state.loss_queue_for_push(holder, loser).push({local(i, holder) - local(i, loser), i});
    ++state.counters.loss_queue_pushes;
  }
  // s -> i -> loser is usable again.
  state.path_arrays[loser].restore({local(i, loser), i, false});
  ++state.counters.path_array_restores;
}

}  // namespace

void maintain_loss_queues(SolverState& state, const AugmentingPath& path) {
  check_path_against_state(state, path);

  state.holders[path.first_tile] |= std::uint64_t{1} << path.first_mec;
  ++state.replicas[path.first_tile];
  for (const auto& t : path.transfers) {
    state.holders[t.tile] &= ~(std::uint64_t{1} << t.from);
    state.holders[t.tile] |= std::uint64_t{1} << t.to;
  }
  --state.remaining[path.last_mec];
  ++state.used[path.last_mec];

  // Entries are derived from the post-path cache state.
  push_gain(state, path.first_mec, path.first_tile);
  for (const auto& t : path.transfers) {
    push_gain(state, t.to, t.tile);
    push_loss(state, t.from, t.tile);
  }

  for (MecId j = 0; j < state.mec_count; ++j) {
    for (MecId k = 0; k < state.mec_count; ++k) {
      if (j == k) continue;
      auto* q = state.loss_queue(j, k);
      if (!q) continue;
      while (!q->empty() && !(state.caches(j, q->head().tile) && !state.caches(k, q->head().tile))) {
        q->pop();
        ++state.counters.loss_queue_pops;
      }
    }
  }
}

// ---- G' -----------------------------------------------------------------

CompactGraph setup_graph(const SolverState& state) {
  const int m = state.mec_count;
  CompactGraph g;
  g.mec_count = m;
  g.weight = Matrix<Nanos>::Constant(m + 2, m + 2, CompactGraph::kAbsent);
  g.via = Matrix<TileId>::Constant(m + 2, m + 2, -1);
  g.first_uses_global.assign(static_cast<std::size_t>(m), false);

  for (MecId j = 0; j < m; ++j) {
    const auto& array = state.path_arrays[j];
    if (!array.empty()) {
      const auto& head = array.head();
      g.weight(g.source(), j) = -head.profit;
      g.via(g.source(), j) = head.tile;
      g.first_uses_global[j] = head.uses_global;
    }
    if (state.remaining[j] > 0) g.weight(j, g.sink()) = 0;
    for (MecId k = 0; k < m; ++k) {
      if (k == j) continue;
      const auto* q = state.loss_queue(j, k);
      if (q && !q->empty()) {
        g.weight(j, k) = q->head().loss;
        g.via(j, k) = q->head().tile;
      }
    }
  }
  return g;
}

namespace {

struct Label {
  Nanos dist;
  int hops;
};

bool label_less(const Label& a, const Label& b) { return std::tie(a.dist, a.hops) < std::tie(b.dist, b.hops); }

AugmentingPath decode_path(const CompactGraph& g, const std::vector<int>& pred) {
  std::vector<int> nodes;
  for (int v = g.sink(); v != -1; v = pred[v]) nodes.push_back(v);
  std::reverse(nodes.begin(), nodes.end());
  // nodes = s, j0, ..., jL, t
  AugmentingPath path;
  path.first_mec = nodes[1];
  path.first_tile = g.via(g.source(), nodes[1]);
  path.uses_global = g.first_uses_global[nodes[1]];
  for (std::size_t a = 1; a + 2 < nodes.size(); ++a)
    path.transfers.push_back({nodes[a], nodes[a + 1], g.via(nodes[a], nodes[a + 1])});
  path.last_mec = nodes[nodes.size() - 2];
  for (std::size_t a = 0; a + 1 < nodes.size(); ++a) path.cost += g.weight(nodes[a], nodes[a + 1]);
  return path;
}

// Nodes farther than t are pulled back to t's distance. The source is left
// alone: during the bootstrap its distance 0 can exceed the (negative) sink
// distance, and capping it would break every s -> j edge.
void cap_potentials(const CompactGraph& g, std::vector<Nanos>& potentials,
                    const std::vector<Label>& label, const std::vector<bool>& reached,
                    Nanos sink_dist) {
  for (int v = 0; v < g.node_count(); ++v) {
    if (v == g.source()) continue;
    potentials[v] += reached[v] ? std::min(label[v].dist, sink_dist) : sink_dist;
  }
}

}  // namespace

std::optional<ShortestPathResult> shortest_augmenting_path(const CompactGraph& g,
                                                           std::vector<Nanos>& potentials,
                                                           SolverCounters* counters) {
  const int n = g.node_count();
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (g.has_edge(u, v) && g.weight(u, v) + potentials[u] - potentials[v] < 0)
        fail("negative reduced cost on edge " + std::to_string(u) + "->" + std::to_string(v));

  std::vector<Label> label(static_cast<std::size_t>(n), {0, 0});
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  std::vector<int> pred(static_cast<std::size_t>(n), -1);
  reached[g.source()] = true;

  for (;;) {
    int u = -1;
    for (int v = 0; v < n; ++v)
      if (reached[v] && !done[v] && (u == -1 || label_less(label[v], label[u]))) u = v;
    if (u == -1) break;
    done[u] = true;
    for (int v = 0; v < n; ++v) {
      if (done[v] || !g.has_edge(u, v)) continue;
      if (counters) ++counters->dijkstra_relaxations;
      const Label cand{label[u].dist + g.weight(u, v) + potentials[u] - potentials[v], label[u].hops + 1};
      if (!reached[v] || label_less(cand, label[v]) ||
          (!label_less(label[v], cand) && u < pred[v])) {
        label[v] = cand;
        pred[v] = u;
        reached[v] = true;
      }
    }
  }
  if (!reached[g.sink()]) return std::nullopt;

  ShortestPathResult result;
  result.path = decode_path(g, pred);
  result.distances.assign(static_cast<std::size_t>(n), CompactGraph::kAbsent);
  for (int v = 0; v < n; ++v)
    if (reached[v]) result.distances[v] = label[v].dist - potentials[g.source()] + potentials[v];
  if (result.distances[g.sink()] != result.path.cost)
    fail("path cost disagrees with the reduced distance");
  cap_potentials(g, potentials, label, reached, label[g.sink()].dist);
  return result;
}

std::optional<ShortestPathResult> bootstrap_augmenting_path(const CompactGraph& g,
                                                            std::vector<Nanos>& potentials,
                                                            SolverCounters* counters) {
  const int n = g.node_count();
  std::vector<Label> label(static_cast<std::size_t>(n), {0, 0});
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<int> pred(static_cast<std::size_t>(n), -1);
  reached[g.source()] = true;

  // Bellman-Ford; at most n - 1 rounds without a negative cycle.
  for (int round = 0; round < n; ++round) {
    bool changed = false;
    for (int u = 0; u < n; ++u) {
      if (!reached[u]) continue;
      for (int v = 0; v < n; ++v) {
        if (v == g.source() || !g.has_edge(u, v)) continue;
        if (counters) ++counters->dijkstra_relaxations;
        const Label cand{label[u].dist + g.weight(u, v), label[u].hops + 1};
        if (!reached[v] || label_less(cand, label[v]) ||
            (!label_less(label[v], cand) && u < pred[v])) {
          changed |= !reached[v] || label_less(cand, label[v]);
          label[v] = cand;
          pred[v] = u;
          reached[v] = true;
        }
      }
    }
    if (!changed) break;
    if (round == n - 1) fail("negative cycle in the initial compact graph");
  }
  if (!reached[g.sink()]) return std::nullopt;

  ShortestPathResult result;
  result.path = decode_path(g, pred);
  result.distances.assign(static_cast<std::size_t>(n), CompactGraph::kAbsent);
  for (int v = 0; v < n; ++v)
    if (reached[v]) result.distances[v] = label[v].dist;
  std::fill(potentials.begin(), potentials.end(), 0);
  cap_potentials(g, potentials, label, reached, label[g.sink()].dist);
  return result;
}

// ---- Solver -------------------------------------------------------------

namespace {

void check_state(const SolverState& state, const std::vector<int>& previous_replicas) {
  std::int64_t used = 0;
  for (MecId j = 0; j < state.mec_count; ++j) {
    if (state.remaining[j] < 0) fail("capacity overrun");
    used += state.used[j];
  }
  if (used != state.iteration) fail("used capacity differs from the iteration count");
  std::vector<std::int64_t> per_mec(static_cast<std::size_t>(state.mec_count), 0);
  for (TileId i = 0; i < state.tile_count; ++i) {
    if (std::popcount(state.holders[i]) != state.replicas[i]) fail("replica count out of sync");
    if (state.replicas[i] < previous_replicas[i]) fail("replica count decreased");
    for (auto mask = state.holders[i]; mask != 0; mask &= mask - 1) ++per_mec[std::countr_zero(mask)];
  }
  for (MecId j = 0; j < state.mec_count; ++j)
    if (per_mec[j] != state.used[j]) fail("cache table disagrees with used capacity");
}

}  // namespace

OkspResult oksp_solve(const ProfitTable& profits, const std::vector<std::int64_t>& capacities,
                      OkspOptions options) {
  SolverState state(profits, capacities);
  state.path_arrays = initialize_possible_paths(profits);

  std::int64_t k = 0;
  for (auto c : capacities) k += c;

  OkspResult result;
  std::vector<int> previous_replicas;
  for (std::int64_t l = 0; l < k; ++l) {
    const auto g = setup_graph(state);
    auto found = l == 0 ? bootstrap_augmenting_path(g, state.potentials, &state.counters)
                        : shortest_augmenting_path(g, state.potentials, &state.counters);
    if (!found) break;
    const auto& path = found->path;
    if (path.cost > 0 || (path.cost == 0 && options.stop == StopRule::NonNegativeCost)) break;
    if (!result.path_costs.empty() && path.cost < result.path_costs.back())
      fail("augmenting path costs decreased");
    if (path.edge_count() > static_cast<std::size_t>(state.mec_count) + 1)
      fail("augmenting path longer than M + 1 edges");

    if (options.check_state) previous_replicas = state.replicas;
    maintain_loss_queues(state, path);
    maintain_path_arrays(state);
    ++state.iteration;
    ++state.counters.iterations;
    state.profit -= path.cost;
    result.path_costs.push_back(path.cost);
    result.path_edges.push_back(path.edge_count());
    if (options.check_state) check_state(state, previous_replicas);
  }

  result.table = state.cache_table(capacities);
  result.profit = state.profit;
  result.counters = state.counters;
  return result;
}

}  // namespace edgecache
