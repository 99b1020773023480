#include <doctest.h>

#include <random>

#include "edgecache/ksp_reference.hpp"
#include "edgecache/oksp.hpp"
#include "test_support.hpp"

using namespace edgecache;

namespace {

ProfitTable instance_189() {
  auto p = ProfitTable::zeros(2, 2);
  p.global << 60, 0;
  p.local << 40, 30, 99, 0;
  return p;
}

std::vector<PathEntry> drain(PathArray a) {
  std::vector<PathEntry> out;
  while (!a.empty()) {
    out.push_back(a.head());
    a.pop_head();
  }
  return out;
}

}  // namespace

TEST_CASE("initialize_possible_paths") {
  auto p = ProfitTable::zeros(1, 1);
  p.global << 5;
  p.local << 7;
  auto arrays = initialize_possible_paths(p);
  REQUIRE(arrays.size() == 1);
  CHECK(drain(arrays[0]) == std::vector<PathEntry>{{12, 0, true}, {7, 0, false}});

  auto flat = initialize_possible_paths(ProfitTable::zeros(2, 1));
  CHECK(drain(flat[0]) ==
        std::vector<PathEntry>{{0, 0, false}, {0, 0, true}, {0, 1, false}, {0, 1, true}});

  auto a189 = initialize_possible_paths(instance_189());
  CHECK(a189[0].size() == 4);
  CHECK(drain(a189[0]) ==
        std::vector<PathEntry>{{100, 0, true}, {99, 1, false}, {99, 1, true}, {40, 0, false}});
  CHECK(drain(a189[1]) ==
        std::vector<PathEntry>{{90, 0, true}, {30, 0, false}, {0, 1, false}, {0, 1, true}});
}

TEST_CASE("PathArray merges restored entries at the head") {
  PathArray a({{9, 0, true}, {5, 1, false}, {1, 2, false}});
  a.pop_head();
  a.restore({7, 3, false});
  a.restore({2, 4, false});
  CHECK(drain(a) == std::vector<PathEntry>{{7, 3, false}, {5, 1, false}, {2, 4, false}, {1, 2, false}});
}

TEST_CASE("LossQueue is min-ordered by loss then tile") {
  LossQueue q;
  q.push({10, 3});
  q.push({-4, 7});
  q.push({10, 1});
  CHECK(q.head() == LossEntry{-4, 7});
  q.pop();
  CHECK(q.head() == LossEntry{10, 1});
}

TEST_CASE("maintain_path_array feasibility rules") {
  auto p = instance_189();
  SolverState state(p, {2, 2});
  state.path_arrays = initialize_possible_paths(p);

  // t1 cached on MEC 1 only: MEC 0 may still take t1 without its global.
  maintain_loss_queues(state, {1, 1, true, {}, 1, -99});
  maintain_path_arrays(state);
  CHECK(state.path_arrays[0].head() == PathEntry{100, 0, true});
  state.path_arrays[0].pop_head();
  CHECK(state.path_arrays[0].head() == PathEntry{99, 1, false});
  maintain_path_array(state, 0);
  CHECK(state.path_arrays[0].head() == PathEntry{99, 1, false});

  // t0 cached on MEC 0: the t0 entries are dropped as they reach the head.
  SolverState s2(p, {2, 2});
  s2.path_arrays = initialize_possible_paths(p);
  maintain_loss_queues(s2, {0, 0, true, {}, 0, -100});
  maintain_path_arrays(s2);
  auto& a0 = s2.path_arrays[0];
  while (!a0.empty()) {
    CHECK(a0.head().tile != 0);
    a0.pop_head();
    maintain_path_array(s2, 0);
  }
  // Both t0 entries at MEC 0, plus the t0 global entry at MEC 1.
  CHECK(s2.counters.path_array_pops == 3);

  SolverState empty(ProfitTable::zeros(0, 1), {1});
  empty.path_arrays = initialize_possible_paths(*empty.profits);
  maintain_path_array(empty, 0);
  CHECK(empty.path_arrays[0].empty());
}

TEST_CASE("two-tile instance step by step") {
  const auto p = instance_189();
  const std::vector<std::int64_t> caps{1, 1};
  SolverState state(p, caps);
  state.path_arrays = initialize_possible_paths(p);

  auto g = setup_graph(state);
  const int s = g.source(), t = g.sink();
  CHECK(g.weight(s, 0) == -100);
  CHECK(g.weight(s, 1) == -90);
  CHECK(g.weight(0, t) == 0);
  CHECK(g.weight(1, t) == 0);
  CHECK_FALSE(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(1, 0));

  auto first = bootstrap_augmenting_path(g, state.potentials);
  REQUIRE(first);
  CHECK(first->path.cost == -100);
  CHECK(first->path.first_mec == 0);
  CHECK(first->path.first_tile == 0);
  CHECK(first->path.uses_global);
  CHECK(first->path.transfers.empty());
  CHECK(first->path.last_mec == 0);

  maintain_loss_queues(state, first->path);
  maintain_path_arrays(state);
  CHECK(state.cache_table(caps).tiles(0) == std::set<TileId>{0});
  CHECK(state.remaining[0] == 0);
  REQUIRE(state.loss_queue(0, 1) != nullptr);
  CHECK(state.loss_queue(0, 1)->head() == LossEntry{10, 0});

  g = setup_graph(state);
  CHECK(g.weight(s, 0) == -99);
  CHECK(g.weight(s, 1) == -30);
  CHECK_FALSE(g.has_edge(0, t));
  CHECK(g.weight(1, t) == 0);
  CHECK(g.weight(0, 1) == 10);

  auto second = shortest_augmenting_path(g, state.potentials);
  REQUIRE(second);
  CHECK(second->path.cost == -89);
  CHECK(second->path.first_mec == 0);
  CHECK(second->path.first_tile == 1);
  CHECK(second->path.transfers == std::vector<Transfer>{{0, 1, 0}});
  CHECK(second->path.last_mec == 1);

  maintain_loss_queues(state, second->path);
  maintain_path_arrays(state);
  CacheTable want(caps);
  want.insert(0, 1);
  want.insert(1, 0);
  CHECK(state.cache_table(caps) == want);
  CHECK(state.replicas == std::vector<int>{1, 1});
  CHECK(state.remaining == std::vector<std::int64_t>{0, 0});

  g = setup_graph(state);
  CHECK_FALSE(shortest_augmenting_path(g, state.potentials));
}

TEST_CASE("a path without transfers only caches and consumes capacity") {
  const auto p = instance_189();
  SolverState state(p, {3, 3});
  state.path_arrays = initialize_possible_paths(p);
  maintain_loss_queues(state, {1, 1, false, {}, 1, 0});
  CHECK(state.caches(1, 1));
  CHECK(state.replicas == std::vector<int>{0, 1});
  CHECK(state.remaining == std::vector<std::int64_t>{3, 2});
  CHECK(state.used == std::vector<std::int64_t>{0, 1});
}

TEST_CASE("malformed paths are rejected") {
  const auto p = instance_189();
  SolverState state(p, {1, 1});
  state.path_arrays = initialize_possible_paths(p);
  CHECK_THROWS_AS(maintain_loss_queues(state, {0, 0, false, {{0, 1, 1}}, 1, 0}), InvariantViolation);
  CHECK_THROWS_AS(maintain_loss_queues(state, {5, 0, false, {}, 0, 0}), InvariantViolation);
}

TEST_CASE("negative reduced cost trips the invariant") {
  CompactGraph g;
  g.mec_count = 1;
  g.weight = Matrix<Nanos>::Constant(3, 3, CompactGraph::kAbsent);
  g.via = Matrix<TileId>::Zero(3, 3);
  g.first_uses_global = {false};
  g.weight(g.source(), 0) = -5;
  g.weight(0, g.sink()) = 0;
  std::vector<Nanos> potentials(3, 0);
  CHECK_THROWS_AS(shortest_augmenting_path(g, potentials), InvariantViolation);
  CHECK(bootstrap_augmenting_path(g, potentials)->path.cost == -5);
}

TEST_CASE("disconnected sink") {
  const auto p = instance_189();
  SolverState state(p, {0, 0});
  state.path_arrays = initialize_possible_paths(p);
  auto g = setup_graph(state);
  CHECK_FALSE(bootstrap_augmenting_path(g, state.potentials));
}

TEST_CASE("oksp_solve examples") {
  auto r = oksp_solve(instance_189(), {1, 1});
  CHECK(r.profit == 189);
  CacheTable want({1, 1});
  want.insert(0, 1);
  want.insert(1, 0);
  CHECK(r.table == want);
  CHECK(r.path_costs == std::vector<Nanos>{-100, -89});

  auto zero = oksp_solve(instance_189(), {0, 0});
  CHECK(zero.profit == 0);
  CHECK(zero.table.total_used() == 0);

  auto p = ProfitTable::zeros(1, 3);
  p.global << 10;
  p.local << 5, 4, 3;
  auto three = oksp_solve(p, {1, 1, 1});
  CHECK(three.profit == 22);
  CHECK(three.path_costs == std::vector<Nanos>{-15, -4, -3});
  CHECK(three.table.total_used() == 3);
}

TEST_CASE("stop rules differ only in zero-profit replicas") {
  auto p = ProfitTable::zeros(4, 2);
  p.global << 3, 0, 0, 0;
  auto strict = oksp_solve(p, {2, 2});
  auto fill = oksp_solve(p, {2, 2}, {StopRule::PositiveCost, true});
  CHECK(strict.profit == 3);
  CHECK(fill.profit == 3);
  CHECK(strict.table.total_used() == 1);
  CHECK(fill.table.total_used() == 4);
}

TEST_CASE("oksp matches the exhaustive optimum on small non-negative instances") {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 500; ++rep) {
    auto inst = testing_support::random_instance(gen, {8, 3, 2, 100});
    auto r = oksp_solve(inst.profits, inst.capacities, {StopRule::NonNegativeCost, true});
    CHECK(r.profit == testing_support::exhaustive_best(inst));
    CHECK(placement_profit(inst.profits, r.table) == r.profit);
    for (std::size_t l = 1; l < r.path_costs.size(); ++l)
      CHECK(r.path_costs[l] >= r.path_costs[l - 1]);
    for (auto edges : r.path_edges)
      CHECK(edges <= static_cast<std::size_t>(inst.profits.mec_count()) + 1);
  }
}

TEST_CASE("oksp matches ksp on larger instances") {
  std::mt19937_64 gen(77);
  for (int rep = 0; rep < 40; ++rep) {
    auto inst = testing_support::random_instance(gen, {60, 6, 8, 1'000'000, 0, 10});
    std::int64_t k = 0;
    for (auto c : inst.capacities) k += c;
    auto graph = build_graph(inst.profits, inst.capacities);
    auto ksp = ksp_solve(graph, k);
    for (auto stop : {StopRule::NonNegativeCost, StopRule::PositiveCost}) {
      auto r = oksp_solve(inst.profits, inst.capacities, {stop, true});
      CHECK(r.profit == ksp.profit);
      CHECK(placement_profit(inst.profits, r.table) == placement_profit(inst.profits, ksp.table));
    }
  }
}

TEST_CASE("identical inputs give identical tables") {
  std::mt19937_64 gen(8);
  auto inst = testing_support::random_instance(gen, {200, 5, 20, 50});
  auto a = oksp_solve(inst.profits, inst.capacities);
  auto b = oksp_solve(inst.profits, inst.capacities);
  CHECK(a.table == b.table);
  CHECK(a.path_costs == b.path_costs);
}
