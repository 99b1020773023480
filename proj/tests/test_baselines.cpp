#include <doctest.h>

#include "edgecache/baselines.hpp"
#include "edgecache/evaluation.hpp"
#include "edgecache/oksp.hpp"

using namespace edgecache;

namespace {

RequestCounts counts_of(int mecs, std::initializer_list<std::int64_t> values) {
  RequestCounts c(mecs, static_cast<Eigen::Index>(values.size()) / mecs);
  auto it = values.begin();
  for (Eigen::Index m = 0; m < c.rows(); ++m)
    for (Eigen::Index n = 0; n < c.cols(); ++n) c(m, n) = *it++;
  return c;
}

// One 40e6-bit request per count unit.
RequestAggregate aggregate_of(const RequestCounts& c) {
  RequestAggregate agg(static_cast<int>(c.rows()), static_cast<int>(c.cols()));
  for (Eigen::Index m = 0; m < c.rows(); ++m)
    for (Eigen::Index n = 0; n < c.cols(); ++n)
      for (std::int64_t k = 0; k < c(m, n); ++k)
        agg.add(static_cast<MecId>(m), static_cast<TileId>(n), 40'000'000);
  return agg;
}

}  // namespace

TEST_CASE("self_top") {
  auto t = self_top(counts_of(1, {5, 9, 1}), {2});
  CHECK(t.tiles(0) == std::set<TileId>{0, 1});

  auto same = self_top(counts_of(2, {3, 1, 4, 3, 1, 4}), {2, 2});
  CHECK(same.tiles(0) == same.tiles(1));
  CHECK(same.tiles(0) == std::set<TileId>{0, 2});

  auto zero = self_top(RequestCounts::Zero(1, 5), {3});
  CHECK(zero.tiles(0) == std::set<TileId>{0, 1, 2});
}

TEST_CASE("distributed") {
  // t0 is hotter overall and hotter at M1; t1 takes what is left.
  auto t = distributed(counts_of(2, {1, 2, 5, 0}), {1, 1});
  CHECK(t.tiles(0) == std::set<TileId>{1});
  CHECK(t.tiles(1) == std::set<TileId>{0});

  auto all = distributed(counts_of(2, {1, 2, 3, 4, 0, 1}), {5, 5});
  CHECK(all.total_used() == 3);
  for (TileId n = 0; n < 3; ++n) CHECK(all.contains(0, n) + all.contains(1, n) == 1);

  const auto single = counts_of(1, {4, 0, 7, 7, 1});
  CHECK(distributed(single, {3}) == self_top(single, {3}));
}

TEST_CASE("mixco zero capacity") {
  auto cfg = DomainConfig::defaults(2, 0);
  const auto c = counts_of(2, {1, 2, 3, 4});
  const auto p = compute_profits(aggregate_of(c), cfg);
  CHECK(mixco(c, p, {0, 0}, cfg).total_used() == 0);
}

TEST_CASE("mixco with identical popularity stays shared and beats self_top") {
  auto cfg = DomainConfig::defaults(3, 4);
  WorkloadSpec spec;
  spec.tile_count = 60;
  spec.mec_count = 3;
  spec.requests_per_mec = 3000;
  spec.rng_seed = 31;
  const auto agg = generate_workload(spec, cfg);
  const auto c = aggregate_to_counts(agg);
  const auto p = compute_profits(agg, cfg);

  MixcoStats stats;
  const auto mix = mixco(c, p, cfg.capacities, cfg, &stats);
  const auto top = self_top(c, cfg.capacities);
  CHECK(arl_optimization(agg, mix, cfg).total_saving >= arl_optimization(agg, top, cfg).total_saving);
  std::int64_t dedicated = 0;
  for (auto d : stats.dedicated) dedicated += d;
  CHECK(dedicated * 2 < cfg.total_capacity());
}

TEST_CASE("mixco with disjoint popularity matches self_top") {
  auto cfg = DomainConfig::defaults(2, 2);
  // MEC 1's tiles are colder, but a local hit on them is still worth more
  // than a domain hit on MEC 0's third and fourth tiles.
  const auto c = counts_of(2, {100, 90, 80, 70, 60, 0, 0, 0, 0, 0,  //
                               0, 0, 0, 0, 0, 60, 55, 50, 45, 40});
  const auto p = compute_profits(aggregate_of(c), cfg);
  MixcoStats stats;
  CHECK(mixco(c, p, cfg.capacities, cfg, &stats) == self_top(c, cfg.capacities));
  CHECK(stats.conversions > 0);
}

TEST_CASE("baselines respect capacity and never beat oksp") {
  auto cfg = DomainConfig::defaults(4, 6);
  cfg.capacities = {6, 2, 0, 9};
  for (auto mode : {PopularityMode::Similar, PopularityMode::Random}) {
    WorkloadSpec spec;
    spec.tile_count = 80;
    spec.mec_count = 4;
    spec.requests_per_mec = 400;
    spec.popularity_mode = mode;
    const auto agg = generate_workload(spec, cfg);
    const auto c = aggregate_to_counts(agg);
    const auto p = compute_profits(agg, cfg);
    const auto best = arl_optimization(agg, oksp_solve(p, cfg.capacities).table, cfg).total_saving;
    for (const auto& t : {self_top(c, cfg.capacities), distributed(c, cfg.capacities),
                          mixco(c, p, cfg.capacities, cfg)}) {
      for (MecId m = 0; m < 4; ++m) CHECK(t.used(m) <= cfg.capacities[m]);
      CHECK(arl_optimization(agg, t, cfg).total_saving <= best);
    }
    CHECK(mixco(c, p, cfg.capacities, cfg) == mixco(c, p, cfg.capacities, cfg));
  }
}
