#include <doctest.h>

#include <random>

#include "edgecache/evaluation.hpp"
#include "edgecache/oksp.hpp"

using namespace edgecache;

namespace {

WorkloadSpec small_spec(std::uint64_t seed) {
  WorkloadSpec spec;
  spec.tile_count = 40;
  spec.mec_count = 3;
  spec.requests_per_mec = 300;
  spec.rng_seed = seed;
  return spec;
}

SimConfig sim_config(std::int64_t sessions, std::int64_t ticks, double accuracy = 0.8422) {
  SimConfig sim;
  sim.session_count = sessions;
  sim.requests_per_session = ticks;
  sim.prediction_accuracy = accuracy;
  sim.rng_seed = 17;
  return sim;
}

}  // namespace

TEST_CASE("arl_optimization") {
  auto cfg = DomainConfig::defaults(2, 1);
  RequestAggregate agg(2, 2);
  agg.add(0, 0, 40'000'000);
  agg.add(0, 0, 40'000'000);
  agg.add(1, 0, 40'000'000);

  CacheTable empty({1, 1});
  CHECK(arl_optimization(agg, empty, cfg).mean() == 0);

  CacheTable home({1, 1});
  home.insert(0, 0);
  const auto r = arl_optimization(agg, home, cfg);
  CHECK(r.total_saving == 190'000'000 + 190'000'000 + 107'000'000);
  CHECK(r.mean() == 162'333'333);
  CHECK(r.remainder() == 1);
  CHECK(r.local_hits == 2);
  CHECK(r.domain_hits == 1);
  CHECK(r.cloud_requests == 0);

  CacheTable everywhere({1, 1});
  everywhere.insert(0, 0);
  everywhere.insert(1, 0);
  CHECK(arl_optimization(agg, everywhere, cfg).total_saving == 3 * cc(40'000'000, cfg));
}

TEST_CASE("saving total equals the placement profit") {
  std::mt19937_64 gen(4);
  for (int rep = 0; rep < 30; ++rep) {
    auto cfg = DomainConfig::defaults(3, 5);
    const auto agg = generate_workload(small_spec(gen()), cfg);
    CacheTable cache(cfg.capacities);
    for (MecId m = 0; m < 3; ++m)
      for (int k = 0; k < 5; ++k) cache.insert(m, static_cast<TileId>(gen() % 40));
    CHECK(arl_optimization(agg, cache, cfg).total_saving ==
          placement_profit(compute_profits(agg, cfg), cache));
  }
}

TEST_CASE("empty simulation") {
  auto cfg = DomainConfig::defaults(3, 2);
  const auto report = simulate_sessions(CacheTable(cfg.capacities), small_spec(1), sim_config(0, 10), cfg);
  CHECK(report.total_requests == 0);
  CHECK(report.arl_optimization() == 0);
}

TEST_CASE("perfect prediction with everything at home") {
  auto cfg = DomainConfig::defaults(3, 40);
  CacheTable cache(cfg.capacities);
  for (MecId m = 0; m < 3; ++m)
    for (TileId n = 0; n < 40; ++n) cache.insert(m, n);
  const auto report = simulate_sessions(cache, small_spec(2), sim_config(6, 200, 1.0), cfg);
  CHECK(report.total_requests > 0);
  CHECK(report.remediation_requests == 0);
  CHECK(report.local_hits == report.total_requests);
  for (const auto& r : report.log) CHECK(r.saving == cc(r.size_bits, cfg));
}

TEST_CASE("fixed cloud delay: empirical metric equals the analytic one on the realised log") {
  auto cfg = DomainConfig::defaults(3, 6);
  const auto spec = small_spec(3);
  const auto agg = generate_workload(spec, cfg);
  const auto cache = oksp_solve(compute_profits(agg, cfg), cfg.capacities).table;
  const auto report = simulate_sessions(cache, spec, sim_config(30, 300), cfg);
  REQUIRE(report.total_requests > 0);
  CHECK(report.local_hits + report.domain_hits + report.cloud_requests == report.total_requests);
  CHECK(report.prefetch_requests + report.remediation_requests == report.total_requests);
  const auto analytic = arl_optimization(report.realized(3, 40), cache, cfg);
  CHECK(analytic.total_saving == report.total_saving);
  CHECK(analytic.mean() == report.arl_optimization());
  CHECK(analytic.remainder() == report.remainder());
  for (const auto& r : report.log) CHECK(r.saving >= 0);
}

TEST_CASE("simulation is deterministic and monotone in the cache") {
  auto cfg = DomainConfig::defaults(3, 8);
  const auto spec = small_spec(5);
  CacheTable small(cfg.capacities);
  small.insert(0, 0);
  CacheTable large = small;
  large.insert(1, 0);
  large.insert(2, 1);
  large.insert(0, 3);
  const auto sim = sim_config(12, 100);
  const auto a = simulate_sessions(small, spec, sim, cfg);
  const auto b = simulate_sessions(large, spec, sim, cfg);
  CHECK(a.total_saving == simulate_sessions(small, spec, sim, cfg).total_saving);
  CHECK(a.total_requests == b.total_requests);
  CHECK(b.mean_saving() >= a.mean_saving());
}

TEST_CASE("report merging is order independent") {
  auto cfg = DomainConfig::defaults(3, 4);
  const auto spec = small_spec(6);
  CacheTable cache(cfg.capacities);
  cache.insert(1, 2);
  auto sim = sim_config(4, 50);
  const auto a = simulate_sessions(cache, spec, sim, cfg);
  sim.rng_seed = 99;
  const auto b = simulate_sessions(cache, spec, sim, cfg);
  SimReport ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  CHECK(ab.total_requests == ba.total_requests);
  CHECK(ab.total_saving == ba.total_saving);
  CHECK(ab.local_hits == ba.local_hits);
  CHECK(ab.saving_sq_sum == doctest::Approx(static_cast<double>(ba.saving_sq_sum)));
}

TEST_CASE("simulation config validation") {
  auto sim = sim_config(1, 1);
  sim.prediction_accuracy = 1.2;
  CHECK_THROWS_AS(sim.validate(), InvalidConfig);
  sim = sim_config(1, 1);
  sim.render_interval_ns = 0;
  CHECK_THROWS_AS(sim.validate(), InvalidConfig);
}
