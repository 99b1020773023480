#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "edgecache/workload.hpp"

using namespace edgecache;

namespace {

WorkloadSpec spec_for(int tiles, int mecs, std::int64_t requests, std::uint64_t seed = 7) {
  WorkloadSpec s;
  s.tile_count = tiles;
  s.mec_count = mecs;
  s.requests_per_mec = requests;
  s.rng_seed = seed;
  return s;
}

}  // namespace

TEST_CASE("zipf_pmf") {
  CHECK(zipf_pmf(1.5, 1) == std::vector<double>{1.0});

  for (double v : zipf_pmf(0.0, 4)) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  const auto p = zipf_pmf(1.5, 3);
  const double z = 1.0 + std::pow(2.0, -1.5) + std::pow(3.0, -1.5);
  CHECK(p[0] == doctest::Approx(1.0 / z).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(std::pow(2.0, -1.5) / z).epsilon(1e-14));
  CHECK(p[0] == doctest::Approx(0.6468).epsilon(1e-4));
  CHECK(p[1] == doctest::Approx(0.2287).epsilon(1e-3));
  CHECK(p[2] == doctest::Approx(0.1245).epsilon(1e-3));

  for (int n : {1, 7, 1000, 100000}) {
    const auto q = zipf_pmf(1.1, n);
    CHECK(std::abs(std::accumulate(q.begin(), q.end(), 0.0) - 1.0) < 1e-12);
    CHECK(std::is_sorted(q.rbegin(), q.rend()));
  }

  CHECK_THROWS(zipf_pmf(1.5, 0));
}

TEST_CASE("empty workload") {
  auto cfg = DomainConfig::defaults(3, 1);
  const auto agg = generate_workload(spec_for(10, 3, 0), cfg);
  CHECK(agg.empty());
  CHECK(aggregate_to_counts(agg) == Matrix<std::int64_t>::Zero(3, 10));
}

TEST_CASE("generation is a pure function of spec and domain") {
  auto cfg = DomainConfig::defaults(3, 1);
  auto spec = spec_for(50, 3, 500);
  CHECK(generate_workload(spec, cfg) == generate_workload(spec, cfg));
  spec.popularity_mode = PopularityMode::Random;
  CHECK(generate_workload(spec, cfg) == generate_workload(spec, cfg));
  auto other = spec;
  other.rng_seed = 8;
  CHECK_FALSE(generate_workload(spec, cfg) == generate_workload(other, cfg));
}

TEST_CASE("request sizes stay in [1, tile size] and follow their class range") {
  auto cfg = DomainConfig::defaults(2, 1);
  const auto agg = generate_workload(spec_for(30, 2, 5000), cfg);
  std::int64_t prefetch_sized = 0;
  std::int64_t total = 0;
  for (const auto& [key, sizes] : agg.entries())
    for (Bits sz : sizes) {
      ++total;
      CHECK(sz >= 1);
      CHECK(sz <= cfg.tile_size_bits);
      const bool small = sz <= cfg.tile_size_bits / 5;
      const bool large = sz >= cfg.tile_size_bits / 2;
      CHECK((small || large));
      prefetch_sized += large;
    }
  CHECK(total == 10000);
  // 0.85 prefetch share; 10^4 draws put 5 sigma at about 0.018.
  CHECK(std::abs(static_cast<double>(prefetch_sized) / total - 0.85) < 0.02);

  Rng rng(3);
  CHECK(draw_request_size(rng, {0.0, 0.0}, 80) == 1);
  CHECK(draw_request_size(rng, {1.0, 1.0}, 80) == 80);
}

TEST_CASE("steep popularity puts almost every request on rank 1") {
  const auto pmf = zipf_pmf(8.0, 100);
  CHECK(pmf[0] > 0.995);
  auto cfg = DomainConfig::defaults(3, 1);
  auto spec = spec_for(100, 3, 100'000);
  spec.zipf_alpha = 8.0;
  const auto counts = aggregate_to_counts(generate_workload(spec, cfg));
  for (int m = 0; m < 3; ++m) CHECK(counts(m, 0) > 99'000);
}

TEST_CASE("empirical frequencies match the pmf (chi-squared)") {
  constexpr int n = 20;
  auto cfg = DomainConfig::defaults(1, 1);
  auto spec = spec_for(n, 1, 1'000'000, 12345);
  spec.zipf_alpha = 1.2;
  const auto counts = aggregate_to_counts(generate_workload(spec, cfg));
  const auto pmf = zipf_pmf(spec.zipf_alpha, n);
  double chi2 = 0;
  for (int k = 0; k < n; ++k) {
    const double expected = pmf[k] * 1e6;
    const double d = static_cast<double>(counts(0, k)) - expected;
    chi2 += d * d / expected;
  }
  // 99th percentile of chi-squared with 19 degrees of freedom.
  CHECK(chi2 < 36.191);
}

TEST_CASE("popularity modes") {
  auto spec = spec_for(40, 4, 0);
  const auto r0 = popularity_ranking(spec, 0);
  for (int m = 1; m < 4; ++m) CHECK(popularity_ranking(spec, m) == r0);

  spec.popularity_mode = PopularityMode::Random;
  std::set<std::vector<TileId>> seen;
  for (int m = 0; m < 4; ++m) {
    auto r = popularity_ranking(spec, m);
    seen.insert(r);
    std::sort(r.begin(), r.end());
    CHECK(r == r0);  // still a permutation
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("aggregate_to_counts") {
  RequestAggregate agg(2, 6);
  agg.add(0, 5, 10);
  auto c = aggregate_to_counts(agg);
  CHECK(c(0, 5) == 1);
  CHECK(c.sum() == 1);

  RequestAggregate two(2, 4);
  two.add(1, 3, 40'000'000);
  two.add(1, 3, 8'000'000);
  c = aggregate_to_counts(two);
  CHECK(c(1, 3) == 2);
  CHECK(c.sum() == 2);
}

TEST_CASE("spec validation") {
  auto s = spec_for(5, 1, 10);
  s.prefetch_fraction = 1.5;
  CHECK_THROWS_AS(s.validate(), InvalidConfig);
  s = spec_for(5, 1, 10);
  s.remediation_size_fraction_range = {0.3, 0.2};
  CHECK_THROWS_AS(s.validate(), InvalidConfig);
  s = spec_for(0, 1, 10);
  CHECK_THROWS_AS(s.validate(), InvalidConfig);
}
