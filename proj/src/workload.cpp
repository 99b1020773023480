#include "edgecache/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edgecache/rng.hpp"

namespace edgecache {

namespace {

bool is_fraction_range(const Interval<double>& r) {
  return r.ordered() && r.lo >= 0.0 && r.hi <= 1.0;
}

std::vector<TileId> draw_ranking(const WorkloadSpec& spec, Rng& rng) {
  std::vector<TileId> ranking(static_cast<std::size_t>(spec.tile_count));
  std::iota(ranking.begin(), ranking.end(), 0);
  if (spec.popularity_mode == PopularityMode::Random)
    for (std::size_t i = ranking.size(); i > 1; --i)
      std::swap(ranking[i - 1], ranking[rng.below(i)]);
  return ranking;
}

}  // namespace

void WorkloadSpec::validate() const {
  if (tile_count < 1) throw InvalidConfig("tile_count must be >= 1");
  if (mec_count < 1) throw InvalidConfig("mec_count must be >= 1");
  if (!(zipf_alpha >= 0.0) || !std::isfinite(zipf_alpha))
    throw InvalidConfig("zipf_alpha must be a finite non-negative number");
  if (requests_per_mec < 0) throw InvalidConfig("requests_per_mec must be non-negative");
  if (!(prefetch_fraction >= 0.0 && prefetch_fraction <= 1.0))
    throw InvalidConfig("prefetch_fraction must lie in [0, 1]");
  if (!is_fraction_range(prefetch_size_fraction_range) ||
      !is_fraction_range(remediation_size_fraction_range))
    throw InvalidConfig("size fraction ranges must be ordered sub-intervals of [0, 1]");
}

Bits draw_request_size(Rng& rng, const Interval<double>& range, Bits tile_size_bits) {
  const double fraction = rng.uniform(range.lo, range.hi);
  const auto size = static_cast<Bits>(std::floor(fraction * static_cast<double>(tile_size_bits)));
  return std::clamp<Bits>(size, 1, tile_size_bits);
}

std::vector<double> zipf_pmf(double alpha, int n) {
  if (n < 1) throw std::invalid_argument("zipf_pmf: n must be >= 1");
  if (!(alpha >= 0.0)) throw std::invalid_argument("zipf_pmf: alpha must be non-negative");
  std::vector<double> p(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) p[k] = std::pow(static_cast<double>(k + 1), -alpha);
  // Sum smallest terms first.
  const double z = std::accumulate(p.rbegin(), p.rend(), 0.0);
  for (auto& v : p) v /= z;
  return p;
}

std::vector<TileId> popularity_ranking(const WorkloadSpec& spec, MecId mec) {
  Rng rng(derive_seed(spec.rng_seed, static_cast<std::uint64_t>(mec)));
  return draw_ranking(spec, rng);
}

RequestAggregate generate_workload(const WorkloadSpec& spec, const DomainConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (spec.mec_count != cfg.mec_count)
    throw InvalidConfig("workload and domain disagree on the MEC count");

  const auto pmf = zipf_pmf(spec.zipf_alpha, spec.tile_count);
  std::vector<double> cdf(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());
  cdf.back() = 1.0;

  RequestAggregate agg(spec.mec_count, spec.tile_count);
  for (MecId m = 0; m < spec.mec_count; ++m) {
    // Same per-MEC stream as popularity_ranking, continued for the requests.
    Rng rng(derive_seed(spec.rng_seed, static_cast<std::uint64_t>(m)));
    const auto ranking = draw_ranking(spec, rng);

    for (std::int64_t r = 0; r < spec.requests_per_mec; ++r) {
      const double u = rng.uniform();
      auto rank = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      rank = std::min(rank, cdf.size() - 1);
      const bool prefetch = rng.bernoulli(spec.prefetch_fraction);
      const auto& range =
          prefetch ? spec.prefetch_size_fraction_range : spec.remediation_size_fraction_range;
      agg.add(m, ranking[rank], draw_request_size(rng, range, cfg.tile_size_bits));
    }
  }
  return agg;
}

Matrix<std::int64_t> aggregate_to_counts(const RequestAggregate& agg) {
  Matrix<std::int64_t> counts = Matrix<std::int64_t>::Zero(agg.mec_count(), agg.tile_count());
  for (const auto& [key, sizes] : agg.entries())
    counts(key.first, key.second) += static_cast<std::int64_t>(sizes.size());
  return counts;
}

}  // namespace edgecache
