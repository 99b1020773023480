#pragma once

#include <cstdint>
#include <vector>

#include "edgecache/model.hpp"
#include "edgecache/rng.hpp"

namespace edgecache {

enum class PopularityMode { Similar, Random };

struct WorkloadSpec {
  int tile_count = 1;
  int mec_count = 1;
  double zipf_alpha = 1.5;
  PopularityMode popularity_mode = PopularityMode::Similar;
  std::int64_t requests_per_mec = 0;
  double prefetch_fraction = 0.85;
  Interval<double> prefetch_size_fraction_range{0.5, 1.0};
  Interval<double> remediation_size_fraction_range{0.1, 0.2};
  std::uint64_t rng_seed = 1;

  void validate() const;
};

/// p_k proportional to k^-alpha over ranks 1..n. alpha = 0 gives the uniform pmf.
std::vector<double> zipf_pmf(double alpha, int n);

/// Uniform fraction of the tile size from `range`, at least one bit.
Bits draw_request_size(Rng& rng, const Interval<double>& range, Bits tile_size_bits);

/// Tile id holding each popularity rank at `mec`. Identical for every MEC in
/// Similar mode; an independent uniform permutation per MEC in Random mode.
std::vector<TileId> popularity_ranking(const WorkloadSpec& spec, MecId mec);

/// Deterministic in (spec, cfg). Per MEC, the stream is consumed as: ranking
/// permutation (Random mode only), then per request a tile draw, a type draw
/// and a size draw.
RequestAggregate generate_workload(const WorkloadSpec& spec, const DomainConfig& cfg);

/// counts(m, n) = number of requests for tile n at MEC m.
Matrix<std::int64_t> aggregate_to_counts(const RequestAggregate& agg);

}  // namespace edgecache
