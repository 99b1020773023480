#pragma once

#include <cstdint>
#include <vector>

#include "edgecache/cache_table.hpp"
#include "edgecache/model.hpp"

namespace edgecache {

/// counts(m, n): requests for tile n at MEC m, as from aggregate_to_counts.
using RequestCounts = Matrix<std::int64_t>;

/// Each MEC caches its locally most requested tiles (ties: lower tile id).
CacheTable self_top(const RequestCounts& counts, const std::vector<std::int64_t>& capacities);

/// Distinct tiles only: scan tiles by domain-wide count and give each to the
/// MEC with free space that requests it most (ties: lower MEC id).
CacheTable distributed(const RequestCounts& counts, const std::vector<std::int64_t>& capacities);

struct MixcoStats {
  std::int64_t evaluations = 0;
  std::int64_t conversions = 0;
  std::vector<std::int64_t> dedicated;  // final dedicated units per MEC
};

/// Dedicated/shared split heuristic. Every unit starts shared; one unit at a
/// time is converted to dedicated at the MEC whose conversion raises the
/// average request latency optimisation most, re-evaluating the whole
/// domain (O(M*N)) per candidate, until no conversion helps.
CacheTable mixco(const RequestCounts& counts, const ProfitTable& profits,
                 const std::vector<std::int64_t>& capacities, const DomainConfig& cfg,
                 MixcoStats* stats = nullptr);

}  // namespace edgecache
