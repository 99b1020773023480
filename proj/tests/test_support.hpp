#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "edgecache/model.hpp"

namespace testing_support {

using edgecache::Nanos;
using edgecache::ProfitTable;

struct Instance {
  ProfitTable profits;
  std::vector<std::int64_t> capacities;
};

struct InstanceShape {
  int max_tiles = 8;
  int max_mecs = 3;
  std::int64_t max_capacity = 2;
  Nanos max_profit = 100;
  /// Globals are drawn from [-negative_span, max_profit] when non-zero.
  Nanos negative_span = 0;
  int min_tiles = 1;
};

inline Instance random_instance(std::mt19937_64& gen, const InstanceShape& shape) {
  auto pick = [&gen](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen);
  };
  const int n = static_cast<int>(pick(shape.min_tiles, shape.max_tiles));
  const int m = static_cast<int>(pick(1, shape.max_mecs));
  Instance inst{ProfitTable::zeros(n, m), {}};
  for (int i = 0; i < n; ++i) {
    inst.profits.global(i) = pick(-shape.negative_span, shape.max_profit);
    for (int j = 0; j < m; ++j) inst.profits.local(i, j) = pick(0, shape.max_profit);
  }
  for (int j = 0; j < m; ++j) inst.capacities.push_back(pick(0, shape.max_capacity));
  return inst;
}

/// Exhaustive maximum over per-MEC tile bitmasks with popcount <= capacity.
/// Kept apart from the library's oracle on purpose.
inline Nanos exhaustive_best(const Instance& inst) {
  const int n = inst.profits.tile_count();
  const int m = inst.profits.mec_count();
  std::vector<std::vector<std::uint32_t>> choices(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
      if (std::popcount(mask) <= inst.capacities[j]) choices[j].push_back(mask);

  Nanos best = 0;
  std::vector<std::uint32_t> pick(static_cast<std::size_t>(m));
  auto recurse = [&](auto&& self, int j) -> void {
    if (j == m) {
      Nanos total = 0;
      std::uint32_t any = 0;
      for (int k = 0; k < m; ++k) {
        any |= pick[k];
        for (int i = 0; i < n; ++i)
          if ((pick[k] >> i) & 1u) total += inst.profits.local(i, k);
      }
      for (int i = 0; i < n; ++i)
        if ((any >> i) & 1u) total += inst.profits.global(i);
      best = std::max(best, total);
      return;
    }
    for (auto mask : choices[j]) {
      pick[j] = mask;
      self(self, j + 1);
    }
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace testing_support
