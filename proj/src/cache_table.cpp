#include "edgecache/cache_table.hpp"

#include <algorithm>

namespace edgecache {

CacheTable::CacheTable(std::vector<std::int64_t> capacities)
    : capacities_(std::move(capacities)), tiles_(capacities_.size()) {
  for (auto c : capacities_)
    if (c < 0) throw InvalidConfig("capacities must be non-negative");
}

std::int64_t CacheTable::total_used() const {
  std::int64_t total = 0;
  for (const auto& s : tiles_) total += static_cast<std::int64_t>(s.size());
  return total;
}

bool CacheTable::insert(MecId mec, TileId tile) {
  auto& set = tiles_.at(mec);
  if (set.count(tile)) return false;
  if (static_cast<std::int64_t>(set.size()) >= capacities_[mec])
    throw InvalidPlacement("MEC server " + std::to_string(mec) + " is full");
  set.insert(tile);
  return true;
}

bool CacheTable::erase(MecId mec, TileId tile) { return tiles_.at(mec).erase(tile) != 0; }

std::vector<TileId> CacheTable::cached_tiles() const {
  std::set<TileId> all;
  for (const auto& s : tiles_) all.insert(s.begin(), s.end());
  return {all.begin(), all.end()};
}

Nanos placement_profit(const ProfitTable& profits, const CacheTable& cache) {
  if (cache.mec_count() != profits.mec_count())
    throw InvalidPlacement("cache table and profit table disagree on MEC count");
  Nanos total = 0;
  for (MecId m = 0; m < cache.mec_count(); ++m) {
    if (cache.used(m) > cache.capacity(m))
      throw InvalidPlacement("MEC server " + std::to_string(m) + " exceeds its capacity");
    for (TileId n : cache.tiles(m)) {
      if (n < 0 || n >= profits.tile_count()) throw InvalidPlacement("tile id out of range");
      total += profits.local(n, m);
    }
  }
  for (TileId n : cache.cached_tiles()) total += profits.global(n);
  return total;
}

}  // namespace edgecache
