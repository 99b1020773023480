#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "edgecache/model.hpp"

namespace edgecache {

class InvalidPlacement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which tiles each MEC server stores. Capacity is enforced on insertion.
class CacheTable {
 public:
  CacheTable() = default;
  explicit CacheTable(std::vector<std::int64_t> capacities);

  int mec_count() const { return static_cast<int>(capacities_.size()); }
  const std::vector<std::int64_t>& capacities() const { return capacities_; }
  std::int64_t capacity(MecId mec) const { return capacities_.at(mec); }
  std::int64_t used(MecId mec) const { return static_cast<std::int64_t>(tiles_.at(mec).size()); }
  std::int64_t total_used() const;

  const std::set<TileId>& tiles(MecId mec) const { return tiles_.at(mec); }
  bool contains(MecId mec, TileId tile) const { return tiles_.at(mec).count(tile) != 0; }

  /// Returns false if the tile was already present; throws InvalidPlacement when full.
  bool insert(MecId mec, TileId tile);
  bool erase(MecId mec, TileId tile);

  /// Tiles with at least one replica, ascending.
  std::vector<TileId> cached_tiles() const;

  friend bool operator==(const CacheTable&, const CacheTable&) = default;
  /// Lexicographic on the per-MEC sorted tile lists.
  friend bool operator<(const CacheTable& a, const CacheTable& b) { return a.tiles_ < b.tiles_; }

 private:
  std::vector<std::int64_t> capacities_;
  std::vector<std::set<TileId>> tiles_;
};

/// Objective shared by all solvers: global profit of every tile cached
/// somewhere plus local profit of every (tile, MEC) replica.
Nanos placement_profit(const ProfitTable& profits, const CacheTable& cache);

}  // namespace edgecache
