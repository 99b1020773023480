#include "edgecache/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace edgecache {

namespace {

void check_shapes(const RequestCounts& counts, const std::vector<std::int64_t>& capacities) {
  if (counts.rows() != static_cast<Eigen::Index>(capacities.size()))
    throw InvalidConfig("request counts and capacities disagree on the MEC count");
}

// Tile ids by descending count, ties to the lower id.
template <typename Row>
std::vector<TileId> rank_tiles(const Row& row) {
  std::vector<TileId> order(static_cast<std::size_t>(row.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](TileId a, TileId b) { return row(a) > row(b); });
  return order;
}

}  // namespace

CacheTable self_top(const RequestCounts& counts, const std::vector<std::int64_t>& capacities) {
  check_shapes(counts, capacities);
  CacheTable table(capacities);
  for (MecId m = 0; m < counts.rows(); ++m) {
    const auto order = rank_tiles(counts.row(m));
    const auto take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(capacities[m]));
    for (std::size_t r = 0; r < take; ++r) table.insert(m, order[r]);
  }
  return table;
}

CacheTable distributed(const RequestCounts& counts, const std::vector<std::int64_t>& capacities) {
  check_shapes(counts, capacities);
  CacheTable table(capacities);
  const Vector<std::int64_t> totals = counts.colwise().sum().transpose();
  std::vector<std::int64_t> free = capacities;
  std::int64_t free_total = std::accumulate(free.begin(), free.end(), std::int64_t{0});
  for (TileId n : rank_tiles(totals)) {
    if (free_total == 0) break;
    MecId best = -1;
    for (MecId m = 0; m < counts.rows(); ++m)
      if (free[m] > 0 && (best == -1 || counts(m, n) > counts(best, n))) best = m;
    table.insert(best, n);
    --free[best];
    --free_total;
  }
  return table;
}

namespace {

// Shared machinery for one MixCo instance: rankings are computed once, each
// evaluation rebuilds the placement for a dedicated-space vector in O(M*N).
class MixcoModel {
 public:
  MixcoModel(const RequestCounts& counts, const ProfitTable& profits,
             const std::vector<std::int64_t>& capacities)
      : counts_(counts), profits_(profits), capacities_(capacities) {
    for (MecId m = 0; m < counts.rows(); ++m) local_rank_.push_back(rank_tiles(counts.row(m)));
    const Vector<std::int64_t> totals = counts.colwise().sum().transpose();
    global_rank_ = rank_tiles(totals);
    holders_.assign(static_cast<std::size_t>(counts.cols()), 0);
  }

  Nanos evaluate(const std::vector<std::int64_t>& dedicated) { return build(dedicated, nullptr); }

  CacheTable placement(const std::vector<std::int64_t>& dedicated) {
    CacheTable table(capacities_);
    build(dedicated, &table);
    return table;
  }

 private:
  Nanos build(const std::vector<std::int64_t>& dedicated, CacheTable* out) {
    const auto m_count = static_cast<MecId>(counts_.rows());
    std::fill(holders_.begin(), holders_.end(), 0);
    auto place = [&](MecId m, TileId n) {
      holders_[n] |= std::uint64_t{1} << m;
      if (out) out->insert(m, n);
    };

    // Shared zones first: globally popular tiles, one replica in the domain.
    std::vector<std::int64_t> shared(static_cast<std::size_t>(m_count));
    std::int64_t shared_total = 0;
    for (MecId m = 0; m < m_count; ++m) shared_total += shared[m] = capacities_[m] - dedicated[m];
    for (TileId n : global_rank_) {
      if (shared_total == 0) break;
      MecId best = -1;
      for (MecId m = 0; m < m_count; ++m)
        if (shared[m] > 0 && (best == -1 || counts_(m, n) > counts_(best, n))) best = m;
      place(best, n);
      --shared[best];
      --shared_total;
    }

    // Dedicated zones: the MEC's own most requested tiles it does not hold yet.
    for (MecId m = 0; m < m_count; ++m) {
      std::int64_t left = dedicated[m];
      for (std::size_t r = 0; left > 0 && r < local_rank_[m].size(); ++r) {
        const TileId n = local_rank_[m][r];
        if ((holders_[n] >> m) & 1u) continue;
        place(m, n);
        --left;
      }
    }
    // Full latency evaluation over every (tile, MEC) pair.
    Nanos profit = 0;
    for (TileId n = 0; n < static_cast<TileId>(counts_.cols()); ++n) {
      if (holders_[n] != 0) profit += profits_.global(n);
      for (MecId m = 0; m < m_count; ++m)
        if ((holders_[n] >> m) & 1u) profit += profits_.local(n, m);
    }
    return profit;
  }

  const RequestCounts& counts_;
  const ProfitTable& profits_;
  const std::vector<std::int64_t>& capacities_;
  std::vector<std::vector<TileId>> local_rank_;
  std::vector<TileId> global_rank_;
  std::vector<std::uint64_t> holders_;
};

}  // namespace

CacheTable mixco(const RequestCounts& counts, const ProfitTable& profits,
                 const std::vector<std::int64_t>& capacities, const DomainConfig& cfg,
                 MixcoStats* stats) {
  check_shapes(counts, capacities);
  if (cfg.mec_count != static_cast<int>(capacities.size()) || profits.mec_count() != cfg.mec_count)
    throw InvalidConfig("mixco inputs disagree on the MEC count");
  if (cfg.mec_count > 64) throw InvalidConfig("mixco supports at most 64 MEC servers");

  MixcoModel model(counts, profits, capacities);
  std::vector<std::int64_t> dedicated(capacities.size(), 0);
  MixcoStats local_stats;
  // Total request count is fixed, so ranking by total saving ranks by ARL.
  Nanos current = model.evaluate(dedicated);
  ++local_stats.evaluations;
  for (;;) {
    MecId best = -1;
    Nanos best_value = current;
    for (MecId m = 0; m < cfg.mec_count; ++m) {
      if (dedicated[m] >= capacities[m]) continue;
      ++dedicated[m];
      const Nanos value = model.evaluate(dedicated);
      --dedicated[m];
      ++local_stats.evaluations;
      if (value > best_value) {
        best_value = value;
        best = m;
      }
    }
    if (best == -1) break;
    ++dedicated[best];
    ++local_stats.conversions;
    current = best_value;
  }
  local_stats.dedicated = dedicated;
  if (stats) *stats = local_stats;
  return model.placement(dedicated);
}

}  // namespace edgecache
