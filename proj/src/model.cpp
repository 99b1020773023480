#include "edgecache/model.hpp"

#include <numeric>

namespace edgecache {

namespace {

// ceil(size * 1e9 / bandwidth) without overflow for any positive int64 size.
Nanos transmission_ns(Bits size_bits, BitsPerSecond bandwidth_bps) {
  if (bandwidth_bps <= 0) throw InvalidConfig("bandwidth must be positive");
  if (size_bits <= 0) throw std::invalid_argument("data size must be positive");
  const __int128 num = static_cast<__int128>(size_bits) * kNanosPerSecond;
  return static_cast<Nanos>((num + bandwidth_bps - 1) / bandwidth_bps);
}

}  // namespace

DomainConfig DomainConfig::defaults(int mec_count, std::int64_t capacity_per_mec) {
  DomainConfig cfg;
  cfg.mec_count = mec_count;
  cfg.capacities.assign(static_cast<std::size_t>(mec_count), capacity_per_mec);
  return cfg;
}

std::int64_t DomainConfig::total_capacity() const {
  return std::accumulate(capacities.begin(), capacities.end(), std::int64_t{0});
}

void DomainConfig::validate() const {
  if (mec_count < 1) throw InvalidConfig("mec_count must be >= 1");
  if (tile_size_bits <= 0) throw InvalidConfig("tile_size_bits must be positive");
  if (capacities.size() != static_cast<std::size_t>(mec_count))
    throw InvalidConfig("capacities must have one entry per MEC server");
  for (auto c : capacities)
    if (c < 0) throw InvalidConfig("capacities must be non-negative");
  if (mec_bandwidth_bps <= 0 || cloud_bandwidth_bps <= 0 || user_bandwidth_range_bps.lo <= 0)
    throw InvalidConfig("bandwidths must be positive");
  if (!user_bandwidth_range_bps.ordered())
    throw InvalidConfig("user bandwidth range is not ordered");
  if (t_q1_ns < 0 || t_q2_ns < 0) throw InvalidConfig("queueing delays must be non-negative");
  if (t_cloud_range_ns.lo < 0 || !t_cloud_range_ns.ordered())
    throw InvalidConfig("cloud delay range is not ordered");
  if (!t_cloud_range_ns.contains(t_cloud_planning_ns))
    throw InvalidConfig("t_cloud_planning_ns must lie within t_cloud_range_ns");
}

std::int64_t capacity_from_storage(std::int64_t storage_bytes, Bits tile_size_bits) {
  if (tile_size_bits <= 0) throw InvalidConfig("tile size must be positive");
  if (storage_bytes < 0) throw InvalidConfig("storage must be non-negative");
  return static_cast<std::int64_t>(static_cast<__int128>(storage_bytes) * 8 / tile_size_bits);
}

Nanos ch(Bits size_bits, BitsPerSecond user_bandwidth_bps, const DomainConfig& cfg) {
  return transmission_ns(size_bits, user_bandwidth_bps) + cfg.t_q1_ns + cfg.t_q2_ns;
}

Nanos cmm(Bits size_bits, const DomainConfig& cfg) {
  return transmission_ns(size_bits, cfg.mec_bandwidth_bps) + cfg.t_q1_ns + cfg.t_q2_ns;
}

Nanos cc(Bits size_bits, const DomainConfig& cfg) {
  return cc(size_bits, cfg, cfg.t_cloud_planning_ns);
}

Nanos cc(Bits size_bits, const DomainConfig& cfg, Nanos t_cloud_ns) {
  return transmission_ns(size_bits, cfg.cloud_bandwidth_bps) + 2 * t_cloud_ns;
}

RequestAggregate::RequestAggregate(int mec_count, int tile_count)
    : mec_count_(mec_count), tile_count_(tile_count) {
  if (mec_count < 1 || tile_count < 1)
    throw InvalidConfig("request aggregate needs at least one MEC and one tile");
}

void RequestAggregate::add(MecId mec, TileId tile, Bits size_bits) {
  if (mec < 0 || mec >= mec_count_ || tile < 0 || tile >= tile_count_)
    throw std::out_of_range("request (mec, tile) out of range");
  if (size_bits <= 0) throw std::invalid_argument("request size must be positive");
  entries_[{mec, tile}].push_back(size_bits);
  ++request_count_;
}

void RequestAggregate::validate(const DomainConfig& cfg) const {
  if (mec_count_ != cfg.mec_count)
    throw InvalidConfig("aggregate MEC count does not match the domain");
  for (const auto& [key, sizes] : entries_)
    for (auto sz : sizes)
      if (sz <= 0 || sz > cfg.tile_size_bits)
        throw InvalidConfig("request size outside [1, tile_size_bits]");
}

ProfitTable ProfitTable::zeros(int tile_count, int mec_count) {
  return {Vector<Nanos>::Zero(tile_count), Matrix<Nanos>::Zero(tile_count, mec_count)};
}

ProfitTable compute_profits(const RequestAggregate& agg, const DomainConfig& cfg) {
  auto table = ProfitTable::zeros(agg.tile_count(), agg.mec_count());
  for (const auto& [key, sizes] : agg.entries()) {
    const auto [mec, tile] = key;
    for (auto sz : sizes) {
      const Nanos via_mec = cmm(sz, cfg);
      table.global(tile) += cc(sz, cfg) - via_mec;
      table.local(tile, mec) += via_mec;
    }
  }
  return table;
}

}  // namespace edgecache
