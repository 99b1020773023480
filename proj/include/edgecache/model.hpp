#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace edgecache {

/// Durations are integer nanoseconds throughout; data sizes are integer bits.
using Nanos = std::int64_t;
using Bits = std::int64_t;
using BitsPerSecond = std::int64_t;
using TileId = std::int32_t;
using MecId = std::int32_t;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr Nanos kNanosPerSecond = 1'000'000'000;
inline constexpr Nanos kNanosPerMilli = 1'000'000;

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename T>
struct Interval {
  T lo{};
  T hi{};

  constexpr bool contains(T v) const { return lo <= v && v <= hi; }
  constexpr bool ordered() const { return lo <= hi; }
  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

/// Parameters of one collaboration domain of MEC servers.
struct DomainConfig {
  int mec_count = 1;
  Bits tile_size_bits = 80'000'000;
  /// Tile slots per server, i.e. floor(storage / tile size).
  std::vector<std::int64_t> capacities{0};
  BitsPerSecond mec_bandwidth_bps = 500'000'000;
  BitsPerSecond cloud_bandwidth_bps = 1'000'000'000;
  Interval<BitsPerSecond> user_bandwidth_range_bps{50'000'000, 100'000'000};
  Nanos t_q1_ns = 1 * kNanosPerMilli;
  Nanos t_q2_ns = 2 * kNanosPerMilli;
  Interval<Nanos> t_cloud_range_ns{50 * kNanosPerMilli, 100 * kNanosPerMilli};
  /// Cloud link delay used when planning; the simulator may sample the range instead.
  Nanos t_cloud_planning_ns = 75 * kNanosPerMilli;

  /// Experimental defaults: 10 MB tiles, 500 Mbps MEC links, 1 Gbps cloud,
  /// 50-100 Mbps devices, 1 ms / 2 ms queueing, 50-100 ms cloud delay.
  static DomainConfig defaults(int mec_count, std::int64_t capacity_per_mec);

  std::int64_t total_capacity() const;

  /// Throws InvalidConfig on the first violated invariant.
  void validate() const;
};

/// Tile slots a server with `storage_bytes` can hold.
std::int64_t capacity_from_storage(std::int64_t storage_bytes, Bits tile_size_bits);

/// Transmission from home MEC to the device: ceil(sz / bu) + T_q1 + T_q2.
Nanos ch(Bits size_bits, BitsPerSecond user_bandwidth_bps, const DomainConfig& cfg);
/// Transfer between two MEC servers of the domain.
Nanos cmm(Bits size_bits, const DomainConfig& cfg);
/// Fetch from the cloud using the planning value of the cloud link delay.
Nanos cc(Bits size_bits, const DomainConfig& cfg);
/// Fetch from the cloud with an explicit one-way cloud link delay.
Nanos cc(Bits size_bits, const DomainConfig& cfg, Nanos t_cloud_ns);

/// Demand per (MEC, tile): the multiset of request sizes.
class RequestAggregate {
 public:
  using Key = std::pair<MecId, TileId>;

  RequestAggregate() = default;
  RequestAggregate(int mec_count, int tile_count);

  int mec_count() const { return mec_count_; }
  int tile_count() const { return tile_count_; }

  void add(MecId mec, TileId tile, Bits size_bits);
  const std::map<Key, std::vector<Bits>>& entries() const { return entries_; }
  std::int64_t request_count() const { return request_count_; }
  bool empty() const { return request_count_ == 0; }

  /// Throws InvalidConfig if ids or sizes do not fit `cfg`.
  void validate(const DomainConfig& cfg) const;

  friend bool operator==(const RequestAggregate&, const RequestAggregate&) = default;

 private:
  int mec_count_ = 0;
  int tile_count_ = 0;
  std::int64_t request_count_ = 0;
  std::map<Key, std::vector<Bits>> entries_;
};

/// Per-tile global profit and per-(tile, MEC) local profit, in nanoseconds.
struct ProfitTable {
  Vector<Nanos> global;  // N
  Matrix<Nanos> local;   // N x M

  int tile_count() const { return static_cast<int>(global.size()); }
  int mec_count() const { return static_cast<int>(local.cols()); }

  static ProfitTable zeros(int tile_count, int mec_count);
  friend bool operator==(const ProfitTable& a, const ProfitTable& b) {
    return a.global.size() == b.global.size() && a.local.rows() == b.local.rows() &&
           a.local.cols() == b.local.cols() && a.global == b.global && a.local == b.local;
  }
};

ProfitTable compute_profits(const RequestAggregate& agg, const DomainConfig& cfg);

}  // namespace edgecache
