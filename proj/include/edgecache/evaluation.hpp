#pragma once

#include <cstdint>
#include <vector>

#include "edgecache/cache_table.hpp"
#include "edgecache/model.hpp"
#include "edgecache/workload.hpp"

namespace edgecache {

/// ARL optimisation: mean latency saving per request against fetching
/// everything from the cloud.
struct ArlResult {
  Nanos total_saving = 0;
  std::int64_t requests = 0;
  std::int64_t local_hits = 0;
  std::int64_t domain_hits = 0;
  std::int64_t cloud_requests = 0;

  /// Integer mean; 0 when there are no requests.
  Nanos mean() const { return requests == 0 ? 0 : total_saving / requests; }
  Nanos remainder() const { return requests == 0 ? 0 : total_saving % requests; }
};

/// Per request: cc if the tile is on the home MEC, cc - cmm if it is
/// elsewhere in the domain, 0 otherwise.
ArlResult arl_optimization(const RequestAggregate& agg, const CacheTable& cache,
                           const DomainConfig& cfg);

enum class CloudDelaySampling { Fixed, Uniform };

struct SimConfig {
  Nanos render_interval_ns = 11'111'111;  // 90 fps
  Nanos prediction_window_ns = 1'000'000'000;
  double prediction_accuracy = 0.8422;
  std::int64_t session_count = 0;
  std::int64_t requests_per_session = 0;
  std::uint64_t rng_seed = 1;
  CloudDelaySampling cloud_delay_sampling = CloudDelaySampling::Fixed;

  void validate() const;
};

/// One request as it crossed the network.
struct SimRequest {
  Nanos issued_at = 0;
  std::int64_t session = 0;
  MecId home = 0;
  TileId tile = 0;
  Bits size_bits = 0;
  bool prefetch = false;
  Nanos latency = 0;
  Nanos saving = 0;  // against the same request served from the cloud
};

struct SimReport {
  std::int64_t total_requests = 0;
  std::int64_t prefetch_requests = 0;
  std::int64_t remediation_requests = 0;
  std::int64_t device_hits = 0;  // ticks served from the device cache, no request
  std::int64_t local_hits = 0;
  std::int64_t domain_hits = 0;
  std::int64_t cloud_requests = 0;
  Nanos total_latency = 0;
  Nanos total_saving = 0;
  long double saving_sq_sum = 0;
  std::vector<SimRequest> log;

  Nanos arl_optimization() const { return total_requests == 0 ? 0 : total_saving / total_requests; }
  Nanos remainder() const { return total_requests == 0 ? 0 : total_saving % total_requests; }
  double mean_saving() const;
  /// Standard error of the mean per-request saving.
  double standard_error() const;

  /// Realised request log as an aggregate, for replay through arl_optimization.
  RequestAggregate realized(int mec_count, int tile_count) const;

  /// Associative and order-independent except for the log, which is concatenated.
  void merge(const SimReport& other);
};

/// Event-driven playback of `sim.session_count` sessions; session s is homed
/// on MEC s mod M and draws tiles from that MEC's popularity in `spec`.
SimReport simulate_sessions(const CacheTable& cache, const WorkloadSpec& spec,
                            const SimConfig& sim, const DomainConfig& cfg);

}  // namespace edgecache
