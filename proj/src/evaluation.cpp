#include "edgecache/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include "edgecache/rng.hpp"

namespace edgecache {

namespace {

// Bit j set iff MEC j holds the tile; the domain is capped at 64 servers.
std::vector<std::uint64_t> holder_masks(const CacheTable& cache, int tile_count) {
  if (cache.mec_count() > 64) throw InvalidConfig("at most 64 MEC servers are supported");
  std::vector<std::uint64_t> masks(static_cast<std::size_t>(tile_count), 0);
  for (MecId m = 0; m < cache.mec_count(); ++m)
    for (TileId n : cache.tiles(m)) {
      if (n < 0 || n >= tile_count) throw InvalidPlacement("cached tile id out of range");
      masks[n] |= std::uint64_t{1} << m;
    }
  return masks;
}

}  // namespace

ArlResult arl_optimization(const RequestAggregate& agg, const CacheTable& cache,
                           const DomainConfig& cfg) {
  if (cache.mec_count() != agg.mec_count())
    throw InvalidPlacement("cache table and workload disagree on the MEC count");
  const auto masks = holder_masks(cache, agg.tile_count());
  ArlResult r;
  for (const auto& [key, sizes] : agg.entries()) {
    const auto [m, n] = key;
    const auto count = static_cast<std::int64_t>(sizes.size());
    r.requests += count;
    if ((masks[n] >> m) & 1u) {
      r.local_hits += count;
      for (auto sz : sizes) r.total_saving += cc(sz, cfg);
    } else if (masks[n] != 0) {
      r.domain_hits += count;
      for (auto sz : sizes) r.total_saving += cc(sz, cfg) - cmm(sz, cfg);
    } else {
      r.cloud_requests += count;
    }
  }
  return r;
}

void SimConfig::validate() const {
  if (render_interval_ns <= 0 || prediction_window_ns <= 0)
    throw InvalidConfig("simulation intervals must be positive");
  if (!(prediction_accuracy >= 0.0 && prediction_accuracy <= 1.0))
    throw InvalidConfig("prediction_accuracy must lie in [0, 1]");
  if (session_count < 0 || requests_per_session < 0)
    throw InvalidConfig("session and request counts must be non-negative");
}

double SimReport::mean_saving() const {
  return total_requests == 0 ? 0.0 : static_cast<double>(total_saving) / total_requests;
}

double SimReport::standard_error() const {
  if (total_requests < 2) return 0.0;
  const long double n = total_requests;
  const long double mean = static_cast<long double>(total_saving) / n;
  const long double var = (saving_sq_sum - n * mean * mean) / (n - 1);
  return static_cast<double>(std::sqrt(std::max<long double>(var, 0) / n));
}

RequestAggregate SimReport::realized(int mec_count, int tile_count) const {
  RequestAggregate agg(mec_count, tile_count);
  for (const auto& r : log) agg.add(r.home, r.tile, r.size_bits);
  return agg;
}

void SimReport::merge(const SimReport& o) {
  total_requests += o.total_requests;
  prefetch_requests += o.prefetch_requests;
  remediation_requests += o.remediation_requests;
  device_hits += o.device_hits;
  local_hits += o.local_hits;
  domain_hits += o.domain_hits;
  cloud_requests += o.cloud_requests;
  total_latency += o.total_latency;
  total_saving += o.total_saving;
  saving_sq_sum += o.saving_sq_sum;
  log.insert(log.end(), o.log.begin(), o.log.end());
}

namespace {

struct Session {
  MecId home = 0;
  BitsPerSecond bandwidth = 0;
  std::int64_t ticks_left = 0;
  Rng rng;
  std::set<TileId> device_cache;
};

struct Tick {
  Nanos at;
  std::int64_t session;
  friend bool operator>(const Tick& a, const Tick& b) {
    return std::tie(a.at, a.session) > std::tie(b.at, b.session);
  }
};

}  // namespace

SimReport simulate_sessions(const CacheTable& cache, const WorkloadSpec& spec,
                            const SimConfig& sim, const DomainConfig& cfg) {
  sim.validate();
  spec.validate();
  cfg.validate();
  if (cache.mec_count() != cfg.mec_count || spec.mec_count != cfg.mec_count)
    throw InvalidConfig("simulation inputs disagree on the MEC count");

  const auto masks = holder_masks(cache, spec.tile_count);
  const auto pmf = zipf_pmf(spec.zipf_alpha, spec.tile_count);
  std::vector<double> cdf(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());
  cdf.back() = 1.0;
  std::vector<std::vector<TileId>> rankings;
  for (MecId m = 0; m < cfg.mec_count; ++m) rankings.push_back(popularity_ranking(spec, m));

  // Per-session streams: bandwidth first, then per tick: tile, hit/miss,
  // size, and the cloud delay when it is sampled.
  std::vector<Session> sessions;
  sessions.reserve(static_cast<std::size_t>(sim.session_count));
  std::priority_queue<Tick, std::vector<Tick>, std::greater<>> events;
  for (std::int64_t s = 0; s < sim.session_count; ++s) {
    Session session{static_cast<MecId>(s % cfg.mec_count), 0, sim.requests_per_session,
                    Rng(derive_seed(sim.rng_seed, static_cast<std::uint64_t>(s))), {}};
    session.bandwidth =
        session.rng.between(cfg.user_bandwidth_range_bps.lo, cfg.user_bandwidth_range_bps.hi);
    // Playback starts once a full prediction window has been prefetched.
    const Nanos start = sim.prediction_window_ns +
                        static_cast<Nanos>(session.rng.below(static_cast<std::uint64_t>(sim.render_interval_ns)));
    if (session.ticks_left > 0) events.push({start, s});
    sessions.push_back(std::move(session));
  }

  SimReport report;
  while (!events.empty()) {
    const Tick tick = events.top();
    events.pop();
    auto& session = sessions[static_cast<std::size_t>(tick.session)];
    auto& rng = session.rng;

    const double u = rng.uniform();
    auto rank = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const TileId tile = rankings[session.home][std::min(rank, cdf.size() - 1)];
    const bool predicted = rng.bernoulli(sim.prediction_accuracy);
    const auto& range =
        predicted ? spec.prefetch_size_fraction_range : spec.remediation_size_fraction_range;
    const Bits size = draw_request_size(rng, range, cfg.tile_size_bits);
    const Nanos t_cloud = sim.cloud_delay_sampling == CloudDelaySampling::Uniform
                              ? rng.between(cfg.t_cloud_range_ns.lo, cfg.t_cloud_range_ns.hi)
                              : cfg.t_cloud_planning_ns;

    if (--session.ticks_left > 0) events.push({tick.at + sim.render_interval_ns, tick.session});

    if (session.device_cache.count(tile)) {
      ++report.device_hits;
      continue;
    }

    SimRequest req;
    req.session = tick.session;
    req.home = session.home;
    req.tile = tile;
    req.size_bits = size;
    req.prefetch = predicted;
    // A predicted tile was requested when its window opened; a miss is
    // remediated at render time.
    req.issued_at = predicted ? std::max<Nanos>(0, tick.at - sim.prediction_window_ns) : tick.at;

    const Nanos from_cloud = cc(size, cfg, t_cloud);
    const Nanos last_hop = ch(size, session.bandwidth, cfg);
    if ((masks[tile] >> session.home) & 1u) {
      ++report.local_hits;
      req.latency = last_hop;
    } else if (masks[tile] != 0) {
      ++report.domain_hits;
      req.latency = last_hop + cmm(size, cfg);
    } else {
      ++report.cloud_requests;
      req.latency = last_hop + from_cloud;
    }
    req.saving = last_hop + from_cloud - req.latency;

    if (predicted) {
      ++report.prefetch_requests;
      session.device_cache.insert(tile);
    } else {
      ++report.remediation_requests;
    }
    ++report.total_requests;
    report.total_latency += req.latency;
    report.total_saving += req.saving;
    report.saving_sq_sum += static_cast<long double>(req.saving) * req.saving;
    report.log.push_back(req);
  }
  return report;
}

}  // namespace edgecache
