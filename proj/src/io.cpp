#include "edgecache/io.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace edgecache {

using nlohmann::json;

namespace {

std::string field(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(field(where, key), "unknown field");
}

const json& object_at(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  return j;
}

double number(const json& j, const std::string& key, const std::string& where,
              std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(field(where, key), "missing required field");
  }
  if (!j[key].is_number()) throw ConfigError(field(where, key), "expected a number");
  return j[key].get<double>();
}

std::int64_t integer(const json& j, const std::string& key, const std::string& where,
                     std::optional<std::int64_t> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(field(where, key), "missing required field");
  }
  if (!j[key].is_number_integer()) throw ConfigError(field(where, key), "expected an integer");
  return j[key].get<std::int64_t>();
}

Interval<double> range(const json& j, const std::string& key, const std::string& where,
                       Interval<double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j[key];
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(field(where, key), "expected [low, high]");
  Interval<double> r{v[0].get<double>(), v[1].get<double>()};
  if (!r.ordered()) throw ConfigError(field(where, key), "low exceeds high");
  return r;
}

Nanos millis_to_ns(double ms) { return static_cast<Nanos>(std::llround(ms * 1e6)); }
std::int64_t mbps_to_bps(double mbps) { return static_cast<std::int64_t>(std::llround(mbps * 1e6)); }

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column),
                      "JSON syntax error");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

DomainConfig domain_from_json(const json& j, const std::string& where) {
  object_at(j, where);
  reject_unknown(j, where,
                 {"mec_count", "tile_size_bytes", "storage_gb", "capacities", "mec_bandwidth_mbps",
                  "cloud_bandwidth_mbps", "user_bandwidth_mbps", "t_q1_ms", "t_q2_ms", "t_cloud_ms",
                  "t_cloud_planning_ms"});
  DomainConfig cfg;
  cfg.mec_count = static_cast<int>(integer(j, "mec_count", where));
  cfg.tile_size_bits = integer(j, "tile_size_bytes", where, 10'000'000) * 8;
  if (j.contains("capacities") == j.contains("storage_gb"))
    throw ConfigError(field(where, "capacities"), "give exactly one of capacities or storage_gb");
  if (j.contains("capacities")) {
    if (!j["capacities"].is_array()) throw ConfigError(field(where, "capacities"), "expected an array");
    cfg.capacities.clear();
    for (const auto& c : j["capacities"]) {
      if (!c.is_number_integer()) throw ConfigError(field(where, "capacities"), "expected integers");
      cfg.capacities.push_back(c.get<std::int64_t>());
    }
  } else {
    const double gb = number(j, "storage_gb", where);
    if (gb < 0) throw ConfigError(field(where, "storage_gb"), "must be non-negative");
    const auto bytes = static_cast<std::int64_t>(std::llround(gb * 1e9));
    cfg.capacities.assign(static_cast<std::size_t>(std::max(cfg.mec_count, 0)),
                          capacity_from_storage(bytes, cfg.tile_size_bits));
  }
  cfg.mec_bandwidth_bps = mbps_to_bps(number(j, "mec_bandwidth_mbps", where, 500.0));
  cfg.cloud_bandwidth_bps = mbps_to_bps(number(j, "cloud_bandwidth_mbps", where, 1000.0));
  const auto user = range(j, "user_bandwidth_mbps", where, {50.0, 100.0});
  cfg.user_bandwidth_range_bps = {mbps_to_bps(user.lo), mbps_to_bps(user.hi)};
  cfg.t_q1_ns = millis_to_ns(number(j, "t_q1_ms", where, 1.0));
  cfg.t_q2_ns = millis_to_ns(number(j, "t_q2_ms", where, 2.0));
  const auto cloud = range(j, "t_cloud_ms", where, {50.0, 100.0});
  cfg.t_cloud_range_ns = {millis_to_ns(cloud.lo), millis_to_ns(cloud.hi)};
  cfg.t_cloud_planning_ns = millis_to_ns(number(j, "t_cloud_planning_ms", where, (cloud.lo + cloud.hi) / 2));
  try {
    cfg.validate();
  } catch (const InvalidConfig& e) {
    throw ConfigError(where, e.what());
  }
  return cfg;
}

json domain_to_json(const DomainConfig& cfg) {
  return {
      {"mec_count", cfg.mec_count},
      {"tile_size_bytes", cfg.tile_size_bits / 8},
      {"capacities", cfg.capacities},
      {"mec_bandwidth_mbps", static_cast<double>(cfg.mec_bandwidth_bps) / 1e6},
      {"cloud_bandwidth_mbps", static_cast<double>(cfg.cloud_bandwidth_bps) / 1e6},
      {"user_bandwidth_mbps",
       {static_cast<double>(cfg.user_bandwidth_range_bps.lo) / 1e6,
        static_cast<double>(cfg.user_bandwidth_range_bps.hi) / 1e6}},
      {"t_q1_ms", static_cast<double>(cfg.t_q1_ns) / 1e6},
      {"t_q2_ms", static_cast<double>(cfg.t_q2_ns) / 1e6},
      {"t_cloud_ms",
       {static_cast<double>(cfg.t_cloud_range_ns.lo) / 1e6,
        static_cast<double>(cfg.t_cloud_range_ns.hi) / 1e6}},
      {"t_cloud_planning_ms", static_cast<double>(cfg.t_cloud_planning_ns) / 1e6},
  };
}

WorkloadSpec workload_spec_from_json(const json& j, int mec_count, const std::string& where) {
  object_at(j, where);
  reject_unknown(j, where,
                 {"tile_count", "zipf_alpha", "popularity_mode", "requests_per_mec",
                  "prefetch_fraction", "prefetch_size_fraction", "remediation_size_fraction", "seed"});
  WorkloadSpec spec;
  spec.mec_count = mec_count;
  spec.tile_count = static_cast<int>(integer(j, "tile_count", where));
  spec.zipf_alpha = number(j, "zipf_alpha", where, 1.5);
  const std::string mode = j.value("popularity_mode", std::string("similar"));
  if (mode == "similar") {
    spec.popularity_mode = PopularityMode::Similar;
  } else if (mode == "random") {
    spec.popularity_mode = PopularityMode::Random;
  } else {
    throw ConfigError(field(where, "popularity_mode"), "expected \"similar\" or \"random\"");
  }
  spec.requests_per_mec = integer(j, "requests_per_mec", where);
  spec.prefetch_fraction = number(j, "prefetch_fraction", where, 0.85);
  spec.prefetch_size_fraction_range = range(j, "prefetch_size_fraction", where, {0.5, 1.0});
  spec.remediation_size_fraction_range = range(j, "remediation_size_fraction", where, {0.1, 0.2});
  spec.rng_seed = static_cast<std::uint64_t>(integer(j, "seed", where, 1));
  try {
    spec.validate();
  } catch (const InvalidConfig& e) {
    throw ConfigError(where, e.what());
  }
  return spec;
}

SimConfig sim_config_from_json(const json& j, const std::string& where) {
  object_at(j, where);
  reject_unknown(j, where,
                 {"render_interval_ms", "prediction_window_ms", "prediction_accuracy", "session_count",
                  "requests_per_session", "seed", "cloud_delay"});
  SimConfig sim;
  sim.render_interval_ns = millis_to_ns(number(j, "render_interval_ms", where, 1000.0 / 90.0));
  sim.prediction_window_ns = millis_to_ns(number(j, "prediction_window_ms", where, 1000.0));
  sim.prediction_accuracy = number(j, "prediction_accuracy", where, 0.8422);
  sim.session_count = integer(j, "session_count", where, 0);
  sim.requests_per_session = integer(j, "requests_per_session", where, 0);
  sim.rng_seed = static_cast<std::uint64_t>(integer(j, "seed", where, 1));
  const std::string delay = j.value("cloud_delay", std::string("fixed"));
  if (delay == "fixed") {
    sim.cloud_delay_sampling = CloudDelaySampling::Fixed;
  } else if (delay == "uniform") {
    sim.cloud_delay_sampling = CloudDelaySampling::Uniform;
  } else {
    throw ConfigError(field(where, "cloud_delay"), "expected \"fixed\" or \"uniform\"");
  }
  try {
    sim.validate();
  } catch (const InvalidConfig& e) {
    throw ConfigError(where, e.what());
  }
  return sim;
}

json workload_to_json(const RequestAggregate& agg) {
  json requests = json::array();
  for (const auto& [key, sizes] : agg.entries())
    requests.push_back({{"mec", key.first}, {"tile", key.second}, {"sizes_bits", sizes}});
  return {{"format", "edgecache-workload"},
          {"version", 1},
          {"mec_count", agg.mec_count()},
          {"tile_count", agg.tile_count()},
          {"requests", requests}};
}

RequestAggregate workload_from_json(const json& j) {
  object_at(j, "workload file");
  if (j.value("format", std::string()) != "edgecache-workload")
    throw ConfigError("format", "not a workload file");
  RequestAggregate agg(static_cast<int>(integer(j, "mec_count", "")),
                       static_cast<int>(integer(j, "tile_count", "")));
  if (!j.contains("requests") || !j["requests"].is_array())
    throw ConfigError("requests", "expected an array");
  for (std::size_t idx = 0; idx < j["requests"].size(); ++idx) {
    const auto& r = j["requests"][idx];
    const std::string where = "requests[" + std::to_string(idx) + "]";
    const auto mec = static_cast<MecId>(integer(r, "mec", where));
    const auto tile = static_cast<TileId>(integer(r, "tile", where));
    if (!r.contains("sizes_bits") || !r["sizes_bits"].is_array())
      throw ConfigError(field(where, "sizes_bits"), "expected an array");
    try {
      for (const auto& sz : r["sizes_bits"]) agg.add(mec, tile, sz.get<Bits>());
    } catch (const std::exception& e) {
      throw ConfigError(where, e.what());
    }
  }
  return agg;
}

json placement_to_json(const CacheTable& table) {
  json mecs = json::array();
  for (MecId m = 0; m < table.mec_count(); ++m)
    mecs.push_back(std::vector<TileId>(table.tiles(m).begin(), table.tiles(m).end()));
  return {{"format", "edgecache-placement"},
          {"version", 1},
          {"capacities", table.capacities()},
          {"mecs", mecs}};
}

CacheTable placement_from_json(const json& j) {
  object_at(j, "placement file");
  if (j.value("format", std::string()) != "edgecache-placement")
    throw ConfigError("format", "not a placement file");
  if (!j.contains("capacities") || !j.contains("mecs"))
    throw ConfigError("placement", "capacities and mecs are required");
  CacheTable table(j["capacities"].get<std::vector<std::int64_t>>());
  const auto& mecs = j["mecs"];
  if (!mecs.is_array() || static_cast<int>(mecs.size()) != table.mec_count())
    throw ConfigError("mecs", "expected one tile list per MEC server");
  for (MecId m = 0; m < table.mec_count(); ++m) {
    try {
      for (const auto& t : mecs[m]) table.insert(m, t.get<TileId>());
    } catch (const std::exception& e) {
      throw ConfigError("mecs[" + std::to_string(m) + "]", e.what());
    }
  }
  return table;
}

}  // namespace edgecache
