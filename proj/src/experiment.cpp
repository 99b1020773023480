#include "edgecache/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "edgecache/io.hpp"
#include "edgecache/ksp_reference.hpp"
#include "edgecache/rng.hpp"

namespace edgecache {

using nlohmann::json;

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "oksp") return Algorithm::Oksp;
  if (name == "ksp") return Algorithm::Ksp;
  if (name == "self-top") return Algorithm::SelfTop;
  if (name == "distributed") return Algorithm::Distributed;
  if (name == "mixco") return Algorithm::Mixco;
  if (name == "brute") return Algorithm::Brute;
  return std::nullopt;
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Oksp: return "oksp";
    case Algorithm::Ksp: return "ksp";
    case Algorithm::SelfTop: return "self-top";
    case Algorithm::Distributed: return "distributed";
    case Algorithm::Mixco: return "mixco";
    case Algorithm::Brute: return "brute";
  }
  return "?";
}

std::string_view sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::StorageGb: return "storage_gb";
    case SweepAxis::TileCount: return "tile_count";
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::MecCount: return "mec_count";
  }
  return "?";
}

SolveOutput solve_placement(Algorithm algorithm, const RequestAggregate& agg,
                            const DomainConfig& cfg, bool fill_capacity) {
  cfg.validate();
  agg.validate(cfg);
  const auto profits = compute_profits(agg, cfg);
  const auto stop = fill_capacity ? StopRule::PositiveCost : StopRule::NonNegativeCost;
  RequestCounts counts;
  if (algorithm == Algorithm::SelfTop || algorithm == Algorithm::Distributed ||
      algorithm == Algorithm::Mixco)
    counts = aggregate_to_counts(agg);

  SolveOutput out;
  const auto start = std::chrono::steady_clock::now();
  switch (algorithm) {
    case Algorithm::Oksp:
      out.table = oksp_solve(profits, cfg.capacities, {stop, false}).table;
      break;
    case Algorithm::Ksp: {
      auto graph = build_graph(profits, cfg.capacities);
      out.table = ksp_solve(graph, cfg.total_capacity(), stop).table;
      break;
    }
    case Algorithm::SelfTop: out.table = self_top(counts, cfg.capacities); break;
    case Algorithm::Distributed: out.table = distributed(counts, cfg.capacities); break;
    case Algorithm::Mixco: out.table = mixco(counts, profits, cfg.capacities, cfg); break;
    case Algorithm::Brute: out.table = brute_force_optimal(profits, cfg.capacities).first; break;
  }
  out.solve_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  out.profit = placement_profit(profits, out.table);
  return out;
}

// ---- Configuration --------------------------------------------------------

void ExperimentConfig::validate() const {
  if (points.empty()) throw ConfigError("sweep.values", "at least one sweep point is required");
  if (algorithms.empty()) throw ConfigError("algorithms", "at least one algorithm is required");
  if (repetitions < 1) throw ConfigError("repetitions", "must be >= 1");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (axis == SweepAxis::MecCount && !storage_gb)
    throw ConfigError("domain.storage_gb", "a mec_count sweep needs per-MEC storage in GB");
  for (double v : points) {
    const bool integral = v == std::floor(v);
    switch (axis) {
      case SweepAxis::StorageGb:
        if (v < 0) throw ConfigError("sweep.values", "storage must be non-negative");
        break;
      case SweepAxis::TileCount:
      case SweepAxis::MecCount:
        if (!integral || v < 1) throw ConfigError("sweep.values", "expected positive integers");
        if (axis == SweepAxis::MecCount && v > 64)
          throw ConfigError("sweep.values", "at most 64 MEC servers are supported");
        break;
      case SweepAxis::Alpha:
        if (v < 0) throw ConfigError("sweep.values", "alpha must be non-negative");
        break;
    }
  }
}

ExperimentConfig experiment_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config", "expected an object");
  for (const auto& [key, value] : j.items()) {
    static const std::vector<std::string> known{
        "domain", "workload", "simulation", "sweep", "algorithms", "repetitions", "output",
        "fill_capacity", "record_timing", "threads", "mixco_limits"};
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(key, "unknown field");
  }
  if (!j.contains("domain")) throw ConfigError("domain", "missing required field");
  if (!j.contains("workload")) throw ConfigError("workload", "missing required field");

  ExperimentConfig c;
  c.domain = domain_from_json(j["domain"]);
  if (j["domain"].contains("storage_gb")) c.storage_gb = j["domain"]["storage_gb"].get<double>();
  c.workload = workload_spec_from_json(j["workload"], c.domain.mec_count);
  if (j.contains("simulation")) c.simulation = sim_config_from_json(j["simulation"]);

  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    if (!s.is_object() || !s.contains("axis") || !s["axis"].is_string())
      throw ConfigError("sweep.axis", "expected one of storage_gb, tile_count, alpha, mec_count");
    const auto axis = s["axis"].get<std::string>();
    if (axis == "storage_gb") {
      c.axis = SweepAxis::StorageGb;
    } else if (axis == "tile_count") {
      c.axis = SweepAxis::TileCount;
    } else if (axis == "alpha") {
      c.axis = SweepAxis::Alpha;
    } else if (axis == "mec_count") {
      c.axis = SweepAxis::MecCount;
    } else {
      throw ConfigError("sweep.axis", "expected one of storage_gb, tile_count, alpha, mec_count");
    }
    if (!s.contains("values") || !s["values"].is_array())
      throw ConfigError("sweep.values", "expected an array of numbers");
    for (const auto& v : s["values"]) {
      if (!v.is_number()) throw ConfigError("sweep.values", "expected an array of numbers");
      c.points.push_back(v.get<double>());
    }
  }
  if (j.contains("algorithms")) {
    if (!j["algorithms"].is_array()) throw ConfigError("algorithms", "expected an array");
    for (const auto& a : j["algorithms"]) {
      const auto parsed = a.is_string() ? parse_algorithm(a.get<std::string>()) : std::nullopt;
      if (!parsed) throw ConfigError("algorithms", "unknown algorithm " + a.dump());
      c.algorithms.push_back(*parsed);
    }
  }
  auto get_int = [&](const char* key, std::int64_t fallback) -> std::int64_t {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ConfigError(key, "expected an integer");
    return j[key].get<std::int64_t>();
  };
  auto get_bool = [&](const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) throw ConfigError(key, "expected true or false");
    return j[key].get<bool>();
  };
  c.repetitions = static_cast<int>(get_int("repetitions", 3));
  c.threads = static_cast<int>(get_int("threads", 1));
  c.fill_capacity = get_bool("fill_capacity", false);
  c.record_timing = get_bool("record_timing", true);
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("output", "expected a path");
    c.output = j["output"].get<std::string>();
  }
  if (j.contains("mixco_limits")) {
    const auto& l = j["mixco_limits"];
    if (!l.is_object()) throw ConfigError("mixco_limits", "expected an object");
    c.mixco_max_tiles = l.value("max_tiles", c.mixco_max_tiles);
    c.mixco_max_capacity = l.value("max_capacity", c.mixco_max_capacity);
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_from_json(read_json_file(path));
}

SweepInstance apply_sweep_point(const ExperimentConfig& config, std::size_t point_index,
                                int repetition) {
  SweepInstance inst{config.domain, config.workload};
  const double v = config.points.at(point_index);
  switch (config.axis) {
    case SweepAxis::StorageGb: {
      const auto bytes = static_cast<std::int64_t>(std::llround(v * 1e9));
      std::fill(inst.domain.capacities.begin(), inst.domain.capacities.end(),
                capacity_from_storage(bytes, inst.domain.tile_size_bits));
      break;
    }
    case SweepAxis::TileCount: inst.workload.tile_count = static_cast<int>(v); break;
    case SweepAxis::Alpha: inst.workload.zipf_alpha = v; break;
    case SweepAxis::MecCount: {
      inst.domain.mec_count = static_cast<int>(v);
      inst.workload.mec_count = inst.domain.mec_count;
      const auto bytes = static_cast<std::int64_t>(std::llround(config.storage_gb.value_or(0) * 1e9));
      inst.domain.capacities.assign(static_cast<std::size_t>(inst.domain.mec_count),
                                    capacity_from_storage(bytes, inst.domain.tile_size_bits));
      break;
    }
  }
  inst.workload.rng_seed =
      derive_seed(derive_seed(config.workload.rng_seed, point_index), static_cast<std::uint64_t>(repetition));
  return inst;
}

// ---- Runner -----------------------------------------------------------------

namespace {

struct Unit {
  std::size_t point = 0;
  int repetition = 0;
  bool done = false;
  std::vector<ResultRow> rows;
  std::vector<std::string> warnings;
};

void run_unit(const ExperimentConfig& config, Unit& unit) {
  const auto inst = apply_sweep_point(config, unit.point, unit.repetition);
  const auto agg = generate_workload(inst.workload, inst.domain);
  for (auto algorithm : config.algorithms) {
    if (algorithm == Algorithm::Mixco &&
        (inst.workload.tile_count > config.mixco_max_tiles ||
         inst.domain.total_capacity() > config.mixco_max_capacity)) {
      unit.warnings.push_back("mixco skipped at " + std::string(sweep_axis_name(config.axis)) + "=" +
                              format_point(config.points[unit.point]) +
                              ": instance exceeds mixco_limits");
      continue;
    }
    const auto solved = solve_placement(algorithm, agg, inst.domain, config.fill_capacity);
    const auto arl = arl_optimization(agg, solved.table, inst.domain);
    ResultRow row;
    row.seed = inst.workload.rng_seed;
    row.axis = config.axis;
    row.point = config.points[unit.point];
    row.algorithm = algorithm;
    row.repetition = unit.repetition;
    row.arl_optimization_ns = arl.mean();
    row.solve_time_ns = config.record_timing ? solved.solve_time_ns : 0;
    row.local_hits = arl.local_hits;
    row.domain_hits = arl.domain_hits;
    row.cloud_requests = arl.cloud_requests;
    row.total_requests = arl.requests;
    row.placement_profit_ns = solved.profit;
    unit.rows.push_back(row);
  }
  unit.done = true;
}

std::vector<ResultRow> mean_rows(const ExperimentConfig& config, const std::vector<Unit>& units,
                                 std::size_t point) {
  std::vector<ResultRow> means;
  for (auto algorithm : config.algorithms) {
    ResultRow mean;
    mean.seed = config.workload.rng_seed;
    mean.axis = config.axis;
    mean.point = config.points[point];
    mean.algorithm = algorithm;
    int n = 0;
    for (const auto& u : units) {
      if (u.point != point) continue;
      for (const auto& r : u.rows) {
        if (r.algorithm != algorithm) continue;
        ++n;
        mean.arl_optimization_ns += r.arl_optimization_ns;
        mean.solve_time_ns += r.solve_time_ns;
        mean.local_hits += r.local_hits;
        mean.domain_hits += r.domain_hits;
        mean.cloud_requests += r.cloud_requests;
        mean.total_requests += r.total_requests;
        mean.placement_profit_ns += r.placement_profit_ns;
      }
    }
    if (n == 0) continue;
    mean.arl_optimization_ns /= n;
    mean.solve_time_ns /= n;
    mean.local_hits /= n;
    mean.domain_hits /= n;
    mean.cloud_requests /= n;
    mean.total_requests /= n;
    mean.placement_profit_ns /= n;
    means.push_back(mean);
  }
  return means;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const std::atomic<bool>* stop) {
  config.validate();
  std::vector<Unit> units;
  for (std::size_t p = 0; p < config.points.size(); ++p)
    for (int r = 0; r < config.repetitions; ++r) {
      Unit u;
      u.point = p;
      u.repetition = r;
      units.push_back(std::move(u));
    }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      if (stop && stop->load()) return;
      const auto i = next.fetch_add(1);
      if (i >= units.size()) return;
      try {
        run_unit(config, units[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(units.size());
        return;
      }
    }
  };
  const auto thread_count = std::min<std::size_t>(static_cast<std::size_t>(config.threads), units.size());
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  ExperimentResult result;
  for (std::size_t p = 0; p < config.points.size(); ++p) {
    bool complete = true;
    for (const auto& u : units) {
      if (u.point != p) continue;
      complete &= u.done;
      if (!u.done) continue;
      result.rows.insert(result.rows.end(), u.rows.begin(), u.rows.end());
      for (const auto& w : u.warnings)
        if (std::find(result.warnings.begin(), result.warnings.end(), w) == result.warnings.end())
          result.warnings.push_back(w);
    }
    if (complete) {
      const auto means = mean_rows(config, units, p);
      result.rows.insert(result.rows.end(), means.begin(), means.end());
    } else {
      result.interrupted = true;
    }
  }
  return result;
}

std::string format_point(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << 1 << ',' << r.seed << ',' << sweep_axis_name(r.axis) << ',' << format_point(r.point) << ','
        << algorithm_name(r.algorithm) << ',';
    if (r.repetition < 0) {
      out << "mean";
    } else {
      out << r.repetition;
    }
    out << ',' << r.arl_optimization_ns << ',' << r.solve_time_ns << ',' << r.local_hits << ','
        << r.domain_hits << ',' << r.cloud_requests << ',' << r.total_requests << ','
        << r.placement_profit_ns << '\n';
  }
}

// ---- Benchmark --------------------------------------------------------------

ProfitTable bench_profits(int tile_count, int mec_count, std::uint64_t seed, BenchOptions options) {
  WorkloadSpec spec;
  spec.tile_count = tile_count;
  spec.mec_count = mec_count;
  spec.zipf_alpha = options.zipf_alpha;
  spec.requests_per_mec = options.requests_per_mec > 0 ? options.requests_per_mec : 2 * std::int64_t{tile_count};
  spec.rng_seed = seed;
  const auto cfg = DomainConfig::defaults(mec_count, 0);
  return compute_profits(generate_workload(spec, cfg), cfg);
}

BenchResult bench_oksp(const ProfitTable& profits, std::int64_t capacity_per_mec, bool fill_capacity) {
  const std::vector<std::int64_t> capacities(static_cast<std::size_t>(profits.mec_count()), capacity_per_mec);
  const auto start = std::chrono::steady_clock::now();
  const auto solved = oksp_solve(
      profits, capacities, {fill_capacity ? StopRule::PositiveCost : StopRule::NonNegativeCost, false});
  const auto wall = std::chrono::steady_clock::now() - start;

  BenchResult r;
  r.tile_count = profits.tile_count();
  r.mec_count = profits.mec_count();
  r.capacity_per_mec = capacity_per_mec;
  r.total_capacity = capacity_per_mec * profits.mec_count();
  r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(wall).count();
  r.profit = solved.profit;
  r.counters = solved.counters;
  return r;
}

BenchResult bench_solver(int tile_count, int mec_count, std::int64_t capacity_per_mec,
                         std::uint64_t seed, BenchOptions options) {
  return bench_oksp(bench_profits(tile_count, mec_count, seed, options), capacity_per_mec,
                    options.fill_capacity);
}

json bench_to_json(const BenchResult& r) {
  return {{"tile_count", r.tile_count},
          {"mec_count", r.mec_count},
          {"capacity_per_mec", r.capacity_per_mec},
          {"total_capacity", r.total_capacity},
          {"wall_ns", r.wall_ns},
          {"profit_ns", r.profit},
          {"iterations", r.counters.iterations},
          {"dijkstra_relaxations", r.counters.dijkstra_relaxations},
          {"loss_queue_pushes", r.counters.loss_queue_pushes},
          {"loss_queue_pops", r.counters.loss_queue_pops},
          {"path_array_pops", r.counters.path_array_pops},
          {"path_array_restores", r.counters.path_array_restores}};
}

}  // namespace edgecache
