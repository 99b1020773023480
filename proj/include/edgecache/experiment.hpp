#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "edgecache/baselines.hpp"
#include "edgecache/cache_table.hpp"
#include "edgecache/evaluation.hpp"
#include "edgecache/model.hpp"
#include "edgecache/oksp.hpp"
#include "edgecache/workload.hpp"

namespace edgecache {

enum class Algorithm { Oksp, Ksp, SelfTop, Distributed, Mixco, Brute };

/// Accepts oksp, ksp, self-top, distributed, mixco, brute.
std::optional<Algorithm> parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm a);

struct SolveOutput {
  CacheTable table;
  Nanos profit = 0;  // placement_profit of the table
  Nanos solve_time_ns = 0;
};

/// Runs one placement algorithm on a workload; the time covers the solver
/// only (profit and count tables are built beforehand).
SolveOutput solve_placement(Algorithm algorithm, const RequestAggregate& agg,
                            const DomainConfig& cfg, bool fill_capacity = false);

enum class SweepAxis { StorageGb, TileCount, Alpha, MecCount };
std::string_view sweep_axis_name(SweepAxis axis);

struct ExperimentConfig {
  DomainConfig domain;
  /// Per-MEC storage when the domain was given in GB; needed by the MEC sweep.
  std::optional<double> storage_gb;
  WorkloadSpec workload;
  SimConfig simulation;
  SweepAxis axis = SweepAxis::StorageGb;
  std::vector<double> points;
  std::vector<Algorithm> algorithms;
  int repetitions = 3;
  std::string output;
  bool fill_capacity = false;
  /// When false, solve times are written as 0 so reruns are byte-identical.
  bool record_timing = true;
  int threads = 1;
  /// MixCo is skipped (with a warning) above these sizes.
  std::int64_t mixco_max_tiles = 20'000;
  std::int64_t mixco_max_capacity = 20'000;

  void validate() const;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// Domain and workload for one sweep point.
struct SweepInstance {
  DomainConfig domain;
  WorkloadSpec workload;
};
SweepInstance apply_sweep_point(const ExperimentConfig& config, std::size_t point_index,
                                int repetition);

struct ResultRow {
  std::uint64_t seed = 0;
  SweepAxis axis = SweepAxis::StorageGb;
  double point = 0;
  Algorithm algorithm = Algorithm::Oksp;
  int repetition = -1;  // -1 marks the mean row
  Nanos arl_optimization_ns = 0;
  Nanos solve_time_ns = 0;
  std::int64_t local_hits = 0;
  std::int64_t domain_hits = 0;
  std::int64_t cloud_requests = 0;
  std::int64_t total_requests = 0;
  Nanos placement_profit_ns = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // canonical order: point, repetition, algorithm; means per point last
  std::vector<std::string> warnings;
  bool interrupted = false;
};

/// `stop` is polled between work units; completed units are still reported.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::atomic<bool>* stop = nullptr);

inline constexpr std::string_view kCsvHeader =
    "version,seed,axis,point,algorithm,repetition,arl_optimization_ns,solve_time_ns,"
    "local_hits,domain_hits,cloud_requests,total_requests,placement_profit_ns";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::string format_point(double v);

struct BenchResult {
  int tile_count = 0;
  int mec_count = 0;
  std::int64_t capacity_per_mec = 0;
  std::int64_t total_capacity = 0;
  Nanos wall_ns = 0;
  Nanos profit = 0;
  SolverCounters counters;
};

struct BenchOptions {
  double zipf_alpha = 1.5;
  /// 0 means "2 * N".
  std::int64_t requests_per_mec = 0;
  /// Runs all K iterations as the literal algorithm does (zero-profit paths kept).
  bool fill_capacity = true;
};

/// Profit table of the synthetic benchmark instance.
ProfitTable bench_profits(int tile_count, int mec_count, std::uint64_t seed, BenchOptions options = {});

/// Single timed oksp_solve on a prepared profit table.
BenchResult bench_oksp(const ProfitTable& profits, std::int64_t capacity_per_mec, bool fill_capacity);

BenchResult bench_solver(int tile_count, int mec_count, std::int64_t capacity_per_mec,
                         std::uint64_t seed, BenchOptions options = {});

nlohmann::json bench_to_json(const BenchResult& r);

}  // namespace edgecache
