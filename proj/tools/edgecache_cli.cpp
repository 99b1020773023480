// edgecache: command-line front end for workload generation, placement
// solving, evaluation, simulation, benchmarking and experiment sweeps.
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgecache/evaluation.hpp"
#include "edgecache/experiment.hpp"
#include "edgecache/io.hpp"

using namespace edgecache;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

struct Options {
  std::string config;
  std::string algorithm = "oksp";
  std::optional<std::uint64_t> seed;
  std::string out;
  bool fill_capacity = false;
  int threads = 1;
  std::string workload;
  std::string placement;
  int bench_n = 10;
  int bench_m = 2;
  std::int64_t bench_capacity = 1;
  bool bench_stop_early = false;
};

// Output goes to --out when given, stdout otherwise.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(o.out, text);
  }
}

struct Inputs {
  json doc;
  DomainConfig domain;
  std::optional<WorkloadSpec> workload;
  SimConfig simulation;
};

// Commands other than `experiment` read the same config document but only
// need the domain, workload and simulation sections.
Inputs load_inputs(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config", "a config file is required");
  Inputs in;
  in.doc = read_json_file(o.config);
  if (!in.doc.is_object() || !in.doc.contains("domain"))
    throw ConfigError("domain", "missing required field");
  in.domain = domain_from_json(in.doc["domain"]);
  if (in.doc.contains("workload")) {
    in.workload = workload_spec_from_json(in.doc["workload"], in.domain.mec_count);
    if (o.seed) in.workload->rng_seed = *o.seed;
  }
  if (in.doc.contains("simulation")) in.simulation = sim_config_from_json(in.doc["simulation"]);
  if (o.seed) in.simulation.rng_seed = *o.seed;
  return in;
}

RequestAggregate load_or_generate(const Options& o, const Inputs& in) {
  if (!o.workload.empty()) return workload_from_json(read_json_file(o.workload));
  if (!in.workload) throw ConfigError("workload", "give --workload or a workload section in the config");
  return generate_workload(*in.workload, in.domain);
}

Algorithm algorithm_of(const Options& o) {
  const auto a = parse_algorithm(o.algorithm);
  if (!a) throw ConfigError("--algorithm", "unknown algorithm " + o.algorithm);
  return *a;
}

int cmd_gen_workload(const Options& o) {
  const auto in = load_inputs(o);
  if (!in.workload) throw ConfigError("workload", "missing required field");
  emit(o, workload_to_json(generate_workload(*in.workload, in.domain)).dump() + "\n");
  return 0;
}

int cmd_solve(const Options& o) {
  const auto in = load_inputs(o);
  const auto agg = load_or_generate(o, in);
  const auto solved = solve_placement(algorithm_of(o), agg, in.domain, o.fill_capacity);
  const auto arl = arl_optimization(agg, solved.table, in.domain);
  json result = placement_to_json(solved.table);
  result["algorithm"] = o.algorithm;
  result["profit_ns"] = solved.profit;
  result["solve_time_ns"] = solved.solve_time_ns;
  result["arl_optimization_ns"] = arl.mean();
  emit(o, result.dump(2) + "\n");
  return 0;
}

json arl_to_json(const ArlResult& r) {
  return {{"arl_optimization_ns", r.mean()},
          {"remainder_ns", r.remainder()},
          {"total_saving_ns", r.total_saving},
          {"requests", r.requests},
          {"local_hits", r.local_hits},
          {"domain_hits", r.domain_hits},
          {"cloud_requests", r.cloud_requests}};
}

CacheTable load_placement(const Options& o) {
  if (o.placement.empty()) throw ConfigError("--placement", "a placement file is required");
  return placement_from_json(read_json_file(o.placement));
}

int cmd_evaluate(const Options& o) {
  const auto in = load_inputs(o);
  const auto agg = load_or_generate(o, in);
  emit(o, arl_to_json(arl_optimization(agg, load_placement(o), in.domain)).dump(2) + "\n");
  return 0;
}

int cmd_simulate(const Options& o) {
  const auto in = load_inputs(o);
  if (!in.workload) throw ConfigError("workload", "the simulator draws tiles from the workload section");
  const auto cache = load_placement(o);
  const auto r = simulate_sessions(cache, *in.workload, in.simulation, in.domain);
  const auto analytic = arl_optimization(r.realized(in.domain.mec_count, in.workload->tile_count), cache, in.domain);

  std::ostringstream text;
  text << "requests            " << r.total_requests << " (prefetch " << r.prefetch_requests
       << ", remediation " << r.remediation_requests << ", device cache hits " << r.device_hits << ")\n"
       << "served              local " << r.local_hits << ", domain " << r.domain_hits << ", cloud "
       << r.cloud_requests << "\n"
       << "ARL optimisation    " << r.arl_optimization() << " ns (standard error " << r.standard_error()
       << " ns)\n"
       << "analytic on log     " << analytic.mean() << " ns\n"
       << "csv                 seed,total_requests,local_hits,domain_hits,cloud_requests,"
          "arl_optimization_ns,analytic_arl_optimization_ns\n"
       << "                    " << in.simulation.rng_seed << ',' << r.total_requests << ',' << r.local_hits
       << ',' << r.domain_hits << ',' << r.cloud_requests << ',' << r.arl_optimization() << ','
       << analytic.mean() << "\n";
  emit(o, text.str());
  return 0;
}

int cmd_bench(const Options& o) {
  BenchOptions options;
  options.fill_capacity = !o.bench_stop_early;
  const auto r = bench_solver(o.bench_n, o.bench_m, o.bench_capacity, o.seed.value_or(1), options);
  emit(o, bench_to_json(r).dump(2) + "\n");
  return 0;
}

int cmd_experiment(const Options& o, const CLI::App& sub) {
  if (o.config.empty()) throw ConfigError("--config", "a config file is required");
  auto config = load_experiment_config(o.config);
  if (o.seed) config.workload.rng_seed = *o.seed;
  if (o.fill_capacity) config.fill_capacity = true;
  if (sub.count("--threads")) config.threads = o.threads;
  if (!o.out.empty()) config.output = o.out;
  config.validate();

  std::signal(SIGINT, on_sigint);
  const auto result = run_experiment(config, &g_interrupted);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  std::ostringstream csv;
  write_csv(csv, result.rows);
  if (config.output.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(config.output, csv.str());
  }
  if (result.interrupted) {
    std::cerr << "interrupted: wrote " << result.rows.size() << " completed rows\n";
    return kExitRuntime;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative MEC tile caching: placement solvers and experiments"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--seed", o.seed, "override the RNG seed");
    sub->add_option("--out", o.out, "output file (default: stdout)");
  };

  auto* gen = app.add_subcommand("gen-workload", "generate a request workload");
  add_common(gen);

  auto* solve = app.add_subcommand("solve", "compute a cache placement");
  add_common(solve);
  solve->add_option("--workload", o.workload, "workload file (default: generate from config)");
  solve->add_option("--algorithm", o.algorithm, "oksp|ksp|self-top|distributed|mixco|brute");
  solve->add_flag("--fill-capacity", o.fill_capacity, "keep zero-profit replicas until capacity is full");

  auto* evaluate = app.add_subcommand("evaluate", "ARL optimisation of a placement");
  add_common(evaluate);
  evaluate->add_option("--workload", o.workload, "workload file (default: generate from config)");
  evaluate->add_option("--placement", o.placement, "placement file")->required();

  auto* simulate = app.add_subcommand("simulate", "event-driven playback against a placement");
  add_common(simulate);
  simulate->add_option("--placement", o.placement, "placement file")->required();

  auto* bench = app.add_subcommand("bench", "time one OKSP solve on a synthetic instance");
  bench->add_option("--seed", o.seed, "RNG seed");
  bench->add_option("--out", o.out, "output file (default: stdout)");
  bench->add_option("--n", o.bench_n, "tile count")->check(CLI::PositiveNumber);
  bench->add_option("--m", o.bench_m, "MEC count")->check(CLI::Range(1, 64));
  bench->add_option("--capacity", o.bench_capacity, "tile slots per MEC")->check(CLI::NonNegativeNumber);
  bench->add_flag("--stop-early", o.bench_stop_early, "stop at the first non-improving path");

  auto* experiment = app.add_subcommand("experiment", "run a sweep and write CSV");
  add_common(experiment);
  experiment->add_flag("--fill-capacity", o.fill_capacity, "keep zero-profit replicas");
  experiment->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_workload(o);
    if (solve->parsed()) return cmd_solve(o);
    if (evaluate->parsed()) return cmd_evaluate(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (bench->parsed()) return cmd_bench(o);
    if (experiment->parsed()) return cmd_experiment(o, *experiment);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidConfig& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
