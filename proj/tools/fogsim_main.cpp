// Command-line front end: single runs, parameter sweeps, synthetic traces.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "fogsim/engine.hpp"
#include "fogsim/log.hpp"
#include "fogsim/report.hpp"
#include "fogsim/traceio.hpp"

namespace fs = std::filesystem;
using namespace fogsim;

namespace {

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct CommonOpts {
  std::string config;
  std::string trace;
  std::string fog;
  std::string out;
  std::uint64_t seed = 1;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config, "Scenario config JSON");
  cmd->add_option("--trace", opts.trace,
                  "Mobility trace (canonical CSV or SUMO FCD XML)");
  cmd->add_option("--fog", opts.fog, "Fog layout CSV");
  cmd->add_option("--seed", opts.seed, "Run seed")->capture_default_str();
  cmd->add_option("--threads", opts.threads,
                  "Worker threads for solver population kernels")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opts.out, "Output directory")->required();
}

Scenario prepare_scenario(const CommonOpts& opts,
                          const ScenarioConfig* override_config = nullptr) {
  Scenario sc;
  if (override_config) {
    std::optional<std::vector<TraceSample>> trace;
    if (!opts.trace.empty()) {
      const std::string bytes = read_text_file(opts.trace);
      trace = (fs::path(opts.trace).extension() == ".xml" ||
               (!bytes.empty() && bytes.front() == '<'))
                  ? parse_sumo_fcd(bytes)
                  : parse_trace_csv(bytes);
    }
    std::optional<std::vector<FogNode>> fogs;
    if (!opts.fog.empty())
      fogs = parse_fog_layout_csv(read_text_file(opts.fog));
    sc = build_scenario(*override_config, std::move(trace), std::move(fogs),
                        opts.seed);
  } else {
    sc = load_scenario(opt_path(opts.config), opt_path(opts.trace),
                       opt_path(opts.fog), opts.seed);
  }
  return sc;
}

void apply_threads(Scenario& sc, int threads) {
  if (threads > 1) {
    sc.config.solver.parallel = true;
    sc.config.gcga.parallel = true;
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
  }
}

int cmd_run(const CommonOpts& opts, const std::string& algo_name) {
  const auto algo = parse_algo(algo_name);
  if (!algo) {
    std::cerr << "unknown --algo '" << algo_name << "'\n";
    return 1;
  }
  Scenario sc = prepare_scenario(opts);
  apply_threads(sc, opts.threads);

  const auto t0 = std::chrono::steady_clock::now();
  const MetricsLedger ledger = run(sc, *algo, opts.seed);
  const double wall = elapsed_s(t0);

  fs::create_directories(opts.out);
  write_text_file(fs::path(opts.out) / "results.csv", results_csv(ledger));
  const SummaryRow summary =
      summarize(ledger, std::string(algo_label(*algo)),
                static_cast<int>(sc.ues.size()),
                static_cast<int>(sc.fogs.size()), wall, opts.seed);
  write_text_file(fs::path(opts.out) / "summary.csv",
                  summary_csv({&summary, 1}));

  log_info("run complete: " + std::to_string(ledger.rows.size()) + " tasks, " +
           std::to_string(ledger.migration_count) + " migrations, total cost " +
           fmt_double(ledger.total_cost));
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& param,
              const std::vector<double>& values,
              const std::vector<std::string>& algo_names) {
  if (values.empty()) {
    std::cerr << "--values must not be empty\n";
    return 1;
  }
  std::vector<AlgoKind> algos;
  for (const auto& name : algo_names) {
    const auto a = parse_algo(name);
    if (!a) {
      std::cerr << "unknown algorithm '" << name << "' in --algos\n";
      return 1;
    }
    algos.push_back(*a);
  }
  if (algos.empty()) {
    std::cerr << "--algos must not be empty\n";
    return 1;
  }

  ScenarioConfig base;
  if (!opts.config.empty())
    base = parse_scenario_config(read_text_file(opts.config));

  if (param == "n_ues" && !opts.trace.empty()) {
    std::cerr << "an n_ues sweep regenerates synthetic traces; --trace cannot "
                 "be fixed\n";
    return 1;
  }
  if (param == "n_fog" && !opts.fog.empty()) {
    std::cerr << "an n_fog sweep re-places fog nodes; --fog cannot be fixed\n";
    return 1;
  }

  struct Cell {
    SweepRow row;
    MetricsLedger ledger;
  };
  std::vector<Cell> cells;

  for (const double value : values) {
    ScenarioConfig config = base;
    if (param == "n_ues") {
      config.n_ues = static_cast<int>(value);
    } else if (param == "n_fog") {
      config.n_fog = static_cast<int>(value);
    } else if (param == "fog_capacity") {
      config.fog_capacity_hz = {value, value};
    } else if (param == "delta") {
      config.delta = value;
    } else {
      std::cerr << "unknown --param '" << param << "'\n";
      return 1;
    }

    Scenario sc = prepare_scenario(opts, &config);
    apply_threads(sc, opts.threads);
    for (const AlgoKind algo : algos) {
      const auto t0 = std::chrono::steady_clock::now();
      MetricsLedger ledger = run(sc, algo, opts.seed);
      const double wall = elapsed_s(t0);
      Cell cell;
      cell.row.param = param;
      cell.row.value = value;
      cell.row.summary = summarize(ledger, std::string(algo_label(algo)),
                                   static_cast<int>(sc.ues.size()),
                                   static_cast<int>(sc.fogs.size()), wall,
                                   opts.seed);
      cell.ledger = std::move(ledger);
      log_info("sweep " + param + "=" + fmt_double(value) + " " +
               cell.row.summary.algo + " done");
      cells.push_back(std::move(cell));
    }
  }

  // Normalization group: delta sweeps normalize within each scenario (the
  // per-value max task cost); other sweeps share one global max.
  const auto normalize_group = [&](const std::vector<std::size_t>& idx) {
    std::vector<const MetricsLedger*> ledgers;
    ledgers.reserve(idx.size());
    for (const std::size_t i : idx) ledgers.push_back(&cells[i].ledger);
    const auto normalized = normalized_cost(ledgers);
    for (std::size_t k = 0; k < idx.size(); ++k)
      cells[idx[k]].row.summary.normalized_cost = normalized[k];
  };
  if (param == "delta") {
    for (const double value : values) {
      std::vector<std::size_t> group;
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].row.value == value) group.push_back(i);
      normalize_group(group);
    }
  } else {
    std::vector<std::size_t> all(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) all[i] = i;
    normalize_group(all);
  }

  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (const auto& cell : cells) rows.push_back(cell.row);
  fs::create_directories(opts.out);
  write_text_file(fs::path(opts.out) / "sweep.csv", sweep_csv(rows));
  return 0;
}

int cmd_gen_trace(int ues, double horizon, const std::string& out,
                  std::uint64_t seed) {
  Rng rng(mix_seed({seed, 0x7472616365ULL}));
  const auto samples = synthetic_trace(
      ues, 2000.0, 2000.0, horizon, rng);
  write_text_file(out, serialize_trace_csv(samples));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fogsim: three-layer fog offloading simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  std::string algo = "mofco";
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--algo", algo,
                      "Algorithm: mofco|gcga|ra|onlycloud|onlylocal")->capture_default_str()
      ->check(CLI::IsMember({"mofco", "gcga", "ra", "onlycloud", "onlylocal"}));

  CommonOpts sweep_opts;
  std::string param;
  std::vector<double> values;
  std::vector<std::string> algos;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run a parameter sweep over one knob");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--param", param, "n_ues|n_fog|fog_capacity|delta")
      ->required()
      ->check(CLI::IsMember({"n_ues", "n_fog", "fog_capacity", "delta"}));
  sweep_cmd->add_option("--values", values, "Comma-separated numeric values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--algos", algos, "Comma-separated algorithm list")
      ->required()
      ->delimiter(',');

  int gen_ues = 0;
  double gen_horizon = 600.0;
  std::string gen_out;
  std::uint64_t gen_seed = 1;
  auto* gen_cmd =
      app.add_subcommand("gen-trace", "Write a synthetic mobility trace");
  gen_cmd->add_option("--ues", gen_ues, "Number of UEs")
      ->required()
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--horizon", gen_horizon, "Trace length in seconds")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output CSV path")->required();
  gen_cmd->add_option("--seed", gen_seed, "Trace seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts, algo);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, param, values, algos);
    if (*gen_cmd) return cmd_gen_trace(gen_ues, gen_horizon, gen_out, gen_seed);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
