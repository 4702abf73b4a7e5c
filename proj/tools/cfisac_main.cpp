// cfisac: single trials, sweeps and heuristic-vs-oracle comparisons.
#include <cstdio>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "cfisac/config_io.hpp"
#include "cfisac/errors.hpp"
#include "cfisac/harness.hpp"

using namespace cfisac;

namespace {

int cmd_run(const std::string& config_path, const std::string& method, std::uint64_t seed, bool have_seed,
            bool timing, bool json_out) {
  const NetworkConfig cfg = load_config(config_path);
  const auto outcome = run_trial(cfg, parse_method(method), have_seed ? seed : cfg.seed);
  if (json_out) {
    std::cout << to_json(outcome.record).dump(2) << "\n";
  } else {
    std::cout << to_csv({outcome.record}, timing);
  }
  if (outcome.record.status != TrialStatus::ok) std::cerr << "trial " << to_string(outcome.record.status)
                                                          << ": " << outcome.record.message << "\n";
  return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir, const std::string& format, int workers,
              bool timing) {
  const SweepSpec spec = load_sweep_spec(spec_path);
  const auto result = run_sweep(spec, workers);
  emit_results(result, out_dir, parse_format(format), timing);
  for (const auto& a : result.aggregates) {
    std::fprintf(stderr, "%-10s %s=%-8g ok %d/%d  mean %.6g (%.3f dB)  se %.3g\n", to_string(a.method).c_str(),
                 spec.axis.c_str(), a.value, a.ok, a.trials, a.mean, a.mean_db, a.std_err);
  }
  return 0;
}

int cmd_oracle(const std::string& config_path, int trials, std::uint64_t seed0, bool have_seed, int workers,
               bool timing) {
  const NetworkConfig cfg = load_config(config_path);
  if (cfg.num_bs > 10) throw InvalidConfig("oracle-compare needs J <= 10");
  SweepSpec spec;
  spec.base = cfg;
  spec.axis = "num_bs";
  spec.values = {static_cast<double>(cfg.num_bs)};
  spec.methods = {Method::exhaustive, Method::cc, Method::sc, Method::joint, Method::random};
  spec.trials = trials;
  spec.seed0 = have_seed ? seed0 : cfg.seed;
  const auto result = run_sweep(spec, workers);
  std::cout << to_csv(result.records, timing);

  std::map<std::uint64_t, const TrialRecord*> oracle;
  for (const auto& r : result.records) {
    if (r.method == Method::exhaustive && r.status == TrialStatus::ok) oracle[r.seed] = &r;
  }
  std::fprintf(stderr, "%-10s %8s %12s %10s %10s\n", "method", "ok", "mean", "hit_mode", "dominated");
  for (Method m : spec.methods) {
    int ok = 0, hits = 0, dominated = 0;
    double sum = 0.0;
    for (const auto& r : result.records) {
      if (r.method != m || r.status != TrialStatus::ok) continue;
      ++ok;
      sum += *r.objective;
      const auto it = oracle.find(r.seed);
      if (it == oracle.end()) continue;
      hits += r.mode_bits == it->second->mode_bits;
      dominated += *it->second->objective >= *r.objective - 1e-6;
    }
    std::fprintf(stderr, "%-10s %8d %12.6g %10d %10d\n", to_string(m).c_str(), ok, ok ? sum / ok : 0.0, hits,
                 dominated);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free ISAC mode selection and beamforming simulator"};
  app.require_subcommand(1);

  std::string config_path, method = "joint", spec_path, out_dir, format = "both";
  std::uint64_t seed = 0;
  int workers = 1, trials = 20;
  bool timing = false, json_out = false;

  auto* run = app.add_subcommand("run", "Run one trial and print its CSV record");
  run->add_option("--config", config_path, "Network config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--method", method, "cc | sc | joint | random | exhaustive")
      ->check(CLI::IsMember({"cc", "sc", "joint", "random", "exhaustive"}));
  auto* run_seed = run->add_option("--seed", seed, "Scenario seed (defaults to the config's seed)");
  run->add_flag("--timing", timing, "Write measured wall_ms instead of 0");
  run->add_flag("--json", json_out, "Print the full JSON record instead of CSV");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over one axis");
  sweep->add_option("--spec", spec_path, "Sweep spec (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--format", format, "csv | json | both")->check(CLI::IsMember({"csv", "json", "both"}));
  sweep->add_option("--workers", workers, "Concurrent trials")->check(CLI::PositiveNumber);
  sweep->add_flag("--timing", timing, "Write measured wall_ms to the CSV");

  auto* oracle = app.add_subcommand("oracle-compare", "Heuristics against exhaustive search");
  oracle->add_option("--config", config_path, "Network config (JSON)")->required()->check(CLI::ExistingFile);
  oracle->add_option("--trials", trials, "Paired trials")->check(CLI::PositiveNumber);
  auto* oracle_seed = oracle->add_option("--seed0", seed, "First trial seed (defaults to the config's seed)");
  oracle->add_option("--workers", workers, "Concurrent trials")->check(CLI::PositiveNumber);
  oracle->add_flag("--timing", timing, "Write measured wall_ms instead of 0");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, method, seed, run_seed->count() > 0, timing, json_out);
    if (*sweep) return cmd_sweep(spec_path, out_dir, format, workers, timing);
    if (*oracle) return cmd_oracle(config_path, trials, seed, oracle_seed->count() > 0, workers, timing);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
