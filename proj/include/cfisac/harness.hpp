// Monte Carlo trials, sweeps and result files.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfisac/scenario.hpp"
#include "cfisac/selection.hpp"

namespace cfisac {

enum class Method { cc, sc, joint, random, exhaustive };

std::string to_string(Method method);
/// Throws InvalidArgument for unknown names.
Method parse_method(const std::string& name);

enum class TrialStatus { ok, infeasible, solver_fail };

std::string to_string(TrialStatus status);
TrialStatus parse_status(const std::string& name);

struct TrialRecord {
  Method method = Method::joint;
  std::string axis = "none";
  double value = 0.0;
  std::uint64_t seed = 0;
  TrialStatus status = TrialStatus::ok;
  std::optional<double> objective;     // linear; present iff ok
  std::optional<double> objective_db;
  std::vector<double> comm_sinr;
  std::string mode_bits;
  int rounds = 0;
  double wall_ms = 0.0;
  std::string message;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

nlohmann::json to_json(const TrialRecord& record);
TrialRecord record_from_json(const nlohmann::json& doc);

struct TrialOutcome {
  TrialRecord record;
  std::optional<Scenario> scenario;
  std::optional<SelectionResult> result;  // present iff ok
};

/// Draws the scenario for `seed`, runs `method` and evaluates the objective
/// with the model. Failures land in the record's status; nothing escapes
/// except configuration errors.
TrialOutcome run_trial(const NetworkConfig& config, Method method, std::uint64_t seed,
                       const SelectionOptions& options = {});

struct SweepSpec {
  NetworkConfig base;
  std::string axis = "num_bs";  // num_bs | gamma_db | num_users
  std::vector<double> values;
  std::vector<Method> methods;
  int trials = 1;
  std::uint64_t seed0 = 1;
  SelectionOptions options;

  /// Throws InvalidConfig.
  void validate() const;
  /// Base config with the axis set to `value`.
  NetworkConfig config_at(double value) const;
};

SweepSpec sweep_spec_from_json(const nlohmann::json& doc);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct AggregateRow {
  Method method = Method::joint;
  double value = 0.0;
  int trials = 0;
  int ok = 0;
  double mean = 0.0;     // linear objective over ok trials
  double std_err = 0.0;
  double mean_db = 0.0;
};

struct SweepResult {
  std::string axis;
  std::vector<TrialRecord> records;  // ordered by (method, value, seed)
  std::vector<AggregateRow> aggregates;
};

/// Sweep points x methods x trials. Trial t uses seed seed0 + t for every
/// method and value, so methods see identical scenarios.
SweepResult run_sweep(const SweepSpec& spec, int workers = 1);

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records);

enum class OutputFormat { csv, json, both };
OutputFormat parse_format(const std::string& name);

/// CSV with header method,axis,value,seed,status,objective_db,rounds,wall_ms,mode_bits.
/// wall_ms is written as 0 unless `timing` is set, which keeps output byte-stable.
std::string to_csv(const std::vector<TrialRecord>& records, bool timing = false);
nlohmann::json to_json(const SweepResult& result);
SweepResult sweep_result_from_json(const nlohmann::json& doc);

/// Writes results.csv and/or results.json into `dir`. Throws IoError.
void emit_results(const SweepResult& result, const std::filesystem::path& dir, OutputFormat format,
                  bool timing = false);

}  // namespace cfisac
