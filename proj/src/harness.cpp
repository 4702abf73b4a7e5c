#include "cfisac/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "cfisac/config_io.hpp"
#include "cfisac/errors.hpp"

namespace cfisac {

using nlohmann::json;

namespace {

const std::vector<std::pair<Method, std::string>> kMethodNames = {
    {Method::cc, "cc"}, {Method::sc, "sc"}, {Method::joint, "joint"},
    {Method::random, "random"}, {Method::exhaustive, "exhaustive"}};

const std::vector<std::pair<TrialStatus, std::string>> kStatusNames = {
    {TrialStatus::ok, "ok"}, {TrialStatus::infeasible, "infeasible"},
    {TrialStatus::solver_fail, "solver-fail"}};

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

SelectionResult dispatch(const Scenario& scenario, Method method, std::uint64_t seed,
                         const SelectionOptions& options) {
  switch (method) {
    case Method::cc: return select_comm_centric(scenario, options);
    case Method::sc: return select_sensing_centric(scenario, options);
    case Method::joint: return select_joint(scenario, options);
    case Method::random: return select_random(scenario, seed, options);
    case Method::exhaustive: return select_exhaustive(scenario, options);
  }
  throw InvalidArgument("unknown method");
}

bool is_integral(double v) { return std::floor(v) == v; }

void check_keys(const json& doc, std::initializer_list<const char*> allowed, const std::string& what) {
  for (const auto& [key, _] : doc.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw InvalidConfig("unknown key '" + key + "' in " + what);
  }
}

}  // namespace

std::string to_string(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  throw InvalidArgument("unknown method");
}

Method parse_method(const std::string& name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  throw InvalidArgument("unknown method '" + name + "' (cc, sc, joint, random, exhaustive)");
}

std::string to_string(TrialStatus status) {
  for (const auto& [s, name] : kStatusNames) {
    if (s == status) return name;
  }
  throw InvalidArgument("unknown status");
}

TrialStatus parse_status(const std::string& name) {
  for (const auto& [s, n] : kStatusNames) {
    if (n == name) return s;
  }
  throw InvalidArgument("unknown trial status '" + name + "'");
}

json to_json(const TrialRecord& r) {
  json doc = {{"method", to_string(r.method)}, {"axis", r.axis},           {"value", r.value},
              {"seed", r.seed},                {"status", to_string(r.status)}, {"comm_sinr", r.comm_sinr},
              {"mode_bits", r.mode_bits},      {"rounds", r.rounds},       {"wall_ms", r.wall_ms},
              {"message", r.message}};
  doc["objective"] = r.objective ? json(*r.objective) : json(nullptr);
  doc["objective_db"] = r.objective_db ? json(*r.objective_db) : json(nullptr);
  return doc;
}

TrialRecord record_from_json(const json& doc) {
  try {
    TrialRecord r;
    r.method = parse_method(doc.at("method").get<std::string>());
    r.axis = doc.at("axis").get<std::string>();
    r.value = doc.at("value").get<double>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.status = parse_status(doc.at("status").get<std::string>());
    if (!doc.at("objective").is_null()) r.objective = doc.at("objective").get<double>();
    if (!doc.at("objective_db").is_null()) r.objective_db = doc.at("objective_db").get<double>();
    r.comm_sinr = doc.at("comm_sinr").get<std::vector<double>>();
    r.mode_bits = doc.at("mode_bits").get<std::string>();
    r.rounds = doc.at("rounds").get<int>();
    r.wall_ms = doc.at("wall_ms").get<double>();
    r.message = doc.at("message").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("malformed trial record: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidConfig(e.what());
  }
}

TrialOutcome run_trial(const NetworkConfig& config, Method method, std::uint64_t seed,
                       const SelectionOptions& options) {
  config.validate();
  TrialOutcome out;
  out.record.method = method;
  out.record.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    out.scenario = generate_scenario(config, seed);
    auto result = dispatch(*out.scenario, method, seed, options);
    // objective re-evaluated by the model, not taken from the optimizer
    const auto mats = assemble_sensing(*out.scenario, result.mode);
    const double objective = sum_sensing_sinr(mats, result.beamformer, result.filters);
    out.record.status = TrialStatus::ok;
    out.record.objective = objective;
    if (objective > 0.0) out.record.objective_db = linear_to_db(objective);
    out.record.comm_sinr = comm_sinrs(*out.scenario, result.mode, result.beamformer);
    out.record.mode_bits = result.mode.bits();
    out.record.rounds = static_cast<int>(result.history.size());
    out.result = std::move(result);
  } catch (const InfeasibleConstraints& e) {
    out.record.status = TrialStatus::infeasible;
    out.record.message = e.what();
  } catch (const ModeInfeasible& e) {
    out.record.status = TrialStatus::infeasible;
    out.record.message = e.what();
  } catch (const SolverFailure& e) {
    out.record.status = TrialStatus::solver_fail;
    out.record.message = e.what();
  } catch (const NumericalDomain& e) {
    out.record.status = TrialStatus::solver_fail;
    out.record.message = e.what();
  }
  out.record.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void SweepSpec::validate() const {
  if (axis != "num_bs" && axis != "gamma_db" && axis != "num_users") {
    throw InvalidConfig("sweep_axis must be num_bs, gamma_db or num_users");
  }
  if (values.empty()) throw InvalidConfig("sweep needs at least one value");
  if (methods.empty()) throw InvalidConfig("sweep needs at least one method");
  if (trials < 1) throw InvalidConfig("trials must be at least 1");
  try {
    options.fpmm.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidConfig(e.what());
  }
  const bool exhaustive = std::find(methods.begin(), methods.end(), Method::exhaustive) != methods.end();
  for (double v : values) {
    const NetworkConfig cfg = config_at(v);
    cfg.validate();
    if (exhaustive && cfg.num_bs > 10) throw InvalidConfig("exhaustive method needs J <= 10 at every point");
  }
}

NetworkConfig SweepSpec::config_at(double value) const {
  NetworkConfig cfg = base;
  if (axis == "num_bs") {
    if (!is_integral(value)) throw InvalidConfig("num_bs values must be integers");
    cfg.num_bs = static_cast<int>(value);
  } else if (axis == "num_users") {
    if (!is_integral(value)) throw InvalidConfig("num_users values must be integers");
    cfg.num_users = static_cast<int>(value);
    cfg.set_uniform_gamma(base.gamma.empty() ? 1.0 : base.gamma.front());
  } else if (axis == "gamma_db") {
    cfg.set_uniform_gamma(db_to_linear(value));
  } else {
    throw InvalidConfig("unknown sweep axis '" + axis + "'");
  }
  return cfg;
}

SweepSpec sweep_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidConfig("sweep spec must be a JSON object");
  check_keys(doc, {"base", "sweep_axis", "values", "methods", "trials", "seed0", "fpmm", "cc_rule"},
             "sweep spec");
  try {
    SweepSpec spec;
    if (doc.contains("base")) spec.base = config_from_json(doc.at("base"));
    spec.axis = doc.at("sweep_axis").get<std::string>();
    spec.values = doc.at("values").get<std::vector<double>>();
    for (const auto& m : doc.at("methods")) spec.methods.push_back(parse_method(m.get<std::string>()));
    spec.trials = doc.value("trials", 1);
    spec.seed0 = doc.value("seed0", std::uint64_t{1});
    if (doc.contains("fpmm")) {
      const json& f = doc.at("fpmm");
      check_keys(f, {"max_outer_iters", "rel_tol", "socp_tol"}, "fpmm block");
      spec.options.fpmm.max_outer_iters = f.value("max_outer_iters", spec.options.fpmm.max_outer_iters);
      spec.options.fpmm.rel_tol = f.value("rel_tol", spec.options.fpmm.rel_tol);
      spec.options.fpmm.socp_tol = f.value("socp_tol", spec.options.fpmm.socp_tol);
    }
    if (doc.contains("cc_rule")) {
      const auto rule = doc.at("cc_rule").get<std::string>();
      if (rule == "argmin") {
        spec.options.cc_rule = CcRule::argmin_power;
      } else if (rule == "argmax") {
        spec.options.cc_rule = CcRule::argmax_power;
      } else {
        throw InvalidConfig("cc_rule must be argmin or argmax");
      }
    }
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("malformed sweep spec: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidConfig(e.what());
  }
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  return sweep_spec_from_json(read_json_file(path.string()));
}

SweepResult run_sweep(const SweepSpec& spec, int workers) {
  spec.validate();
  if (workers < 1) throw InvalidArgument("workers must be at least 1");

  struct Task {
    Method method;
    double value;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (Method m : spec.methods) {
    for (double v : spec.values) {
      for (int t = 0; t < spec.trials; ++t) tasks.push_back({m, v, spec.seed0 + static_cast<std::uint64_t>(t)});
    }
  }

  SweepResult result;
  result.axis = spec.axis;
  result.records.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& task = tasks[i];
      TrialRecord rec = run_trial(spec.config_at(task.value), task.method, task.seed, spec.options).record;
      rec.axis = spec.axis;
      rec.value = task.value;
      result.records[i] = std::move(rec);
    }
  };
  const int n = std::min<int>(workers, static_cast<int>(tasks.size()));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(work);
  }
  result.aggregates = aggregate(result.records);
  return result;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records) {
  std::vector<AggregateRow> rows;
  std::map<std::pair<int, double>, std::vector<double>> samples;
  for (const auto& r : records) {
    const std::pair<int, double> key{static_cast<int>(r.method), r.value};
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const AggregateRow& a) { return a.method == r.method && a.value == r.value; });
    if (it == rows.end()) {
      rows.push_back({r.method, r.value});
      it = rows.end() - 1;
    }
    ++it->trials;
    if (r.status == TrialStatus::ok && r.objective) samples[key].push_back(*r.objective);
  }
  for (auto& row : rows) {
    const auto& xs = samples[{static_cast<int>(row.method), row.value}];
    row.ok = static_cast<int>(xs.size());
    if (xs.empty()) continue;
    double sum = 0.0;
    for (double x : xs) sum += x;
    row.mean = sum / xs.size();
    if (xs.size() > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - row.mean) * (x - row.mean);
      row.std_err = std::sqrt(ss / (xs.size() - 1) / xs.size());
    }
    row.mean_db = row.mean > 0.0 ? linear_to_db(row.mean) : -std::numeric_limits<double>::infinity();
  }
  return rows;
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "both") return OutputFormat::both;
  throw InvalidArgument("format must be csv, json or both");
}

std::string to_csv(const std::vector<TrialRecord>& records, bool timing) {
  std::string out = "method,axis,value,seed,status,objective_db,rounds,wall_ms,mode_bits\n";
  for (const auto& r : records) {
    out += to_string(r.method) + ',' + r.axis + ',' + fmt9(r.value) + ',' + std::to_string(r.seed) + ',' +
           to_string(r.status) + ',' + (r.objective_db ? fmt9(*r.objective_db) : std::string()) + ',' +
           std::to_string(r.rounds) + ',' + (timing ? fmt9(r.wall_ms) : std::string("0")) + ',' +
           r.mode_bits + '\n';
  }
  return out;
}

json to_json(const SweepResult& result) {
  json records = json::array();
  for (const auto& r : result.records) records.push_back(to_json(r));
  json aggs = json::array();
  for (const auto& a : result.aggregates) {
    aggs.push_back({{"method", to_string(a.method)},
                    {"value", a.value},
                    {"trials", a.trials},
                    {"ok", a.ok},
                    {"mean", a.mean},
                    {"std_err", a.std_err},
                    {"mean_db", a.ok > 0 && a.mean > 0.0 ? json(a.mean_db) : json(nullptr)}});
  }
  return {{"axis", result.axis}, {"records", records}, {"aggregates", aggs}};
}

SweepResult sweep_result_from_json(const json& doc) {
  try {
    SweepResult result;
    result.axis = doc.at("axis").get<std::string>();
    for (const auto& r : doc.at("records")) result.records.push_back(record_from_json(r));
    result.aggregates = aggregate(result.records);
    return result;
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("malformed results document: ") + e.what());
  }
}

void emit_results(const SweepResult& result, const std::filesystem::path& dir, OutputFormat format,
                  bool timing) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw IoError("write to " + path.string() + " failed");
  };
  if (format != OutputFormat::json) write(dir / "results.csv", to_csv(result.records, timing));
  if (format != OutputFormat::csv) write(dir / "results.json", to_json(result).dump(2) + "\n");
}

}  // namespace cfisac
