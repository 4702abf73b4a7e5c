#include <filesystem>
#include <sstream>

#include "doctest.h"

#include "cfisac/config_io.hpp"
#include "cfisac/errors.hpp"
#include "cfisac/harness.hpp"

using namespace cfisac;
using nlohmann::json;

namespace {

NetworkConfig small() {
  NetworkConfig c;
  c.num_bs = 4;
  c.num_users = 2;
  c.num_targets = 1;
  c.antennas = 2;
  c.set_uniform_gamma(db_to_linear(8.0));
  return c;
}

SweepSpec small_spec() {
  SweepSpec spec;
  spec.base = small();
  spec.axis = "num_bs";
  spec.values = {4};
  spec.methods = {Method::joint, Method::random};
  spec.trials = 2;
  spec.seed0 = 5;
  return spec;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char ch : text) n += ch == '\n';
  return n;
}

void strip_time(std::vector<TrialRecord>& records) {
  for (auto& r : records) r.wall_ms = 0.0;
}

}  // namespace

TEST_CASE("method and status names") {
  for (Method m : {Method::cc, Method::sc, Method::joint, Method::random, Method::exhaustive}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("greedy"), InvalidArgument);
  CHECK(to_string(TrialStatus::solver_fail) == "solver-fail");
  CHECK(parse_status("infeasible") == TrialStatus::infeasible);
  CHECK(parse_format("both") == OutputFormat::both);
  CHECK_THROWS_AS(parse_format("xml"), InvalidArgument);
}

TEST_CASE("trial records") {
  const auto out = run_trial(small(), Method::joint, 3);
  REQUIRE(out.record.status == TrialStatus::ok);
  REQUIRE(out.result);
  const auto mats = assemble_sensing(*out.scenario, out.result->mode);
  const double direct = sum_sensing_sinr(mats, out.result->beamformer, out.result->filters);
  CHECK(*out.record.objective == doctest::Approx(direct).epsilon(1e-9));
  CHECK(*out.record.objective_db == doctest::Approx(linear_to_db(direct)).epsilon(1e-12));
  CHECK(out.record.mode_bits == out.result->mode.bits());
  CHECK(out.record.comm_sinr.size() == 2);

  auto a = run_trial(small(), Method::random, 9).record;
  auto b = run_trial(small(), Method::random, 9).record;
  a.wall_ms = b.wall_ms = 0.0;
  CHECK(a == b);
  CHECK(record_from_json(to_json(a)) == a);

  NetworkConfig hard = small();
  hard.set_uniform_gamma(db_to_linear(60.0));
  hard.p_max = 1e-6;
  const auto bad = run_trial(hard, Method::cc, 1);
  CHECK(bad.record.status == TrialStatus::infeasible);
  CHECK_FALSE(bad.record.objective);
  CHECK_FALSE(bad.record.objective_db);
  CHECK_FALSE(bad.result);
  CHECK_FALSE(bad.record.message.empty());
  CHECK(record_from_json(to_json(bad.record)) == bad.record);

  NetworkConfig broken = small();
  broken.num_bs = 0;
  CHECK_THROWS_AS(run_trial(broken, Method::cc, 1), InvalidConfig);
}

TEST_CASE("sweep shape, pairing and determinism") {
  SweepSpec one = small_spec();
  one.methods = {Method::joint};
  one.trials = 1;
  const auto single = run_sweep(one);
  REQUIRE(single.records.size() == 1);
  CHECK(single.records[0].seed == 5);
  CHECK(single.records[0].axis == "num_bs");
  CHECK(single.aggregates.size() == 1);

  const SweepSpec spec = small_spec();
  auto serial = run_sweep(spec, 1);
  auto parallel = run_sweep(spec, 2);
  REQUIRE(serial.records.size() == 4);
  strip_time(serial.records);
  strip_time(parallel.records);
  CHECK(serial.records == parallel.records);
  // method-major order, shared seeds
  CHECK(serial.records[0].method == Method::joint);
  CHECK(serial.records[2].method == Method::random);
  CHECK(serial.records[0].seed == serial.records[2].seed);
  CHECK(serial.records[1].seed == 6);

  // paired trials see the same scenario
  const auto s1 = run_trial(spec.config_at(4), Method::joint, 5);
  const auto s2 = run_trial(spec.config_at(4), Method::random, 5);
  REQUIRE(s1.scenario);
  REQUIRE(s2.scenario);
  CHECK(s1.scenario->h[1][0] == s2.scenario->h[1][0]);
  CHECK(s1.scenario->xi[0] == s2.scenario->xi[0]);

  const std::string csv = to_csv(serial.records);
  CHECK(csv.rfind("method,axis,value,seed,status,objective_db,rounds,wall_ms,mode_bits\n", 0) == 0);
  CHECK(count_lines(csv) == serial.records.size() + 1);
  CHECK(count_lines(to_csv({})) == 1);

  const auto back = sweep_result_from_json(json::parse(to_json(serial).dump()));
  CHECK(back.records == serial.records);
  CHECK(back.axis == serial.axis);
}

TEST_CASE("aggregation") {
  std::vector<TrialRecord> recs(3);
  recs[0].objective = 1.0;
  recs[1].objective = 3.0;
  recs[2].status = TrialStatus::infeasible;
  const auto rows = aggregate(recs);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].trials == 3);
  CHECK(rows[0].ok == 2);
  CHECK(rows[0].mean == doctest::Approx(2.0));
  CHECK(rows[0].std_err == doctest::Approx(1.0));
  CHECK(rows[0].mean_db == doctest::Approx(linear_to_db(2.0)));
}

TEST_CASE("sweep specs") {
  json doc = {{"base", config_to_json(small())},
              {"sweep_axis", "gamma_db"},
              {"values", {4, 8}},
              {"methods", {"cc", "exhaustive"}},
              {"trials", 3},
              {"seed0", 11},
              {"fpmm", {{"max_outer_iters", 20}}},
              {"cc_rule", "argmax"}};
  const auto spec = sweep_spec_from_json(doc);
  CHECK(spec.trials == 3);
  CHECK(spec.seed0 == 11);
  CHECK(spec.options.fpmm.max_outer_iters == 20);
  CHECK(spec.options.cc_rule == CcRule::argmax_power);
  CHECK(spec.config_at(4.0).gamma[1] == doctest::Approx(db_to_linear(4.0)));
  CHECK(spec.config_at(4.0).num_bs == 4);

  SweepSpec users = small_spec();
  users.axis = "num_users";
  CHECK(users.config_at(3).num_users == 3);
  CHECK(users.config_at(3).gamma.size() == 3);

  json bad = doc;
  bad["surprise"] = 1;
  CHECK_THROWS_AS(sweep_spec_from_json(bad), InvalidConfig);
  bad = doc;
  bad["sweep_axis"] = "num_targets";
  CHECK_THROWS_AS(sweep_spec_from_json(bad), InvalidConfig);
  bad = doc;
  bad["values"] = json::array();
  CHECK_THROWS_AS(sweep_spec_from_json(bad), InvalidConfig);
  bad = doc;
  bad["trials"] = 0;
  CHECK_THROWS_AS(sweep_spec_from_json(bad), InvalidConfig);
  bad = doc;
  bad["sweep_axis"] = "num_bs";
  bad["values"] = {4, 12};
  CHECK_THROWS_AS(sweep_spec_from_json(bad), InvalidConfig);
  bad = doc;
  bad["sweep_axis"] = "num_bs";
  bad["values"] = {4.5};
  CHECK_THROWS_AS(sweep_spec_from_json(bad), InvalidConfig);
  CHECK_THROWS_AS(load_sweep_spec("/nonexistent/spec.json"), Error);
  CHECK_THROWS_AS(run_sweep(small_spec(), 0), InvalidArgument);
}

TEST_CASE("result files") {
  SweepResult r;
  r.axis = "num_bs";
  const auto dir = std::filesystem::temp_directory_path() / "cfisac_harness_test";
  std::filesystem::remove_all(dir);
  emit_results(r, dir, OutputFormat::both);
  CHECK(std::filesystem::exists(dir / "results.csv"));
  CHECK(std::filesystem::exists(dir / "results.json"));
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(emit_results(r, "/proc/cfisac/out", OutputFormat::csv), IoError);
}
