#include "cfisac/config_io.hpp"

#include <fstream>
#include <set>

#include "cfisac/errors.hpp"

namespace cfisac {

using nlohmann::json;

namespace {

double number(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw InvalidConfig("config key '" + key + "' must be a number");
  return v.get<double>();
}

int integer(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number_integer()) throw InvalidConfig("config key '" + key + "' must be an integer");
  return v.get<int>();
}

// Reads `key` (linear) or `key + suffix` (log scale, converted by `to_linear`).
template <typename Convert>
void read_scalar(const json& doc, const std::string& key, const std::string& suffix,
                 Convert to_linear, double& out) {
  const bool lin = doc.contains(key);
  const bool log = doc.contains(key + suffix);
  if (lin && log) throw InvalidConfig("config gives both '" + key + "' and '" + key + suffix + "'");
  if (lin) out = number(doc, key);
  if (log) out = to_linear(number(doc, key + suffix));
}

std::vector<double> read_gamma(const json& v, bool in_db) {
  std::vector<double> out;
  auto conv = [&](const json& x) {
    if (!x.is_number()) throw InvalidConfig("gamma entries must be numbers");
    const double g = x.get<double>();
    return in_db ? db_to_linear(g) : g;
  };
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(conv(x));
  } else {
    out.push_back(conv(v));
  }
  return out;
}

}  // namespace

NetworkConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidConfig("network config must be a JSON object");
  static const std::set<std::string> known = {
      "J",          "K",          "L",           "M",          "d",
      "lambda",     "sigma_t_sq", "sigma_r_sq",  "sigma_c_sq", "gamma",
      "p_max",      "radius",     "pl_exp_bt",   "pl_exp_bu",  "pl_exp_bb",
      "ref_gain",   "seed",       "sigma_r_sq_dbm", "sigma_c_sq_dbm", "p_max_dbm",
      "gamma_db"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw InvalidConfig("unknown config key '" + key + "'");
  }

  try {
    NetworkConfig cfg;
    if (doc.contains("J")) cfg.num_bs = integer(doc, "J");
    if (doc.contains("K")) cfg.num_users = integer(doc, "K");
    if (doc.contains("L")) cfg.num_targets = integer(doc, "L");
    if (doc.contains("M")) cfg.antennas = integer(doc, "M");
    if (doc.contains("lambda")) cfg.wavelength = number(doc, "lambda");
    cfg.spacing = doc.contains("d") ? number(doc, "d") : cfg.wavelength / 2.0;
    if (doc.contains("sigma_t_sq")) cfg.rcs_var = number(doc, "sigma_t_sq");
    read_scalar(doc, "sigma_r_sq", "_dbm", dbm_to_watts, cfg.sensing_noise);
    read_scalar(doc, "sigma_c_sq", "_dbm", dbm_to_watts, cfg.comm_noise);
    read_scalar(doc, "p_max", "_dbm", dbm_to_watts, cfg.p_max);
    if (doc.contains("radius")) cfg.radius = number(doc, "radius");
    if (doc.contains("pl_exp_bt")) cfg.pl_exp_bt = number(doc, "pl_exp_bt");
    if (doc.contains("pl_exp_bu")) cfg.pl_exp_bu = number(doc, "pl_exp_bu");
    if (doc.contains("pl_exp_bb")) cfg.pl_exp_bb = number(doc, "pl_exp_bb");
    if (doc.contains("ref_gain")) cfg.ref_gain = number(doc, "ref_gain");
    if (doc.contains("seed")) {
      const json& seed = doc.at("seed");
      if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) throw InvalidConfig("seed must be a non-negative integer");
      cfg.seed = doc.at("seed").get<std::uint64_t>();
    }

    if (doc.contains("gamma") && doc.contains("gamma_db")) {
      throw InvalidConfig("config gives both 'gamma' and 'gamma_db'");
    }
    const double default_gamma = cfg.gamma.empty() ? 1.0 : cfg.gamma.front();
    std::vector<double> gamma;
    if (doc.contains("gamma")) gamma = read_gamma(doc.at("gamma"), false);
    if (doc.contains("gamma_db")) gamma = read_gamma(doc.at("gamma_db"), true);
    if (gamma.empty()) {
      cfg.set_uniform_gamma(default_gamma);
    } else if (gamma.size() == 1 && !(doc.contains("gamma") ? doc.at("gamma") : doc.at("gamma_db")).is_array()) {
      cfg.set_uniform_gamma(gamma.front());
    } else {
      cfg.gamma = std::move(gamma);
    }

    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("malformed network config: ") + e.what());
  }
}

json config_to_json(const NetworkConfig& c) {
  return json{{"J", c.num_bs},
              {"K", c.num_users},
              {"L", c.num_targets},
              {"M", c.antennas},
              {"d", c.spacing},
              {"lambda", c.wavelength},
              {"sigma_t_sq", c.rcs_var},
              {"sigma_r_sq", c.sensing_noise},
              {"sigma_c_sq", c.comm_noise},
              {"gamma", c.gamma},
              {"p_max", c.p_max},
              {"radius", c.radius},
              {"pl_exp_bt", c.pl_exp_bt},
              {"pl_exp_bu", c.pl_exp_bu},
              {"pl_exp_bb", c.pl_exp_bb},
              {"ref_gain", c.ref_gain},
              {"seed", c.seed}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidConfig("'" + path + "' is not valid JSON: " + e.what());
  }
}

NetworkConfig load_config(const std::string& path) {
  return config_from_json(read_json_file(path));
}

}  // namespace cfisac
