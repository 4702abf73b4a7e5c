#pragma once

#include <string>

#include "json.hpp"

#include "cfisac/scenario.hpp"

namespace cfisac {

/// Parses a NetworkConfig from JSON. Keys: J, K, L, M, d, lambda, sigma_t_sq,
/// sigma_r_sq, sigma_c_sq, gamma, p_max, radius, pl_exp_bt, pl_exp_bu,
/// pl_exp_bb, ref_gain, seed. sigma_r_sq, sigma_c_sq and p_max also accept a
/// "_dbm" suffix, gamma a "_db" suffix; supplying both forms is an error.
/// gamma may be a scalar (applied to every user) or a length-K array.
/// Missing keys keep their defaults; unknown keys are rejected.
NetworkConfig config_from_json(const nlohmann::json& doc);

/// Linear-unit JSON document that config_from_json reads back unchanged.
nlohmann::json config_to_json(const NetworkConfig& config);

NetworkConfig load_config(const std::string& path);

/// Reads a whole JSON file; throws IoError / InvalidConfig.
nlohmann::json read_json_file(const std::string& path);

}  // namespace cfisac
