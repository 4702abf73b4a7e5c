#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfisac/types.hpp"

namespace cfisac {

/// Scalar parameters of a cooperative cell-free ISAC network. Everything is
/// in linear units (watts, linear SINR); dB conversion happens at load time.
struct NetworkConfig {
  int num_bs = 6;       // J
  int num_users = 3;    // K
  int num_targets = 2;  // L
  int antennas = 2;     // M per BS
  double wavelength = 0.1;
  double spacing = 0.05;  // antenna spacing, lambda/2 unless overridden
  double rcs_var = 1.0;   // sigma_t^2
  double sensing_noise = 1e-11;  // sigma_r^2, -80 dBm
  double comm_noise = 1e-11;     // sigma_c^2, -80 dBm
  std::vector<double> gamma = std::vector<double>(3, 6.309573444801933);  // 8 dB
  double p_max = 1.0;  // 30 dBm
  double radius = 100.0;
  double pl_exp_bt = 2.2;  // BS-target
  double pl_exp_bu = 2.5;  // BS-user
  double pl_exp_bb = 3.8;  // BS-BS
  double ref_gain = 1e-3;  // path gain at 1 m
  std::uint64_t seed = 1;

  /// Throws InvalidConfig when an invariant is violated.
  void validate() const;

  /// Number of stacked transmit columns, K + M.
  int num_columns() const { return num_users + antennas; }
  int stacked_rows() const { return num_bs * antennas; }

  /// Sets every user's SINR target to `value` (linear) and resizes to K.
  void set_uniform_gamma(double value);
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// One random draw of geometry and channels. Immutable after generation.
struct Scenario {
  NetworkConfig config;
  std::uint64_t seed = 0;

  std::vector<Point> bs_pos;
  std::vector<Point> user_pos;
  std::vector<Point> target_pos;

  /// h[j][k]: channel from BS j to user k, length M.
  std::vector<std::vector<VecC>> h;
  /// g[i][j]: M x M channel from transmitting BS i to receiving BS j; g[i][i] == 0.
  std::vector<std::vector<MatC>> g;
  /// theta(j, l): azimuth of target l seen from BS j, measured from broadside.
  MatR theta;
  /// beta(j, l): amplitude path gain of the BS j <-> target l link.
  MatR beta;
  /// xi[l](j, i): RCS coefficient of target l on the path BS i -> target -> BS j.
  std::vector<MatC> xi;

  int num_bs() const { return config.num_bs; }
  int num_users() const { return config.num_users; }
  int num_targets() const { return config.num_targets; }
  int antennas() const { return config.antennas; }
};

/// ref_gain * dist^(-exponent), with dist clamped below at 1 m.
double path_gain(double dist, double exponent, double ref_gain);

/// beta * exp(j 2 pi / lambda * m d sin(theta)) for m = 0..M-1.
VecC steering_vector(double theta, double beta, int antennas, double spacing,
                     double wavelength);

/// Draws a scenario. The result is a pure function of (config, seed). Each
/// entity (BS, user, target, link) draws from its own seeded substream, so
/// growing J, K or L leaves the already-present entities unchanged.
Scenario generate_scenario(const NetworkConfig& config, std::uint64_t seed);

/// Steering vector of BS j toward target l, including the path gain.
VecC steering_vector(const Scenario& scenario, int bs, int target);

double dbm_to_watts(double dbm);
double db_to_linear(double db);
double linear_to_db(double value);

}  // namespace cfisac
