#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfisac/scenario.hpp"
#include "cfisac/types.hpp"

namespace cfisac {

/// Transmitter/receiver assignment of every BS: alpha_j = 1 transmits,
/// alpha_j = 0 receives.
class ModeVector {
 public:
  ModeVector() = default;
  explicit ModeVector(std::vector<std::uint8_t> alpha);

  static ModeVector all_transmit(int num_bs);
  /// Parses a "0110"-style bit string.
  static ModeVector from_bits(const std::string& bits);

  int size() const { return static_cast<int>(alpha_.size()); }
  bool is_tx(int j) const { return alpha_.at(j) != 0; }
  int num_tx() const;
  int num_rx() const { return size() - num_tx(); }
  std::vector<int> tx_set() const;
  std::vector<int> rx_set() const;
  const std::vector<std::uint8_t>& alpha() const { return alpha_; }

  /// Copy with BS j switched to receive mode.
  ModeVector with_receiver(int j) const;

  /// At least one transmitter, M * |T| >= K, and at least one receiver.
  bool is_feasible(int antennas, int num_users) const;

  std::string bits() const;

  friend bool operator==(const ModeVector&, const ModeVector&) = default;

 private:
  std::vector<std::uint8_t> alpha_;
};

/// Stacked transmit matrix W_bar (JM x (K+M)). Row block j holds
/// W_j = [W_c,j  W_r,j]; the first K columns serve users, the last M sense.
struct Beamformer {
  MatC w;

  static Beamformer zeros(const NetworkConfig& config);

  /// Column-stacked vector w_hat of length JM(K+M).
  VecC stacked() const;
  static Beamformer from_stacked(const VecC& w_hat, int rows, int cols);

  /// Sum of squared magnitudes on transmitter rows (w_hat^H Omega w_hat).
  double power(const ModeVector& mode, int antennas) const;
};

/// One receive filter per target, each of length JM.
struct FilterBank {
  std::vector<VecC> u;
};

/// Masked echo and self-interference matrices for a fixed mode.
struct SensingMatrices {
  std::vector<MatC> a_hat;  // per target, JM x JM
  MatC g_hat;               // JM x JM
  VecR q_diag;              // diagonal of Q: 1 on receiver rows
  double sensing_noise = 0.0;
  int antennas = 0;

  int num_targets() const { return static_cast<int>(a_hat.size()); }
  int rows() const { return static_cast<int>(q_diag.size()); }

  /// B_l = A_l W W^H A_l^H.
  MatC signal_matrix(int target, const MatC& w) const;
  /// C_l: other-target echoes, BS-to-BS interference and masked noise.
  MatC interference_matrix(int target, const MatC& w) const;
};

/// Implicit D_{l,s} and F_l: w^H D_{l,s} w = sum_i |v[l][s]^H w_i|^2 and
/// w^H F_l w = sum_i |g[l]^H w_i|^2, with w_i the columns of W_bar.
struct QuadraticForms {
  std::vector<std::vector<VecC>> v;  // v[l][s] = A_s^H u_l
  std::vector<VecC> g;               // g[l] = conj(G_hat) u_l
  VecR c_r;                          // sigma_r^2 u_l^H Q u_l

  int num_targets() const { return static_cast<int>(g.size()); }

  double d_form(int l, int s, const MatC& w) const;
  double f_form(int l, const MatC& w) const;
  /// Denominator of target l's ratio: sum_{s != l} D_{l,s} + F_l + c_{r,l}.
  double denominator(int l, const MatC& w) const;
  /// Explicit I_{K+M} (x) v v^H; only for verification, size JM(K+M) squared.
  MatC explicit_d(int l, int s, int columns) const;
  MatC explicit_f(int l, int columns) const;
};

/// Builds A_hat, G_hat, Q for a feasible mode. Throws ModeInfeasible.
SensingMatrices assemble_sensing(const Scenario& scenario, const ModeVector& mode);

/// Concatenation over j of alpha_j h_{j,k}.
VecC effective_channel(const Scenario& scenario, const ModeVector& mode, int user);

/// SINR of user k; interference runs over every other column, sensing
/// columns included.
double comm_sinr(const Scenario& scenario, const ModeVector& mode, const Beamformer& bf, int user);
std::vector<double> comm_sinrs(const Scenario& scenario, const ModeVector& mode,
                               const Beamformer& bf);

/// Rayleigh quotient u^H B_l u / u^H C_l u. Throws InvalidFilter when u
/// vanishes on every receiver block.
double sensing_sinr(const SensingMatrices& mats, const Beamformer& bf, const VecC& u, int target);

/// Objective: sum over targets of the sensing SINR.
double sum_sensing_sinr(const SensingMatrices& mats, const Beamformer& bf,
                        const FilterBank& filters);

QuadraticForms build_quadratic_forms(const SensingMatrices& mats, const FilterBank& filters);

/// Diagonal of Omega (length JM(K+M)): 1 on transmitter rows of every column.
VecR omega_mask(const ModeVector& mode, int antennas, int columns);

/// Zeroes the rows of every receiving BS.
void apply_tx_mask(MatC& w, const ModeVector& mode, int antennas);

}  // namespace cfisac
