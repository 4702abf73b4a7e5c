// Closed subproblems shared by initialization and the selection heuristics.
#pragma once

#include <vector>

#include "cfisac/conic.hpp"
#include "cfisac/scenario.hpp"

namespace cfisac {

struct PowerMinResult {
  MatC comm;                     // JM x K, zero on rows outside tx_set
  std::vector<double> bs_power;  // ||W_c,j||_F^2 for every j (0 outside tx_set)
  double total = 0.0;
  conic::SocpStatus status = conic::SocpStatus::optimal;
  double kkt_residual = 0.0;
};

/// min sum_j P_j over j in tx_set subject to every user's SINR (interference
/// from communication columns only) reaching gamma. Throws InvalidArgument when
/// |T| M < K, InfeasibleConstraints when the program is infeasible and
/// SolverFailure when the solver stops short of a usable point.
PowerMinResult solve_power_min(const Scenario& scenario, const std::vector<int>& tx_set,
                               const std::vector<double>& gamma, double tol = 1e-8);

struct PrecoderResult {
  MatC sensing;  // JM x M (or |T|M x M for the matrix overload)
  bool degenerate = false;
};

/// Sensing columns steered into null(H^H): every column equals
/// sqrt(P/M) w/||w|| with w = sum_l P a_l / ||P a_l||. Directions whose
/// projection is below 1e-12 are skipped; if nothing survives the result is
/// zero and flagged degenerate.
PrecoderResult nullspace_precoder(const MatC& channels, const std::vector<VecC>& steering,
                                  int antennas, double power);

/// Scenario form: H stacks h_{j,k} over j in tx_set, a_l stacks a(theta_{j,l}).
PrecoderResult nullspace_precoder(const Scenario& scenario, const std::vector<int>& tx_set,
                                  double power);

}  // namespace cfisac
