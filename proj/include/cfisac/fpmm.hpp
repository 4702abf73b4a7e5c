// Alternating receive-filter / beamforming optimization for a fixed mode.
#pragma once

#include <string>
#include <vector>

#include "cfisac/conic.hpp"
#include "cfisac/model.hpp"

namespace cfisac {

struct FpmmParams {
  int max_outer_iters = 100;
  double rel_tol = 1e-4;
  double socp_tol = 1e-8;

  void validate() const;
};

struct FpmmIteration {
  double objective = 0.0;  // sum of sensing SINRs with optimal filters
  std::vector<double> comm_sinr;
  double power = 0.0;
};

struct FpmmTrace {
  std::vector<FpmmIteration> iterations;  // [0] is the starting point
  int steps = 0;                          // beamforming steps accepted
  bool converged = false;
  std::string stop_reason;

  std::vector<double> objectives() const;
};

/// Optimal filter per target: top generalized eigenvector of (B_l, C_l)
/// restricted to receiver rows, re-embedded with zero transmitter blocks.
/// Throws ModeInfeasible when there is no receiver.
FilterBank update_filters(const SensingMatrices& mats, const Beamformer& bf);

/// tau_l = sqrt(w^H D_ll w) / (sum_{s != l} w^H D_ls w + w^H F_l w + c_r,l).
VecR update_tau(const MatC& w, const QuadraticForms& forms);

/// sum_l u_l^H B_l u_l / u_l^H C_l u_l expressed through the quadratic forms.
double ratio_sum(const MatC& w, const QuadraticForms& forms);

/// Quadratic-transform objective sum_l 2 tau_l sqrt(w^H D_ll w) - tau_l^2 Den_l(w),
/// Den_l including c_r,l.
double fp_objective(const MatC& w, const VecR& tau, const QuadraticForms& forms);

/// Linear minorant of sqrt(w^H D_ll w) around the anchor; 0 when the anchor
/// makes the form vanish.
double mm_minorant(const MatC& w, const MatC& anchor, const QuadraticForms& forms, int target);

/// fp_objective with every sqrt term replaced by its minorant.
double surrogate_objective(const MatC& w, const MatC& anchor, const VecR& tau,
                           const QuadraticForms& forms);

struct StepResult {
  Beamformer beamformer;
  MatC anchor;  // the input after masking and per-user phase alignment
  conic::SocpStatus status = conic::SocpStatus::optimal;
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// One minorize-maximize beamforming update: maximizes the surrogate under the
/// per-user SINR cones and the power budget. Throws InfeasibleConstraints when
/// the cone program is infeasible. A max_iter stop is returned as data.
StepResult beamforming_step(const Beamformer& current, const VecR& tau, const QuadraticForms& forms,
                            const Scenario& scenario, const ModeVector& mode, double tol = 1e-8);

struct InitResult {
  Beamformer beamformer;
  double maxmin_sinr = 0.0;  // common-SINR bisection value
  double comm_power = 0.0;   // power-min total at the required targets
  bool degenerate_precoder = false;
};

/// Communication columns from power minimization at the required targets,
/// sensing columns from the null-space precoder with the leftover budget.
/// Throws ModeInfeasible for an infeasible mode and InfeasibleConstraints when
/// the targets cannot be met within P_max.
InitResult init_beamforming(const Scenario& scenario, const ModeVector& mode, double tol = 1e-8);

/// Largest common SINR target reachable within P_max on the transmitters of
/// `mode`, by bisection to relative width `rel_width`.
double maxmin_sinr_bisection(const Scenario& scenario, const ModeVector& mode, double rel_width = 1e-3,
                             double tol = 1e-8);

struct AlternatingResult {
  Beamformer beamformer;
  FilterBank filters;
  double objective = 0.0;
  FpmmTrace trace;
};

/// Filters, tau and a beamforming step in turn until the relative objective
/// change drops below rel_tol or the iteration cap is hit.
AlternatingResult run_alternating(const Scenario& scenario, const ModeVector& mode,
                                  const FpmmParams& params = {});
AlternatingResult run_alternating_from(const Scenario& scenario, const ModeVector& mode,
                                       const Beamformer& start, const FpmmParams& params = {});

}  // namespace cfisac
