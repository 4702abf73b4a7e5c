#pragma once

#include <string>
#include <vector>

#include "cfisac/types.hpp"

namespace cfisac::conic {

/// ||A x + b||_2 <= f^T x + d. A with zero rows gives the linear
/// inequality 0 <= f^T x + d.
struct SocConstraint {
  MatR A;
  VecR b;
  VecR f;
  double d = 0.0;

  int cone_dim() const { return static_cast<int>(A.rows()) + 1; }
};

/// minimize c^T x subject to every cone constraint and E x = e.
struct SocpProblem {
  int n = 0;
  VecR c;
  std::vector<SocConstraint> cones;
  MatR E;  // zero rows when there are no equalities
  VecR e;

  /// Throws InvalidArgument on inconsistent dimensions or no constraints.
  void validate() const;
};

enum class SocpStatus { optimal, infeasible, unbounded, max_iter };

std::string to_string(SocpStatus status);

struct SocpSolution {
  VecR x;
  SocpStatus status = SocpStatus::max_iter;
  /// max(primal residual, dual residual, relative duality gap) of x.
  double kkt_residual = 0.0;
  double objective = 0.0;
  int iterations = 0;
  /// Dual multipliers: z[i] for cone i (z[i](0) pairs with f^T x + d), y for E x = e.
  std::vector<VecR> z;
  VecR y;
};

struct SocpOptions {
  double tol = 1e-8;
  int max_iter = 200;
};

/// Primal-dual interior point method on the homogeneous self-dual embedding,
/// Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
SocpSolution solve_socp(const SocpProblem& problem, const SocpOptions& options = {});

struct EigenPair {
  double value = 0.0;
  VecC vector;
};

/// Largest lambda with B v = lambda C v and ||v|| = 1, for Hermitian PSD B and
/// Hermitian PD C. Both are symmetrized first. Throws NumericalDomain when C
/// is not positive definite. B == 0 returns (0, e_1). The phase of v is fixed
/// so that its largest-magnitude entry is real and positive.
EigenPair max_generalized_eigenpair(const MatC& B, const MatC& C);

}  // namespace cfisac::conic
