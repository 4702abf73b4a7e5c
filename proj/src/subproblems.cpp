#include "cfisac/subproblems.hpp"

#include <cmath>

#include <Eigen/QR>

#include "cfisac/errors.hpp"
#include "socp_builders.hpp"

namespace cfisac {

namespace {

// max_iter iterates this close to optimal are still usable.
constexpr double kUsableKkt = 1e-6;

}  // namespace

PowerMinResult solve_power_min(const Scenario& scenario, const std::vector<int>& tx_set,
                               const std::vector<double>& gamma, double tol) {
  const int M = scenario.antennas();
  const int K = scenario.num_users();
  if (tx_set.empty() || static_cast<int>(tx_set.size()) * M < K) {
    throw InvalidArgument("power-min needs |T| M >= K");
  }
  for (int j : tx_set) {
    if (j < 0 || j >= scenario.num_bs()) throw InvalidArgument("power-min: BS index out of range");
  }

  auto prog = detail::solve_power_min_program(scenario, tx_set, gamma, tol);
  const auto& sol = prog.solution;
  if (sol.status == conic::SocpStatus::infeasible) {
    throw InfeasibleConstraints("power-min: SINR targets unreachable");
  }
  if (sol.status != conic::SocpStatus::optimal && !(sol.kkt_residual <= kUsableKkt)) {
    throw SolverFailure("power-min: solver stopped at " + conic::to_string(sol.status));
  }

  PowerMinResult out;
  out.status = sol.status;
  out.kkt_residual = sol.kkt_residual;
  out.comm = MatC::Zero(scenario.config.stacked_rows(), K);
  out.bs_power.assign(scenario.num_bs(), 0.0);
  for (std::size_t t = 0; t < tx_set.size(); ++t) {
    const auto block = prog.comm.middleRows(static_cast<Eigen::Index>(t) * M, M);
    out.comm.middleRows(tx_set[t] * M, M) = block;
    out.bs_power[tx_set[t]] = block.squaredNorm();
    out.total += out.bs_power[tx_set[t]];
  }
  return out;
}

PrecoderResult nullspace_precoder(const MatC& channels, const std::vector<VecC>& steering,
                                  int antennas, double power) {
  if (power < 0.0) throw InvalidArgument("precoder power must be nonnegative");
  if (antennas < 1) throw InvalidArgument("precoder needs at least one antenna");
  const Eigen::Index n = channels.rows();

  // Orthonormal basis of range(H) from a rank-revealing QR.
  MatC basis(n, 0);
  if (channels.cols() > 0) {
    Eigen::ColPivHouseholderQR<MatC> qr(channels);
    const Eigen::Index rank = qr.rank();
    basis = MatC(qr.householderQ()).leftCols(rank);
  }

  VecC w = VecC::Zero(n);
  for (const VecC& a : steering) {
    if (a.size() != n) throw InvalidArgument("steering vector length does not match H");
    VecC p = a - basis * (basis.adjoint() * a);
    const double norm = p.norm();
    if (norm < 1e-12) continue;
    w += p / norm;
  }

  PrecoderResult out;
  out.sensing = MatC::Zero(n, antennas);
  const double norm = w.norm();
  if (norm < 1e-12) {
    out.degenerate = true;
    return out;
  }
  const VecC col = std::sqrt(power / antennas) * (w / norm);
  for (int m = 0; m < antennas; ++m) out.sensing.col(m) = col;
  return out;
}

PrecoderResult nullspace_precoder(const Scenario& scenario, const std::vector<int>& tx_set,
                                  double power) {
  const int M = scenario.antennas();
  const int K = scenario.num_users();
  const int T = static_cast<int>(tx_set.size());
  MatC H(T * M, K);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) H.block(t * M, k, M, 1) = scenario.h[tx_set[t]][k];
  }
  std::vector<VecC> steering;
  for (int l = 0; l < scenario.num_targets(); ++l) {
    VecC a(T * M);
    for (int t = 0; t < T; ++t) a.segment(t * M, M) = steering_vector(scenario, tx_set[t], l);
    steering.push_back(std::move(a));
  }
  PrecoderResult local = nullspace_precoder(H, steering, M, power);

  PrecoderResult out;
  out.degenerate = local.degenerate;
  out.sensing = MatC::Zero(scenario.config.stacked_rows(), M);
  for (int t = 0; t < T; ++t) out.sensing.middleRows(tx_set[t] * M, M) = local.sensing.middleRows(t * M, M);
  return out;
}

}  // namespace cfisac
