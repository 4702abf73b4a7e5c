#include "cfisac/fpmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfisac/errors.hpp"
#include "cfisac/subproblems.hpp"
#include "socp_builders.hpp"

namespace cfisac {

namespace {

constexpr double kUsableKkt = 1e-6;

MatC restrict_square(const MatC& m, const std::vector<int>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  MatC out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = m(rows[a], rows[b]);
  }
  return out;
}

FpmmIteration snapshot(const Scenario& scenario, const ModeVector& mode, const Beamformer& bf,
                       double objective) {
  FpmmIteration it;
  it.objective = objective;
  it.comm_sinr = comm_sinrs(scenario, mode, bf);
  it.power = bf.power(mode, scenario.antennas());
  return it;
}

// Pulls a slightly-over-budget beamformer back onto the power sphere.
void clip_power(Beamformer& bf, const ModeVector& mode, int antennas, double p_max) {
  const double p = bf.power(mode, antennas);
  if (p > p_max) bf.w *= std::sqrt(p_max / p);
}

}  // namespace

void FpmmParams::validate() const {
  if (max_outer_iters < 1) throw InvalidArgument("max_outer_iters must be positive");
  if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be positive");
  if (!(socp_tol > 0.0)) throw InvalidArgument("socp_tol must be positive");
}

std::vector<double> FpmmTrace::objectives() const {
  std::vector<double> out;
  for (const auto& it : iterations) out.push_back(it.objective);
  return out;
}

FilterBank update_filters(const SensingMatrices& mats, const Beamformer& bf) {
  std::vector<int> rx;
  for (int r = 0; r < mats.rows(); ++r) {
    if (mats.q_diag(r) != 0.0) rx.push_back(r);
  }
  if (rx.empty()) throw ModeInfeasible("filter update needs at least one receiver");

  FilterBank bank;
  for (int l = 0; l < mats.num_targets(); ++l) {
    const MatC B = restrict_square(mats.signal_matrix(l, bf.w), rx);
    const MatC C = restrict_square(mats.interference_matrix(l, bf.w), rx);
    const auto pair = conic::max_generalized_eigenpair(B, C);
    VecC u = VecC::Zero(mats.rows());
    for (std::size_t r = 0; r < rx.size(); ++r) u(rx[r]) = pair.vector(r);
    bank.u.push_back(u.normalized());
  }
  return bank;
}

VecR update_tau(const MatC& w, const QuadraticForms& forms) {
  const int L = forms.num_targets();
  VecR tau(L);
  for (int l = 0; l < L; ++l) tau(l) = std::sqrt(forms.d_form(l, l, w)) / forms.denominator(l, w);
  return tau;
}

double ratio_sum(const MatC& w, const QuadraticForms& forms) {
  double total = 0.0;
  for (int l = 0; l < forms.num_targets(); ++l) total += forms.d_form(l, l, w) / forms.denominator(l, w);
  return total;
}

double fp_objective(const MatC& w, const VecR& tau, const QuadraticForms& forms) {
  double total = 0.0;
  for (int l = 0; l < forms.num_targets(); ++l) {
    total += 2.0 * tau(l) * std::sqrt(forms.d_form(l, l, w)) - tau(l) * tau(l) * forms.denominator(l, w);
  }
  return total;
}

double mm_minorant(const MatC& w, const MatC& anchor, const QuadraticForms& forms, int target) {
  const double n0 = forms.d_form(target, target, anchor);
  if (!(n0 > 0.0)) return 0.0;
  const VecC& v = forms.v.at(target).at(target);
  // sum_i (v^H w_t,i)^* (v^H w_i) = w_t^H D w
  const VecC pa = anchor.adjoint() * v;
  const VecC pw = w.adjoint() * v;
  const double cross = pw.dot(pa).real();
  const double root = std::sqrt(n0);
  return root + (cross - n0) / root;
}

double surrogate_objective(const MatC& w, const MatC& anchor, const VecR& tau,
                           const QuadraticForms& forms) {
  double total = 0.0;
  for (int l = 0; l < forms.num_targets(); ++l) {
    total += 2.0 * tau(l) * mm_minorant(w, anchor, forms, l) - tau(l) * tau(l) * forms.denominator(l, w);
  }
  return total;
}

StepResult beamforming_step(const Beamformer& current, const VecR& tau, const QuadraticForms& forms,
                            const Scenario& scenario, const ModeVector& mode, double tol) {
  const auto& cfg = scenario.config;
  const int M = cfg.antennas;
  if (tau.size() != forms.num_targets()) throw InvalidArgument("tau length differs from target count");
  if (current.w.rows() != cfg.stacked_rows() || current.w.cols() != cfg.num_columns()) {
    throw InvalidArgument("beamformer has the wrong shape");
  }

  StepResult out;
  out.anchor = current.w;
  apply_tx_mask(out.anchor, mode, M);
  // Rotate each user column so h_k^H w_k is real and nonnegative.
  for (int k = 0; k < cfg.num_users; ++k) {
    const cd g = effective_channel(scenario, mode, k).dot(out.anchor.col(k));
    if (std::abs(g) > 0.0) out.anchor.col(k) *= std::conj(g) / std::abs(g);
  }

  double scale = ratio_sum(out.anchor, forms);
  if (!(scale > 0.0)) scale = 1.0;
  auto prog = detail::build_mm_step(out.anchor, tau, forms, scenario, mode, scale);
  const auto sol = conic::solve_socp(prog.problem, {tol, 200});
  out.status = sol.status;
  out.kkt_residual = sol.kkt_residual;
  out.iterations = sol.iterations;
  if (sol.status == conic::SocpStatus::infeasible) {
    throw InfeasibleConstraints("beamforming step: SINR targets unreachable within P_max");
  }

  const VecC z = detail::read_complex(sol.x, prog.block);
  const auto R = static_cast<Eigen::Index>(prog.rows.size());
  out.beamformer = Beamformer::zeros(cfg);
  for (int c = 0; c < cfg.num_columns(); ++c) {
    for (Eigen::Index r = 0; r < R; ++r) out.beamformer.w(prog.rows[r], c) = prog.w_scale * z(c * R + r);
  }
  clip_power(out.beamformer, mode, M, cfg.p_max);
  return out;
}

double maxmin_sinr_bisection(const Scenario& scenario, const ModeVector& mode, double rel_width,
                             double tol) {
  const auto& cfg = scenario.config;
  const auto tx = mode.tx_set();
  double hi = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.num_users; ++k) {
    hi = std::min(hi, cfg.p_max * effective_channel(scenario, mode, k).squaredNorm() / cfg.comm_noise);
  }
  double lo = 0.0;
  while (hi - lo > rel_width * hi) {
    const double mid = 0.5 * (lo + hi);
    bool ok = false;
    try {
      ok = solve_power_min(scenario, tx, std::vector<double>(cfg.num_users, mid), tol).total <= cfg.p_max;
    } catch (const InfeasibleConstraints&) {
      ok = false;
    }
    (ok ? lo : hi) = mid;
  }
  return lo;
}

InitResult init_beamforming(const Scenario& scenario, const ModeVector& mode, double tol) {
  const auto& cfg = scenario.config;
  const int M = cfg.antennas;
  // all-transmit is admitted: the joint heuristic starts from it
  if (mode.size() != cfg.num_bs || mode.num_tx() < 1 || mode.num_tx() * M < cfg.num_users) {
    throw ModeInfeasible("mode " + mode.bits() + " has too few transmit antennas");
  }
  const auto tx = mode.tx_set();

  InitResult out;
  out.maxmin_sinr = maxmin_sinr_bisection(scenario, mode, 1e-3, tol);
  const auto pm = solve_power_min(scenario, tx, cfg.gamma, tol);
  if (pm.total > cfg.p_max * (1.0 + 1e-9)) {
    throw InfeasibleConstraints("SINR targets need " + std::to_string(pm.total) + " W, budget is " +
                                std::to_string(cfg.p_max) + " W");
  }
  out.comm_power = pm.total;

  out.beamformer = Beamformer::zeros(cfg);
  out.beamformer.w.leftCols(cfg.num_users) = pm.comm;
  const double rest = std::max(0.0, cfg.p_max - pm.total);
  if (static_cast<int>(tx.size()) * M > cfg.num_users) {
    const auto pre = nullspace_precoder(scenario, tx, rest);
    out.beamformer.w.rightCols(M) = pre.sensing;
    out.degenerate_precoder = pre.degenerate;
  } else {
    out.degenerate_precoder = true;
  }
  clip_power(out.beamformer, mode, M, cfg.p_max);
  return out;
}

AlternatingResult run_alternating(const Scenario& scenario, const ModeVector& mode,
                                  const FpmmParams& params) {
  params.validate();
  const auto init = init_beamforming(scenario, mode, params.socp_tol);
  return run_alternating_from(scenario, mode, init.beamformer, params);
}

AlternatingResult run_alternating_from(const Scenario& scenario, const ModeVector& mode,
                                       const Beamformer& start, const FpmmParams& params) {
  params.validate();
  if (mode.num_rx() < 1) throw ModeInfeasible("alternating design needs at least one receiver");
  const auto mats = assemble_sensing(scenario, mode);

  AlternatingResult res;
  res.beamformer = start;
  apply_tx_mask(res.beamformer.w, mode, scenario.antennas());
  res.filters = update_filters(mats, res.beamformer);
  res.objective = sum_sensing_sinr(mats, res.beamformer, res.filters);
  res.trace.iterations.push_back(snapshot(scenario, mode, res.beamformer, res.objective));
  res.trace.stop_reason = "max_iter";

  for (int it = 0; it < params.max_outer_iters; ++it) {
    const auto forms = build_quadratic_forms(mats, res.filters);
    const VecR tau = update_tau(res.beamformer.w, forms);

    StepResult step;
    try {
      step = beamforming_step(res.beamformer, tau, forms, scenario, mode, params.socp_tol);
    } catch (const SolverFailure&) {
      res.trace.stop_reason = "solver_failure";
      break;
    }
    if (step.status != conic::SocpStatus::optimal && !(step.kkt_residual <= kUsableKkt)) {
      res.trace.stop_reason = "solver_" + conic::to_string(step.status);
      break;
    }

    FilterBank filters = update_filters(mats, step.beamformer);
    const double objective = sum_sensing_sinr(mats, step.beamformer, filters);
    // an inexact solve may lose a hair of ascent; never accept a real drop
    if (objective < res.objective - 1e-12 * std::max(1.0, std::abs(res.objective))) {
      res.trace.stop_reason = "no_ascent";
      res.trace.converged = true;
      break;
    }
    const double change = std::abs(objective - res.objective) / std::max(std::abs(res.objective), 1e-300);
    res.beamformer = std::move(step.beamformer);
    res.filters = std::move(filters);
    res.objective = objective;
    res.trace.iterations.push_back(snapshot(scenario, mode, res.beamformer, res.objective));
    ++res.trace.steps;
    if (change < params.rel_tol) {
      res.trace.converged = true;
      res.trace.stop_reason = "rel_tol";
      break;
    }
  }
  return res;
}

}  // namespace cfisac
