#include "socp_builders.hpp"

#include <cmath>

#include "cfisac/errors.hpp"

namespace cfisac::detail {

void add_re_row(RowRef row, const ComplexBlock& blk, int first, const VecC& a,
                double scale) {
  // Re(a^H z) = Re(a) . Re(z) + Im(a) . Im(z)
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    row(blk.re(first + i)) += scale * a(i).real();
    row(blk.im(first + i)) += scale * a(i).imag();
  }
}

void add_im_row(RowRef row, const ComplexBlock& blk, int first, const VecC& a,
                double scale) {
  // Im(a^H z) = Re(a) . Im(z) - Im(a) . Re(z)
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    row(blk.re(first + i)) -= scale * a(i).imag();
    row(blk.im(first + i)) += scale * a(i).real();
  }
}

VecC read_complex(const VecR& x, const ComplexBlock& blk) {
  VecC z(blk.size);
  for (int i = 0; i < blk.size; ++i) z(i) = cd(x(blk.re(i)), x(blk.im(i)));
  return z;
}

std::vector<int> tx_rows(const std::vector<int>& tx_set, int antennas) {
  std::vector<int> rows;
  for (int j : tx_set) {
    for (int m = 0; m < antennas; ++m) rows.push_back(j * antennas + m);
  }
  return rows;
}

VecC restrict_rows(const VecC& v, const std::vector<int>& rows) {
  VecC out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out(r) = v(rows[r]);
  return out;
}

namespace {

// ||[Re/Im(a^H z_i) for every column i != k; 1]|| <= Re(a^H z_k) / sqrt(gamma),
// with a already divided by the noise standard deviation.
conic::SocConstraint sinr_cone(const ComplexBlock& blk, int n, int rows, int columns, const VecC& a,
                               int user, double gamma) {
  conic::SocConstraint k;
  k.A = MatR::Zero(2 * (columns - 1) + 1, n);
  k.b = VecR::Zero(2 * (columns - 1) + 1);
  int r = 0;
  for (int i = 0; i < columns; ++i) {
    if (i == user) continue;
    add_re_row(k.A.row(r++).transpose(), blk, i * rows, a);
    add_im_row(k.A.row(r++).transpose(), blk, i * rows, a);
  }
  k.b(r) = 1.0;
  k.f = VecR::Zero(n);
  add_re_row(k.f, blk, user * rows, a, 1.0 / std::sqrt(gamma));
  return k;
}

// ||(y, (t - 1)/2)|| <= (t + 1)/2, i.e. ||y||^2 <= t, given the rows of y.
conic::SocConstraint rotated_cone(const MatR& y_rows, int t_index, int n) {
  conic::SocConstraint k;
  const Eigen::Index r = y_rows.rows();
  k.A = MatR::Zero(r + 1, n);
  k.A.topRows(r) = y_rows;
  k.A(r, t_index) = 0.5;
  k.b = VecR::Zero(r + 1);
  k.b(r) = -0.5;
  k.f = VecR::Zero(n);
  k.f(t_index) = 0.5;
  k.d = 0.5;
  return k;
}

}  // namespace

PowerMinProgram solve_power_min_program(const Scenario& scenario, const std::vector<int>& tx_set,
                                        const std::vector<double>& gamma, double tol) {
  const int M = scenario.antennas();
  const int K = scenario.num_users();
  const int T = static_cast<int>(tx_set.size());
  const std::vector<int> rows = tx_rows(tx_set, M);
  const int R = static_cast<int>(rows.size());
  const double noise_sd = std::sqrt(scenario.config.comm_noise);
  if (static_cast<int>(gamma.size()) != K) throw InvalidArgument("power-min: gamma must have K entries");

  std::vector<VecC> h(K);
  double p_ref = 0.0;  // largest single-user lower bound on the total power
  for (int k = 0; k < K; ++k) {
    VecC hk(R);
    for (int t = 0; t < T; ++t) hk.segment(t * M, M) = scenario.h[tx_set[t]][k];
    const double gain = hk.squaredNorm();
    if (!(gain > 0.0)) throw InfeasibleConstraints("power-min: a user has no channel to the transmitters");
    p_ref = std::max(p_ref, gamma[k] * scenario.config.comm_noise / gain);
    h[k] = std::move(hk);
  }
  const double w_scale = std::sqrt(p_ref);

  const ComplexBlock blk{0, R * K};
  const int n = 2 * blk.size + T;
  const int p_index = 2 * blk.size;

  conic::SocpProblem prob;
  prob.n = n;
  prob.c = VecR::Zero(n);
  prob.c.tail(T).setOnes();
  for (int k = 0; k < K; ++k) {
    prob.cones.push_back(sinr_cone(blk, n, R, K, h[k] * (w_scale / noise_sd), k, gamma[k]));
  }
  for (int t = 0; t < T; ++t) {
    MatR sel = MatR::Zero(2 * M * K, n);
    int r = 0;
    for (int i = 0; i < K; ++i) {
      for (int m = 0; m < M; ++m) {
        const int idx = i * R + t * M + m;
        sel(r++, blk.re(idx)) = 1.0;
        sel(r++, blk.im(idx)) = 1.0;
      }
    }
    prob.cones.push_back(rotated_cone(sel, p_index + t, n));
  }

  PowerMinProgram out;
  out.solution = conic::solve_socp(prob, {tol, 200});
  const VecC z = read_complex(out.solution.x, blk);
  out.comm = w_scale * Eigen::Map<const MatC>(z.data(), R, K);
  return out;
}

MmStepProgram build_mm_step(const MatC& anchor, const VecR& tau, const QuadraticForms& forms,
                            const Scenario& scenario, const ModeVector& mode, double objective_scale) {
  const auto& cfg = scenario.config;
  const int M = cfg.antennas;
  const int K = cfg.num_users;
  const int C = cfg.num_columns();
  const int L = forms.num_targets();

  MmStepProgram out;
  out.rows = tx_rows(mode.tx_set(), M);
  const int R = static_cast<int>(out.rows.size());
  out.block = {0, R * C};
  out.w_scale = std::sqrt(cfg.p_max);
  const ComplexBlock& blk = out.block;
  const int n = 2 * blk.size + 1;
  const int t_index = 2 * blk.size;
  const double lin_scale = out.w_scale / objective_scale;
  const double quad_scale = out.w_scale / std::sqrt(objective_scale);

  conic::SocpProblem& prob = out.problem;
  prob.n = n;
  prob.c = VecR::Zero(n);
  prob.c(t_index) = 1.0;

  // Linearized sqrt(w^H D_ll w) at the anchor; skipped where it vanishes.
  for (int l = 0; l < L; ++l) {
    const double num = forms.d_form(l, l, anchor);
    if (!(num > 0.0)) continue;
    const VecC& v = forms.v[l][l];
    const VecC v_tx = restrict_rows(v, out.rows);
    const double coef = 2.0 * tau(l) / std::sqrt(num) * lin_scale;
    for (int i = 0; i < C; ++i) {
      const cd proj = v.dot(anchor.col(i));  // v^H w_t,i
      add_re_row(prob.c, blk, i * R, v_tx * proj, -coef);
    }
  }

  // Penalty sum_l tau_l^2 w^H (sum_{s != l} D_ls + F_l) w = ||y||^2 through an epigraph.
  std::vector<VecC> factors;
  for (int l = 0; l < L; ++l) {
    for (int s = 0; s < L; ++s) {
      if (s != l) factors.push_back(tau(l) * restrict_rows(forms.v[l][s], out.rows));
    }
    factors.push_back(tau(l) * restrict_rows(forms.g[l], out.rows));
  }
  std::erase_if(factors, [](const VecC& q) { return q.squaredNorm() == 0.0; });
  MatR y_rows = MatR::Zero(2 * static_cast<Eigen::Index>(factors.size()) * C, n);
  Eigen::Index r = 0;
  for (const VecC& q : factors) {
    for (int i = 0; i < C; ++i) {
      add_re_row(y_rows.row(r++).transpose(), blk, i * R, q, quad_scale);
      add_im_row(y_rows.row(r++).transpose(), blk, i * R, q, quad_scale);
    }
  }
  prob.cones.push_back(rotated_cone(y_rows, t_index, n));

  const double noise_sd = std::sqrt(cfg.comm_noise);
  for (int k = 0; k < K; ++k) {
    const VecC h = restrict_rows(effective_channel(scenario, mode, k), out.rows);
    prob.cones.push_back(sinr_cone(blk, n, R, C, h * (out.w_scale / noise_sd), k, cfg.gamma[k]));
  }

  conic::SocConstraint power;
  power.A = MatR::Zero(2 * blk.size, n);
  power.A.leftCols(2 * blk.size).setIdentity();
  power.b = VecR::Zero(2 * blk.size);
  power.f = VecR::Zero(n);
  power.d = 1.0;
  prob.cones.push_back(std::move(power));
  return out;
}

}  // namespace cfisac::detail
