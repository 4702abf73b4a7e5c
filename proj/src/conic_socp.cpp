#include <algorithm>
#include <cmath>
#include <limits>

#include "cfisac/conic.hpp"
#include "cfisac/errors.hpp"

namespace cfisac::conic {

std::string to_string(SocpStatus status) {
  switch (status) {
    case SocpStatus::optimal: return "optimal";
    case SocpStatus::infeasible: return "infeasible";
    case SocpStatus::unbounded: return "unbounded";
    case SocpStatus::max_iter: return "max-iter";
  }
  return "unknown";
}

void SocpProblem::validate() const {
  if (n <= 0) throw InvalidArgument("socp: variable count must be positive");
  if (c.size() != n) throw InvalidArgument("socp: objective length differs from n");
  if (cones.empty()) throw InvalidArgument("socp: at least one cone constraint is required");
  for (const auto& k : cones) {
    if (k.A.rows() > 0 && k.A.cols() != n) throw InvalidArgument("socp: cone matrix has wrong column count");
    if (k.b.size() != k.A.rows()) throw InvalidArgument("socp: cone offset length differs from A rows");
    if (k.f.size() != n) throw InvalidArgument("socp: cone f has wrong length");
  }
  if (E.rows() > 0 && (E.cols() != n || e.size() != E.rows())) {
    throw InvalidArgument("socp: equality constraint dimensions mismatch");
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cone layout over the stacked slack vector.
struct Layout {
  std::vector<int> dim;
  std::vector<int> off;
  int m = 0;
};

double soc_residual(const Eigen::Ref<const VecR>& x) {
  const double t = x.tail(x.size() - 1).norm();
  return (x(0) - t) * (x(0) + t);
}

// Smallest alpha > 0 at which x + alpha d leaves the cone (x interior).
double cone_max_step(const Eigen::Ref<const VecR>& x, const Eigen::Ref<const VecR>& d) {
  if (x.size() == 1) return d(0) < 0.0 ? -x(0) / d(0) : kInf;
  const auto x1 = x.tail(x.size() - 1);
  const auto d1 = d.tail(d.size() - 1);
  const double c = soc_residual(x);
  if (!(c > 0.0) || x(0) <= 0.0) return 0.0;
  const double a = d(0) * d(0) - d1.squaredNorm();
  const double b = x(0) * d(0) - x1.dot(d1);
  const double disc = b * b - a * c;
  if (b < 0.0) {
    if (a > 0.0 && disc < 0.0) return kInf;
    return c / (std::sqrt(std::max(disc, 0.0)) - b);
  }
  if (a < 0.0) return (b + std::sqrt(std::max(disc, 0.0))) / (-a);
  return kInf;
}

class InteriorPoint {
 public:
  InteriorPoint(const SocpProblem& problem, const SocpOptions& options);
  SocpSolution run();

 private:
  void set_identity_scaling();
  void factor();
  void solve_kkt(const VecR& r1, const VecR& r2, const VecR& r3, VecR& dx, VecR& dy, VecR& dz) const;
  void reduced_solve(const VecR& r1, const VecR& r2, const VecR& r3, VecR& dx, VecR& dy, VecR& dz) const;

  VecR apply_w(const VecR& v) const;
  VecR apply_w_inv(const VecR& v) const;
  MatR apply_w_inv_rows(const MatR& g) const;
  VecR jordan(const VecR& u, const VecR& v) const;
  VecR jordan_div(const VecR& lambda, const VecR& u) const;
  VecR identity() const;
  double max_step(const VecR& v, const VecR& dv) const;
  void shift_into_cone(VecR& v) const;

  const SocpProblem& prob_;
  SocpOptions opts_;
  int n_ = 0;
  int p_ = 0;
  Layout lay_;
  MatR G_;
  VecR h_;
  MatR A_;
  VecR b_;
  VecR c_;

  std::vector<double> eta_;
  std::vector<VecR> wbar_;

  MatR Y_;  // W^{-1} G
  Eigen::LLT<MatR> h_fact_;
  Eigen::LLT<MatR> s_fact_;
  MatR hinv_at_;
};

InteriorPoint::InteriorPoint(const SocpProblem& problem, const SocpOptions& options)
    : prob_(problem), opts_(options) {
  n_ = problem.n;
  p_ = static_cast<int>(problem.E.rows());
  for (const auto& k : problem.cones) {
    lay_.off.push_back(lay_.m);
    lay_.dim.push_back(k.cone_dim());
    lay_.m += k.cone_dim();
  }
  G_ = MatR::Zero(lay_.m, n_);
  h_ = VecR::Zero(lay_.m);
  for (std::size_t i = 0; i < problem.cones.size(); ++i) {
    const auto& k = problem.cones[i];
    const int o = lay_.off[i];
    // s = [f^T x + d; A x + b] = h - G x
    G_.row(o) = -k.f.transpose();
    h_(o) = k.d;
    if (k.A.rows() > 0) {
      G_.middleRows(o + 1, k.A.rows()) = -k.A;
      h_.segment(o + 1, k.A.rows()) = k.b;
    }
  }
  A_ = p_ > 0 ? problem.E : MatR::Zero(0, n_);
  b_ = p_ > 0 ? problem.e : VecR::Zero(0);
  c_ = problem.c;
  eta_.resize(lay_.dim.size());
  wbar_.resize(lay_.dim.size());
}

void InteriorPoint::set_identity_scaling() {
  for (std::size_t i = 0; i < lay_.dim.size(); ++i) {
    eta_[i] = 1.0;
    wbar_[i] = VecR::Zero(lay_.dim[i]);
    wbar_[i](0) = 1.0;
  }
}

VecR InteriorPoint::apply_w(const VecR& v) const {
  VecR out(v.size());
  for (std::size_t i = 0; i < lay_.dim.size(); ++i) {
    const int o = lay_.off[i];
    const int q = lay_.dim[i];
    const double w0 = wbar_[i](0);
    const double x0 = v(o);
    if (q == 1) {
      out(o) = eta_[i] * w0 * x0;
      continue;
    }
    const auto w1 = wbar_[i].tail(q - 1);
    const auto x1 = v.segment(o + 1, q - 1);
    const double zeta = w1.dot(x1);
    out(o) = eta_[i] * (w0 * x0 + zeta);
    out.segment(o + 1, q - 1) = eta_[i] * (x1 + (x0 + zeta / (1.0 + w0)) * w1);
  }
  return out;
}

VecR InteriorPoint::apply_w_inv(const VecR& v) const {
  VecR out(v.size());
  for (std::size_t i = 0; i < lay_.dim.size(); ++i) {
    const int o = lay_.off[i];
    const int q = lay_.dim[i];
    const double w0 = wbar_[i](0);
    const double x0 = v(o);
    if (q == 1) {
      out(o) = w0 * x0 / eta_[i];
      continue;
    }
    const auto w1 = wbar_[i].tail(q - 1);
    const auto x1 = v.segment(o + 1, q - 1);
    const double zeta = w1.dot(x1);
    out(o) = (w0 * x0 - zeta) / eta_[i];
    out.segment(o + 1, q - 1) = (x1 + (zeta / (1.0 + w0) - x0) * w1) / eta_[i];
  }
  return out;
}

MatR InteriorPoint::apply_w_inv_rows(const MatR& g) const {
  MatR out(g.rows(), g.cols());
  for (std::size_t i = 0; i < lay_.dim.size(); ++i) {
    const int o = lay_.off[i];
    const int q = lay_.dim[i];
    const double w0 = wbar_[i](0);
    if (q == 1) {
      out.row(o) = g.row(o) * (w0 / eta_[i]);
      continue;
    }
    const auto w1 = wbar_[i].tail(q - 1);
    const auto g1 = g.middleRows(o + 1, q - 1);
    const Eigen::RowVectorXd zeta = w1.transpose() * g1;
    out.row(o) = (w0 * g.row(o) - zeta) / eta_[i];
    out.middleRows(o + 1, q - 1) =
        (g1 + w1 * (zeta / (1.0 + w0) - g.row(o))) / eta_[i];
  }
  return out;
}

VecR InteriorPoint::jordan(const VecR& u, const VecR& v) const {
  VecR out(u.size());
  for (std::size_t i = 0; i < lay_.dim.size(); ++i) {
    const int o = lay_.off[i];
    const int q = lay_.dim[i];
    out(o) = u.segment(o, q).dot(v.segment(o, q));
    if (q > 1) {
      out.segment(o + 1, q - 1) = u(o) * v.segment(o + 1, q - 1) + v(o) * u.segment(o + 1, q - 1);
    }
  }
  return out;
}

// Solves lambda o v = u for v.
VecR InteriorPoint::jordan_div(const VecR& lambda, const VecR& u) const {
  VecR out(u.size());
  for (std::size_t i = 0; i < lay_.dim.size(); ++i) {
    const int o = lay_.off[i];
    const int q = lay_.dim[i];
    const double l0 = lambda(o);
    if (q == 1) {
      out(o) = u(o) / l0;
      continue;
    }
    const auto l1 = lambda.segment(o + 1, q - 1);
    const auto u1 = u.segment(o + 1, q - 1);
    const double det = soc_residual(lambda.segment(o, q));
    const double v0 = (l0 * u(o) - l1.dot(u1)) / det;
    out(o) = v0;
    out.segment(o + 1, q - 1) = (u1 - v0 * l1) / l0;
  }
  return out;
}

VecR InteriorPoint::identity() const {
  VecR e = VecR::Zero(lay_.m);
  for (int o : lay_.off) e(o) = 1.0;
  return e;
}

double InteriorPoint::max_step(const VecR& v, const VecR& dv) const {
  double alpha = kInf;
  for (std::size_t i = 0; i < lay_.dim.size(); ++i) {
    const int o = lay_.off[i];
    const int q = lay_.dim[i];
    alpha = std::min(alpha, cone_max_step(v.segment(o, q), dv.segment(o, q)));
  }
  return alpha;
}

void InteriorPoint::shift_into_cone(VecR& v) const {
  double worst = -kInf;  // largest negated minimum eigenvalue
  for (std::size_t i = 0; i < lay_.dim.size(); ++i) {
    const int o = lay_.off[i];
    const int q = lay_.dim[i];
    const double tail = q > 1 ? v.segment(o + 1, q - 1).norm() : 0.0;
    worst = std::max(worst, tail - v(o));
  }
  if (worst >= -1e-8 * std::max(v.norm(), 1.0)) {
    for (int o : lay_.off) v(o) += 1.0 + worst;
  }
}

void InteriorPoint::factor() {
  Y_ = apply_w_inv_rows(G_);
  MatR H = MatR::Zero(n_, n_);
  H.selfadjointView<Eigen::Lower>().rankUpdate(Y_.transpose());
  H = H.selfadjointView<Eigen::Lower>();
  double delta = 1e-13 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 12; ++attempt) {
    MatR Hr = H;
    Hr.diagonal().array() += delta;
    h_fact_.compute(Hr);
    if (h_fact_.info() == Eigen::Success) break;
    delta *= 100.0;
  }
  if (p_ > 0) {
    hinv_at_ = h_fact_.solve(A_.transpose());
    MatR S = A_ * hinv_at_;
    S.diagonal().array() += 1e-14 * (1.0 + S.diagonal().cwiseAbs().maxCoeff());
    s_fact_.compute(S);
  }
}

void InteriorPoint::reduced_solve(const VecR& r1, const VecR& r2, const VecR& r3, VecR& dx,
                                  VecR& dy, VecR& dz) const {
  const VecR wr3 = apply_w_inv(r3);
  const VecR q = r1 + Y_.transpose() * wr3;
  if (p_ > 0) {
    dy = s_fact_.solve(A_ * h_fact_.solve(q) - r2);
    dx = h_fact_.solve(q - A_.transpose() * dy);
  } else {
    dy = VecR::Zero(0);
    dx = h_fact_.solve(q);
  }
  dz = apply_w_inv(Y_ * dx - wr3);
}

// [0 A^T G^T; A 0 0; G 0 -W^2] [dx; dy; dz] = [r1; r2; r3], with iterative
// refinement against the unregularized system.
void InteriorPoint::solve_kkt(const VecR& r1, const VecR& r2, const VecR& r3, VecR& dx, VecR& dy,
                              VecR& dz) const {
  reduced_solve(r1, r2, r3, dx, dy, dz);
  const double scale = 1.0 + std::max({r1.lpNorm<Eigen::Infinity>(),
                                       r2.size() ? r2.lpNorm<Eigen::Infinity>() : 0.0,
                                       r3.lpNorm<Eigen::Infinity>()});
  for (int it = 0; it < 3; ++it) {
    const VecR e1 = r1 - A_.transpose() * dy - G_.transpose() * dz;
    const VecR e2 = r2 - A_ * dx;
    const VecR e3 = r3 - G_ * dx + apply_w(apply_w(dz));
    const double err = std::max({e1.lpNorm<Eigen::Infinity>(),
                                 e2.size() ? e2.lpNorm<Eigen::Infinity>() : 0.0,
                                 e3.lpNorm<Eigen::Infinity>()});
    if (!(err > 1e-15 * scale)) break;
    VecR cx, cy, cz;
    reduced_solve(e1, e2, e3, cx, cy, cz);
    dx += cx;
    dy += cy;
    dz += cz;
  }
}

SocpSolution InteriorPoint::run() {
  const int ncones = static_cast<int>(lay_.dim.size());
  const double degree = ncones + 1.0;
  const VecR e = identity();
  const double norm_b = std::max(1.0, b_.size() ? b_.norm() : 0.0);
  const double norm_h = std::max(1.0, h_.norm());
  const double norm_c = std::max(1.0, c_.norm());

  // Initial point: least-squares primal and minimum-norm dual, pushed into the cone.
  set_identity_scaling();
  factor();
  VecR x, y, z, s, tmp_y, tmp_z, tmp_x;
  solve_kkt(VecR::Zero(n_), b_, h_, x, tmp_y, tmp_z);
  s = -tmp_z;
  solve_kkt(-c_, VecR::Zero(p_), VecR::Zero(lay_.m), tmp_x, y, z);
  shift_into_cone(s);
  shift_into_cone(z);
  double tau = 1.0;
  double kappa = 1.0;

  SocpSolution best;
  best.kkt_residual = kInf;
  best.status = SocpStatus::max_iter;
  int stalls = 0;

  auto record = [&](SocpStatus status, double kkt, int iter) {
    best.x = x / tau;
    best.y = y / tau;
    best.z.clear();
    for (int i = 0; i < ncones; ++i) best.z.push_back(z.segment(lay_.off[i], lay_.dim[i]) / tau);
    best.kkt_residual = kkt;
    best.status = status;
    best.objective = c_.dot(best.x);
    best.iterations = iter;
  };

  for (int iter = 0; iter <= opts_.max_iter; ++iter) {
    const VecR aty_gtz = A_.transpose() * y + G_.transpose() * z;
    const VecR rx = aty_gtz + c_ * tau;
    const VecR ax = A_ * x;
    const VecR ry = b_ * tau - ax;
    const VecR gxs = G_ * x + s;
    const VecR rz = gxs - h_ * tau;
    const double cx = c_.dot(x);
    const double hz_by = h_.dot(z) + (p_ > 0 ? b_.dot(y) : 0.0);
    const double rt = kappa + cx + hz_by;
    const double mu = (s.dot(z) + tau * kappa) / degree;

    // Convergence on the de-homogenized iterate.
    const double pres = std::max(p_ > 0 ? (ax / tau - b_).norm() / norm_b : 0.0,
                                 (gxs / tau - h_).norm() / norm_h);
    const double dres = (aty_gtz / tau + c_).norm() / norm_c;
    const double pcost = cx / tau;
    const double dcost = -hz_by / tau;
    const double gap = s.dot(z) / (tau * tau);
    double relgap = kInf;
    if (pcost < 0.0) {
      relgap = gap / -pcost;
    } else if (dcost > 0.0) {
      relgap = gap / dcost;
    }
    const double kkt = std::max({pres, dres, std::min(gap, relgap)});
    if (std::isfinite(kkt) && kkt < best.kkt_residual) record(SocpStatus::max_iter, kkt, iter);
    if (kkt <= opts_.tol) {
      record(SocpStatus::optimal, kkt, iter);
      return best;
    }

    // Certificates of infeasibility once tau has collapsed relative to kappa.
    if (tau < kappa) {
      if (hz_by < 0.0 && aty_gtz.norm() / norm_c <= opts_.tol * -hz_by) {
        best.status = SocpStatus::infeasible;
        best.iterations = iter;
        return best;
      }
      if (cx < 0.0 &&
          std::max(ax.norm() / norm_b, gxs.norm() / norm_h) <= opts_.tol * -cx) {
        best.status = SocpStatus::unbounded;
        best.iterations = iter;
        return best;
      }
    }
    if (iter == opts_.max_iter) break;

    // Nesterov-Todd scaling at (s, z): W z = W^{-1} s = lambda, stored per
    // cone as eta and the hyperbolic unit vector wbar.
    for (int i = 0; i < ncones; ++i) {
      const int o = lay_.off[i];
      const int q = lay_.dim[i];
      const auto si = s.segment(o, q);
      const auto zi = z.segment(o, q);
      const double sres = std::sqrt(std::max(q > 1 ? soc_residual(si) : si(0) * si(0), 1e-300));
      const double zres = std::sqrt(std::max(q > 1 ? soc_residual(zi) : zi(0) * zi(0), 1e-300));
      const VecR sbar = si / sres;
      const VecR zbar = zi / zres;
      const double gamma = std::sqrt(std::max((1.0 + sbar.dot(zbar)) / 2.0, 1e-300));
      VecR w(q);
      w(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
      if (q > 1) w.tail(q - 1) = (sbar.tail(q - 1) - zbar.tail(q - 1)) / (2.0 * gamma);
      wbar_[i] = w;
      eta_[i] = std::sqrt(sres / zres);
    }
    const VecR lambda = apply_w(z);
    factor();

    VecR x2, y2, z2;
    solve_kkt(-c_, b_, h_, x2, y2, z2);
    const double den2 = c_.dot(x2) + (p_ > 0 ? b_.dot(y2) : 0.0) + h_.dot(z2) - kappa / tau;

    struct Direction {
      VecR dx, dy, dz, ds;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto direction = [&](double keep, const VecR& rs, double rk) {
      Direction d;
      VecR x1, y1, z1;
      const VecR ldiv = jordan_div(lambda, rs);
      solve_kkt(-keep * rx, keep * ry, -keep * rz + apply_w(ldiv), x1, y1, z1);
      const double num = -keep * rt + rk / tau -
                         (c_.dot(x1) + (p_ > 0 ? b_.dot(y1) : 0.0) + h_.dot(z1));
      d.dtau = num / den2;
      d.dx = x1 + d.dtau * x2;
      d.dy = y1 + d.dtau * y2;
      d.dz = z1 + d.dtau * z2;
      d.ds = -apply_w(ldiv + apply_w(d.dz));
      d.dkappa = (-rk - kappa * d.dtau) / tau;
      return d;
    };
    auto step_length = [&](const Direction& d) {
      double a = std::min(max_step(s, d.ds), max_step(z, d.dz));
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    const Direction aff = direction(1.0, jordan(lambda, lambda), tau * kappa);
    const double alpha_aff = std::min(1.0, step_length(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    const VecR ds_scaled = apply_w_inv(aff.ds);
    const VecR dz_scaled = apply_w(aff.dz);
    const VecR rs = jordan(lambda, lambda) + jordan(ds_scaled, dz_scaled) - sigma * mu * e;
    const double rk = tau * kappa + aff.dtau * aff.dkappa - sigma * mu;
    const Direction comb = direction(1.0 - sigma, rs, rk);
    const double alpha = std::min(1.0, 0.99 * step_length(comb));

    if (!std::isfinite(alpha) || !comb.dx.allFinite() || !comb.dz.allFinite()) break;
    if (alpha < 1e-12) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
    x += alpha * comb.dx;
    y += alpha * comb.dy;
    z += alpha * comb.dz;
    s += alpha * comb.ds;
    tau += alpha * comb.dtau;
    kappa += alpha * comb.dkappa;
  }
  return best;
}

}  // namespace

SocpSolution solve_socp(const SocpProblem& problem, const SocpOptions& options) {
  problem.validate();
  InteriorPoint ipm(problem, options);
  return ipm.run();
}

}  // namespace cfisac::conic
