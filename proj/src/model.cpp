#include "cfisac/model.hpp"

#include <algorithm>
#include <numeric>

#include "cfisac/errors.hpp"

namespace cfisac {

ModeVector::ModeVector(std::vector<std::uint8_t> alpha) : alpha_(std::move(alpha)) {
  for (auto& a : alpha_) {
    if (a > 1) throw InvalidArgument("mode entries must be 0 or 1");
  }
}

ModeVector ModeVector::all_transmit(int num_bs) {
  return ModeVector(std::vector<std::uint8_t>(static_cast<std::size_t>(num_bs), 1));
}

ModeVector ModeVector::from_bits(const std::string& bits) {
  std::vector<std::uint8_t> alpha;
  for (char c : bits) {
    if (c != '0' && c != '1') throw InvalidArgument("mode bit string may only contain 0 and 1");
    alpha.push_back(c == '1' ? 1 : 0);
  }
  return ModeVector(std::move(alpha));
}

int ModeVector::num_tx() const {
  return static_cast<int>(std::count(alpha_.begin(), alpha_.end(), std::uint8_t{1}));
}

std::vector<int> ModeVector::tx_set() const {
  std::vector<int> out;
  for (int j = 0; j < size(); ++j) {
    if (alpha_[j]) out.push_back(j);
  }
  return out;
}

std::vector<int> ModeVector::rx_set() const {
  std::vector<int> out;
  for (int j = 0; j < size(); ++j) {
    if (!alpha_[j]) out.push_back(j);
  }
  return out;
}

ModeVector ModeVector::with_receiver(int j) const {
  ModeVector out = *this;
  out.alpha_.at(j) = 0;
  return out;
}

bool ModeVector::is_feasible(int antennas, int num_users) const {
  const int tx = num_tx();
  return tx >= 1 && antennas * tx >= num_users && tx <= size() - 1;
}

std::string ModeVector::bits() const {
  std::string s;
  for (auto a : alpha_) s.push_back(a ? '1' : '0');
  return s;
}

Beamformer Beamformer::zeros(const NetworkConfig& config) {
  return {MatC::Zero(config.stacked_rows(), config.num_columns())};
}

VecC Beamformer::stacked() const {
  return Eigen::Map<const VecC>(w.data(), w.size());
}

Beamformer Beamformer::from_stacked(const VecC& w_hat, int rows, int cols) {
  if (w_hat.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw InvalidArgument("stacked beamformer has the wrong length");
  }
  return {Eigen::Map<const MatC>(w_hat.data(), rows, cols)};
}

double Beamformer::power(const ModeVector& mode, int antennas) const {
  double p = 0.0;
  for (int j : mode.tx_set()) p += w.middleRows(j * antennas, antennas).squaredNorm();
  return p;
}

MatC SensingMatrices::signal_matrix(int target, const MatC& w) const {
  const MatC x = a_hat.at(target) * w;
  return x * x.adjoint();
}

MatC SensingMatrices::interference_matrix(int target, const MatC& w) const {
  MatC c = MatC::Zero(rows(), rows());
  for (int s = 0; s < num_targets(); ++s) {
    if (s == target) continue;
    const MatC x = a_hat[s] * w;
    c.noalias() += x * x.adjoint();
  }
  const MatC y = g_hat.transpose() * w;
  c.noalias() += y * y.adjoint();
  c.diagonal() += (sensing_noise * q_diag).cast<cd>();
  return c;
}

SensingMatrices assemble_sensing(const Scenario& scenario, const ModeVector& mode) {
  const int J = scenario.num_bs();
  const int M = scenario.antennas();
  const int L = scenario.num_targets();
  if (mode.size() != J) throw ModeInfeasible("mode vector length differs from the BS count");
  if (mode.num_tx() < 1 || M * mode.num_tx() < scenario.num_users()) {
    throw ModeInfeasible("mode " + mode.bits() + " has too few transmit antennas");
  }

  SensingMatrices mats;
  mats.antennas = M;
  mats.sensing_noise = scenario.config.sensing_noise;
  mats.q_diag = VecR::Zero(J * M);
  for (int j : mode.rx_set()) mats.q_diag.segment(j * M, M).setOnes();

  std::vector<std::vector<VecC>> steer(J, std::vector<VecC>(L));
  for (int j = 0; j < J; ++j) {
    for (int l = 0; l < L; ++l) steer[j][l] = steering_vector(scenario, j, l);
  }

  mats.a_hat.assign(L, MatC::Zero(J * M, J * M));
  for (int l = 0; l < L; ++l) {
    for (int j : mode.rx_set()) {
      for (int i : mode.tx_set()) {
        // transpose, not adjoint, on the departure side
        mats.a_hat[l].block(j * M, i * M, M, M) =
            scenario.xi[l](j, i) * steer[j][l] * steer[i][l].transpose();
      }
    }
  }

  mats.g_hat = MatC::Zero(J * M, J * M);
  for (int i : mode.tx_set()) {
    for (int j : mode.rx_set()) mats.g_hat.block(i * M, j * M, M, M) = scenario.g[i][j];
  }
  return mats;
}

VecC effective_channel(const Scenario& scenario, const ModeVector& mode, int user) {
  const int M = scenario.antennas();
  if (user < 0 || user >= scenario.num_users()) throw InvalidArgument("user index out of range");
  VecC h = VecC::Zero(scenario.num_bs() * M);
  for (int j : mode.tx_set()) h.segment(j * M, M) = scenario.h[j][user];
  return h;
}

double comm_sinr(const Scenario& scenario, const ModeVector& mode, const Beamformer& bf, int user) {
  if (user < 0 || user >= scenario.num_users()) throw InvalidArgument("user index out of range");
  const VecC h = effective_channel(scenario, mode, user);
  const Eigen::VectorXcd gains = bf.w.adjoint() * h;  // conj(h^H w_i)
  const double signal = std::norm(gains(user));
  const double total = gains.squaredNorm();
  return signal / (total - signal + scenario.config.comm_noise);
}

std::vector<double> comm_sinrs(const Scenario& scenario, const ModeVector& mode,
                               const Beamformer& bf) {
  std::vector<double> out;
  for (int k = 0; k < scenario.num_users(); ++k) out.push_back(comm_sinr(scenario, mode, bf, k));
  return out;
}

double sensing_sinr(const SensingMatrices& mats, const Beamformer& bf, const VecC& u, int target) {
  if (target < 0 || target >= mats.num_targets()) throw InvalidArgument("target index out of range");
  const double rx_energy = (mats.q_diag.array() * u.array().abs2()).sum();
  if (!(rx_energy > 0.0)) throw InvalidFilter("receive filter is zero on every receiver block");
  const double num = u.dot(mats.signal_matrix(target, bf.w) * u).real();
  const double den = u.dot(mats.interference_matrix(target, bf.w) * u).real();
  return num / den;
}

double sum_sensing_sinr(const SensingMatrices& mats, const Beamformer& bf,
                        const FilterBank& filters) {
  if (static_cast<int>(filters.u.size()) != mats.num_targets()) {
    throw InvalidArgument("filter bank size differs from target count");
  }
  double total = 0.0;
  for (int l = 0; l < mats.num_targets(); ++l) total += sensing_sinr(mats, bf, filters.u[l], l);
  return total;
}

QuadraticForms build_quadratic_forms(const SensingMatrices& mats, const FilterBank& filters) {
  const int L = mats.num_targets();
  if (static_cast<int>(filters.u.size()) != L) {
    throw InvalidArgument("filter bank size differs from target count");
  }
  QuadraticForms forms;
  forms.v.assign(L, std::vector<VecC>(L));
  forms.g.resize(L);
  forms.c_r.resize(L);
  for (int l = 0; l < L; ++l) {
    const VecC& u = filters.u[l];
    for (int s = 0; s < L; ++s) forms.v[l][s] = mats.a_hat[s].adjoint() * u;
    forms.g[l] = mats.g_hat.conjugate() * u;
    forms.c_r(l) = mats.sensing_noise * (mats.q_diag.array() * u.array().abs2()).sum();
  }
  return forms;
}

double QuadraticForms::d_form(int l, int s, const MatC& w) const {
  return (w.adjoint() * v.at(l).at(s)).squaredNorm();
}

double QuadraticForms::f_form(int l, const MatC& w) const {
  return (w.adjoint() * g.at(l)).squaredNorm();
}

double QuadraticForms::denominator(int l, const MatC& w) const {
  double den = f_form(l, w) + c_r(l);
  for (int s = 0; s < num_targets(); ++s) {
    if (s != l) den += d_form(l, s, w);
  }
  return den;
}

namespace {

MatC kron_identity(const VecC& vec, int columns) {
  const Eigen::Index n = vec.size();
  const MatC block = vec * vec.adjoint();
  MatC out = MatC::Zero(n * columns, n * columns);
  for (int i = 0; i < columns; ++i) out.block(i * n, i * n, n, n) = block;
  return out;
}

}  // namespace

MatC QuadraticForms::explicit_d(int l, int s, int columns) const {
  return kron_identity(v.at(l).at(s), columns);
}

MatC QuadraticForms::explicit_f(int l, int columns) const {
  return kron_identity(g.at(l), columns);
}

VecR omega_mask(const ModeVector& mode, int antennas, int columns) {
  const int rows = mode.size() * antennas;
  VecR nu = VecR::Zero(static_cast<Eigen::Index>(rows) * columns);
  for (int c = 0; c < columns; ++c) {
    for (int j : mode.tx_set()) nu.segment(c * rows + j * antennas, antennas).setOnes();
  }
  return nu;
}

void apply_tx_mask(MatC& w, const ModeVector& mode, int antennas) {
  for (int j : mode.rx_set()) w.middleRows(j * antennas, antennas).setZero();
}

}  // namespace cfisac
