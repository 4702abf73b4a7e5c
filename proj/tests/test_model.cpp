#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cfisac/errors.hpp"
#include "cfisac/model.hpp"
#include "socp_builders.hpp"

using namespace cfisac;

namespace {

NetworkConfig small_config(int J, int K, int L, int M) {
  NetworkConfig c;
  c.num_bs = J;
  c.num_users = K;
  c.num_targets = L;
  c.antennas = M;
  c.set_uniform_gamma(2.0);
  return c;
}

MatC random_beams(std::mt19937_64& rng, const NetworkConfig& c, const ModeVector& mode, double scale = 1.0) {
  MatC w = scale * oracle::random_matrix(rng, c.stacked_rows(), c.num_columns());
  apply_tx_mask(w, mode, c.antennas);
  return w;
}

std::vector<int> rx_rows(const ModeVector& mode, int M) {
  std::vector<int> rows;
  for (int j : mode.rx_set()) {
    for (int m = 0; m < M; ++m) rows.push_back(j * M + m);
  }
  return rows;
}

// Scenario with the BS indices relabelled by perm (new j = perm[old j]).
Scenario permute(const Scenario& s, const std::vector<int>& perm) {
  Scenario p = s;
  const int J = s.config.num_bs;
  for (int j = 0; j < J; ++j) {
    p.bs_pos[perm[j]] = s.bs_pos[j];
    p.h[perm[j]] = s.h[j];
    p.theta.row(perm[j]) = s.theta.row(j);
    p.beta.row(perm[j]) = s.beta.row(j);
    for (int i = 0; i < J; ++i) {
      p.g[perm[i]][perm[j]] = s.g[i][j];
      for (std::size_t l = 0; l < s.xi.size(); ++l) p.xi[l](perm[j], perm[i]) = s.xi[l](j, i);
    }
  }
  return p;
}

MatC permute_rows(const MatC& w, const std::vector<int>& perm, int M) {
  MatC out(w.rows(), w.cols());
  for (std::size_t j = 0; j < perm.size(); ++j) out.middleRows(perm[j] * M, M) = w.middleRows(j * M, M);
  return out;
}

}  // namespace

TEST_CASE("mode vector") {
  const ModeVector m = ModeVector::from_bits("1010");
  CHECK(m.num_tx() == 2);
  CHECK(m.tx_set() == std::vector<int>{0, 2});
  CHECK(m.rx_set() == std::vector<int>{1, 3});
  CHECK(m.bits() == "1010");
  CHECK(m.with_receiver(0).bits() == "0010");
  CHECK(m.is_feasible(2, 4));
  CHECK_FALSE(m.is_feasible(1, 3));                                // M |T| < K
  CHECK_FALSE(ModeVector::all_transmit(4).is_feasible(2, 1));     // no receiver
  CHECK_FALSE(ModeVector::from_bits("0000").is_feasible(2, 1));  // no transmitter
  CHECK_THROWS_AS(ModeVector::from_bits("10a"), InvalidArgument);
}

TEST_CASE("assemble_sensing masks") {
  const NetworkConfig c = small_config(3, 2, 2, 2);
  const Scenario s = generate_scenario(c, 4);

  const auto all = assemble_sensing(s, ModeVector::all_transmit(3));
  for (const auto& a : all.a_hat) CHECK(a.norm() == 0.0);
  CHECK(all.g_hat.norm() == 0.0);

  for (const auto& bits : {"110", "101", "011", "100", "010", "001"}) {
    const ModeVector mode = ModeVector::from_bits(bits);
    const auto mats = assemble_sensing(s, mode);
    for (int l = 0; l < 2; ++l) {
      const MatC ref = oracle::a_hat(s, mode, l);
      CHECK((mats.a_hat[l] - ref).norm() <= 1e-13 * ref.norm());
      for (int j : mode.tx_set()) CHECK(mats.a_hat[l].middleRows(j * 2, 2).norm() == 0.0);
      for (int j : mode.rx_set()) CHECK(mats.a_hat[l].middleCols(j * 2, 2).norm() == 0.0);
    }
    CHECK((mats.g_hat - oracle::g_hat(s, mode)).norm() == 0.0);
  }
  CHECK_THROWS_AS(assemble_sensing(s, ModeVector::from_bits("10")), ModeInfeasible);
}

TEST_CASE("two-BS echo block") {
  const NetworkConfig c = small_config(2, 1, 1, 3);
  const Scenario s = generate_scenario(c, 2);
  const auto mats = assemble_sensing(s, ModeVector::from_bits("10"));
  const MatC expect = s.xi[0](1, 0) * steering_vector(s, 1, 0) * steering_vector(s, 0, 0).transpose();
  CHECK((mats.a_hat[0].block(3, 0, 3, 3) - expect).norm() <= 1e-15 * expect.norm());
  CHECK(mats.a_hat[0].block(0, 0, 3, 6).norm() == 0.0);
  CHECK(mats.a_hat[0].block(3, 3, 3, 3).norm() == 0.0);
}

TEST_CASE("receiver-restricted C is positive definite") {
  std::mt19937_64 rng(8);
  const NetworkConfig c = small_config(5, 2, 3, 2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scenario s = generate_scenario(c, seed);
    const ModeVector mode = ModeVector::from_bits("11010");
    const auto mats = assemble_sensing(s, mode);
    const MatC w = random_beams(rng, c, mode);
    const auto rows = rx_rows(mode, 2);
    for (int l = 0; l < 3; ++l) {
      const MatC C = mats.interference_matrix(l, w);
      MatC Cr(rows.size(), rows.size());
      for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < rows.size(); ++b) Cr(a, b) = C(rows[a], rows[b]);
      }
      Eigen::SelfAdjointEigenSolver<MatC> eig(Cr);
      CHECK(eig.eigenvalues().minCoeff() >= c.sensing_noise - 1e-12);
    }
  }
}

TEST_CASE("comm_sinr") {
  // J=1, K=1, M=1: |2|^2 / 1
  Scenario s;
  s.config = small_config(2, 1, 1, 1);
  s.config.num_bs = 1;
  s.config.comm_noise = 1.0;
  s.h = {{VecC::Constant(1, cd(1.0, 0.0))}};
  Beamformer bf{MatC::Zero(1, 2)};
  bf.w(0, 0) = 2.0;
  CHECK(comm_sinr(s, ModeVector::from_bits("1"), bf, 0) == doctest::Approx(4.0));
  CHECK(effective_channel(s, ModeVector::from_bits("1"), 0) == s.h[0][0]);
  CHECK(comm_sinr(s, ModeVector::from_bits("1"), Beamformer{MatC::Zero(1, 2)}, 0) == 0.0);
  CHECK_THROWS_AS(comm_sinr(s, ModeVector::from_bits("1"), bf, 1), InvalidArgument);

  std::mt19937_64 rng(3);
  const NetworkConfig c = small_config(4, 3, 2, 2);
  const Scenario r = generate_scenario(c, 11);
  CHECK(effective_channel(r, ModeVector::from_bits("0000"), 1).norm() == 0.0);
  for (const auto& bits : {"1110", "0111", "1011"}) {
    const ModeVector mode = ModeVector::from_bits(bits);
    const MatC w = random_beams(rng, c, mode);
    for (int k = 0; k < 3; ++k) {
      CHECK(comm_sinr(r, mode, Beamformer{w}, k) ==
            doctest::Approx(oracle::comm_sinr(r, mode, w, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sensing_sinr") {
  std::mt19937_64 rng(21);
  const NetworkConfig c = small_config(3, 2, 2, 2);
  const Scenario s = generate_scenario(c, 5);
  const ModeVector mode = ModeVector::from_bits("101");
  const auto mats = assemble_sensing(s, mode);
  const auto rows = rx_rows(mode, 2);
  const VecC u = oracle::random_supported(rng, 6, rows);

  CHECK(sensing_sinr(mats, Beamformer::zeros(c), u, 0) == 0.0);

  const MatC w = random_beams(rng, c, mode);
  for (int l = 0; l < 2; ++l) {
    const double v = sensing_sinr(mats, Beamformer{w}, u, l);
    CHECK(v == doctest::Approx(oracle::sensing_sinr(s, mode, w, u, l)).epsilon(1e-10));
    CHECK(sensing_sinr(mats, Beamformer{w}, cd(-3.0, 0.5) * u, l) == doctest::Approx(v).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sensing_sinr(mats, Beamformer{w}, VecC::Zero(6), 0), InvalidFilter);
  VecC on_tx = VecC::Zero(6);
  on_tx(0) = 1.0;
  CHECK_THROWS_AS(sensing_sinr(mats, Beamformer{w}, on_tx, 0), InvalidFilter);
}

TEST_CASE("quadratic forms agree with matrices") {
  std::mt19937_64 rng(17);
  const NetworkConfig c = small_config(4, 2, 3, 2);
  const Scenario s = generate_scenario(c, 6);
  const ModeVector mode = ModeVector::from_bits("1101");
  const auto mats = assemble_sensing(s, mode);
  const auto rows = rx_rows(mode, 2);
  FilterBank f;
  for (int l = 0; l < 3; ++l) f.u.push_back(oracle::random_supported(rng, 8, rows));
  const auto forms = build_quadratic_forms(mats, f);
  const MatC w = random_beams(rng, c, mode);
  const VecC wh = Beamformer{w}.stacked();

  for (int l = 0; l < 3; ++l) {
    const double bq = f.u[l].dot(mats.signal_matrix(l, w) * f.u[l]).real();
    CHECK(forms.d_form(l, l, w) == doctest::Approx(bq).epsilon(1e-12));
    const double cq = f.u[l].dot(mats.interference_matrix(l, w) * f.u[l]).real();
    CHECK(forms.denominator(l, w) == doctest::Approx(cq).epsilon(1e-12));
    for (int t = 0; t < 3; ++t) {
      const double dx = wh.dot(forms.explicit_d(l, t, c.num_columns()) * wh).real();
      CHECK(forms.d_form(l, t, w) == doctest::Approx(dx).epsilon(1e-10));
    }
    const double fx = wh.dot(forms.explicit_f(l, c.num_columns()) * wh).real();
    CHECK(forms.f_form(l, w) == doctest::Approx(fx).epsilon(1e-10));
  }

  // unit filter on one receiver block
  VecC u = VecC::Zero(8);
  u(4) = cd(0.6, 0.0);
  u(5) = cd(0.0, 0.8);
  FilterBank one{{u, u, u}};
  CHECK(build_quadratic_forms(mats, one).c_r(0) == doctest::Approx(c.sensing_noise).epsilon(1e-14));
}

TEST_CASE("SINRs invariant under BS relabelling") {
  std::mt19937_64 rng(99);
  const NetworkConfig c = small_config(4, 2, 2, 2);
  const Scenario s = generate_scenario(c, 12);
  const ModeVector mode = ModeVector::from_bits("1101");
  const std::vector<int> perm = {2, 0, 3, 1};
  std::vector<std::uint8_t> alpha(4);
  for (int j = 0; j < 4; ++j) alpha[perm[j]] = mode.alpha()[j];
  const ModeVector pmode(alpha);
  const Scenario ps = permute(s, perm);

  const MatC w = random_beams(rng, c, mode);
  const MatC pw = permute_rows(w, perm, 2);
  const VecC u = oracle::random_supported(rng, 8, rx_rows(mode, 2));
  const VecC pu = permute_rows(u, perm, 2);

  const auto mats = assemble_sensing(s, mode);
  const auto pmats = assemble_sensing(ps, pmode);
  for (int l = 0; l < 2; ++l) {
    CHECK(sensing_sinr(pmats, Beamformer{pw}, pu, l) ==
          doctest::Approx(sensing_sinr(mats, Beamformer{w}, u, l)).epsilon(1e-12));
  }
  for (int k = 0; k < 2; ++k) {
    CHECK(comm_sinr(ps, pmode, Beamformer{pw}, k) ==
          doctest::Approx(comm_sinr(s, mode, Beamformer{w}, k)).epsilon(1e-12));
  }
}

TEST_CASE("omega mask and power") {
  std::mt19937_64 rng(1);
  const NetworkConfig c = small_config(5, 3, 2, 2);
  const ModeVector mode = ModeVector::from_bits("10110");
  const VecR nu = omega_mask(mode, 2, c.num_columns());
  CHECK(nu.sum() == doctest::Approx(c.num_columns() * 2 * 3));
  CHECK(((nu.array() == 0.0) || (nu.array() == 1.0)).all());

  MatC w = oracle::random_matrix(rng, c.stacked_rows(), c.num_columns());
  const Beamformer bf{w};
  const VecC wh = bf.stacked();
  CHECK(bf.power(mode, 2) == doctest::Approx((nu.array() * wh.array().abs2()).sum()).epsilon(1e-13));
  CHECK(Beamformer::from_stacked(wh, c.stacked_rows(), c.num_columns()).w == w);
  apply_tx_mask(w, mode, 2);
  for (int j : mode.rx_set()) CHECK(w.middleRows(j * 2, 2).norm() == 0.0);
}

TEST_CASE("real lifting preserves quadratic forms") {
  std::mt19937_64 rng(44);
  const int n = 7;
  const detail::ComplexBlock blk{3, n};
  for (int t = 0; t < 20; ++t) {
    const VecC a = oracle::random_matrix(rng, n, 1).col(0);
    const VecC z = oracle::random_matrix(rng, n, 1).col(0);
    VecR x = VecR::Zero(3 + 2 * n);
    for (int i = 0; i < n; ++i) {
      x(blk.re(i)) = z(i).real();
      x(blk.im(i)) = z(i).imag();
    }
    CHECK((detail::read_complex(x, blk) - z).norm() == 0.0);
    VecR re = VecR::Zero(x.size()), im = VecR::Zero(x.size());
    detail::add_re_row(re, blk, 0, a);
    detail::add_im_row(im, blk, 0, a);
    const cd inner = a.dot(z);  // a^H z
    CHECK(re.dot(x) == doctest::Approx(inner.real()).epsilon(1e-12));
    CHECK(im.dot(x) == doctest::Approx(inner.imag()).epsilon(1e-12));
    // |a^H z|^2 = z^H (a a^H) z
    const double quad = z.dot(a * a.adjoint() * z).real();
    CHECK(re.dot(x) * re.dot(x) + im.dot(x) * im.dot(x) == doctest::Approx(quad).epsilon(1e-12));
  }
}
