#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cfisac/errors.hpp"
#include "cfisac/subproblems.hpp"

using namespace cfisac;

namespace {

// Hand-built scenario: one BS per entry of `channels` (each M x K).
Scenario manual(const std::vector<MatC>& channels, int L = 1) {
  Scenario s;
  const int J = static_cast<int>(channels.size());
  const int M = static_cast<int>(channels[0].rows());
  const int K = static_cast<int>(channels[0].cols());
  s.config.num_bs = J;
  s.config.antennas = M;
  s.config.num_users = K;
  s.config.num_targets = L;
  s.config.comm_noise = 1e-11;
  s.config.set_uniform_gamma(4.0);
  s.h.assign(J, std::vector<VecC>(K));
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) s.h[j][k] = channels[j].col(k);
  }
  s.theta = MatR::Zero(J, L);
  s.beta = MatR::Constant(J, L, 1e-4);
  return s;
}

}  // namespace

TEST_CASE("single-user power minimization is the matched filter") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    const MatC h = 1e-4 * oracle::random_matrix(rng, 2, 1);
    const Scenario s = manual({h, oracle::random_matrix(rng, 2, 1)});
    const double gamma = 3.0 + t;
    const auto r = solve_power_min(s, {0}, {gamma});
    const double expect = gamma * s.config.comm_noise / h.squaredNorm();
    CHECK(r.total == doctest::Approx(expect).epsilon(1e-6));
    CHECK(r.bs_power[1] == 0.0);
    // beam is aligned with h
    const VecC w = r.comm.col(0).head(2);
    CHECK(std::abs(w.dot(h.col(0))) == doctest::Approx(w.norm() * h.norm()).epsilon(1e-6));
  }
}

TEST_CASE("power vanishes with the SINR target") {
  const NetworkConfig c;
  const Scenario s = generate_scenario(c, 3);
  const auto one = solve_power_min(s, {0, 1, 2}, std::vector<double>(3, 1.0));
  const auto tiny = solve_power_min(s, {0, 1, 2}, std::vector<double>(3, 1e-9));
  CHECK(tiny.total <= 1e-7 * one.total);
}

TEST_CASE("orthogonal users decouple") {
  MatC h = MatC::Zero(2, 2);
  h(0, 0) = cd(3e-5, 1e-5);
  h(1, 1) = cd(-2e-5, 4e-5);
  const Scenario s = manual({h, h});
  const std::vector<double> gamma = {2.0, 5.0};
  const auto r = solve_power_min(s, {0}, gamma);
  const double expect = gamma[0] * s.config.comm_noise / std::norm(h(0, 0)) +
                        gamma[1] * s.config.comm_noise / std::norm(h(1, 1));
  CHECK(r.total == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("power-min meets every target with comm-only interference") {
  const NetworkConfig c;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scenario s = generate_scenario(c, seed);
    const ModeVector mode = ModeVector::from_bits("110101");
    const auto r = solve_power_min(s, mode.tx_set(), c.gamma);
    Beamformer bf = Beamformer::zeros(c);
    bf.w.leftCols(c.num_users) = r.comm;
    double total = 0.0;
    for (int j = 0; j < c.num_bs; ++j) {
      CHECK(r.bs_power[j] == doctest::Approx(bf.w.middleRows(j * 2, 2).squaredNorm()).epsilon(1e-12));
      total += r.bs_power[j];
      if (!mode.is_tx(j)) CHECK(r.bs_power[j] == 0.0);
    }
    CHECK(total == doctest::Approx(r.total).epsilon(1e-12));
    for (int k = 0; k < c.num_users; ++k) CHECK(comm_sinr(s, mode, bf, k) >= c.gamma[k] * (1.0 - 1e-6));
  }
  const Scenario s = generate_scenario(c, 1);
  CHECK_THROWS_AS(solve_power_min(s, {0}, c.gamma), InvalidArgument);
  CHECK_THROWS_AS(solve_power_min(s, {}, c.gamma), InvalidArgument);
}

TEST_CASE("null-space precoder") {
  const NetworkConfig c;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scenario s = generate_scenario(c, seed);
    const std::vector<int> tx = {0, 2, 3, 5};
    const double P = 0.25 + 0.1 * seed;
    const auto r = nullspace_precoder(s, tx, P);
    CHECK_FALSE(r.degenerate);
    CHECK(r.sensing.squaredNorm() == doctest::Approx(P).epsilon(1e-9));
    double leak = 0.0, scale = 0.0;
    for (int k = 0; k < c.num_users; ++k) {
      const VecC h = effective_channel(s, ModeVector::from_bits("101101"), k);
      leak = std::max(leak, (r.sensing.adjoint() * h).cwiseAbs().maxCoeff());
      scale = std::max(scale, h.norm() * r.sensing.norm());
    }
    CHECK(leak <= 1e-8);
    CHECK(leak <= 1e-12 * scale);
    for (int j : {1, 4}) CHECK(r.sensing.middleRows(j * 2, 2).norm() == 0.0);
    // every sensing column is the same vector
    for (int m = 1; m < 2; ++m) CHECK((r.sensing.col(m) - r.sensing.col(0)).norm() == 0.0);
  }
}

TEST_CASE("precoder corner cases") {
  std::mt19937_64 rng(9);
  const VecC a1 = oracle::random_matrix(rng, 4, 1).col(0);
  const VecC a2 = oracle::random_matrix(rng, 4, 1).col(0);
  // no users: identity projector
  const auto r = nullspace_precoder(MatC(4, 0), {a1, a2}, 2, 2.0);
  const VecC dir = (a1 / a1.norm() + a2 / a2.norm()).normalized();
  CHECK((r.sensing.col(0) - dir).norm() < 1e-12);
  CHECK(r.sensing.squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));

  // steering inside range(H): nothing survives
  MatC H(4, 2);
  H.col(0) = a1;
  H.col(1) = a2;
  const auto d = nullspace_precoder(H, {a1, 2.0 * a2}, 2, 1.0);
  CHECK(d.degenerate);
  CHECK(d.sensing.norm() == 0.0);
  CHECK_THROWS_AS(nullspace_precoder(H, {a1}, 2, -1.0), InvalidArgument);

  // zero budget
  CHECK(nullspace_precoder(MatC(4, 0), {a1}, 2, 0.0).sensing.norm() == 0.0);
}
