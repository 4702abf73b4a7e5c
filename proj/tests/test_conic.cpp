#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cfisac/conic.hpp"
#include "cfisac/errors.hpp"

using namespace cfisac;
using namespace cfisac::conic;

namespace {

SocConstraint cone(MatR A, VecR b, VecR f, double d) { return {std::move(A), std::move(b), std::move(f), d}; }

// Random SOCP that is strictly feasible at x0 by construction and bounded by
// a ball of radius R around the origin.
SocpProblem random_problem(std::mt19937_64& rng, int n, int m, VecR& x0) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> margin(0.1, 1.0);
  SocpProblem p;
  p.n = n;
  p.c = VecR::NullaryExpr(n, [&] { return z(rng); });
  x0 = VecR::NullaryExpr(n, [&] { return 0.3 * z(rng); });
  for (int i = 0; i < m; ++i) {
    const int rows = 1 + static_cast<int>(rng() % 4);
    MatR A = MatR::NullaryExpr(rows, n, [&] { return z(rng); });
    VecR b = VecR::NullaryExpr(rows, [&] { return z(rng); });
    VecR f = VecR::NullaryExpr(n, [&] { return 0.5 * z(rng); });
    const double d = (A * x0 + b).norm() - f.dot(x0) + margin(rng);
    p.cones.push_back(cone(A, b, f, d));
  }
  p.cones.push_back(cone(MatR::Identity(n, n), VecR::Zero(n), VecR::Zero(n), 3.0 + x0.norm()));
  return p;
}

}  // namespace

TEST_CASE("norm of a constant") {
  SocpProblem p;
  p.n = 1;
  p.c = VecR::Ones(1);
  p.cones.push_back(cone(MatR::Zero(2, 1), (VecR(2) << 3, 4).finished(), VecR::Ones(1), 0.0));
  const auto s = solve_socp(p);
  CHECK(s.status == SocpStatus::optimal);
  CHECK(s.x(0) == doctest::Approx(5.0).epsilon(1e-7));
  CHECK(s.kkt_residual <= 1e-7);
}

TEST_CASE("scalar bound") {
  SocpProblem p;
  p.n = 1;
  p.c = VecR::Ones(1);
  p.cones.push_back(cone(MatR::Zero(1, 1), VecR::Ones(1), VecR::Ones(1), 0.0));
  const auto s = solve_socp(p);
  CHECK(s.status == SocpStatus::optimal);
  CHECK(s.x(0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("infeasible, unbounded and equality-constrained problems") {
  SocpProblem bad;
  bad.n = 1;
  bad.c = VecR::Ones(1);
  bad.cones.push_back(cone(MatR::Identity(1, 1), VecR::Zero(1), VecR::Zero(1), -1.0));
  CHECK(solve_socp(bad).status == SocpStatus::infeasible);

  SocpProblem open;
  open.n = 1;
  open.c = VecR::Ones(1);
  open.cones.push_back(cone(MatR::Zero(0, 1), VecR::Zero(0), -VecR::Ones(1), 0.0));
  CHECK(solve_socp(open).status == SocpStatus::unbounded);

  SocpProblem eq;
  eq.n = 3;
  eq.c = (VecR(3) << 0, 0, 1).finished();
  MatR A = MatR::Zero(2, 3);
  A(0, 0) = A(1, 1) = 1.0;
  eq.cones.push_back(cone(A, VecR::Zero(2), (VecR(3) << 0, 0, 1).finished(), 0.0));
  eq.E = (MatR(1, 3) << 1, 1, 0).finished();
  eq.e = VecR::Constant(1, 2.0);
  const auto s = solve_socp(eq);
  CHECK(s.status == SocpStatus::optimal);
  CHECK(s.x(2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
  CHECK(s.x(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("malformed problems are rejected") {
  SocpProblem p;
  p.n = 2;
  p.c = VecR::Ones(2);
  CHECK_THROWS_AS(solve_socp(p), InvalidArgument);  // no constraints
  p.cones.push_back(cone(MatR::Zero(1, 3), VecR::Zero(1), VecR::Zero(2), 1.0));
  CHECK_THROWS_AS(solve_socp(p), InvalidArgument);
  p.cones.back() = cone(MatR::Zero(1, 2), VecR::Zero(2), VecR::Zero(2), 1.0);
  CHECK_THROWS_AS(solve_socp(p), InvalidArgument);
}

TEST_CASE("random problems against a barrier-method oracle") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 25; ++t) {
    VecR x0;
    const auto p = random_problem(rng, 2 + t % 6, 1 + t % 5, x0);
    const auto s = solve_socp(p);
    REQUIRE(s.status == SocpStatus::optimal);
    CHECK(s.kkt_residual <= 1e-7);
    const VecR ref = oracle::barrier_socp(p, x0);
    const double scale = 1.0 + std::abs(p.c.dot(ref));
    CHECK(std::abs(s.objective - p.c.dot(ref)) <= 1e-6 * scale);
    CHECK(std::abs(p.c.dot(s.x) - p.c.dot(ref)) <= 1e-6 * scale);
    for (const auto& k : p.cones) CHECK((k.A * s.x + k.b).norm() <= k.f.dot(s.x) + k.d + 1e-7);

    const auto again = solve_socp(p);
    CHECK(again.x == s.x);
    CHECK(again.iterations == s.iterations);
  }
}

TEST_CASE("generalized eigenpair closed forms") {
  MatC B = MatC::Zero(2, 2);
  B(0, 0) = 4.0;
  B(1, 1) = 1.0;
  auto p = max_generalized_eigenpair(B, MatC::Identity(2, 2));
  CHECK(p.value == doctest::Approx(4.0));
  CHECK(std::abs(p.vector(0) - cd(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(p.vector(1)) < 1e-12);

  std::mt19937_64 rng(7);
  const VecC b = oracle::random_matrix(rng, 5, 1).col(0);
  p = max_generalized_eigenpair(b * b.adjoint(), MatC::Identity(5, 5));
  CHECK(p.value == doctest::Approx(b.squaredNorm()).epsilon(1e-12));
  CHECK(std::abs(std::abs(p.vector.dot(b.normalized())) - 1.0) < 1e-12);

  p = max_generalized_eigenpair(MatC::Zero(3, 3), MatC::Identity(3, 3));
  CHECK(p.value == 0.0);
  CHECK(p.vector(0) == cd(1.0, 0.0));

  MatC notpd = MatC::Identity(2, 2);
  notpd(1, 1) = -1.0;
  CHECK_THROWS_AS(max_generalized_eigenpair(B, notpd), NumericalDomain);
  CHECK_THROWS_AS(max_generalized_eigenpair(B, MatC::Identity(3, 3)), InvalidArgument);
}

TEST_CASE("generalized eigenpair beats random directions") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 5; ++t) {
    const MatC X = oracle::random_matrix(rng, 6, 3);
    const MatC Y = oracle::random_matrix(rng, 6, 6);
    const MatC B = X * X.adjoint();
    const MatC C = Y * Y.adjoint() + 0.1 * MatC::Identity(6, 6);
    const auto p = max_generalized_eigenpair(B, C);
    CHECK(p.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const double resid = (B * p.vector - p.value * C * p.vector).norm();
    CHECK(resid <= 1e-8 * (B.norm() + p.value * C.norm()));
    const double rq = p.vector.dot(B * p.vector).real() / p.vector.dot(C * p.vector).real();
    CHECK(rq == doctest::Approx(p.value).epsilon(1e-10));
    for (int r = 0; r < 10000; ++r) {
      const VecC v = oracle::random_unit(rng, 6);
      REQUIRE(v.dot(B * v).real() / v.dot(C * v).real() <= p.value * (1.0 + 1e-12));
    }
  }
}
