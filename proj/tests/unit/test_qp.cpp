#include <doctest.h>

#include <random>

#include "edcps/error.hpp"
#include "edcps/qp.hpp"

using namespace edcps;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

qp::Problem box_problem(int n) {
  qp::Problem p;
  p.hessian = MatrixXd::Identity(n, n) * 2.0;
  p.linear = VectorXd::Zero(n);
  p.eq_matrix.resize(0, n);
  p.eq_rhs.resize(0);
  p.ineq_matrix.resize(0, n);
  p.ineq_rhs.resize(0);
  return p;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("unconstrained minimum") {
  qp::Problem p = box_problem(2);
  p.linear << -2.0, -4.0;  // (x-1)^2 + (y-2)^2 up to a constant
  const auto s = qp::solve(p, VectorXd::Zero(2));
  CHECK(s.x(0) == doctest::Approx(1.0));
  CHECK(s.x(1) == doctest::Approx(2.0));
  CHECK(s.working_set.empty());
}

TEST_CASE("one active inequality") {
  qp::Problem p = box_problem(2);
  p.linear << -2.0, -4.0;
  p.ineq_matrix.resize(1, 2);
  p.ineq_matrix << 1.0, 1.0;
  p.ineq_rhs.resize(1);
  p.ineq_rhs << 2.0;
  const auto s = qp::solve(p, VectorXd::Zero(2));
  CHECK(s.x(0) == doctest::Approx(0.5));
  CHECK(s.x(1) == doctest::Approx(1.5));
  REQUIRE(s.working_set.size() == 1);
  CHECK(s.ineq_multipliers(0) == doctest::Approx(1.0));
}

TEST_CASE("equality constraint") {
  qp::Problem p = box_problem(3);
  p.eq_matrix.resize(1, 3);
  p.eq_matrix << 1.0, 1.0, 1.0;
  p.eq_rhs.resize(1);
  p.eq_rhs << 3.0;
  VectorXd start(3);
  start << 3.0, 0.0, 0.0;
  const auto s = qp::solve(p, start);
  for (int i = 0; i < 3; ++i) CHECK(s.x(i) == doctest::Approx(1.0));
}

TEST_CASE("linear objective bounded by constraints") {
  // min -x - y with x <= 1, y <= 2, no curvature at all.
  qp::Problem p = box_problem(2);
  p.hessian.setZero();
  p.linear << -1.0, -1.0;
  p.ineq_matrix = MatrixXd::Identity(2, 2);
  p.ineq_rhs.resize(2);
  p.ineq_rhs << 1.0, 2.0;
  const auto s = qp::solve(p, VectorXd::Zero(2));
  CHECK(s.x(0) == doctest::Approx(1.0));
  CHECK(s.x(1) == doctest::Approx(2.0));
}

TEST_CASE("unbounded and infeasible start") {
  qp::Problem p = box_problem(2);
  p.hessian.setZero();
  p.linear << -1.0, 0.0;
  CHECK(code_of([&] { qp::solve(p, VectorXd::Zero(2)); }) == ErrorCode::kUnbounded);

  qp::Problem q = box_problem(1);
  q.ineq_matrix.resize(1, 1);
  q.ineq_matrix << 1.0;
  q.ineq_rhs.resize(1);
  q.ineq_rhs << -1.0;
  CHECK(code_of([&] { qp::solve(q, VectorXd::Zero(1)); }) == ErrorCode::kInfeasible);
}

TEST_CASE("degenerate vertex with redundant constraints") {
  // Three constraints meet at the optimum (0, 0); one is redundant.
  qp::Problem p = box_problem(2);
  p.linear << 2.0, 2.0;
  p.ineq_matrix.resize(3, 2);
  p.ineq_matrix << -1.0, 0.0, 0.0, -1.0, -1.0, -1.0;
  p.ineq_rhs = VectorXd::Zero(3);
  VectorXd start(2);
  start << 1.0, 1.0;
  const auto s = qp::solve(p, start);
  CHECK(s.x.norm() < 1e-12);
}

TEST_CASE("random strictly convex problems satisfy KKT") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4;
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    qp::Problem p = box_problem(n);
    p.hessian = a * a.transpose() + MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) p.linear(i) = 3.0 * g(rng);
    p.ineq_matrix.resize(6, n);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < n; ++j) p.ineq_matrix(i, j) = g(rng);
    p.ineq_rhs = VectorXd::Ones(6);

    const auto s = qp::solve(p, VectorXd::Zero(n));
    const VectorXd slack = p.ineq_rhs - p.ineq_matrix * s.x;
    CHECK(slack.minCoeff() > -1e-9);
    CHECK(s.ineq_multipliers.minCoeff() > -1e-9);
    const VectorXd grad = p.hessian * s.x + p.linear + p.ineq_matrix.transpose() * s.ineq_multipliers;
    CHECK(grad.norm() < 1e-8);
    CHECK(std::abs(s.ineq_multipliers.dot(slack)) < 1e-8);
  }
}
