#pragma once

#include <Eigen/Dense>
#include <vector>

namespace edcps::qp {

/// Dense convex quadratic program
///
///   minimize    1/2 x' H x + c' x
///   subject to  A_eq x  = b_eq
///               A_in x <= b_in
///
/// H must be symmetric positive semidefinite. Directions of zero curvature
/// are allowed as long as the constraints bound the objective along them.
struct Problem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd ineq_matrix;
  Eigen::VectorXd ineq_rhs;

  Eigen::Index num_variables() const { return linear.size(); }
  double objective(const Eigen::VectorXd& x) const;
};

struct Options {
  int max_iterations = 500;
  /// Constraint slack treated as zero, relative to 1 + |rhs|.
  double feasibility_tol = 1e-9;
  /// A step is null when every |p_j| <= step_tol * (1 + |x_j|).
  double step_tol = 1e-13;
  /// Inequality multipliers above -multiplier_tol count as nonnegative.
  double multiplier_tol = 1e-10;
};

struct Solution {
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd eq_multipliers;
  Eigen::VectorXd ineq_multipliers;  // zero for inequalities outside the working set
  std::vector<Eigen::Index> working_set;  // active inequality indices
  int iterations = 0;
};

/// Primal active-set method started from a feasible point. Each iteration
/// solves the equality-constrained subproblem on the null space of the
/// working set; zero-curvature descent directions are followed to the first
/// blocking constraint.
///
/// Throws Error(kInfeasible) if start violates a constraint,
/// Error(kUnbounded) if the objective decreases without bound and
/// Error(kIterationLimit) when max_iterations is exhausted.
Solution solve(const Problem& problem, const Eigen::VectorXd& start,
               const Options& options = {});

}  // namespace edcps::qp
