#include "edcps/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "edcps/error.hpp"

namespace edcps::qp {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_shapes(const Problem& p) {
  const Index n = p.num_variables();
  bool ok = p.hessian.rows() == n && p.hessian.cols() == n;
  ok = ok && p.eq_matrix.rows() == p.eq_rhs.size() &&
       (p.eq_matrix.rows() == 0 || p.eq_matrix.cols() == n);
  ok = ok && p.ineq_matrix.rows() == p.ineq_rhs.size() &&
       (p.ineq_matrix.rows() == 0 || p.ineq_matrix.cols() == n);
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "qp: inconsistent problem dimensions");
}

// Stacks the equality rows and the working inequality rows.
MatrixXd working_matrix(const Problem& p, const std::vector<Index>& working) {
  const Index n = p.num_variables();
  MatrixXd a(p.eq_matrix.rows() + static_cast<Index>(working.size()), n);
  if (p.eq_matrix.rows() > 0) a.topRows(p.eq_matrix.rows()) = p.eq_matrix;
  for (std::size_t k = 0; k < working.size(); ++k)
    a.row(p.eq_matrix.rows() + static_cast<Index>(k)) = p.ineq_matrix.row(working[k]);
  return a;
}

// Orthonormal basis of {p : A p = 0}, using row-normalized A for the rank
// decision.
MatrixXd null_space(const MatrixXd& a, Index n) {
  if (a.rows() == 0) return MatrixXd::Identity(n, n);
  MatrixXd scaled = a;
  for (Index r = 0; r < scaled.rows(); ++r) {
    const double norm = scaled.row(r).norm();
    if (norm > 0.0) scaled.row(r) /= norm;
  }
  Eigen::JacobiSVD<MatrixXd> svd(scaled, Eigen::ComputeFullV);
  svd.setThreshold(1e-10);
  const Index rank = svd.rank();
  return svd.matrixV().rightCols(n - rank);
}

Index rank_of(const MatrixXd& a) {
  if (a.rows() == 0) return 0;
  MatrixXd scaled = a;
  for (Index r = 0; r < scaled.rows(); ++r) {
    const double norm = scaled.row(r).norm();
    if (norm > 0.0) scaled.row(r) /= norm;
  }
  Eigen::JacobiSVD<MatrixXd> svd(scaled);
  svd.setThreshold(1e-10);
  return svd.rank();
}

double slack_tolerance(double rhs, const Options& o) {
  return o.feasibility_tol * (1.0 + std::abs(rhs));
}

}  // namespace

double Problem::objective(const VectorXd& x) const {
  return 0.5 * x.dot(hessian * x) + linear.dot(x);
}

Solution solve(const Problem& problem, const VectorXd& start, const Options& options) {
  check_shapes(problem);
  const Index n = problem.num_variables();
  if (start.size() != n) throw Error(ErrorCode::kInvalidArgument, "qp: start has wrong size");

  const Index n_eq = problem.eq_matrix.rows();
  const Index n_in = problem.ineq_matrix.rows();

  for (Index i = 0; i < n_eq; ++i) {
    const double r = problem.eq_matrix.row(i).dot(start) - problem.eq_rhs(i);
    if (std::abs(r) > slack_tolerance(problem.eq_rhs(i), options)) {
      std::ostringstream msg;
      msg << "start violates equality " << i << " by " << r;
      throw Error(ErrorCode::kInfeasible, msg.str());
    }
  }
  std::vector<Index> working;
  for (Index i = 0; i < n_in; ++i) {
    const double slack = problem.ineq_rhs(i) - problem.ineq_matrix.row(i).dot(start);
    const double tol = slack_tolerance(problem.ineq_rhs(i), options);
    if (slack < -tol) {
      std::ostringstream msg;
      msg << "start violates inequality " << i << " by " << -slack;
      throw Error(ErrorCode::kInfeasible, msg.str());
    }
    if (slack <= tol) {
      std::vector<Index> trial = working;
      trial.push_back(i);
      if (rank_of(working_matrix(problem, trial)) > rank_of(working_matrix(problem, working))) {
        working = std::move(trial);
      }
    }
  }

  VectorXd x = start;
  int stalls = 0;
  Solution sol;
  for (int it = 0; it < options.max_iterations; ++it) {
    sol.iterations = it + 1;
    const VectorXd g = problem.hessian * x + problem.linear;
    const MatrixXd a_w = working_matrix(problem, working);
    const MatrixXd z = null_space(a_w, n);

    VectorXd p = VectorXd::Zero(n);
    bool ray = false;
    if (z.cols() > 0) {
      const MatrixXd hr = z.transpose() * problem.hessian * z;
      const VectorXd gr = z.transpose() * g;
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (hr + hr.transpose()));
      const VectorXd& lambda = eig.eigenvalues();
      const MatrixXd& q = eig.eigenvectors();
      const double curvature_tol = 1e-10 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
      const double gradient_tol = 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff());
      const VectorXd y = q.transpose() * gr;

      VectorXd v = VectorXd::Zero(z.cols());
      for (Index j = 0; j < y.size(); ++j) {
        if (lambda(j) <= curvature_tol && std::abs(y(j)) > gradient_tol) {
          v -= y(j) * q.col(j);
          ray = true;
        }
      }
      if (!ray) {
        for (Index j = 0; j < y.size(); ++j)
          if (lambda(j) > curvature_tol) v -= (y(j) / lambda(j)) * q.col(j);
      }
      p = z * v;
    }

    bool null_step = true;
    for (Index j = 0; j < n; ++j)
      if (std::abs(p(j)) > options.step_tol * (1.0 + std::abs(x(j)))) null_step = false;

    if (null_step && !ray) {
      // g + A_w' lambda = 0
      VectorXd lambda = VectorXd::Zero(a_w.rows());
      if (a_w.rows() > 0) lambda = a_w.transpose().colPivHouseholderQr().solve(-g);
      Index leave = -1;
      double most_negative = -options.multiplier_tol * std::max(1.0, g.cwiseAbs().maxCoeff());
      for (std::size_t k = 0; k < working.size(); ++k) {
        const double l = lambda(n_eq + static_cast<Index>(k));
        // Bland's rule (first eligible) once progress has stalled.
        if (l < most_negative) {
          leave = static_cast<Index>(k);
          if (stalls > 2 * n) break;
          most_negative = l;
        }
      }
      if (leave < 0) {
        sol.x = x;
        sol.objective = problem.objective(x);
        sol.eq_multipliers = lambda.head(n_eq);
        sol.ineq_multipliers = VectorXd::Zero(n_in);
        for (std::size_t k = 0; k < working.size(); ++k)
          sol.ineq_multipliers(working[k]) = lambda(n_eq + static_cast<Index>(k));
        sol.working_set = working;
        std::sort(sol.working_set.begin(), sol.working_set.end());
        return sol;
      }
      working.erase(working.begin() + leave);
      continue;
    }

    double step = ray ? std::numeric_limits<double>::infinity() : 1.0;
    Index blocking = -1;
    for (Index i = 0; i < n_in; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const double ap = problem.ineq_matrix.row(i).dot(p);
      if (ap <= 1e-14 * problem.ineq_matrix.row(i).norm() * p.norm()) continue;
      const double slack = problem.ineq_rhs(i) - problem.ineq_matrix.row(i).dot(x);
      const double ratio = std::max(slack, 0.0) / ap;
      if (ratio < step) {
        step = ratio;
        blocking = i;
      }
    }
    if (!std::isfinite(step))
      throw Error(ErrorCode::kUnbounded, "qp: objective unbounded along a feasible ray");

    stalls = step == 0.0 ? stalls + 1 : 0;
    x += step * p;
    if (blocking >= 0) working.push_back(blocking);
  }
  std::ostringstream msg;
  msg << "qp: no convergence after " << options.max_iterations << " iterations";
  throw Error(ErrorCode::kIterationLimit, msg.str());
}

}  // namespace edcps::qp
