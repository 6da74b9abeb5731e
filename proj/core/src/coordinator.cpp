#include "edcps/coordinator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "edcps/error.hpp"
#include "edcps/qp.hpp"

namespace edcps {

// ---------------------------------------------------------------------------
// Fault identification

BlockDetector::BlockDetector(std::size_t n_lines, double threshold, std::size_t hold_samples)
    : threshold_(threshold), hold_samples_(hold_samples), lines_(n_lines) {
  if (!(threshold > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "detection threshold must be > 0");
}

std::optional<FaultInfo> BlockDetector::push(double time, std::span<const double> powers) {
  if (powers.size() != lines_.size())
    throw Error(ErrorCode::kInvalidArgument, "detector sample has the wrong number of lines");
  std::optional<FaultInfo> found;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    LineHistory& h = lines_[i];
    const double p = powers[i];
    if (h.run_start) {
      if (p < threshold_ * h.run_mean) {
        if (!fired_ && !found && sample_ - *h.run_start >= hold_samples_)
          found = FaultInfo{i, time, h.run_mean};
      } else {
        h.run_start.reset();
      }
    } else if (h.count > 0) {
      const double mean = h.sum / static_cast<double>(h.count);
      if (p < threshold_ * mean) {
        h.run_start = sample_;
        h.run_mean = mean;
        if (!fired_ && !found && hold_samples_ == 0) found = FaultInfo{i, time, mean};
      }
    }
    h.sum += p;
    ++h.count;
  }
  ++sample_;
  if (found) fired_ = true;
  return found;
}

std::optional<FaultInfo> detect_block(const SampledSeries& series, double threshold,
                                      double hold) {
  if (!(series.dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "series dt must be > 0");
  if (!(hold >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "hold must be >= 0");
  const auto hold_samples = static_cast<std::size_t>(std::llround(hold / series.dt));
  std::size_t length = std::numeric_limits<std::size_t>::max();
  for (const auto& line : series.values) length = std::min(length, line.size());
  if (series.values.empty() || length < hold_samples + 1) {
    std::ostringstream msg;
    msg << "need at least " << hold_samples + 1 << " samples per line for a " << hold
        << " s hold";
    throw Error(ErrorCode::kInsufficientHistory, msg.str());
  }

  BlockDetector detector(series.values.size(), threshold, hold_samples);
  std::vector<double> sample(series.values.size());
  for (std::size_t k = 0; k < length; ++k) {
    for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = series.values[i][k];
    if (auto fault = detector.push(series.t0 + static_cast<double>(k) * series.dt, sample))
      return fault;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Optimization

namespace {

constexpr double kZeroDeviation = 1e-14;

void fail_field(const std::string& field, const std::string& reason) {
  throw Error(ErrorCode::kInvalidArgument, "OptimizationInput." + field + ": " + reason);
}

double headroom(const OptimizationInput& in, std::size_t i) {
  return in.k_max[i] * in.p_dc_rated[i] - in.p_dc_current[i];
}

// Fills k_droop and the degenerate flag from dp_dc and the receiving-end
// deviation.
void recover_coefficients(OptimizationResult& r) {
  const double dev_re = 1.0 - r.omega_pred.back();
  r.k_droop.assign(r.dp_dc.size(), 0.0);
  r.degenerate = false;
  const bool support = std::any_of(r.dp_dc.begin(), r.dp_dc.end(),
                                   [](double d) { return d > 1e-12; });
  if (std::abs(dev_re) <= kZeroDeviation) {
    if (support) {
      r.degenerate = true;
      std::fill(r.dp_dc.begin(), r.dp_dc.end(), 0.0);
    }
    return;
  }
  for (std::size_t i = 0; i < r.dp_dc.size(); ++i) r.k_droop[i] = r.dp_dc[i] / dev_re;
}

}  // namespace

void OptimizationInput::validate() const {
  const std::size_t m = num_lines();
  if (m == 0) fail_field("k_g_send", "at least one surviving line is required");
  if (!(p_loss >= 0.0) || !std::isfinite(p_loss)) fail_field("p_loss", "must be >= 0");
  if (p_dc_current.size() != m) fail_field("p_dc_current", "length must match k_g_send");
  if (p_dc_rated.size() != m) fail_field("p_dc_rated", "length must match k_g_send");
  if (k_max.size() != m) fail_field("k_max", "length must match k_g_send");
  if (omega_bounds.size() != m + 1)
    fail_field("omega_bounds", "needs one band per line plus the receiving end");
  if (!(k_g_recv >= 0.0)) fail_field("k_g_recv", "must be >= 0");
  if (!(penalty_m > 0.0)) fail_field("penalty_m", "must be > 0");
  for (std::size_t i = 0; i < m; ++i) {
    const std::string idx = "[" + std::to_string(i) + "]";
    if (!(k_g_send[i] >= 0.0)) fail_field("k_g_send" + idx, "must be >= 0");
    if (!(p_dc_current[i] >= 0.0)) fail_field("p_dc_current" + idx, "must be >= 0");
    if (!(p_dc_rated[i] > 0.0)) fail_field("p_dc_rated" + idx, "must be > 0");
    if (p_dc_current[i] > p_dc_rated[i]) fail_field("p_dc_current" + idx, "exceeds p_dc_rated");
    if (!(k_max[i] >= 1.0)) fail_field("k_max" + idx, "must be >= 1");
  }
  for (std::size_t j = 0; j <= m; ++j) {
    if (!(omega_bounds[j].lower < omega_bounds[j].upper))
      fail_field("omega_bounds[" + std::to_string(j) + "]", "lower must be < upper");
  }
}

double ConstraintResiduals::max() const {
  return std::max({frequency_bounds, send_balance, recv_balance, headroom, droop_law,
                   no_overcompensation, nonnegativity});
}

ConstraintResiduals evaluate_constraints(const OptimizationInput& in,
                                         const OptimizationResult& r) {
  const std::size_t m = in.num_lines();
  if (r.dp_dc.size() != m || r.k_droop.size() != m || r.omega_pred.size() != m + 1)
    throw Error(ErrorCode::kInvalidArgument, "result does not match the input's line count");
  ConstraintResiduals res;
  for (std::size_t j = 0; j <= m; ++j) {
    const FrequencyBand& b = in.omega_bounds[j];
    res.frequency_bounds = std::max(
        {res.frequency_bounds, b.lower - r.omega_pred[j], r.omega_pred[j] - b.upper});
  }
  const double dev_re = 1.0 - r.omega_pred[m];
  double support = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    support += r.dp_dc[i];
    res.send_balance =
        std::max(res.send_balance, std::abs(in.k_g_send[i] * (1.0 - r.omega_pred[i]) - r.dp_dc[i]));
    res.headroom = std::max(res.headroom, in.p_dc_current[i] + r.dp_dc[i] -
                                              in.k_max[i] * in.p_dc_rated[i]);
    res.droop_law = std::max(res.droop_law, std::abs(r.k_droop[i] * dev_re - r.dp_dc[i]));
    res.nonnegativity = std::max({res.nonnegativity, -r.dp_dc[i], -r.k_droop[i]});
  }
  res.recv_balance = std::abs(in.k_g_recv * dev_re - (in.p_loss - support - r.dp_shed));
  res.no_overcompensation = std::max(0.0, support + r.dp_shed - in.p_loss);
  res.nonnegativity = std::max(res.nonnegativity, -r.dp_shed);
  return res;
}

double droop_objective(const OptimizationInput& in, std::span<const double> omega_pred,
                       double shed) {
  double spread = 0.0;
  for (std::size_t j = 0; j + 1 < omega_pred.size(); ++j) {
    const double d = omega_pred[j] - omega_pred[j + 1];
    spread += d * d;
  }
  return spread + in.penalty_m * shed;
}

OptimizationResult optimize_droop(const OptimizationInput& in) {
  in.validate();
  const std::size_t m = in.num_lines();
  for (std::size_t j = 0; j <= m; ++j) {
    const FrequencyBand& b = in.omega_bounds[j];
    if (!(b.lower <= 1.0 && 1.0 <= b.upper)) {
      std::ostringstream msg;
      msg << "frequency band [" << b.lower << ", " << b.upper << "] of "
          << (j == m ? std::string("the receiving end") : "line " + std::to_string(j))
          << " excludes nominal";
      throw Error(ErrorCode::kInfeasible, msg.str());
    }
  }

  // Variables: deviations d_0..d_{m-1}, d_re (d = 1 - omega), increments
  // dp_0..dp_{m-1}, and s = M * shed so the penalty gradient is O(1).
  using Eigen::Index;
  const auto mi = static_cast<Index>(m);
  const Index n = 2 * mi + 2;
  const Index dev_re = mi;
  auto dp = [&](std::size_t i) { return mi + 1 + static_cast<Index>(i); };
  const Index s = n - 1;
  const double big_m = in.penalty_m;

  qp::Problem prob;
  prob.hessian = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 0; j < mi; ++j) {
    prob.hessian(j, j) += 2.0;
    prob.hessian(j + 1, j + 1) += 2.0;
    prob.hessian(j, j + 1) -= 2.0;
    prob.hessian(j + 1, j) -= 2.0;
  }
  prob.linear = Eigen::VectorXd::Zero(n);
  prob.linear(s) = 1.0;

  prob.eq_matrix = Eigen::MatrixXd::Zero(mi + 1, n);
  prob.eq_rhs = Eigen::VectorXd::Zero(mi + 1);
  for (std::size_t i = 0; i < m; ++i) {
    prob.eq_matrix(static_cast<Index>(i), static_cast<Index>(i)) = in.k_g_send[i];
    prob.eq_matrix(static_cast<Index>(i), dp(i)) = -1.0;
  }
  prob.eq_matrix(mi, dev_re) = in.k_g_recv;
  for (std::size_t i = 0; i < m; ++i) prob.eq_matrix(mi, dp(i)) = 1.0;
  prob.eq_matrix(mi, s) = 1.0 / big_m;
  prob.eq_rhs(mi) = in.p_loss;

  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  auto add = [&](std::string name, Eigen::VectorXd row, double b) {
    names.push_back(std::move(name));
    rows.push_back(std::move(row));
    rhs.push_back(b);
  };
  auto unit = [&](Index k, double v) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    r(k) = v;
    return r;
  };
  for (std::size_t j = 0; j <= m; ++j) {
    const std::string tag = j == m ? "recv" : std::to_string(j);
    const auto col = static_cast<Index>(j);
    add("omega_min[" + tag + "]", unit(col, 1.0), 1.0 - in.omega_bounds[j].lower);
    add("omega_max[" + tag + "]", unit(col, -1.0), in.omega_bounds[j].upper - 1.0);
  }
  for (std::size_t i = 0; i < m; ++i) {
    add("support_nonnegative[" + std::to_string(i) + "]", unit(dp(i), -1.0), 0.0);
    add("headroom[" + std::to_string(i) + "]", unit(dp(i), 1.0), headroom(in, i));
  }
  add("shed_nonnegative", unit(s, -1.0), 0.0);
  {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < m; ++i) r(dp(i)) = 1.0;
    r(s) = 1.0 / big_m;
    add("no_overcompensation", r, in.p_loss);
  }
  prob.ineq_matrix.resize(static_cast<Index>(rows.size()), n);
  prob.ineq_rhs.resize(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    prob.ineq_matrix.row(static_cast<Index>(k)) = rows[k].transpose();
    prob.ineq_rhs(static_cast<Index>(k)) = rhs[k];
  }

  // Zero support with the whole loss shed is always admissible.
  Eigen::VectorXd start = Eigen::VectorXd::Zero(n);
  start(s) = big_m * in.p_loss;

  const qp::Solution sol = qp::solve(prob, start);

  OptimizationResult r;
  r.dp_dc.resize(m);
  r.omega_pred.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) r.omega_pred[j] = 1.0 - sol.x(static_cast<Index>(j));
  for (std::size_t i = 0; i < m; ++i) r.dp_dc[i] = std::max(sol.x(dp(i)), 0.0);
  r.dp_shed = std::max(sol.x(s) / big_m, 0.0);
  r.objective = droop_objective(in, r.omega_pred, r.dp_shed);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double slack = rhs[k] - rows[k].dot(sol.x);
    if (slack <= 1e-10 * (1.0 + std::abs(rhs[k]))) r.active_constraints.push_back(names[k]);
  }
  recover_coefficients(r);
  return r;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace {

// One grid axis per line plus one for the receiving end. A line axis carries
// its increment when the sending end is stiff, otherwise its deviation; the
// receiving-end axis carries shed when stiff, otherwise its deviation.
struct GridAxes {
  std::vector<double> lo, hi;
  std::vector<bool> line_is_increment;
  bool recv_is_shed = true;
};

GridAxes make_axes(const OptimizationInput& in) {
  const std::size_t m = in.num_lines();
  GridAxes ax;
  for (std::size_t i = 0; i < m; ++i) {
    const FrequencyBand& b = in.omega_bounds[i];
    if (in.k_g_send[i] > 0.0) {
      ax.line_is_increment.push_back(true);
      ax.lo.push_back(0.0);
      ax.hi.push_back(std::max(0.0, std::min(headroom(in, i), in.k_g_send[i] * (1.0 - b.lower))));
    } else {
      ax.line_is_increment.push_back(false);
      ax.lo.push_back(1.0 - b.upper);
      ax.hi.push_back(1.0 - b.lower);
    }
  }
  ax.recv_is_shed = in.k_g_recv > 0.0;
  if (ax.recv_is_shed) {
    ax.lo.push_back(0.0);
    ax.hi.push_back(in.p_loss);
  } else {
    ax.lo.push_back(1.0 - in.omega_bounds[m].upper);
    ax.hi.push_back(1.0 - in.omega_bounds[m].lower);
  }
  return ax;
}

struct GridPoint {
  std::vector<double> omega;
  std::vector<double> dp;
  double shed = 0.0;
};

// Maps axis coordinates to a full point; dependent quantities follow from
// the area balances.
GridPoint point_from_coords(const OptimizationInput& in, const GridAxes& ax,
                            std::span<const double> coord) {
  const std::size_t m = in.num_lines();
  GridPoint p;
  p.omega.resize(m + 1);
  p.dp.resize(m);
  double support = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (ax.line_is_increment[i]) {
      p.dp[i] = coord[i];
      p.omega[i] = 1.0 - coord[i] / in.k_g_send[i];
    } else {
      p.dp[i] = 0.0;
      p.omega[i] = 1.0 - coord[i];
    }
    support += p.dp[i];
  }
  if (ax.recv_is_shed) {
    p.shed = coord[m];
    p.omega[m] = 1.0 - (in.p_loss - support - p.shed) / in.k_g_recv;
  } else {
    p.shed = in.p_loss - support;
    p.omega[m] = 1.0 - coord[m];
  }
  return p;
}

bool admissible(const OptimizationInput& in, const GridPoint& p) {
  constexpr double tol = 1e-12;
  const std::size_t m = in.num_lines();
  for (std::size_t j = 0; j <= m; ++j) {
    if (p.omega[j] < in.omega_bounds[j].lower - tol || p.omega[j] > in.omega_bounds[j].upper + tol)
      return false;
  }
  double support = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (p.dp[i] < -tol || p.dp[i] > headroom(in, i) + tol) return false;
    support += p.dp[i];
  }
  if (p.shed < -tol) return false;
  return support + p.shed <= in.p_loss + tol;
}

std::vector<double> coords_from_result(const OptimizationInput& in, const GridAxes& ax,
                                       const OptimizationResult& r) {
  const std::size_t m = in.num_lines();
  std::vector<double> c(m + 1);
  for (std::size_t i = 0; i < m; ++i)
    c[i] = ax.line_is_increment[i] ? r.dp_dc[i] : 1.0 - r.omega_pred[i];
  c[m] = ax.recv_is_shed ? r.dp_shed : 1.0 - r.omega_pred[m];
  return c;
}

}  // namespace

OptimizationResult brute_force_droop(const OptimizationInput& in, int resolution) {
  in.validate();
  if (resolution < 1) throw Error(ErrorCode::kInvalidArgument, "resolution must be >= 1");
  const std::size_t m = in.num_lines();
  if (m > 3) throw Error(ErrorCode::kInvalidArgument, "brute force supports at most 3 lines");

  const GridAxes ax = make_axes(in);
  const std::size_t dims = m + 1;
  std::vector<int> idx(dims, 0);
  std::vector<double> coord(dims);

  double best = std::numeric_limits<double>::infinity();
  GridPoint best_point;
  while (true) {
    for (std::size_t d = 0; d < dims; ++d)
      coord[d] = ax.lo[d] + (ax.hi[d] - ax.lo[d]) * idx[d] / resolution;
    GridPoint p = point_from_coords(in, ax, coord);
    if (admissible(in, p)) {
      const double f = droop_objective(in, p.omega, p.shed);
      if (f < best) {
        best = f;
        best_point = std::move(p);
      }
    }
    std::size_t d = 0;
    while (d < dims && ++idx[d] > resolution) idx[d++] = 0;
    if (d == dims) break;
  }
  if (!std::isfinite(best))
    throw Error(ErrorCode::kInfeasible, "no admissible grid point");

  OptimizationResult r;
  r.dp_dc = best_point.dp;
  r.dp_shed = best_point.shed;
  r.omega_pred = best_point.omega;
  r.objective = best;
  recover_coefficients(r);
  return r;
}

double grid_objective_variation(const OptimizationInput& in, const OptimizationResult& grid_point,
                                int resolution) {
  if (resolution < 1) throw Error(ErrorCode::kInvalidArgument, "resolution must be >= 1");
  const GridAxes ax = make_axes(in);
  const std::vector<double> base = coords_from_result(in, ax, grid_point);
  const GridPoint centre = point_from_coords(in, ax, base);
  const double f0 = droop_objective(in, centre.omega, centre.shed);
  double total = 0.0;
  for (std::size_t d = 0; d < base.size(); ++d) {
    const double step = (ax.hi[d] - ax.lo[d]) / resolution;
    double worst = 0.0;
    for (double sign : {-1.0, 1.0}) {
      std::vector<double> c = base;
      c[d] += sign * step;
      const GridPoint p = point_from_coords(in, ax, c);
      worst = std::max(worst, std::abs(droop_objective(in, p.omega, p.shed) - f0));
    }
    total += worst;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Dispatch

std::vector<TimedEvent> dispatch_coefficients(const OptimizationResult& result,
                                              double comm_delay, double now,
                                              std::span<const std::size_t> line_ids) {
  if (!(comm_delay >= 0.0))
    throw Error(ErrorCode::kInvalidArgument, "communication delay must be >= 0");
  if (!line_ids.empty() && line_ids.size() != result.k_droop.size())
    throw Error(ErrorCode::kInvalidArgument, "line_ids must match the coefficient count");
  const double at = now + comm_delay;
  std::vector<TimedEvent> events;
  for (std::size_t i = 0; i < result.k_droop.size(); ++i) {
    const std::size_t line = line_ids.empty() ? i : line_ids[i];
    events.push_back({at, CoefficientUpdate{line, result.k_droop[i]}});
  }
  if (result.dp_shed > 0.0) events.push_back({at, LoadShed{result.dp_shed}});
  return events;
}

}  // namespace edcps
