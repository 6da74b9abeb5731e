#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edcps/events.hpp"

namespace edcps {

// ---------------------------------------------------------------------------
// Fault identification

struct FaultInfo {
  std::size_t line_index = 0;
  double detection_time = 0.0;  // s
  double p_loss = 0.0;          // p.u., pre-fault mean power of the line

  bool operator==(const FaultInfo&) const = default;
};

/// Uniformly sampled per-line power traces, values[line][sample] in p.u.
struct SampledSeries {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<std::vector<double>> values;
};

/// Streaming block detector. A line is declared blocked once its power has
/// stayed below threshold * (mean of all its earlier samples) for
/// hold_samples sample intervals. Fires at most once.
class BlockDetector {
 public:
  BlockDetector(std::size_t n_lines, double threshold, std::size_t hold_samples);

  /// Feeds one sample per line taken at `time`.
  std::optional<FaultInfo> push(double time, std::span<const double> powers);

  bool fired() const { return fired_; }

 private:
  struct LineHistory {
    double sum = 0.0;
    std::size_t count = 0;
    std::optional<std::size_t> run_start;
    double run_mean = 0.0;
  };

  double threshold_;
  std::size_t hold_samples_;
  std::size_t sample_ = 0;
  std::vector<LineHistory> lines_;
  bool fired_ = false;
};

/// Batch form of BlockDetector over a recorded series; hold is in seconds
/// and is rounded to whole samples. Returns the earliest detection (lowest
/// line index on ties). Throws kInsufficientHistory when a line holds fewer
/// samples than the hold window needs, kInvalidArgument for threshold <= 0
/// or dt <= 0.
std::optional<FaultInfo> detect_block(const SampledSeries& series, double threshold,
                                      double hold);

// ---------------------------------------------------------------------------
// Coordinated droop-coefficient optimization
//
// All quantities are per-unit: powers on the system base, frequencies on the
// nominal value. Index i runs over the surviving lines; the receiving end
// comes last wherever a per-subsystem list is used.

struct FrequencyBand {
  double lower = 0.99;
  double upper = 1.01;

  bool operator==(const FrequencyBand&) const = default;
};

struct OptimizationInput {
  double p_loss = 0.0;
  std::vector<double> k_g_send;  // sending-end stiffness per surviving line
  double k_g_recv = 0.0;         // receiving-end stiffness
  std::vector<double> p_dc_current;
  std::vector<double> p_dc_rated;
  std::vector<double> k_max;
  std::vector<FrequencyBand> omega_bounds;  // lines then receiving end
  double penalty_m = 1e6;

  std::size_t num_lines() const { return k_g_send.size(); }

  /// Throws kInvalidArgument naming the offending field.
  void validate() const;

  bool operator==(const OptimizationInput&) const = default;
};

struct OptimizationResult {
  std::vector<double> k_droop;
  std::vector<double> dp_dc;
  double dp_shed = 0.0;
  std::vector<double> omega_pred;  // lines then receiving end
  double objective = 0.0;
  std::vector<std::string> active_constraints;
  /// Set when the receiving end sits at nominal frequency while support was
  /// requested; the coefficients are undefined and reported as zero.
  bool degenerate = false;

  bool operator==(const OptimizationResult&) const = default;
};

/// Residuals of every constraint evaluated from the result fields alone.
/// Each entry is a nonnegative violation magnitude.
struct ConstraintResiduals {
  double frequency_bounds = 0.0;
  double send_balance = 0.0;
  double recv_balance = 0.0;
  double headroom = 0.0;
  double droop_law = 0.0;
  double no_overcompensation = 0.0;
  double nonnegativity = 0.0;

  double max() const;
};

ConstraintResiduals evaluate_constraints(const OptimizationInput& input,
                                         const OptimizationResult& result);

/// Chained squared frequency differences line 1-2, 2-3, ..., last line-receiving
/// end, plus penalty_m * shed.
double droop_objective(const OptimizationInput& input, std::span<const double> omega_pred,
                       double shed);

/// Minimizes the chained frequency spread plus the shedding penalty subject
/// to the area balances, frequency bands, line headroom and the
/// no-overcompensation limit. The program is solved over frequencies, line
/// increments and shed; coefficients follow as increment / receiving-end
/// deviation.
///
/// Throws kInvalidArgument for bad input and kInfeasible when a frequency
/// band excludes nominal (then not even zero support with full shedding is
/// admissible).
OptimizationResult optimize_droop(const OptimizationInput& input);

/// Exhaustive grid search over line increments and shed, resolution
/// intervals per axis. Lines with zero stiffness grid their frequency
/// instead (their increment is pinned to zero); likewise the receiving end
/// grids its frequency when k_g_recv is zero. At most three lines.
OptimizationResult brute_force_droop(const OptimizationInput& input, int resolution);

/// Objective change across one grid cell around a brute-force point: the
/// sum over grid axes of the larger one-step objective change. This is the
/// tolerance when comparing brute-force and exact objectives.
double grid_objective_variation(const OptimizationInput& input,
                                const OptimizationResult& grid_point, int resolution);

/// One coefficient update per surviving line at now + comm_delay, plus a
/// load-shed event when the result sheds load. line_ids maps result
/// positions to scenario line indices (identity when empty).
std::vector<TimedEvent> dispatch_coefficients(const OptimizationResult& result,
                                              double comm_delay, double now,
                                              std::span<const std::size_t> line_ids = {});

// JSON forms used by the CLI and by golden files. Parse failures throw
// Error(kParse) naming the field.
OptimizationInput optimization_input_from_json(std::string_view text);
std::string to_json(const OptimizationInput& input);
OptimizationResult optimization_result_from_json(std::string_view text);
std::string to_json(const OptimizationResult& result);

}  // namespace edcps
