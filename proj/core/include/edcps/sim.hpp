#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edcps/coordinator.hpp"
#include "edcps/dc_link.hpp"
#include "edcps/droop.hpp"
#include "edcps/events.hpp"
#include "edcps/grid.hpp"

namespace edcps {

/// One HVDC line with the sending-end area that feeds it. The line starts
/// at droop.p_nominal.
struct LineConfig {
  std::string name;
  ConverterParams converter;
  DroopSettings droop;
  SubsystemParams sending;

  bool operator==(const LineConfig&) const = default;
};

enum class CoordinatorMode {
  kOff,       // no detection, no dispatch
  kOptimize,  // detect, optimize coefficients, dispatch them
  kFixed,     // detect, then arm every surviving line with its configured k_droop
};

struct CoordinatorConfig {
  CoordinatorMode mode = CoordinatorMode::kOff;
  double detection_threshold = 0.1;  // fraction of the pre-fault mean
  double detection_hold = 0.02;      // s
  double optimization_latency = 0.2;  // s, detection to dispatch
  double comm_delay = 0.1;           // s, dispatch to controllers
  double penalty_m = 1e6;

  bool operator==(const CoordinatorConfig&) const = default;
};

struct SimConfig {
  double dt = 1e-3;
  double t_end = 60.0;
  int decimation = 10;  // record every n-th step (the last step is always kept)

  bool operator==(const SimConfig&) const = default;
};

struct MidcScenario {
  std::vector<LineConfig> lines;
  SubsystemParams receiving;
  std::vector<TimedEvent> events;
  CoordinatorConfig coordinator;
  SimConfig sim;
  double s_base = kDefaultPowerBase;  // MVA

  /// Throws kInvalidArgument (or kBadIndex for event line references).
  void validate() const;

  /// Index of the named line; throws kBadIndex.
  std::size_t line_index(std::string_view name) const;

  bool operator==(const MidcScenario&) const = default;
};

struct SubsystemTrace {
  std::string name;
  double omega_nominal = kDefaultNominalOmega;
  double omega_min = 0.0;
  double omega_max = 0.0;
  /// False for the sending end of a blocked line; such areas are islanded
  /// from the multi-infeed system and left out of the spread metric.
  bool participating = true;
  std::vector<double> omega;  // rad/s

  bool operator==(const SubsystemTrace&) const = default;
};

struct LineTrace {
  std::string name;
  std::vector<double> p_dc;     // p.u.
  std::vector<double> p_order;  // p.u.
  std::vector<double> i_d;      // kA
  std::vector<double> v_d_inv;  // kV
  std::vector<double> alpha;    // rad

  bool operator==(const LineTrace&) const = default;
};

struct LoggedEvent {
  double time = 0.0;       // step boundary at which it took effect
  double scheduled = 0.0;  // requested time
  std::string kind;
  std::string detail;

  bool operator==(const LoggedEvent&) const = default;
};

struct Metrics {
  double nadir_hz = 0.0;              // receiving-end minimum
  double steady_deviation_hz = 0.0;   // mean of the last 10% minus nominal
  double settling_time = 0.0;         // s after the first disturbance
  bool settled = true;                // inside the 0.02 Hz band by the end
  double spread_pu = 0.0;             // max inter-area spread over the last 10%
  double total_shed = 0.0;            // p.u.
  bool band_violated = false;         // receiving end left [omega_min, omega_max]
  bool final_in_band = true;

  bool operator==(const Metrics&) const = default;
};

struct SimulationTrace {
  std::vector<double> time;
  std::vector<SubsystemTrace> subsystems;  // receiving end first
  std::vector<LineTrace> lines;
  std::vector<double> p_shed;  // p.u.
  std::vector<LoggedEvent> events;
  std::optional<double> disturbance_time;
  std::optional<FaultInfo> fault;
  std::optional<OptimizationInput> optimization_input;
  std::optional<OptimizationResult> optimization;
  Metrics metrics;

  bool operator==(const SimulationTrace&) const = default;
};

/// Fixed-step RK4 integration of every link and area, with events applied
/// at the first step boundary at or after their time and droop orders held
/// across each step. Runs the coordinator in closed loop when enabled.
///
/// Throws SimulationError tagged with time and line for link-model
/// failures, and kNonFinite when a state leaves the finite range.
SimulationTrace run(const MidcScenario& scenario);

/// Adds an open-loop frequency step on one line's droop input.
/// Throws kBadIndex for an unknown line, kInvalidArgument for t >= t_end.
MidcScenario inject_frequency_step(MidcScenario scenario, std::size_t line, double t,
                                   double f_from, double f_to);

Metrics compute_metrics(const SimulationTrace& trace);

// Export

std::vector<std::string> trace_csv_header(const SimulationTrace& trace);
void write_trace_csv(const SimulationTrace& trace, std::ostream& out);
std::string metrics_to_json(const Metrics& metrics);

}  // namespace edcps
