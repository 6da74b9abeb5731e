#pragma once

#include <cstddef>
#include <variant>

namespace edcps {

/// Block fault on a line: its delivered power drops to zero for good.
struct BlockFault {
  std::size_t line = 0;
  bool operator==(const BlockFault&) const = default;
};

/// Replaces the receiving-end frequency seen by one line's droop controller
/// with f_to from the event time on (open-loop controller test).
struct FrequencyStep {
  std::size_t line = 0;
  double f_from = 50.0;  // Hz, signal level before the step
  double f_to = 50.0;    // Hz
  bool operator==(const FrequencyStep&) const = default;
};

/// Coefficient broadcast to one line's droop controller; arms it.
struct CoefficientUpdate {
  std::size_t line = 0;
  double k_droop = 0.0;
  bool operator==(const CoefficientUpdate&) const = default;
};

/// Instantaneous receiving-end load decrease, p.u. of the system base.
struct LoadShed {
  double amount = 0.0;
  bool operator==(const LoadShed&) const = default;
};

using EventPayload = std::variant<BlockFault, FrequencyStep, CoefficientUpdate, LoadShed>;

struct TimedEvent {
  double time = 0.0;  // s
  EventPayload payload;
  bool operator==(const TimedEvent&) const = default;
};

}  // namespace edcps
