#include "edcps/error.hpp"

#include <sstream>

namespace edcps {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kVoltageFloor: return "VoltageFloor";
    case ErrorCode::kAlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::kCosineDomain: return "CosineDomain";
    case ErrorCode::kStepTooLarge: return "StepTooLarge";
    case ErrorCode::kNegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::kZeroStiffness: return "ZeroStiffness";
    case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnbounded: return "Unbounded";
    case ErrorCode::kIterationLimit: return "IterationLimit";
    case ErrorCode::kBadIndex: return "BadIndex";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

namespace {

std::string describe(const Error& cause, double time,
                     std::optional<std::size_t> line) {
  std::ostringstream out;
  out << "t=" << time << " s";
  if (line) out << ", line " << *line;
  out << ": " << cause.detail();
  return out.str();
}

}  // namespace

SimulationError::SimulationError(const Error& cause, double time,
                                 std::optional<std::size_t> line)
    : Error(cause.code(), describe(cause, time, line)),
      time_(time),
      line_(line) {}

}  // namespace edcps
