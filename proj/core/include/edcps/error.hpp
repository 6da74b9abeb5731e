#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace edcps {

enum class ErrorCode {
  kInvalidArgument,
  kVoltageFloor,
  kAlphaOutOfRange,
  kCosineDomain,
  kStepTooLarge,
  kNegativeCoefficient,
  kZeroStiffness,
  kInsufficientHistory,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kBadIndex,
  kNonFinite,
  kParse,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers (the CLI in particular) map failures onto exit statuses without
/// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix carried by what().
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// An Error raised while integrating a scenario, tagged with the simulated
/// time and (when it originated in a link model) the line index.
class SimulationError : public Error {
 public:
  SimulationError(const Error& cause, double time,
                  std::optional<std::size_t> line);

  double time() const noexcept { return time_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  double time_;
  std::optional<std::size_t> line_;
};

}  // namespace edcps
