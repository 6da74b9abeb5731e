#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace edcps::cli {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitNumerical = 3,
};

/// Runs a scenario file and writes trace.csv, metrics.json and (when the
/// coordinator optimized) optimization.json into out_dir.
int cmd_simulate(const std::filesystem::path& scenario_file, const std::filesystem::path& out_dir,
                 std::ostream& out, std::ostream& err);

/// Solves an optimization-input JSON file and prints the result. With
/// verify, also runs the grid search and reports the objective gap.
int cmd_optimize(const std::filesystem::path& input_file, bool verify, int resolution,
                 std::ostream& out, std::ostream& err);

/// One simulation per value of a numeric scenario field; prints a CSV
/// table of metrics (and writes it to table_file when given).
int cmd_sweep(const std::filesystem::path& scenario_file, const std::string& param,
              const std::vector<std::string>& values,
              const std::optional<std::filesystem::path>& table_file, std::ostream& out,
              std::ostream& err);

/// Full command-line entry point.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace edcps::cli
