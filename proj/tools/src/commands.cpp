#include "edcps/cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "edcps/cli/scenario_file.hpp"
#include "edcps/coordinator.hpp"
#include "edcps/error.hpp"
#include "edcps/sim.hpp"

namespace edcps::cli {

namespace {

bool verbose() {
  const char* level = std::getenv("EDCPS_LOG");
  return level && (std::string_view(level) == "info" || std::string_view(level) == "debug");
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kBadIndex:
      return kExitParse;
    default:
      return kExitNumerical;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kParse, path.string() + ": cannot write");
  out << text;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

const char* kSweepHeader =
    "value,nadir_hz,steady_deviation_hz,settling_time,settled,spread_pu,total_shed,"
    "band_violated,final_in_band";

std::string sweep_row(const std::string& value, const Metrics& m) {
  std::ostringstream row;
  row << std::setprecision(10) << value << ',' << m.nadir_hz << ',' << m.steady_deviation_hz
      << ',' << m.settling_time << ',' << m.settled << ',' << m.spread_pu << ',' << m.total_shed
      << ',' << m.band_violated << ',' << m.final_in_band;
  return row.str();
}

}  // namespace

int cmd_simulate(const std::filesystem::path& scenario_file, const std::filesystem::path& out_dir,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MidcScenario scenario = load_scenario(scenario_file);
    const SimulationTrace trace = run(scenario);
    if (verbose()) {
      for (const LoggedEvent& e : trace.events)
        err << "[" << e.time << " s] " << e.kind << ": " << e.detail << '\n';
    }

    std::filesystem::create_directories(out_dir);
    {
      std::ofstream csv(out_dir / "trace.csv");
      if (!csv) throw Error(ErrorCode::kParse, (out_dir / "trace.csv").string() + ": cannot write");
      write_trace_csv(trace, csv);
    }
    const std::string metrics = metrics_to_json(trace.metrics);
    write_file(out_dir / "metrics.json", metrics + "\n");
    if (trace.optimization) write_file(out_dir / "optimization.json", to_json(*trace.optimization) + "\n");
    out << metrics << '\n';
    return kExitSuccess;
  });
}

int cmd_optimize(const std::filesystem::path& input_file, bool verify, int resolution,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const OptimizationInput input = optimization_input_from_json(read_file(input_file));
    const OptimizationResult result = optimize_droop(input);
    out << to_json(result) << '\n';
    if (!verify) return kExitSuccess;

    const OptimizationResult grid = brute_force_droop(input, resolution);
    const double tolerance = grid_objective_variation(input, grid, resolution);
    const double residual = evaluate_constraints(input, result).max();
    const bool ok = result.objective <= grid.objective + tolerance && residual <= 1e-8;
    err << std::setprecision(12) << "verify: objective " << result.objective << ", grid "
        << grid.objective << ", tolerance " << tolerance << ", max residual " << residual
        << (ok ? " (ok)" : " (MISMATCH)") << '\n';
    return ok ? kExitSuccess : kExitNumerical;
  });
}

int cmd_sweep(const std::filesystem::path& scenario_file, const std::string& param,
              const std::vector<std::string>& values,
              const std::optional<std::filesystem::path>& table_file, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const MidcScenario base = load_scenario(scenario_file);
    // Build every variant first so a bad value fails before any run starts.
    std::vector<MidcScenario> variants;
    for (const std::string& v : values) variants.push_back(with_field(base, param, v));

    std::vector<std::future<Metrics>> jobs;
    for (const MidcScenario& s : variants)
      jobs.push_back(std::async(std::launch::async, [&s] { return run(s).metrics; }));

    std::ostringstream table;
    table << kSweepHeader << '\n';
    for (std::size_t k = 0; k < jobs.size(); ++k) table << sweep_row(values[k], jobs[k].get()) << '\n';
    out << table.str();
    if (table_file) write_file(*table_file, table.str());
    return kExitSuccess;
  });
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Emergency DC power support simulator and droop optimizer", "edcps"};
  app.require_subcommand(1);

  std::string file;
  std::string out_dir = "out";
  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write trace and metrics");
  simulate->add_option("file", file, "Scenario TOML file")->required();
  simulate->add_option("--out", out_dir, "Output directory")->capture_default_str();

  bool verify = false;
  int resolution = 40;
  auto* optimize = app.add_subcommand("optimize", "Solve a droop optimization input (JSON)");
  optimize->add_option("file", file, "Optimization input JSON file")->required();
  optimize->add_flag("--verify", verify, "Cross-check against a grid search");
  optimize->add_option("--resolution", resolution, "Grid intervals per axis for --verify")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string param;
  std::vector<std::string> values;
  std::string table;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sweep->add_option("file", file, "Scenario TOML file")->required();
  sweep->add_option("--param", param, "Dotted field path, e.g. receiving.k_gov")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--table", table, "Also write the CSV table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitSuccess;
  } catch (const CLI::CallForVersion&) {
    out << "edcps 0.1.0\n";
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run 'edcps --help' for usage\n";
    return kExitUsage;
  }

  if (simulate->parsed()) return cmd_simulate(file, out_dir, out, err);
  if (optimize->parsed()) return cmd_optimize(file, verify, resolution, out, err);
  std::optional<std::filesystem::path> table_file;
  if (!table.empty()) table_file = table;
  return cmd_sweep(file, param, values, table_file, out, err);
}

}  // namespace edcps::cli
