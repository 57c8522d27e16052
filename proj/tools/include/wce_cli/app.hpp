#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wce_cli/config.hpp"

namespace wce::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kNumericalFailure = 2,
  kCheckFailed = 3,  // the task ran, artifacts were written, a configured assertion failed
};

using Cell = std::variant<long long, double, std::string>;

/// One output table; doubles are written as {:.16e}.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string csv() const;
  nlohmann::json json() const;
};

struct TaskResult {
  std::vector<Table> tables;
  double boundary_mass = 0.0;  // largest edge-mass fraction over the stored fields
  std::vector<std::string> report;  // human-readable lines for stdout
  bool check_passed = true;
  double solve_seconds = 0.0;
};

/// Runs a task entirely in memory; throws ConfigError for task-specific
/// option problems and NumericalInstability on blow-up.
TaskResult run_task(const ExperimentConfig& config);

struct RunOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

/// Parses, runs and writes artifacts plus manifest.json; returns an ExitCode.
int run(const RunOptions& opts, std::ostream& out, std::ostream& err);

std::string list_tasks();
/// Parabolicity classification and the regime each check needs.
std::string validate_report(const ExperimentConfig& config);
int validate(const std::string& config_path, std::ostream& out, std::ostream& err);

}  // namespace wce::cli
