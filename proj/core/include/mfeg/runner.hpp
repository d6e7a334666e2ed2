#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mfeg/scenario.hpp"

namespace mfeg {

enum class ExitCode : int {
  success = 0,
  config_error = 1,
  non_convergence = 2,  // diagnostics are still written
  failure = 3,          // any other solver error
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  std::ostream* log = nullptr;  // progress and errors; nullptr for silence
};

struct RunReport {
  ExitCode code = ExitCode::success;
  std::string message;
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> files;
};

/// Runs a scenario and writes its data files. Never throws for solver errors; the
/// outcome is in the report.
RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// `target` is a config file path or the name of a built-in scenario.
RunReport run(const std::string& target, const RunOptions& options = {});

/// Decimal with 12 significant digits, as written in every CSV.
std::string format_number(double value);

}  // namespace mfeg
