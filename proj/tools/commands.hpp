#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kcsep/experiment_config.hpp"

namespace kcsep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

const std::vector<std::string>& command_names();

/// Runs one command. The primary result goes to `out`, or to config.output when
/// set; diagnostics and failure witnesses go to `err`. Returns the exit code.
/// ConfigError and SizeError propagate to the caller.
int run_command(const std::string& command, const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Full entry point: argument parsing, config loading, error mapping.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace kcsep::cli
