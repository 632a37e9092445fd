#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "frameflow/config.hpp"

namespace frameflow {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitCriterionFailed = 1,
  kExitConfigError = 2,
  kExitNumericalAbort = 3,
};

/// Runs a validated configuration and writes its artifacts.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line: parse flags (and --config file), then dispatch.
/// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frameflow
