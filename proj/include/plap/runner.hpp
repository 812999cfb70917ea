// Batch front door: executes a RunConfig and writes reproducible artifacts
// (manifest JSON, trace CSV, field files, diagnostics JSON) under the run's
// output directory.
#pragma once

#include <string>

#include "plap/run_config.hpp"

namespace plap {

struct RunOutcome {
    int exit_code = 0;
    std::string message;
};

// Dispatches on config.mode.  Scientific non-convergence is data (exit 0);
// invalid configuration or IO failures return nonzero.
RunOutcome run(const RunConfig& config);

}  // namespace plap
