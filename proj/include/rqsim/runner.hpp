#pragma once

#include <iosfwd>
#include <string>

#include "rqsim/config.hpp"

namespace rqsim {

// Exit codes of a run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitSimulationError = 2;

// Executes the experiment and writes the report files into config.out_dir:
// always manifest.json; path mode adds path.csv and metrics.csv; the
// estimation modes add summary.json; validate mode adds validation.json.
// Progress lines go to `log` unless config.quiet. Simulation failures
// (including oracle mismatches in validate mode) return kExitSimulationError.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace rqsim
