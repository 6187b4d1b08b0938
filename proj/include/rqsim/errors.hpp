#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rqsim {

// Failures of a simulation run itself (as opposed to malformed inputs, which
// throw std::invalid_argument / std::domain_error).
struct SimulationError : std::runtime_error {
    explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

// No node can produce its next departure and targets remain unmet.
struct DeadlockError : SimulationError {
    std::vector<int> stalled_nodes;  // 0-based indices
    DeadlockError(const std::string& what, std::vector<int> stalled)
        : SimulationError(what), stalled_nodes(std::move(stalled)) {}
};

// Some node exhausted its horizon while its departures are still needed as
// inputs elsewhere; raising the horizon (or supplying more durations) would
// let the run proceed.
struct HorizonError : SimulationError {
    explicit HorizonError(const std::string& what) : SimulationError(what) {}
};

}  // namespace rqsim
