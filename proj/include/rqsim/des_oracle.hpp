#pragma once

// Independent event-scheduling simulator (future-event list plus per-node
// server/buffer state machines) for the same model classes as the recursion
// engines. Shares only the input and output types with them; the dynamics are
// implemented operationally, so agreement between the two is evidence of
// correctness rather than a tautology.

#include <span>
#include <vector>

#include "rqsim/model.hpp"
#include "rqsim/types.hpp"

namespace rqsim::des {

SamplePath<double> simulate_gg1(std::span<const double> interarrivals,
                                std::span<const double> services, int horizon);

// Covers unbounded lines and both blocking rules (hold-the-server for
// manufacturing, defer-the-start for communication).
SamplePath<double> simulate_tandem(const TandemSpec& spec, std::span<const double> interarrivals,
                                   const std::vector<std::vector<double>>& services, int horizon);

SamplePath<double> simulate_closed_tandem(const ClosedTandemSpec& spec,
                                          const std::vector<std::vector<double>>& services,
                                          int horizon);

SamplePath<double> simulate_ggm(const GGmSpec& spec, std::span<const double> interarrivals,
                                std::span<const double> services, int horizon);

SamplePath<double> simulate_network(const NetworkSpec& spec,
                                    const std::vector<std::vector<double>>& services,
                                    const std::vector<int>& horizons);

// Runs until `total_departures` departures happened anywhere (or the system
// drains); used to discover mutually consistent per-node horizons for
// randomized network instances. Each service sequence must be long enough to
// cover whatever share of the budget its node may serve.
SamplePath<double> simulate_network_budget(const NetworkSpec& spec,
                                           const std::vector<std::vector<double>>& services,
                                           long long total_departures);

// Dispatch on the model description; identical inputs to the recursion
// engines' simulate().
SamplePath<double> simulate_model(const ModelSpec& model, const ModelInputs<double>& inputs,
                                  int horizon);

}  // namespace rqsim::des
