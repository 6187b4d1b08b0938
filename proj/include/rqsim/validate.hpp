#pragma once

// Randomized cross-validation of the recursion engines against the
// event-scheduling oracle: a reproducible corpus of instances spanning all
// model classes, and an elementwise comparison of the paths produced by the
// two implementations.

#include <cstdint>
#include <string>
#include <vector>

#include "rqsim/model.hpp"

namespace rqsim {

struct ValidationInstance {
    std::string label;
    ModelSpec model;
    ModelInputs<double> inputs;
    int horizon = 0;             // uniform horizon (non-network classes)
    std::vector<int> horizons;   // per-node horizons (network only)
};

// Deterministic corpus: `count` instances cycling through G/G/1, unbounded
// tandem, blocked tandem (both rules), closed tandem, G/G/m, and routed
// networks, with durations drawn from a mix of distribution families.
// Network horizons are discovered with a budgeted oracle run so every
// instance is feasible.
std::vector<ValidationInstance> validation_corpus(std::uint64_t seed, int count);

struct InstanceComparison {
    bool ok = true;
    double max_abs_diff = 0.0;
    std::string detail;  // first mismatch, when any
};

// Runs both engines on the instance and compares arrivals, departures and
// completions elementwise against `tolerance`.
InstanceComparison compare_engines(const ValidationInstance& instance, double tolerance = 1e-9);

struct ValidationReport {
    int instances = 0;
    int mismatches = 0;
    double max_abs_diff = 0.0;
    std::vector<std::string> failures;
};

ValidationReport run_validation(std::uint64_t seed, int count, double tolerance = 1e-9);

}  // namespace rqsim
