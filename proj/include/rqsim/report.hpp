#pragma once

// Report files: CSV tables for epochs and per-node metrics, a JSON summary
// for estimates, and the JSON run manifest. All serialization is
// deterministic, so identical experiments produce identical bytes.

#include <string>
#include <vector>

#include "rqsim/config.hpp"
#include "rqsim/estimators.hpp"
#include "rqsim/model.hpp"

namespace rqsim {

struct SummaryEntry {
    std::string measure;
    std::string estimator;  // crude | antithetic | crn_difference | batch_means | ipa | fd
    Estimate estimate;
    bool has_tie_events = false;
    std::uint64_t tie_events = 0;
};

std::string format_epoch(double v);  // %.17g, round-trip exact

std::string path_csv(const ModelSpec& model, const SamplePath<double>& path, int horizon);
std::string metrics_csv(const ModelSpec& model, const SamplePath<double>& path,
                        const ModelInputs<double>& inputs, int horizon);
std::string summary_json(const ExperimentConfig& config, const std::vector<SummaryEntry>& entries);
std::string manifest_json(const ExperimentConfig& config);
std::string validation_json(const ExperimentConfig& config, int instances, int mismatches,
                            double max_abs_diff, const std::vector<std::string>& failures);

void write_file(const std::string& dir, const std::string& name, const std::string& content);

}  // namespace rqsim
