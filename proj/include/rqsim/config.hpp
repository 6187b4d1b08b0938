#pragma once

// Experiment configuration: a flat dotted-key/value store parsed either from
// the human-editable sectioned text format or from a JSON manifest emitted by
// an earlier run, and the typed experiment description built from it.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rqsim/model.hpp"

namespace rqsim {

struct ConfigMap {
    std::map<std::string, std::vector<std::string>> entries;  // dotted key -> tokens

    bool has(const std::string& key) const { return entries.count(key) > 0; }

    const std::vector<std::string>& tokens(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    void set(const std::string& key, std::string value);
    void set_list(const std::string& key, std::vector<std::string> values);
};

// `[section]` headers, `key = value` lines, `#` comments; lists are
// comma-separated. JSON input (first non-space byte `{`) is flattened to the
// same dotted keys, so an emitted manifest is itself a valid config.
ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

enum class RunMode { path, estimate, steady, ipa, validate };

const char* to_string(RunMode mode);
RunMode parse_run_mode(const std::string& name);

struct ExperimentConfig {
    RunMode mode = RunMode::path;
    std::uint64_t seed = 1;
    int horizon = 0;
    int replications = 100;
    int threads = 1;
    bool quiet = false;
    std::string out_dir = ".";

    std::optional<StochasticModel> model;  // absent in validate mode
    std::vector<double> theta;
    std::vector<MeasureSelector> measures;

    // estimate mode
    std::string variance_reduction = "none";  // none | antithetic
    std::vector<double> theta2;               // nonempty: CRN difference vs theta

    // steady mode
    int warmup = -1;  // < 0: horizon / 100
    int batches = 32;

    // ipa mode
    int ipa_coord = 0;
    double fd_step = 0.0;  // > 0: also report the finite-difference cross-check

    // validate mode
    int validate_instances = 60;
    double validate_tolerance = 1e-9;
};

ExperimentConfig load_experiment(const ConfigMap& map);

// The resolved configuration as dotted keys, fit for the manifest and
// sufficient to reproduce the run (output location excluded on purpose).
ConfigMap experiment_to_config(const ExperimentConfig& config);

}  // namespace rqsim
