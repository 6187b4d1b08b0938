#include "rqsim/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rqsim {

std::string format_epoch(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string path_csv(const ModelSpec& model, const SamplePath<double>& path, int horizon) {
    const bool ggm = std::holds_alternative<GGmSpec>(model);
    std::ostringstream out;
    out << "k";
    for (int n = 0; n < path.node_count(); ++n) {
        std::string suffix = path.node_count() > 1 ? std::to_string(n + 1) : "";
        out << ",A" << suffix << ",D" << suffix;
    }
    if (ggm) out << ",C";
    out << "\n";
    for (int k = 0; k < horizon; ++k) {
        out << (k + 1);
        for (int n = 0; n < path.node_count(); ++n) {
            out << ',' << format_epoch(path.arrivals[static_cast<size_t>(n)][static_cast<size_t>(k)])
                << ',' << format_epoch(path.departures[static_cast<size_t>(n)][static_cast<size_t>(k)]);
        }
        if (ggm) out << ',' << format_epoch(path.completions[static_cast<size_t>(k)]);
        out << "\n";
    }
    return out.str();
}

std::string metrics_csv(const ModelSpec& model, const SamplePath<double>& path,
                        const ModelInputs<double>& inputs, int horizon) {
    const bool ggm = std::holds_alternative<GGmSpec>(model);
    std::ostringstream out;
    out << "node,S,W,T,U,U_per_server,J,Q,I\n";
    for (int n = 0; n < path.node_count(); ++n) {
        std::span<const double> services(inputs.services[static_cast<size_t>(n)]);
        NodeMetrics<double> m;
        std::string idle;
        if (ggm) {
            m = multiserver_metrics(path, std::get<GGmSpec>(model).server_count, services, horizon);
        } else {
            m = node_metrics(path, n, services, horizon);
            idle = format_epoch(idle_time(path, n, services, horizon));
        }
        out << (n + 1) << ',' << format_epoch(m.total_time) << ',' << format_epoch(m.waiting_time)
            << ',' << format_epoch(m.throughput) << ',' << format_epoch(m.utilization) << ','
            << format_epoch(m.utilization_per_server) << ',' << format_epoch(m.in_system) << ','
            << format_epoch(m.queue_length) << ',' << idle << "\n";
    }
    return out.str();
}

namespace {

nlohmann::json config_to_json(const ConfigMap& map) {
    nlohmann::json root = nlohmann::json::object();
    for (const auto& [key, tokens] : map.entries) {
        // Rebuild one nesting level per dotted segment.
        nlohmann::json* cursor = &root;
        std::string rest = key;
        for (size_t dot = rest.find('.'); dot != std::string::npos; dot = rest.find('.')) {
            std::string head = rest.substr(0, dot);
            rest = rest.substr(dot + 1);
            // Numeric tails (routing.2, service.3) stay part of the leaf
            // object name only when they are final; intermediate segments
            // become nested objects either way.
            cursor = &(*cursor)[head];
            if (!cursor->is_object()) *cursor = nlohmann::json::object();
        }
        auto parse_token = [](const std::string& t) -> nlohmann::json {
            if (t == "inf") return "inf";
            try {
                return nlohmann::json::parse(t);  // numbers, booleans
            } catch (const nlohmann::json::exception&) {
                return t;  // plain string
            }
        };
        if (tokens.size() == 1) {
            (*cursor)[rest] = parse_token(tokens[0]);
        } else {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& t : tokens) arr.push_back(parse_token(t));
            (*cursor)[rest] = arr;
        }
    }
    return root;
}

nlohmann::json estimate_to_json(const SummaryEntry& entry, std::uint64_t seed) {
    nlohmann::json j{{"measure", entry.measure},
                     {"estimator", entry.estimator},
                     {"mean", entry.estimate.mean},
                     {"variance", entry.estimate.variance},
                     {"ci95", entry.estimate.half_width_95},
                     {"R", entry.estimate.replications},
                     {"seed", seed}};
    if (entry.estimate.suspected_unstable) j["suspected_unstable"] = true;
    if (entry.has_tie_events) j["tie_events"] = entry.tie_events;
    return j;
}

}  // namespace

std::string summary_json(const ExperimentConfig& config, const std::vector<SummaryEntry>& entries) {
    nlohmann::json j;
    j["mode"] = to_string(config.mode);
    j["seed"] = config.seed;
    j["horizon"] = config.horizon;
    nlohmann::json results = nlohmann::json::array();
    for (const auto& e : entries) results.push_back(estimate_to_json(e, config.seed));
    j["results"] = results;
    return j.dump(2) + "\n";
}

std::string manifest_json(const ExperimentConfig& config) {
    return config_to_json(experiment_to_config(config)).dump(2) + "\n";
}

std::string validation_json(const ExperimentConfig& config, int instances, int mismatches,
                            double max_abs_diff, const std::vector<std::string>& failures) {
    nlohmann::json j;
    j["mode"] = "validate";
    j["seed"] = config.seed;
    j["instances"] = instances;
    j["mismatches"] = mismatches;
    j["max_abs_diff"] = max_abs_diff;
    j["tolerance"] = config.validate_tolerance;
    j["failures"] = failures;
    return j.dump(2) + "\n";
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    std::filesystem::path full = std::filesystem::path(dir) / name;
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out) throw SimulationError("cannot write " + full.string());
    out << content;
    if (!out) throw SimulationError("failed writing " + full.string());
}

}  // namespace rqsim
