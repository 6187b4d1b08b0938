#include "rqsim/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rqsim {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    if (out.empty()) out.push_back("");
    return out;
}

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

double parse_double(const std::string& key, const std::string& token) {
    if (token == "inf") return std::numeric_limits<double>::infinity();
    try {
        size_t used = 0;
        double v = std::stod(token, &used);
        if (used != token.size()) fail(key + ": trailing characters in '" + token + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(key + ": '" + token + "' is not a number");
    } catch (const std::out_of_range&) {
        fail(key + ": '" + token + "' is out of range");
    }
}

void flatten_json(const nlohmann::json& j, const std::string& prefix, ConfigMap& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            flatten_json(it.value(), key, out);
        }
        return;
    }
    auto scalar = [](const nlohmann::json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        return v.dump();  // numbers keep a round-trippable form
    };
    if (j.is_array()) {
        std::vector<std::string> tokens;
        tokens.reserve(j.size());
        for (const auto& v : j) tokens.push_back(scalar(v));
        out.set_list(prefix, std::move(tokens));
        return;
    }
    out.set(prefix, scalar(j));
}

}  // namespace

const std::vector<std::string>& ConfigMap::tokens(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) fail("missing key '" + key + "'");
    return it->second;
}

std::string ConfigMap::get_string(const std::string& key) const {
    const auto& t = tokens(key);
    if (t.size() != 1) fail(key + ": expected a single value");
    return t[0];
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double ConfigMap::get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long ConfigMap::get_int(const std::string& key) const {
    std::string token = get_string(key);
    try {
        size_t used = 0;
        long long v = std::stoll(token, &used);
        if (used == token.size()) return v;
    } catch (const std::exception&) {
        // fall through to the double path for forms like 1e4
    }
    double v = get_double(key);
    auto n = static_cast<long long>(v);
    if (static_cast<double>(n) != v) fail(key + ": expected an integer");
    return n;
}

long long ConfigMap::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t ConfigMap::get_uint(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    long long v = get_int(key);
    if (v < 0) fail(key + ": expected a nonnegative integer");
    return static_cast<std::uint64_t>(v);
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key + ": expected a boolean");
    return false;
}

std::vector<double> ConfigMap::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& t : tokens(key)) out.push_back(parse_double(key, t));
    return out;
}

std::vector<std::string> ConfigMap::get_strings(const std::string& key) const {
    return tokens(key);
}

void ConfigMap::set(const std::string& key, std::string value) {
    entries[key] = {std::move(value)};
}

void ConfigMap::set_list(const std::string& key, std::vector<std::string> values) {
    entries[key] = std::move(values);
}

ConfigMap parse_config_text(const std::string& text) {
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        ConfigMap map;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& ex) {
            fail(std::string("JSON parse error: ") + ex.what());
        }
        flatten_json(j, "", map);
        return map;
    }

    ConfigMap map;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail("line " + std::to_string(line_no) + ": unterminated section");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) fail("line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos)
            fail("line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail("line " + std::to_string(line_no) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        map.set_list(key, split_list(value));
    }
    return map;
}

ConfigMap load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

const char* to_string(RunMode mode) {
    switch (mode) {
        case RunMode::path: return "path";
        case RunMode::estimate: return "estimate";
        case RunMode::steady: return "steady";
        case RunMode::ipa: return "ipa";
        case RunMode::validate: return "validate";
    }
    return "?";
}

RunMode parse_run_mode(const std::string& name) {
    if (name == "path") return RunMode::path;
    if (name == "estimate") return RunMode::estimate;
    if (name == "steady") return RunMode::steady;
    if (name == "ipa") return RunMode::ipa;
    if (name == "validate") return RunMode::validate;
    fail("unknown mode '" + name + "'");
    return RunMode::path;
}

namespace {

DistributionSpec load_distribution(const ConfigMap& map, const std::string& section) {
    DistributionSpec spec;
    std::string family = map.get_string(section + ".family");
    if (family == "constant") {
        spec = DistributionSpec::constant(map.get_double(section + ".value"));
    } else if (family == "exponential") {
        spec = DistributionSpec::exponential(map.get_double(section + ".rate"));
    } else if (family == "uniform") {
        spec = DistributionSpec::uniform(map.get_double(section + ".low"),
                                         map.get_double(section + ".high"));
    } else if (family == "erlang") {
        spec = DistributionSpec::erlang(static_cast<int>(map.get_int(section + ".shape")),
                                        map.get_double(section + ".rate"));
    } else if (family == "sequence") {
        spec = DistributionSpec::sequence(map.get_doubles(section + ".items"));
    } else {
        fail(section + ".family: unknown family '" + family + "'");
    }
    spec.theta_index = static_cast<int>(map.get_int(section + ".theta_index", -1));
    validate(spec);
    return spec;
}

std::vector<long long> load_counts(const ConfigMap& map, const std::string& key, int nodes,
                                   const char* what) {
    std::vector<long long> out;
    for (const auto& token : map.tokens(key)) {
        if (token == "inf") {
            out.push_back(kUnbounded);
        } else {
            double v = parse_double(key, token);
            auto n = static_cast<long long>(v);
            if (static_cast<double>(n) != v || n < 0)
                fail(key + ": " + what + " must be nonnegative integers or 'inf'");
            out.push_back(n);
        }
    }
    if (static_cast<int>(out.size()) != nodes)
        fail(key + ": expected " + std::to_string(nodes) + " entries");
    return out;
}

StochasticModel load_model(const ConfigMap& map) {
    StochasticModel model;
    std::string type = map.get_string("model.type");
    if (type == "gg1") {
        model.structure = Gg1Spec{};
    } else if (type == "tandem") {
        TandemSpec spec;
        spec.node_count = static_cast<int>(map.get_int("model.nodes"));
        if (spec.node_count < 1) fail("model.nodes must be >= 1");
        spec.buffers.assign(static_cast<size_t>(spec.node_count), kUnbounded);
        if (map.has("model.buffers")) {
            auto tokens = map.tokens("model.buffers");
            // Either one entry per node (the first must be inf) or one per
            // downstream node 2..N.
            size_t offset = 0;
            if (static_cast<int>(tokens.size()) == spec.node_count) {
                if (tokens[0] != "inf") fail("model.buffers: first node's buffer must be 'inf'");
                offset = 1;
            } else if (static_cast<int>(tokens.size()) != spec.node_count - 1) {
                fail("model.buffers: expected " + std::to_string(spec.node_count - 1) + " or " +
                     std::to_string(spec.node_count) + " entries");
            }
            for (size_t i = offset == 1 ? 1 : 0; i < tokens.size(); ++i) {
                size_t node = offset == 1 ? i : i + 1;
                if (tokens[i] == "inf") {
                    spec.buffers[node] = kUnbounded;
                } else {
                    double v = parse_double("model.buffers", tokens[i]);
                    auto b = static_cast<long long>(v);
                    if (static_cast<double>(b) != v || b < 0)
                        fail("model.buffers: capacities are nonnegative integers or 'inf'");
                    spec.buffers[node] = b;
                }
            }
        }
        std::string blocking = map.get_string("model.blocking", "manufacturing");
        if (blocking == "manufacturing") spec.blocking = BlockingRule::manufacturing;
        else if (blocking == "communication") spec.blocking = BlockingRule::communication;
        else fail("model.blocking: expected manufacturing or communication");
        validate(spec);
        model.structure = spec;
    } else if (type == "closed_tandem") {
        ClosedTandemSpec spec;
        spec.node_count = static_cast<int>(map.get_int("model.nodes"));
        if (spec.node_count < 1) fail("model.nodes must be >= 1");
        spec.populations =
            load_counts(map, "model.populations", spec.node_count, "populations");
        for (long long p : spec.populations)
            if (p == kUnbounded) fail("model.populations: closed tandems need finite populations");
        validate(spec);
        model.structure = spec;
    } else if (type == "ggm") {
        GGmSpec spec;
        spec.server_count = static_cast<int>(map.get_int("model.m"));
        validate(spec);
        model.structure = spec;
    } else if (type == "network") {
        NetworkSpec spec;
        spec.node_count = static_cast<int>(map.get_int("model.nodes"));
        if (spec.node_count < 1) fail("model.nodes must be >= 1");
        spec.populations =
            load_counts(map, "model.populations", spec.node_count, "populations");
        spec.routing.rules.resize(static_cast<size_t>(spec.node_count));
        bool explicit_routing = map.get_bool("model.routing_explicit", false);
        for (int n = 0; n < spec.node_count; ++n) {
            std::string key = "model.routing." + std::to_string(n + 1);
            RoutingPlan::NodeRule rule;
            rule.cycle = !explicit_routing;
            for (const auto& token : map.tokens(key)) {
                double v = parse_double(key, token);
                int target = static_cast<int>(v);
                if (static_cast<double>(target) != v || target < 1 || target > spec.node_count)
                    fail(key + ": targets are 1-based node indices");
                rule.targets.push_back(target - 1);
            }
            spec.routing.rules[static_cast<size_t>(n)] = std::move(rule);
        }
        validate(spec);
        model.structure = spec;
    } else {
        fail("model.type: unknown type '" + type + "'");
    }

    const int nodes = node_count(model.structure);
    if (has_external_arrivals(model.structure)) model.interarrival = load_distribution(map, "arrival");
    model.service.reserve(static_cast<size_t>(nodes));
    for (int n = 0; n < nodes; ++n) {
        std::string specific = "service." + std::to_string(n + 1);
        if (map.has(specific + ".family")) {
            model.service.push_back(load_distribution(map, specific));
        } else if (map.has("service.family")) {
            model.service.push_back(load_distribution(map, "service"));
        } else {
            fail("missing [" + specific + "] (or a shared [service]) distribution");
        }
    }
    validate(model);
    return model;
}

}  // namespace

ExperimentConfig load_experiment(const ConfigMap& map) {
    ExperimentConfig config;
    config.mode = parse_run_mode(map.get_string("mode", "path"));
    config.seed = map.get_uint("seed", 1);
    config.threads = static_cast<int>(map.get_int("threads", 1));
    if (config.threads < 1) fail("threads must be >= 1");
    config.quiet = map.get_bool("quiet", false);
    config.out_dir = map.get_string("out", ".");

    if (config.mode == RunMode::validate) {
        config.validate_instances = static_cast<int>(map.get_int("validate.instances", 60));
        if (config.validate_instances < 1) fail("validate.instances must be >= 1");
        config.validate_tolerance = map.get_double("validate.tolerance", 1e-9);
        return config;
    }

    config.model = load_model(map);
    config.horizon = static_cast<int>(map.get_int("horizon"));
    if (config.horizon < 1) fail("horizon must be >= 1");
    config.theta = map.has("theta.values") ? map.get_doubles("theta.values") : std::vector<double>{};
    config.replications = static_cast<int>(map.get_int("replications", 100));

    if (map.has("measures.names")) {
        for (const auto& name : map.get_strings("measures.names"))
            config.measures.push_back(parse_measure(name));
    } else {
        config.measures.push_back({MeasureKind::total_time, 0});
    }
    for (const auto& sel : config.measures) {
        if (sel.node >= node_count(config.model->structure))
            fail("measure '" + measure_name(sel) + "' references a node beyond the model");
    }

    config.variance_reduction = map.get_string("estimate.variance_reduction", "none");
    if (config.variance_reduction != "none" && config.variance_reduction != "antithetic")
        fail("estimate.variance_reduction: expected none or antithetic");
    if (map.has("estimate.theta2")) config.theta2 = map.get_doubles("estimate.theta2");

    config.warmup = static_cast<int>(map.get_int("steady.warmup", -1));
    config.batches = static_cast<int>(map.get_int("steady.batches", 32));
    config.ipa_coord = static_cast<int>(map.get_int("ipa.coord", 0));
    config.fd_step = map.get_double("ipa.fd_h", 0.0);

    if (config.mode == RunMode::steady && config.warmup < 0)
        config.warmup = config.horizon / 100;
    return config;
}

namespace {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    nlohmann::json j = v;
    return j.dump();
}

void store_distribution(ConfigMap& map, const std::string& section, const DistributionSpec& spec) {
    map.set(section + ".family", to_string(spec.family));
    switch (spec.family) {
        case DistFamily::constant: map.set(section + ".value", format_double(spec.value)); break;
        case DistFamily::exponential: map.set(section + ".rate", format_double(spec.rate)); break;
        case DistFamily::uniform:
            map.set(section + ".low", format_double(spec.low));
            map.set(section + ".high", format_double(spec.high));
            break;
        case DistFamily::erlang:
            map.set(section + ".shape", std::to_string(spec.shape));
            map.set(section + ".rate", format_double(spec.rate));
            break;
        case DistFamily::sequence: {
            std::vector<std::string> items;
            items.reserve(spec.items.size());
            for (double x : spec.items) items.push_back(format_double(x));
            map.set_list(section + ".items", std::move(items));
            break;
        }
    }
    if (spec.theta_index >= 0) map.set(section + ".theta_index", std::to_string(spec.theta_index));
}

std::vector<std::string> count_tokens(const std::vector<long long>& counts) {
    std::vector<std::string> out;
    out.reserve(counts.size());
    for (long long c : counts) out.push_back(c == kUnbounded ? "inf" : std::to_string(c));
    return out;
}

}  // namespace

ConfigMap experiment_to_config(const ExperimentConfig& config) {
    // Execution knobs (threads, output directory, quiet) are not part of the
    // experiment: the same manifest reproduces the same bytes regardless.
    ConfigMap map;
    map.set("mode", to_string(config.mode));
    map.set("seed", std::to_string(config.seed));
    if (config.mode == RunMode::validate) {
        map.set("validate.instances", std::to_string(config.validate_instances));
        map.set("validate.tolerance", format_double(config.validate_tolerance));
        return map;
    }

    map.set("horizon", std::to_string(config.horizon));
    map.set("replications", std::to_string(config.replications));
    if (!config.theta.empty()) {
        std::vector<std::string> theta;
        for (double t : config.theta) theta.push_back(format_double(t));
        map.set_list("theta.values", std::move(theta));
    }
    {
        std::vector<std::string> names;
        for (const auto& sel : config.measures) names.push_back(measure_name(sel));
        map.set_list("measures.names", std::move(names));
    }

    const StochasticModel& model = *config.model;
    std::visit(
        [&](const auto& spec) {
            using S = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<S, Gg1Spec>) {
                map.set("model.type", "gg1");
            } else if constexpr (std::is_same_v<S, TandemSpec>) {
                map.set("model.type", "tandem");
                map.set("model.nodes", std::to_string(spec.node_count));
                map.set_list("model.buffers", count_tokens(spec.buffers));
                map.set("model.blocking", to_string(spec.blocking));
            } else if constexpr (std::is_same_v<S, ClosedTandemSpec>) {
                map.set("model.type", "closed_tandem");
                map.set("model.nodes", std::to_string(spec.node_count));
                map.set_list("model.populations", count_tokens(spec.populations));
            } else if constexpr (std::is_same_v<S, GGmSpec>) {
                map.set("model.type", "ggm");
                map.set("model.m", std::to_string(spec.server_count));
            } else {
                map.set("model.type", "network");
                map.set("model.nodes", std::to_string(spec.node_count));
                map.set_list("model.populations", count_tokens(spec.populations));
                map.set("model.routing_explicit",
                        spec.routing.rules.empty() || spec.routing.rules[0].cycle ? "false"
                                                                                  : "true");
                for (int n = 0; n < spec.node_count; ++n) {
                    std::vector<std::string> targets;
                    for (int t : spec.routing.rules[static_cast<size_t>(n)].targets)
                        targets.push_back(std::to_string(t + 1));
                    map.set_list("model.routing." + std::to_string(n + 1), std::move(targets));
                }
            }
        },
        model.structure);

    if (has_external_arrivals(model.structure)) store_distribution(map, "arrival", model.interarrival);
    for (size_t n = 0; n < model.service.size(); ++n)
        store_distribution(map, "service." + std::to_string(n + 1), model.service[n]);

    map.set("estimate.variance_reduction", config.variance_reduction);
    if (!config.theta2.empty()) {
        std::vector<std::string> theta2;
        for (double t : config.theta2) theta2.push_back(format_double(t));
        map.set_list("estimate.theta2", std::move(theta2));
    }
    map.set("steady.warmup", std::to_string(config.warmup));
    map.set("steady.batches", std::to_string(config.batches));
    map.set("ipa.coord", std::to_string(config.ipa_coord));
    if (config.fd_step > 0) map.set("ipa.fd_h", format_double(config.fd_step));
    return map;
}

}  // namespace rqsim
