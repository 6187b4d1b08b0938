#pragma once

// One roof over the six system classes: a tagged model description, duration
// inputs per role (interarrival process plus one service process per node),
// generic simulation dispatch, and named performance measures evaluated on
// the finished path.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rqsim/distributions.hpp"
#include "rqsim/metrics.hpp"
#include "rqsim/multiserver.hpp"
#include "rqsim/network.hpp"
#include "rqsim/random.hpp"
#include "rqsim/recursions.hpp"
#include "rqsim/types.hpp"

namespace rqsim {

struct Gg1Spec {};

using ModelSpec = std::variant<Gg1Spec, TandemSpec, ClosedTandemSpec, GGmSpec, NetworkSpec>;

inline int node_count(const ModelSpec& model) {
    return std::visit(
        [](const auto& spec) -> int {
            using S = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<S, Gg1Spec> || std::is_same_v<S, GGmSpec>)
                return 1;
            else
                return spec.node_count;
        },
        model);
}

inline bool has_external_arrivals(const ModelSpec& model) {
    return std::holds_alternative<Gg1Spec>(model) || std::holds_alternative<TandemSpec>(model) ||
           std::holds_alternative<GGmSpec>(model);
}

inline std::string model_kind_name(const ModelSpec& model) {
    struct Namer {
        std::string operator()(const Gg1Spec&) const { return "gg1"; }
        std::string operator()(const TandemSpec& s) const {
            return s.all_unbounded() ? "tandem" : std::string("tandem/") + to_string(s.blocking);
        }
        std::string operator()(const ClosedTandemSpec&) const { return "closed_tandem"; }
        std::string operator()(const GGmSpec&) const { return "ggm"; }
        std::string operator()(const NetworkSpec&) const { return "network"; }
    };
    return std::visit(Namer{}, model);
}

template <class T>
struct ModelInputs {
    std::vector<T> interarrivals;           // empty for closed systems
    std::vector<std::vector<T>> services;   // one sequence per node
};

template <class T>
SamplePath<T> simulate(const ModelSpec& model, const ModelInputs<T>& inputs, int horizon) {
    return std::visit(
        [&](const auto& spec) -> SamplePath<T> {
            using S = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<S, Gg1Spec>) {
                return simulate_gg1<T>(inputs.interarrivals, inputs.services.at(0), horizon);
            } else if constexpr (std::is_same_v<S, TandemSpec>) {
                return simulate_open_tandem<T>(spec, inputs.interarrivals, inputs.services,
                                               horizon);
            } else if constexpr (std::is_same_v<S, ClosedTandemSpec>) {
                return simulate_closed_tandem<T>(spec, inputs.services, horizon);
            } else if constexpr (std::is_same_v<S, GGmSpec>) {
                return simulate_ggm<T>(spec, inputs.interarrivals, inputs.services.at(0), horizon);
            } else {
                return simulate_network<T>(spec, inputs.services, horizon);
            }
        },
        model);
}

// ---------------------------------------------------------------------------
// Named measures

enum class MeasureKind {
    total_time,        // S at a node
    waiting_time,      // W at a node
    throughput,        // T at a node
    utilization,       // U at a node
    in_system,         // J at a node
    queue_length,      // Q at a node
    idle_time,         // I at a node (tandem family)
    system_total_time,    // S of the whole line
    system_waiting_time,  // W of the whole line
};

struct MeasureSelector {
    MeasureKind kind = MeasureKind::total_time;
    int node = 0;  // ignored by the system-level kinds
};

inline std::string measure_name(const MeasureSelector& sel) {
    switch (sel.kind) {
        case MeasureKind::total_time: return "S@" + std::to_string(sel.node + 1);
        case MeasureKind::waiting_time: return "W@" + std::to_string(sel.node + 1);
        case MeasureKind::throughput: return "T@" + std::to_string(sel.node + 1);
        case MeasureKind::utilization: return "U@" + std::to_string(sel.node + 1);
        case MeasureKind::in_system: return "J@" + std::to_string(sel.node + 1);
        case MeasureKind::queue_length: return "Q@" + std::to_string(sel.node + 1);
        case MeasureKind::idle_time: return "I@" + std::to_string(sel.node + 1);
        case MeasureKind::system_total_time: return "S_sys";
        case MeasureKind::system_waiting_time: return "W_sys";
    }
    return "?";
}

// Accepts "S@3", "W@1", ..., "I@2", "S_sys", "W_sys"; node defaults to 1.
inline MeasureSelector parse_measure(const std::string& name) {
    MeasureSelector sel;
    std::string head = name;
    auto at = name.find('@');
    if (at != std::string::npos) {
        head = name.substr(0, at);
        int node = std::stoi(name.substr(at + 1));
        if (node < 1) throw std::invalid_argument("measure '" + name + "': node must be >= 1");
        sel.node = node - 1;
    }
    if (head == "S") sel.kind = MeasureKind::total_time;
    else if (head == "W") sel.kind = MeasureKind::waiting_time;
    else if (head == "T") sel.kind = MeasureKind::throughput;
    else if (head == "U") sel.kind = MeasureKind::utilization;
    else if (head == "J") sel.kind = MeasureKind::in_system;
    else if (head == "Q") sel.kind = MeasureKind::queue_length;
    else if (head == "I") sel.kind = MeasureKind::idle_time;
    else if (head == "S_sys") sel.kind = MeasureKind::system_total_time;
    else if (head == "W_sys") sel.kind = MeasureKind::system_waiting_time;
    else throw std::invalid_argument("unknown measure '" + name + "'");
    return sel;
}

template <class T>
T compute_measure(const ModelSpec& model, const MeasureSelector& sel, const SamplePath<T>& path,
                  const ModelInputs<T>& inputs, int horizon) {
    if (sel.kind == MeasureKind::system_total_time || sel.kind == MeasureKind::system_waiting_time) {
        if (!has_external_arrivals(model) || std::holds_alternative<GGmSpec>(model))
            throw std::invalid_argument("system measures need an open tandem or G/G/1 path");
        auto sys = system_metrics(path, inputs.services, horizon);
        return sel.kind == MeasureKind::system_total_time ? sys.total_time : sys.waiting_time;
    }
    if (sel.node < 0 || sel.node >= path.node_count())
        throw std::invalid_argument("measure node out of range");
    std::span<const T> services(inputs.services[static_cast<size_t>(sel.node)]);

    if (sel.kind == MeasureKind::idle_time) {
        if (std::holds_alternative<GGmSpec>(model))
            throw std::invalid_argument("idle time is defined per single-server node");
        return idle_time(path, sel.node, services, horizon);
    }

    NodeMetrics<T> m;
    if (const auto* ggm = std::get_if<GGmSpec>(&model))
        m = multiserver_metrics(path, ggm->server_count, services, horizon);
    else
        m = node_metrics(path, sel.node, services, horizon);

    switch (sel.kind) {
        case MeasureKind::total_time: return m.total_time;
        case MeasureKind::waiting_time: return m.waiting_time;
        case MeasureKind::throughput: return m.throughput;
        case MeasureKind::utilization: return m.utilization;
        case MeasureKind::in_system: return m.in_system;
        case MeasureKind::queue_length: return m.queue_length;
        default: throw std::invalid_argument("unhandled measure kind");
    }
}

// ---------------------------------------------------------------------------
// Random model: structure plus one distribution per duration role.

struct StochasticModel {
    ModelSpec structure;
    DistributionSpec interarrival;            // used only by open models
    std::vector<DistributionSpec> service;    // one per node
};

inline void validate(const StochasticModel& model) {
    std::visit([](const auto& spec) {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (!std::is_same_v<S, Gg1Spec>) validate(spec);
    }, model.structure);
    if (static_cast<int>(model.service.size()) != node_count(model.structure))
        throw std::invalid_argument("model: one service distribution per node required");
    // Role ids (interarrival + one per node) must fit one substream block.
    if (node_count(model.structure) + 1 > static_cast<int>(kRoleStride))
        throw std::invalid_argument("model: at most " + std::to_string(kRoleStride - 1) +
                                    " nodes per model (substream role layout)");
    if (has_external_arrivals(model.structure)) validate(model.interarrival);
    for (const auto& s : model.service) validate(s);
}

// Substream role ids; see random.hpp for the layout.
inline constexpr std::uint64_t kInterarrivalRole = 0;
inline std::uint64_t service_role(int node) { return 1 + static_cast<std::uint64_t>(node); }

inline ModelInputs<double> sample_inputs(const StochasticModel& model,
                                         std::span<const double> theta, std::uint64_t seed,
                                         std::uint64_t replication, int horizon,
                                         bool antithetic = false) {
    validate(model);
    ModelInputs<double> in;
    if (has_external_arrivals(model.structure)) {
        RandomStream s = substream(seed, replication, kInterarrivalRole, antithetic);
        in.interarrivals = sample_durations(model.interarrival, theta, s, horizon);
    }
    const int nodes = node_count(model.structure);
    in.services.reserve(static_cast<size_t>(nodes));
    for (int n = 0; n < nodes; ++n) {
        RandomStream s = substream(seed, replication, service_role(n), antithetic);
        in.services.push_back(
            sample_durations(model.service[static_cast<size_t>(n)], theta, s, horizon));
    }
    return in;
}

inline ModelInputs<Dual> sample_inputs_dual(const StochasticModel& model,
                                            std::span<const double> theta, int active_coord,
                                            std::uint64_t seed, std::uint64_t replication,
                                            int horizon) {
    validate(model);
    ModelInputs<Dual> in;
    if (has_external_arrivals(model.structure)) {
        RandomStream s = substream(seed, replication, kInterarrivalRole);
        in.interarrivals =
            sample_durations_dual(model.interarrival, theta, active_coord, s, horizon);
    }
    const int nodes = node_count(model.structure);
    in.services.reserve(static_cast<size_t>(nodes));
    for (int n = 0; n < nodes; ++n) {
        RandomStream s = substream(seed, replication, service_role(n));
        in.services.push_back(sample_durations_dual(model.service[static_cast<size_t>(n)], theta,
                                                    active_coord, s, horizon));
    }
    return in;
}

}  // namespace rqsim
