#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rqsim/time_algebra.hpp"

namespace rqsim {

// Simulated time instant, in whatever unit the durations use.
using Epoch = double;

// Ordered nonnegative durations (interarrival gaps or service times).
using DurationSequence = std::vector<double>;

// Buffer capacity / initial population marker for "no limit".
inline constexpr long long kUnbounded = -1;

enum class BlockingRule { manufacturing, communication };

inline const char* to_string(BlockingRule rule) {
    return rule == BlockingRule::manufacturing ? "manufacturing" : "communication";
}

// One realization of a system: per-node arrival and departure epochs, plus
// the per-customer completion sequence for multi-server queues (where the
// k-th departure and the k-th customer's completion differ).
template <class T>
struct SamplePath {
    std::vector<std::vector<T>> arrivals;    // [node][customer]
    std::vector<std::vector<T>> departures;  // [node][customer]
    std::vector<T> completions;              // multi-server only, by arrival order
    int horizon = 0;

    int node_count() const { return static_cast<int>(departures.size()); }
};

// Open tandem of single-server FCFS queues. buffers[n] is the capacity of the
// waiting room at node n (kUnbounded for no limit); buffers[0] must be
// unbounded, it is the input buffer of the whole line.
struct TandemSpec {
    int node_count = 1;
    std::vector<long long> buffers;  // size node_count; entries >= 0 or kUnbounded
    BlockingRule blocking = BlockingRule::manufacturing;

    bool all_unbounded() const {
        for (long long b : buffers)
            if (b != kUnbounded) return false;
        return true;
    }
};

inline void validate(const TandemSpec& spec) {
    if (spec.node_count < 1) throw std::invalid_argument("tandem: node_count must be >= 1");
    if (static_cast<int>(spec.buffers.size()) != spec.node_count)
        throw std::invalid_argument("tandem: one buffer entry per node required");
    if (spec.buffers[0] != kUnbounded)
        throw std::invalid_argument("tandem: the first node's buffer must be unbounded");
    for (long long b : spec.buffers)
        if (b < 0 && b != kUnbounded)
            throw std::invalid_argument("tandem: negative buffer capacity");
}

// Closed tandem: customers recirculate from the last node to the first;
// populations[n] customers sit in node n's buffer at time zero.
struct ClosedTandemSpec {
    int node_count = 1;
    std::vector<long long> populations;  // size node_count, each >= 0
};

inline void validate(const ClosedTandemSpec& spec) {
    if (spec.node_count < 1) throw std::invalid_argument("closed tandem: node_count must be >= 1");
    if (static_cast<int>(spec.populations.size()) != spec.node_count)
        throw std::invalid_argument("closed tandem: one population entry per node required");
    long long total = 0;
    for (long long k : spec.populations) {
        if (k < 0) throw std::invalid_argument("closed tandem: negative initial population");
        total += k;
    }
    if (total == 0)
        throw std::invalid_argument("closed tandem: empty system is deadlocked (all populations zero)");
}

struct GGmSpec {
    int server_count = 1;
};

inline void validate(const GGmSpec& spec) {
    if (spec.server_count < 1) throw std::invalid_argument("ggm: server_count must be >= 1");
}

// Deterministic routing: target(n, k) names the node that receives the k-th
// departure from node n. Rules are either explicit lists consumed in order or
// finite patterns cycled indefinitely.
struct RoutingPlan {
    struct NodeRule {
        std::vector<int> targets;  // 0-based node indices
        bool cycle = true;         // false: explicit list, exhausting it is an error
    };
    std::vector<NodeRule> rules;  // one per node

    // k is 1-based (the k-th departure).
    int target(int node, long long k) const {
        const NodeRule& rule = rules[static_cast<size_t>(node)];
        const auto len = static_cast<long long>(rule.targets.size());
        if (rule.cycle) return rule.targets[static_cast<size_t>((k - 1) % len)];
        if (k > len)
            throw std::invalid_argument("routing: explicit plan for node " +
                                        std::to_string(node + 1) + " exhausted at departure " +
                                        std::to_string(k));
        return rule.targets[static_cast<size_t>(k - 1)];
    }
};

struct NetworkSpec {
    int node_count = 1;
    std::vector<long long> populations;  // size node_count; >= 0 or kUnbounded
    RoutingPlan routing;
};

inline void validate(const NetworkSpec& spec) {
    if (spec.node_count < 1) throw std::invalid_argument("network: node_count must be >= 1");
    if (static_cast<int>(spec.populations.size()) != spec.node_count)
        throw std::invalid_argument("network: one population entry per node required");
    for (long long k : spec.populations)
        if (k < 0 && k != kUnbounded)
            throw std::invalid_argument("network: negative initial population");
    if (static_cast<int>(spec.routing.rules.size()) != spec.node_count)
        throw std::invalid_argument("network: one routing rule per node required");
    for (const auto& rule : spec.routing.rules) {
        if (rule.targets.empty())
            throw std::invalid_argument("network: empty routing rule");
        for (int t : rule.targets)
            if (t < 0 || t >= spec.node_count)
                throw std::invalid_argument("network: routing target out of range");
    }
}

namespace detail {

template <class T>
void check_durations(std::span<const T> seq, int horizon, const char* what) {
    if (static_cast<int>(seq.size()) < horizon)
        throw std::invalid_argument(std::string(what) + ": need at least " +
                                    std::to_string(horizon) + " items, got " +
                                    std::to_string(seq.size()));
    for (int i = 0; i < horizon; ++i)
        if (!(value_of(seq[static_cast<size_t>(i)]) >= 0.0))
            throw std::invalid_argument(std::string(what) + ": negative duration at index " +
                                        std::to_string(i + 1));
}

template <class T>
void check_service_matrix(const std::vector<std::vector<T>>& services, int node_count, int horizon) {
    if (static_cast<int>(services.size()) != node_count)
        throw std::invalid_argument("services: need one duration sequence per node");
    for (int n = 0; n < node_count; ++n)
        check_durations(std::span<const T>(services[static_cast<size_t>(n)]),
                        horizon, "services");
}

}  // namespace detail

}  // namespace rqsim
