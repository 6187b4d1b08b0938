#pragma once

// Closed networks of single-server FCFS nodes with deterministic routing.
// D_k^n = max(A_k^n, D_{k-1}^n) + tau_k^n; A_k^n is zero for the initial
// population and afterwards the (k - K_n)-th smallest of the departure epochs
// routed to n. The engine advances a global chronological work list, so the
// epochs routed to a node arrive in nondecreasing order and the running
// order statistic is simply the insertion sequence.

#include <algorithm>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rqsim/errors.hpp"
#include "rqsim/types.hpp"

namespace rqsim {

template <class T>
SamplePath<T> simulate_network(const NetworkSpec& spec, const std::vector<std::vector<T>>& services,
                               const std::vector<int>& horizons) {
    using std::max;
    validate(spec);
    const auto n_nodes = static_cast<size_t>(spec.node_count);
    if (horizons.size() != n_nodes)
        throw std::invalid_argument("network: one horizon per node required");
    if (services.size() != n_nodes)
        throw std::invalid_argument("network: one service sequence per node required");
    for (size_t n = 0; n < n_nodes; ++n) {
        if (horizons[n] < 0) throw std::invalid_argument("network: negative horizon");
        detail::check_durations(std::span<const T>(services[n]), horizons[n], "services");
    }

    SamplePath<T> path;
    path.horizon = *std::max_element(horizons.begin(), horizons.end());
    path.arrivals.assign(n_nodes, {});
    path.departures.assign(n_nodes, {});
    std::vector<std::vector<T>> routed_in(n_nodes);  // insertion order == sorted order
    for (size_t n = 0; n < n_nodes; ++n) {
        path.arrivals[n].reserve(static_cast<size_t>(horizons[n]));
        path.departures[n].reserve(static_cast<size_t>(horizons[n]));
    }

    long long remaining = 0;
    for (size_t n = 0; n < n_nodes; ++n) remaining += horizons[n];

    // Arrival epoch of the next (k-th) customer at node n, if already fixed.
    auto next_arrival = [&](size_t n, T& out) -> bool {
        long long k = static_cast<long long>(path.departures[n].size()) + 1;
        long long population = spec.populations[n];
        if (population == kUnbounded || k <= population) {
            out = T{};
            return true;
        }
        long long j = k - population;
        if (j > static_cast<long long>(routed_in[n].size())) return false;
        out = routed_in[n][static_cast<size_t>(j - 1)];
        return true;
    };

    while (remaining > 0) {
        // Earliest realizable next departure; ties to the lowest node index.
        bool found = false;
        size_t best_node = 0;
        T best{};
        T best_arrival{};
        for (size_t n = 0; n < n_nodes; ++n) {
            auto k = static_cast<long long>(path.departures[n].size()) + 1;
            if (k > horizons[n]) continue;
            T arrival;
            if (!next_arrival(n, arrival)) continue;
            T prev = path.departures[n].empty() ? T{} : path.departures[n].back();
            T candidate = max(arrival, prev) + services[n][static_cast<size_t>(k - 1)];
            if (!found || value_of(candidate) < value_of(best)) {
                found = true;
                best_node = n;
                best = candidate;
                best_arrival = arrival;
            }
        }
        if (!found) {
            // Every unfinished node waits on an arrival. If a node that hit
            // its horizon could still produce departures, larger horizons
            // would let the run continue; otherwise no customer exists to
            // serve and the network is deadlocked.
            std::vector<int> stalled;
            std::string at_horizon;
            for (size_t n = 0; n < n_nodes; ++n) {
                if (static_cast<long long>(path.departures[n].size()) < horizons[n]) {
                    stalled.push_back(static_cast<int>(n));
                } else {
                    T unused;
                    if (next_arrival(n, unused)) {
                        if (!at_horizon.empty()) at_horizon += ", ";
                        at_horizon += std::to_string(n + 1);
                    }
                }
            }
            std::string waiting;
            for (int n : stalled) {
                if (!waiting.empty()) waiting += ", ";
                waiting += std::to_string(n + 1);
            }
            if (!at_horizon.empty())
                throw HorizonError("network: node(s) " + waiting +
                                   " wait for arrivals that only appear beyond the horizon of "
                                   "node(s) " +
                                   at_horizon);
            throw DeadlockError("network: deadlock, node(s) " + waiting +
                                    " can never receive a customer",
                                std::move(stalled));
        }

        auto k = static_cast<long long>(path.departures[best_node].size()) + 1;
        path.arrivals[best_node].push_back(best_arrival);
        path.departures[best_node].push_back(best);
        int target = spec.routing.target(static_cast<int>(best_node), k);
        routed_in[static_cast<size_t>(target)].push_back(best);
        --remaining;
    }
    return path;
}

template <class T>
SamplePath<T> simulate_network(const NetworkSpec& spec, const std::vector<std::vector<T>>& services,
                               int horizon) {
    return simulate_network(spec, services,
                            std::vector<int>(static_cast<size_t>(spec.node_count), horizon));
}

// Minimum over k-subsets of the routed-departure multiset of the subset
// maximum; equals the k-th order statistic. Test oracle (enumeration).
inline Epoch arrival_epoch_bruteforce(std::span<const double> routed, int k,
                                      std::uint64_t subset_guard = 1'000'000) {
    if (k < 1) throw std::invalid_argument("arrival_epoch_bruteforce: k must be >= 1");
    const int n = static_cast<int>(routed.size());
    if (n < k) throw std::invalid_argument("arrival_epoch_bruteforce: fewer than k elements");

    std::uint64_t count = 1;
    for (int i = 1; i <= k; ++i) {
        count = count * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
        if (count > subset_guard)
            throw std::invalid_argument("arrival_epoch_bruteforce: subset count exceeds guard");
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
        double subset_max = -std::numeric_limits<double>::infinity();
        for (int j : idx) subset_max = std::max(subset_max, routed[static_cast<size_t>(j)]);
        best = std::min(best, subset_max);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - (k - i)) --i;
        if (i < 0) break;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
    return best;
}

// k-th order statistic by selection; the fast route the engine relies on.
inline Epoch arrival_epoch_fastpath(std::span<const double> routed, int k) {
    if (k < 1) throw std::invalid_argument("arrival_epoch_fastpath: k must be >= 1");
    if (static_cast<int>(routed.size()) < k)
        throw std::invalid_argument("arrival_epoch_fastpath: fewer than k elements");
    std::vector<double> work(routed.begin(), routed.end());
    std::nth_element(work.begin(), work.begin() + (k - 1), work.end());
    return work[static_cast<size_t>(k - 1)];
}

// An unbounded-buffer tandem line as a routing network: node 0 is a source
// with an unbounded initial population whose service times are the
// interarrival gaps, so its departure sequence reproduces the external
// arrival epochs; tandem node n becomes network node n+1. Departures from the
// last node are routed back to the source, where the unbounded population
// makes them irrelevant.
struct TandemNetworkEncoding {
    NetworkSpec network;
    int source = 0;  // network node index of the synthetic source

    int network_node(int tandem_node) const { return tandem_node + 1; }

    // Service matrix for the network: the source consumes the interarrival
    // gaps, the remaining nodes keep their tandem service times.
    template <class T>
    std::vector<std::vector<T>> services(std::span<const T> interarrivals,
                                         const std::vector<std::vector<T>>& tandem_services) const {
        std::vector<std::vector<T>> all;
        all.reserve(tandem_services.size() + 1);
        all.emplace_back(interarrivals.begin(), interarrivals.end());
        for (const auto& s : tandem_services) all.push_back(s);
        return all;
    }

    std::vector<int> horizons(int horizon) const {
        return std::vector<int>(static_cast<size_t>(network.node_count), horizon);
    }
};

inline TandemNetworkEncoding tandem_as_network(const TandemSpec& spec) {
    validate(spec);
    if (!spec.all_unbounded())
        throw std::invalid_argument(
            "tandem_as_network: finite-buffer tandems have no routing-network representation");
    TandemNetworkEncoding enc;
    enc.source = 0;
    enc.network.node_count = spec.node_count + 1;
    enc.network.populations.assign(static_cast<size_t>(spec.node_count + 1), 0);
    enc.network.populations[0] = kUnbounded;
    enc.network.routing.rules.resize(static_cast<size_t>(spec.node_count + 1));
    for (int n = 0; n <= spec.node_count; ++n) {
        int next = n < spec.node_count ? n + 1 : 0;
        enc.network.routing.rules[static_cast<size_t>(n)] = {{next}, true};
    }
    return enc;
}

// A closed tandem is the same ring expressed as a network: cyclic routing and
// the given initial populations.
inline NetworkSpec closed_tandem_as_network(const ClosedTandemSpec& spec) {
    validate(spec);
    NetworkSpec net;
    net.node_count = spec.node_count;
    net.populations = spec.populations;
    net.routing.rules.resize(static_cast<size_t>(spec.node_count));
    for (int n = 0; n < spec.node_count; ++n)
        net.routing.rules[static_cast<size_t>(n)] = {{(n + 1) % spec.node_count}, true};
    return net;
}

}  // namespace rqsim
