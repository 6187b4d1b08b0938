#pragma once

// Arrival/departure-time recursions for the single-server model family:
// G/G/1, open tandem lines, closed tandem systems, and tandem lines with
// finite buffers under manufacturing or communication blocking. Every epoch
// is produced by max and + over the input durations, so the engines are
// templated on the scalar type; instantiating them over Dual propagates
// pathwise derivatives through the same code.

#include <algorithm>
#include <span>
#include <vector>

#include "rqsim/errors.hpp"
#include "rqsim/types.hpp"

namespace rqsim {

// A_k = A_{k-1} + alpha_k, D_k = max(A_k, D_{k-1}) + tau_k, A_0 = D_0 = 0.
template <class T>
SamplePath<T> simulate_gg1(std::span<const T> interarrivals, std::span<const T> services,
                           int horizon) {
    using std::max;
    if (horizon < 1) throw std::invalid_argument("gg1: horizon must be >= 1");
    detail::check_durations(interarrivals, horizon, "interarrivals");
    detail::check_durations(services, horizon, "services");

    SamplePath<T> path;
    path.horizon = horizon;
    path.arrivals.resize(1);
    path.departures.resize(1);
    auto& arr = path.arrivals[0];
    auto& dep = path.departures[0];
    arr.reserve(horizon);
    dep.reserve(horizon);

    T a = T{};
    T d = T{};
    for (int k = 0; k < horizon; ++k) {
        a = a + interarrivals[static_cast<size_t>(k)];
        d = max(a, d) + services[static_cast<size_t>(k)];
        arr.push_back(a);
        dep.push_back(d);
    }
    return path;
}

// Unbounded-buffer tandem: d[n][k] = max(d[n-1][k], d[n][k-1]) + tau[n][k],
// with d[-1][k] read as the external arrival A_k.
template <class T>
SamplePath<T> simulate_tandem_unbounded(int node_count, std::span<const T> interarrivals,
                                        const std::vector<std::vector<T>>& services,
                                        int horizon) {
    using std::max;
    if (node_count < 1) throw std::invalid_argument("tandem: node_count must be >= 1");
    if (horizon < 1) throw std::invalid_argument("tandem: horizon must be >= 1");
    detail::check_durations(interarrivals, horizon, "interarrivals");
    detail::check_service_matrix(services, node_count, horizon);

    const auto n_nodes = static_cast<size_t>(node_count);
    SamplePath<T> path;
    path.horizon = horizon;
    path.departures.assign(n_nodes, {});
    for (auto& d : path.departures) d.reserve(horizon);

    std::vector<T> arrivals;
    arrivals.reserve(horizon);
    T a = T{};
    for (int k = 0; k < horizon; ++k) {
        a = a + interarrivals[static_cast<size_t>(k)];
        arrivals.push_back(a);
    }

    for (int k = 0; k < horizon; ++k) {
        T upstream = arrivals[static_cast<size_t>(k)];
        for (size_t n = 0; n < n_nodes; ++n) {
            auto& dep = path.departures[n];
            T prev = k > 0 ? dep[static_cast<size_t>(k - 1)] : T{};
            T d = max(upstream, prev) + services[n][static_cast<size_t>(k)];
            dep.push_back(d);
            upstream = d;
        }
    }

    // Customer k reaches node n the instant it leaves node n-1.
    path.arrivals.resize(n_nodes);
    path.arrivals[0] = std::move(arrivals);
    for (size_t n = 1; n < n_nodes; ++n) path.arrivals[n] = path.departures[n - 1];
    return path;
}

// Finite-buffer tandem. Terms whose customer index is <= 0 or whose buffer is
// unbounded drop out of the maxima; that realizes the -infinity boundary
// without doing arithmetic on an infinite sentinel.
template <class T>
SamplePath<T> simulate_tandem_blocking(const TandemSpec& spec, std::span<const T> interarrivals,
                                       const std::vector<std::vector<T>>& services,
                                       int horizon) {
    using std::max;
    validate(spec);
    if (horizon < 1) throw std::invalid_argument("tandem: horizon must be >= 1");
    detail::check_durations(interarrivals, horizon, "interarrivals");
    detail::check_service_matrix(services, spec.node_count, horizon);

    const auto n_nodes = static_cast<size_t>(spec.node_count);
    SamplePath<T> path;
    path.horizon = horizon;
    path.departures.assign(n_nodes, {});
    for (auto& d : path.departures) d.reserve(horizon);

    std::vector<T> arrivals;
    arrivals.reserve(horizon);
    T a = T{};
    for (int k = 0; k < horizon; ++k) {
        a = a + interarrivals[static_cast<size_t>(k)];
        arrivals.push_back(a);
    }

    // Departure of customer k - B_{n+1} - 1 from the next node, or nothing if
    // that index is not yet realized / the next buffer is unbounded. The
    // referenced row is always < k, so a row sweep over k is well defined.
    auto downstream_release = [&](size_t n, int k) -> const T* {
        if (n + 1 >= n_nodes) return nullptr;
        long long b = spec.buffers[n + 1];
        if (b == kUnbounded) return nullptr;
        long long j = static_cast<long long>(k) + 1 - b - 1;  // 1-based index
        if (j < 1) return nullptr;
        return &path.departures[n + 1][static_cast<size_t>(j - 1)];
    };

    const bool manufacturing = spec.blocking == BlockingRule::manufacturing;
    for (int k = 0; k < horizon; ++k) {
        T upstream = arrivals[static_cast<size_t>(k)];
        for (size_t n = 0; n < n_nodes; ++n) {
            auto& dep = path.departures[n];
            T prev = k > 0 ? dep[static_cast<size_t>(k - 1)] : T{};
            T ready = max(upstream, prev);
            const T* release = downstream_release(n, k);
            T d;
            if (manufacturing) {
                d = ready + services[n][static_cast<size_t>(k)];
                if (release) d = max(d, *release);
            } else {
                if (release) ready = max(ready, *release);
                d = ready + services[n][static_cast<size_t>(k)];
            }
            dep.push_back(d);
            upstream = d;
        }
    }

    path.arrivals.resize(n_nodes);
    path.arrivals[0] = std::move(arrivals);
    for (size_t n = 1; n < n_nodes; ++n) path.arrivals[n] = path.departures[n - 1];
    return path;
}

template <class T>
SamplePath<T> simulate_open_tandem(const TandemSpec& spec, std::span<const T> interarrivals,
                                   const std::vector<std::vector<T>>& services, int horizon) {
    validate(spec);
    if (spec.all_unbounded())
        return simulate_tandem_unbounded(spec.node_count, interarrivals, services, horizon);
    return simulate_tandem_blocking(spec, interarrivals, services, horizon);
}

// Closed tandem: d[0][k] = max(d[N-1][k - K_1], d[0][k-1]) + tau, and
// d[n][k] = max(d[n-1][k - K_{n+1}], d[n][k-1]) + tau for the other nodes.
// Index 0 anchors at time zero; indices < 0 drop out of the maxima. Within a
// row, a node with population 0 reads its predecessor's same-row value, so the
// sweep starts at a node that holds at least one initial customer and wraps
// around the ring from there.
template <class T>
SamplePath<T> simulate_closed_tandem(const ClosedTandemSpec& spec,
                                     const std::vector<std::vector<T>>& services, int horizon) {
    using std::max;
    validate(spec);
    if (horizon < 1) throw std::invalid_argument("closed tandem: horizon must be >= 1");
    detail::check_service_matrix(services, spec.node_count, horizon);

    const auto n_nodes = static_cast<size_t>(spec.node_count);
    size_t start = 0;
    while (spec.populations[start] == 0) ++start;  // validate() guarantees one exists

    SamplePath<T> path;
    path.horizon = horizon;
    path.departures.assign(n_nodes, {});
    for (auto& d : path.departures) d.assign(static_cast<size_t>(horizon), T{});

    // 1-based customer j at `node`; j == 0 is the time-zero anchor.
    auto dep_at = [&](size_t node, long long j, bool& present) -> T {
        if (j < 0) { present = false; return T{}; }
        present = true;
        if (j == 0) return T{};
        return path.departures[node][static_cast<size_t>(j - 1)];
    };

    for (int k = 1; k <= horizon; ++k) {
        for (size_t step = 0; step < n_nodes; ++step) {
            size_t n = (start + step) % n_nodes;
            size_t prev_node = (n + n_nodes - 1) % n_nodes;
            bool has_feed = false;
            T feed = dep_at(prev_node, k - spec.populations[n], has_feed);
            bool ignored = false;
            T prev = dep_at(n, k - 1, ignored);  // always present for k >= 1
            T basis = has_feed ? max(feed, prev) : prev;
            path.departures[n][static_cast<size_t>(k - 1)] =
                basis + services[n][static_cast<size_t>(k - 1)];
        }
    }

    // Arrival of customer k at node n: time zero for the initial population,
    // afterwards the (k - K_n)-th departure from the ring predecessor.
    path.arrivals.assign(n_nodes, {});
    for (size_t n = 0; n < n_nodes; ++n) {
        auto& arr = path.arrivals[n];
        arr.reserve(horizon);
        size_t prev_node = (n + n_nodes - 1) % n_nodes;
        for (int k = 1; k <= horizon; ++k) {
            long long j = k - spec.populations[n];
            arr.push_back(j <= 0 ? T{} : path.departures[prev_node][static_cast<size_t>(j - 1)]);
        }
    }
    return path;
}

}  // namespace rqsim
