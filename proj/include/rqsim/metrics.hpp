#pragma once

// Sample performance measures of one finished path, all simple ratios of
// customer sums: per-node total time S, waiting time W, throughput T,
// utilization U, mean occupancy J, queue length Q; system-level S and W for
// tandem lines; server idle time I for blocked lines. Multi-server queues use
// the per-customer completion epochs where the single-server formulas use
// departures, except that throughput and utilization keep the K-th departure
// in the denominator.

#include <span>
#include <stdexcept>
#include <vector>

#include "rqsim/time_algebra.hpp"
#include "rqsim/types.hpp"

namespace rqsim {

template <class T>
struct NodeMetrics {
    T total_time{};        // S: mean time a customer spends at the node
    T waiting_time{};      // W: mean time not in service
    T throughput{};        // T: customers per time unit, K / D_K
    T utilization{};       // U: busy time over D_K (pooled across servers)
    T in_system{};         // J: time-average number of customers at the node
    T queue_length{};      // Q: time-average queue length
    T utilization_per_server{};  // U / m; equals U for single servers
};

template <class T>
struct SystemMetrics {
    T total_time{};    // mean end-to-end time of a customer
    T waiting_time{};  // mean end-to-end time not in service
};

namespace detail {

template <class T>
void check_node_window(const SamplePath<T>& path, int node, int horizon) {
    if (horizon < 1) throw std::invalid_argument("metrics: horizon must be >= 1");
    if (node < 0 || node >= path.node_count())
        throw std::invalid_argument("metrics: node index out of range");
    if (static_cast<int>(path.departures[static_cast<size_t>(node)].size()) < horizon ||
        static_cast<int>(path.arrivals[static_cast<size_t>(node)].size()) < horizon)
        throw std::invalid_argument("metrics: horizon exceeds recorded path length");
}

}  // namespace detail

template <class T>
NodeMetrics<T> node_metrics(const SamplePath<T>& path, int node, std::span<const T> services,
                            int horizon) {
    detail::check_node_window(path, node, horizon);
    detail::check_durations(services, horizon, "metrics: services");
    const auto& arr = path.arrivals[static_cast<size_t>(node)];
    const auto& dep = path.departures[static_cast<size_t>(node)];

    T sojourn_sum{};
    T service_sum{};
    for (int k = 0; k < horizon; ++k) {
        sojourn_sum += dep[static_cast<size_t>(k)] - arr[static_cast<size_t>(k)];
        service_sum += services[static_cast<size_t>(k)];
    }
    T last = dep[static_cast<size_t>(horizon - 1)];
    if (value_of(last) == 0.0)
        throw std::domain_error("metrics: last departure at time zero, throughput undefined");

    NodeMetrics<T> m;
    m.total_time = sojourn_sum / double(horizon);
    m.waiting_time = (sojourn_sum - service_sum) / double(horizon);
    m.throughput = double(horizon) / last;
    m.utilization = service_sum / last;
    m.in_system = sojourn_sum / last;
    m.queue_length = (sojourn_sum - service_sum) / last;
    m.utilization_per_server = m.utilization;
    return m;
}

// G/G/m measures: S, W, J, Q from completion epochs, T and U from the K-th
// departure. The pooled utilization can exceed 1 for m > 1; the per-server
// variant divides it by m.
template <class T>
NodeMetrics<T> multiserver_metrics(const SamplePath<T>& path, int server_count,
                                   std::span<const T> services, int horizon) {
    detail::check_node_window(path, 0, horizon);
    if (static_cast<int>(path.completions.size()) < horizon)
        throw std::invalid_argument("metrics: path carries no completion epochs");
    detail::check_durations(services, horizon, "metrics: services");
    if (server_count < 1) throw std::invalid_argument("metrics: server_count must be >= 1");
    const auto& arr = path.arrivals[0];
    const auto& dep = path.departures[0];
    const auto& comp = path.completions;

    T sojourn_sum{};
    T service_sum{};
    for (int k = 0; k < horizon; ++k) {
        sojourn_sum += comp[static_cast<size_t>(k)] - arr[static_cast<size_t>(k)];
        service_sum += services[static_cast<size_t>(k)];
    }
    T last = dep[static_cast<size_t>(horizon - 1)];
    if (value_of(last) == 0.0)
        throw std::domain_error("metrics: last departure at time zero, throughput undefined");

    NodeMetrics<T> m;
    m.total_time = sojourn_sum / double(horizon);
    m.waiting_time = (sojourn_sum - service_sum) / double(horizon);
    m.throughput = double(horizon) / last;
    m.utilization = service_sum / last;
    m.in_system = sojourn_sum / last;
    m.queue_length = (sojourn_sum - service_sum) / last;
    m.utilization_per_server = m.utilization / double(server_count);
    return m;
}

// Customer-level measures of a whole tandem line: arrival to the system vs
// departure from the last node; waiting subtracts the customer's total
// service demand across all nodes.
template <class T>
SystemMetrics<T> system_metrics(const SamplePath<T>& path,
                                const std::vector<std::vector<T>>& services, int horizon) {
    if (path.node_count() < 1) throw std::invalid_argument("metrics: empty path");
    const int last_node = path.node_count() - 1;
    detail::check_node_window(path, 0, horizon);
    detail::check_node_window(path, last_node, horizon);
    detail::check_service_matrix(services, path.node_count(), horizon);
    const auto& arr = path.arrivals[0];
    const auto& dep = path.departures[static_cast<size_t>(last_node)];

    T sojourn_sum{};
    T service_sum{};
    for (int k = 0; k < horizon; ++k) {
        sojourn_sum += dep[static_cast<size_t>(k)] - arr[static_cast<size_t>(k)];
        for (const auto& node_services : services)
            service_sum += node_services[static_cast<size_t>(k)];
    }
    SystemMetrics<T> m;
    m.total_time = sojourn_sum / double(horizon);
    m.waiting_time = (sojourn_sum - service_sum) / double(horizon);
    return m;
}

// Mean server idle time I per served customer. The upstream reference is the
// customer's arrival at the node, which on an open tandem is its departure
// from the previous node (the external arrival at node 0). Zero wherever no
// blocking occurs; positive terms appear where blocking holds a departure
// back.
template <class T>
T idle_time(const SamplePath<T>& path, int node, std::span<const T> services, int horizon) {
    using std::max;
    detail::check_node_window(path, node, horizon);
    detail::check_durations(services, horizon, "metrics: services");
    const auto& dep = path.departures[static_cast<size_t>(node)];
    const auto& upstream = path.arrivals[static_cast<size_t>(node)];

    T sum{};
    for (int k = 0; k < horizon; ++k) {
        T prev = k > 0 ? dep[static_cast<size_t>(k - 1)] : T{};
        sum += dep[static_cast<size_t>(k)] - max(upstream[static_cast<size_t>(k)], prev) -
               services[static_cast<size_t>(k)];
    }
    return sum / double(horizon);
}

}  // namespace rqsim
