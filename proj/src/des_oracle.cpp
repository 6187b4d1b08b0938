#include "rqsim/des_oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <queue>
#include <string>

#include "rqsim/errors.hpp"

namespace rqsim::des {

namespace {

enum class EventKind : int { external_arrival = 0, service_end = 1 };

struct Event {
    double time;
    EventKind kind;
    int node;
    std::uint64_t seq;  // deterministic tie-break for simultaneous events
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.node != b.node) return a.node > b.node;
        return a.seq > b.seq;
    }
};

using EventList = std::priority_queue<Event, std::vector<Event>, EventAfter>;

constexpr long long kNoCap = std::numeric_limits<long long>::max();

// ---------------------------------------------------------------------------
// Tandem family (G/G/1 is the single-node case). Per-node single server,
// FCFS, optional finite downstream buffers with manufacturing (customer holds
// the server until downstream frees a slot) or communication (server may not
// start while downstream is full) blocking.

class TandemDes {
public:
    TandemDes(int node_count, const std::vector<long long>& buffer_caps, bool manufacturing,
              const std::vector<std::vector<double>>& services, int horizon)
        : n_(node_count),
          caps_(buffer_caps),
          manufacturing_(manufacturing),
          services_(services),
          horizon_(horizon),
          nodes_(static_cast<size_t>(node_count)) {}

    SamplePath<double> run(std::span<const double> external_arrivals,
                           const std::vector<long long>& initial, bool recirculate) {
        path_.horizon = horizon_;
        path_.arrivals.assign(static_cast<size_t>(n_), {});
        path_.departures.assign(static_cast<size_t>(n_), {});
        for (auto& v : path_.arrivals) v.reserve(static_cast<size_t>(horizon_));
        for (auto& v : path_.departures) v.reserve(static_cast<size_t>(horizon_));
        recirculate_ = recirculate;

        std::uint64_t seq = 0;
        for (double t : external_arrivals)
            events_.push({t, EventKind::external_arrival, 0, seq++});
        for (int n = 0; n < n_; ++n) {
            Node& node = nodes_[static_cast<size_t>(n)];
            for (long long i = 0; i < initial[static_cast<size_t>(n)]; ++i) {
                node.pending.push_back(0.0);
                node.occupancy += 1;
            }
        }
        for (int n = 0; n < n_; ++n) try_start(n, 0.0);

        while (!events_.empty()) {
            Event ev = events_.top();
            events_.pop();
            switch (ev.kind) {
                case EventKind::external_arrival:
                    enter(0, ev.time);
                    break;
                case EventKind::service_end:
                    on_service_end(ev.node, ev.time);
                    break;
            }
        }
        // Last node has no downstream, so every started service departs; with
        // valid inputs every node reaches the horizon.
        for (int n = 0; n < n_; ++n)
            if (static_cast<int>(path_.departures[static_cast<size_t>(n)].size()) != horizon_)
                throw SimulationError("des tandem: node " + std::to_string(n + 1) +
                                      " ended short of the horizon");
        return std::move(path_);
    }

private:
    struct Node {
        std::deque<double> pending;  // arrival epochs waiting for service
        bool busy = false;
        bool holding = false;  // finished service, blocked from departing
        int started = 0;
        long long occupancy = 0;  // pending + the one in service/holding
    };

    bool downstream_full(int n) const {
        if (n + 1 >= n_) return false;
        const Node& next = nodes_[static_cast<size_t>(n + 1)];
        return next.occupancy >= caps_[static_cast<size_t>(n + 1)];
    }

    void enter(int n, double t) {
        nodes_[static_cast<size_t>(n)].pending.push_back(t);
        nodes_[static_cast<size_t>(n)].occupancy += 1;
        try_start(n, t);
    }

    void try_start(int n, double t) {
        Node& node = nodes_[static_cast<size_t>(n)];
        if (node.busy || node.holding || node.pending.empty()) return;
        if (node.started >= horizon_) return;
        if (!manufacturing_ && downstream_full(n)) return;
        double arrival = node.pending.front();
        node.pending.pop_front();
        path_.arrivals[static_cast<size_t>(n)].push_back(arrival);
        node.busy = true;
        double end = t + services_[static_cast<size_t>(n)][static_cast<size_t>(node.started)];
        node.started += 1;
        events_.push({end, EventKind::service_end, n, seq_++});
    }

    void on_service_end(int n, double t) {
        Node& node = nodes_[static_cast<size_t>(n)];
        node.busy = false;
        if (manufacturing_ && downstream_full(n)) {
            node.holding = true;
            return;
        }
        depart(n, t);
    }

    void depart(int n, double t) {
        Node& node = nodes_[static_cast<size_t>(n)];
        node.holding = false;
        node.occupancy -= 1;
        path_.departures[static_cast<size_t>(n)].push_back(t);
        if (n + 1 < n_) {
            enter(n + 1, t);
        } else if (recirculate_) {
            enter(0, t);
        }
        // Space freed at n: a held customer upstream may depart now; under
        // communication blocking the upstream server may start instead.
        if (n >= 1) {
            Node& up = nodes_[static_cast<size_t>(n - 1)];
            if (manufacturing_ && up.holding && !downstream_full(n - 1)) depart(n - 1, t);
            if (!manufacturing_) try_start(n - 1, t);
        }
        try_start(n, t);
    }

    int n_;
    std::vector<long long> caps_;
    bool manufacturing_;
    const std::vector<std::vector<double>>& services_;
    int horizon_;
    bool recirculate_ = false;
    std::vector<Node> nodes_;
    EventList events_;
    SamplePath<double> path_;
    std::uint64_t seq_ = 0;
};

std::vector<double> cumulative(std::span<const double> gaps, int horizon) {
    std::vector<double> epochs;
    epochs.reserve(static_cast<size_t>(horizon));
    double t = 0.0;
    for (int k = 0; k < horizon; ++k) {
        t += gaps[static_cast<size_t>(k)];
        epochs.push_back(t);
    }
    return epochs;
}

}  // namespace

SamplePath<double> simulate_tandem(const TandemSpec& spec, std::span<const double> interarrivals,
                                   const std::vector<std::vector<double>>& services, int horizon) {
    validate(spec);
    if (horizon < 1) throw std::invalid_argument("des tandem: horizon must be >= 1");
    detail::check_durations(interarrivals, horizon, "interarrivals");
    detail::check_service_matrix(services, spec.node_count, horizon);

    std::vector<long long> caps(static_cast<size_t>(spec.node_count), kNoCap);
    for (int n = 1; n < spec.node_count; ++n) {
        long long b = spec.buffers[static_cast<size_t>(n)];
        if (b != kUnbounded) caps[static_cast<size_t>(n)] = b + 1;  // buffer plus the server
    }
    TandemDes sim(spec.node_count, caps, spec.blocking == BlockingRule::manufacturing, services,
                  horizon);
    return sim.run(cumulative(interarrivals, horizon),
                   std::vector<long long>(static_cast<size_t>(spec.node_count), 0), false);
}

SamplePath<double> simulate_gg1(std::span<const double> interarrivals,
                                std::span<const double> services, int horizon) {
    TandemSpec spec;
    spec.node_count = 1;
    spec.buffers = {kUnbounded};
    return simulate_tandem(spec, interarrivals, {std::vector<double>(services.begin(), services.end())},
                           horizon);
}

SamplePath<double> simulate_closed_tandem(const ClosedTandemSpec& spec,
                                          const std::vector<std::vector<double>>& services,
                                          int horizon) {
    validate(spec);
    if (horizon < 1) throw std::invalid_argument("des closed tandem: horizon must be >= 1");
    detail::check_service_matrix(services, spec.node_count, horizon);

    std::vector<long long> caps(static_cast<size_t>(spec.node_count), kNoCap);
    TandemDes sim(spec.node_count, caps, true, services, horizon);
    return sim.run({}, spec.populations, true);
}

// ---------------------------------------------------------------------------
// G/G/m: one FCFS queue, m interchangeable servers. Service starts follow
// arrival order; the k-th departure is the k-th service completion in time
// order, which need not belong to the k-th customer.

SamplePath<double> simulate_ggm(const GGmSpec& spec, std::span<const double> interarrivals,
                                std::span<const double> services, int horizon) {
    validate(spec);
    if (horizon < 1) throw std::invalid_argument("des ggm: horizon must be >= 1");
    detail::check_durations(interarrivals, horizon, "interarrivals");
    detail::check_durations(services, horizon, "services");

    SamplePath<double> path;
    path.horizon = horizon;
    path.arrivals.resize(1);
    path.departures.resize(1);
    path.arrivals[0] = cumulative(interarrivals, horizon);
    path.departures[0].reserve(static_cast<size_t>(horizon));
    path.completions.assign(static_cast<size_t>(horizon), 0.0);

    EventList events;
    std::uint64_t seq = 0;
    for (int k = 0; k < horizon; ++k)
        events.push({path.arrivals[0][static_cast<size_t>(k)], EventKind::external_arrival, 0, seq++});

    std::deque<int> waiting;  // customer indices in arrival order
    int busy = 0;
    int next_arrival = 0;

    auto start_service = [&](int customer, double t) {
        ++busy;
        double end = t + services[static_cast<size_t>(customer)];
        path.completions[static_cast<size_t>(customer)] = end;
        events.push({end, EventKind::service_end, 0, seq++});
    };

    while (!events.empty()) {
        Event ev = events.top();
        events.pop();
        if (ev.kind == EventKind::external_arrival) {
            int customer = next_arrival++;
            if (busy < spec.server_count) {
                start_service(customer, ev.time);
            } else {
                waiting.push_back(customer);
            }
        } else {
            --busy;
            path.departures[0].push_back(ev.time);
            if (!waiting.empty()) {
                int customer = waiting.front();
                waiting.pop_front();
                start_service(customer, ev.time);
            }
        }
    }
    return path;
}

// ---------------------------------------------------------------------------
// Deterministic-routing network of single-server FCFS nodes.

namespace {

class NetworkDes {
public:
    NetworkDes(const NetworkSpec& spec, const std::vector<std::vector<double>>& services)
        : spec_(spec), services_(services), nodes_(static_cast<size_t>(spec.node_count)) {}

    SamplePath<double> run(const std::vector<int>& horizons, long long budget) {
        const auto n_nodes = static_cast<size_t>(spec_.node_count);
        horizons_ = horizons;
        path_.horizon = *std::max_element(horizons.begin(), horizons.end());
        path_.arrivals.assign(n_nodes, {});
        path_.departures.assign(n_nodes, {});

        for (size_t n = 0; n < n_nodes; ++n) {
            long long pop = spec_.populations[n];
            if (pop == kUnbounded) {
                nodes_[n].unbounded_backlog = true;
            } else {
                for (long long i = 0; i < pop; ++i) nodes_[n].pending.push_back(0.0);
            }
        }
        for (size_t n = 0; n < n_nodes; ++n) try_start(static_cast<int>(n), 0.0);

        long long departed = 0;
        while (!events_.empty() && departed < budget) {
            Event ev = events_.top();
            events_.pop();
            int n = ev.node;
            Node& node = nodes_[static_cast<size_t>(n)];
            node.busy = false;
            node.served += 1;
            ++departed;
            path_.departures[static_cast<size_t>(n)].push_back(ev.time);
            int target = spec_.routing.target(n, node.served);
            Node& dst = nodes_[static_cast<size_t>(target)];
            if (!dst.unbounded_backlog) dst.pending.push_back(ev.time);
            try_start(target, ev.time);
            try_start(n, ev.time);
        }
        return std::move(path_);
    }

    // Stall diagnosis mirrors the work-list engine: at-horizon nodes that
    // still hold a customer mean the horizons are too small; otherwise the
    // unfinished nodes can never be fed.
    void check_complete(const SamplePath<double>& path) const {
        std::vector<int> stalled;
        std::string at_horizon;
        for (size_t n = 0; n < nodes_.size(); ++n) {
            if (static_cast<int>(path.departures[n].size()) < horizons_[n]) {
                stalled.push_back(static_cast<int>(n));
            } else if (nodes_[n].unbounded_backlog || !nodes_[n].pending.empty()) {
                if (!at_horizon.empty()) at_horizon += ", ";
                at_horizon += std::to_string(n + 1);
            }
        }
        if (stalled.empty()) return;
        std::string waiting;
        for (int n : stalled) {
            if (!waiting.empty()) waiting += ", ";
            waiting += std::to_string(n + 1);
        }
        if (!at_horizon.empty())
            throw HorizonError("des network: node(s) " + waiting +
                               " wait for arrivals that only appear beyond the horizon of node(s) " +
                               at_horizon);
        throw DeadlockError(
            "des network: deadlock, node(s) " + waiting + " can never receive a customer",
            std::move(stalled));
    }

private:
    struct Node {
        std::deque<double> pending;
        bool unbounded_backlog = false;
        bool busy = false;
        int started = 0;
        long long served = 0;
    };

    void try_start(int n, double t) {
        Node& node = nodes_[static_cast<size_t>(n)];
        if (node.busy) return;
        if (node.started >= horizons_[static_cast<size_t>(n)]) return;
        if (!node.unbounded_backlog && node.pending.empty()) return;
        double arrival = 0.0;
        if (!node.unbounded_backlog) {
            arrival = node.pending.front();
            node.pending.pop_front();
        }
        path_.arrivals[static_cast<size_t>(n)].push_back(arrival);
        node.busy = true;
        double end = t + services_[static_cast<size_t>(n)][static_cast<size_t>(node.started)];
        node.started += 1;
        events_.push({end, EventKind::service_end, n, seq_++});
    }

    const NetworkSpec& spec_;
    const std::vector<std::vector<double>>& services_;
    std::vector<int> horizons_;
    std::vector<Node> nodes_;
    EventList events_;
    SamplePath<double> path_;
    std::uint64_t seq_ = 0;
};

}  // namespace

SamplePath<double> simulate_network(const NetworkSpec& spec,
                                    const std::vector<std::vector<double>>& services,
                                    const std::vector<int>& horizons) {
    validate(spec);
    if (horizons.size() != static_cast<size_t>(spec.node_count))
        throw std::invalid_argument("des network: one horizon per node required");
    if (services.size() != static_cast<size_t>(spec.node_count))
        throw std::invalid_argument("des network: one service sequence per node required");
    for (int n = 0; n < spec.node_count; ++n) {
        if (horizons[static_cast<size_t>(n)] < 0)
            throw std::invalid_argument("des network: negative horizon");
        detail::check_durations(std::span<const double>(services[static_cast<size_t>(n)]),
                                horizons[static_cast<size_t>(n)], "services");
    }
    NetworkDes sim(spec, services);
    auto path = sim.run(horizons, std::numeric_limits<long long>::max());
    sim.check_complete(path);
    return path;
}

SamplePath<double> simulate_network_budget(const NetworkSpec& spec,
                                           const std::vector<std::vector<double>>& services,
                                           long long total_departures) {
    validate(spec);
    if (total_departures < 1)
        throw std::invalid_argument("des network: budget must be >= 1");
    if (services.size() != static_cast<size_t>(spec.node_count))
        throw std::invalid_argument("des network: one service sequence per node required");
    std::vector<int> horizons;
    for (const auto& s : services) {
        detail::check_durations(std::span<const double>(s), static_cast<int>(s.size()), "services");
        horizons.push_back(static_cast<int>(s.size()));
    }
    NetworkDes sim(spec, services);
    return sim.run(horizons, total_departures);
}

SamplePath<double> simulate_model(const ModelSpec& model, const ModelInputs<double>& inputs,
                                  int horizon) {
    return std::visit(
        [&](const auto& spec) -> SamplePath<double> {
            using S = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<S, Gg1Spec>) {
                return simulate_gg1(inputs.interarrivals, inputs.services.at(0), horizon);
            } else if constexpr (std::is_same_v<S, TandemSpec>) {
                return simulate_tandem(spec, inputs.interarrivals, inputs.services, horizon);
            } else if constexpr (std::is_same_v<S, ClosedTandemSpec>) {
                return simulate_closed_tandem(spec, inputs.services, horizon);
            } else if constexpr (std::is_same_v<S, GGmSpec>) {
                return simulate_ggm(spec, inputs.interarrivals, inputs.services.at(0), horizon);
            } else {
                return simulate_network(spec, inputs.services,
                                        std::vector<int>(static_cast<size_t>(spec.node_count),
                                                         horizon));
            }
        },
        model);
}

}  // namespace rqsim::des
