#include <doctest.h>

#include "rqsim/des_oracle.hpp"
#include "rqsim/recursions.hpp"
#include "support.hpp"

using namespace rqsim;
using test_support::Rng;

namespace {

std::vector<double> departures(const SamplePath<double>& path, int node = 0) {
    return path.departures[static_cast<size_t>(node)];
}

// Flattened duration vector <-> model inputs, for segment probes over the
// full input space (interarrivals then services node by node).
struct TandemProbe {
    TandemSpec spec;
    int horizon;

    SamplePath<double> run(const std::vector<double>& flat) const {
        std::vector<double> inter(flat.begin(), flat.begin() + horizon);
        std::vector<std::vector<double>> services;
        for (int n = 0; n < spec.node_count; ++n)
            services.emplace_back(flat.begin() + (n + 1) * horizon,
                                  flat.begin() + (n + 2) * horizon);
        return simulate_open_tandem<double>(spec, inter, services, horizon);
    }
};

}  // namespace

TEST_CASE("gg1 matches the hand recursion") {
    std::vector<double> alpha{1, 1, 1};
    std::vector<double> tau{2, 2, 2};
    auto path = simulate_gg1<double>(alpha, tau, 3);
    CHECK(path.arrivals[0] == std::vector<double>{1, 2, 3});
    CHECK(path.departures[0] == std::vector<double>{3, 5, 7});
}

TEST_CASE("gg1 zero service departs at arrival") {
    std::vector<double> alpha{1};
    std::vector<double> tau{0};
    auto path = simulate_gg1<double>(alpha, tau, 1);
    CHECK(path.arrivals[0] == std::vector<double>{1});
    CHECK(path.departures[0] == std::vector<double>{1});
}

TEST_CASE("gg1 input validation") {
    std::vector<double> two{1, 1};
    std::vector<double> neg{1, -0.5, 1};
    CHECK_THROWS_AS((void)simulate_gg1<double>(two, two, 3), std::invalid_argument);
    std::vector<double> three{1, 1, 1};
    CHECK_THROWS_AS((void)simulate_gg1<double>(three, neg, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)simulate_gg1<double>(three, three, 0), std::invalid_argument);
}

TEST_CASE("gg1 agrees with the event-scheduling oracle on a long random input") {
    Rng rng(101);
    auto alpha = rng.durations(1000, 0.0, 2.0);
    auto tau = rng.durations(1000, 0.0, 1.8);
    auto fast = simulate_gg1<double>(alpha, tau, 1000);
    auto oracle = des::simulate_gg1(alpha, tau, 1000);
    CHECK(test_support::max_abs_diff(departures(fast), departures(oracle)) <= 1e-9);
}

TEST_CASE("gg1 satisfies the waiting-time recursion exactly") {
    Rng rng(77);
    auto alpha = rng.durations(400);
    auto tau = rng.durations(400);
    auto path = simulate_gg1<double>(alpha, tau, 400);
    const auto& a = path.arrivals[0];
    const auto& d = path.departures[0];
    double w_prev = 0.0;
    for (int k = 0; k < 400; ++k) {
        double w = d[k] - a[k] - tau[k];
        if (k == 0) {
            CHECK(w == 0.0);
        } else {
            // The two routes compute the same quantity in different summation
            // orders, so allow rounding noise scaled to the epoch magnitude.
            double lindley = std::max(0.0, w_prev + tau[k - 1] - alpha[k]);
            CHECK(std::abs(w - lindley) <= 1e-12 * std::max(1.0, d[k]));
        }
        CHECK(w >= -1e-12 * std::max(1.0, d[k]));
        w_prev = w;
    }
}

TEST_CASE("open tandem matches the hand recursion") {
    std::vector<double> alpha{1, 1};  // arrivals at 1, 2
    std::vector<std::vector<double>> tau{{1, 1}, {3, 1}};
    auto path = simulate_tandem_unbounded<double>(2, alpha, tau, 2);
    CHECK(departures(path, 0) == std::vector<double>{2, 3});
    CHECK(departures(path, 1) == std::vector<double>{5, 6});
    CHECK(path.arrivals[1] == departures(path, 0));
}

TEST_CASE("manufacturing blocking holds the upstream server") {
    TandemSpec spec;
    spec.node_count = 2;
    spec.buffers = {kUnbounded, 0};
    spec.blocking = BlockingRule::manufacturing;
    std::vector<double> alpha{0, 0};
    std::vector<std::vector<double>> tau{{1, 1}, {5, 5}};
    auto path = simulate_open_tandem<double>(spec, alpha, tau, 2);
    CHECK(departures(path, 0) == std::vector<double>{1, 6});
    CHECK(departures(path, 1) == std::vector<double>{6, 11});
}

TEST_CASE("communication blocking defers the upstream start") {
    TandemSpec spec;
    spec.node_count = 2;
    spec.buffers = {kUnbounded, 0};
    spec.blocking = BlockingRule::communication;
    std::vector<double> alpha{0, 0};
    std::vector<std::vector<double>> tau{{1, 1}, {5, 5}};
    auto path = simulate_open_tandem<double>(spec, alpha, tau, 2);
    CHECK(departures(path, 0) == std::vector<double>{1, 7});
    CHECK(departures(path, 1) == std::vector<double>{6, 12});
}

TEST_CASE("tandem spec validation") {
    TandemSpec spec;
    spec.node_count = 2;
    spec.buffers = {kUnbounded, -3};
    std::vector<double> alpha{1, 1};
    std::vector<std::vector<double>> tau{{1, 1}, {1, 1}};
    CHECK_THROWS_AS((void)simulate_open_tandem<double>(spec, alpha, tau, 2),
                    std::invalid_argument);
    spec.buffers = {0, 1};  // finite input buffer is not representable
    CHECK_THROWS_AS((void)simulate_open_tandem<double>(spec, alpha, tau, 2),
                    std::invalid_argument);
    spec.buffers = {kUnbounded};  // wrong length
    CHECK_THROWS_AS((void)simulate_open_tandem<double>(spec, alpha, tau, 2),
                    std::invalid_argument);
    std::vector<std::vector<double>> one_node{{1, 1}};  // missing node sequence
    spec.buffers = {kUnbounded, 2};
    CHECK_THROWS_AS((void)simulate_open_tandem<double>(spec, alpha, one_node, 2),
                    std::invalid_argument);
}

TEST_CASE("all-unbounded blocking path equals the plain tandem recursion") {
    Rng rng(202);
    for (int trial = 0; trial < 50; ++trial) {
        int nodes = rng.uniform_int(1, 5);
        int horizon = rng.uniform_int(5, 60);
        TandemSpec spec;
        spec.node_count = nodes;
        spec.buffers.assign(static_cast<size_t>(nodes), kUnbounded);
        spec.blocking = trial % 2 ? BlockingRule::manufacturing : BlockingRule::communication;
        auto alpha = rng.durations(horizon);
        auto tau = rng.duration_matrix(nodes, horizon);
        auto plain = simulate_tandem_unbounded<double>(nodes, alpha, tau, horizon);
        auto blocked = simulate_tandem_blocking<double>(spec, alpha, tau, horizon);
        for (int n = 0; n < nodes; ++n)
            CHECK(departures(plain, n) == departures(blocked, n));
    }
}

TEST_CASE("closed tandem: one circulating customer cycles every 3 time units") {
    ClosedTandemSpec spec;
    spec.node_count = 2;
    spec.populations = {1, 0};
    std::vector<std::vector<double>> tau{{1, 1, 1}, {2, 2, 2}};
    auto path = simulate_closed_tandem<double>(spec, tau, 3);
    CHECK(departures(path, 0) == std::vector<double>{1, 4, 7});
    CHECK(departures(path, 1) == std::vector<double>{3, 6, 9});
}

TEST_CASE("closed tandem: single node with two recirculating customers never idles") {
    ClosedTandemSpec spec;
    spec.node_count = 1;
    spec.populations = {2};
    std::vector<std::vector<double>> tau{{1, 1, 1, 1, 1}};
    auto path = simulate_closed_tandem<double>(spec, tau, 5);
    CHECK(departures(path, 0) == std::vector<double>{1, 2, 3, 4, 5});
}

TEST_CASE("closed tandem with an empty first buffer still sweeps correctly") {
    ClosedTandemSpec spec;
    spec.node_count = 2;
    spec.populations = {0, 1};
    std::vector<std::vector<double>> tau{{1, 1, 1}, {2, 2, 2}};
    auto path = simulate_closed_tandem<double>(spec, tau, 3);
    CHECK(departures(path, 0) == std::vector<double>{3, 6, 9});
    CHECK(departures(path, 1) == std::vector<double>{2, 5, 8});
    auto oracle = des::simulate_closed_tandem(spec, tau, 3);
    CHECK(departures(oracle, 0) == departures(path, 0));
    CHECK(departures(oracle, 1) == departures(path, 1));
}

TEST_CASE("closed tandem rejects the deadlocked empty system") {
    ClosedTandemSpec spec;
    spec.node_count = 3;
    spec.populations = {0, 0, 0};
    std::vector<std::vector<double>> tau{{1}, {1}, {1}};
    CHECK_THROWS_AS((void)simulate_closed_tandem<double>(spec, tau, 1), std::invalid_argument);
}

TEST_CASE("closed tandem random instance matches the oracle") {
    Rng rng(303);
    ClosedTandemSpec spec;
    spec.node_count = 3;
    spec.populations = {2, 1, 0};
    auto tau = rng.duration_matrix(3, 500);
    auto fast = simulate_closed_tandem<double>(spec, tau, 500);
    auto oracle = des::simulate_closed_tandem(spec, tau, 500);
    for (int n = 0; n < 3; ++n)
        CHECK(test_support::max_abs_diff(departures(fast, n), departures(oracle, n)) <= 1e-9);
}

TEST_CASE("blocking dominance: communication >= manufacturing >= unbounded") {
    Rng rng(404);
    for (int trial = 0; trial < 40; ++trial) {
        int nodes = rng.uniform_int(2, 5);
        int horizon = rng.uniform_int(5, 50);
        TandemSpec spec;
        spec.node_count = nodes;
        spec.buffers.assign(static_cast<size_t>(nodes), kUnbounded);
        for (int n = 1; n < nodes; ++n) spec.buffers[n] = rng.uniform_int(0, 2);
        auto alpha = rng.durations(horizon);
        auto tau = rng.duration_matrix(nodes, horizon);

        auto plain = simulate_tandem_unbounded<double>(nodes, alpha, tau, horizon);
        spec.blocking = BlockingRule::manufacturing;
        auto man = simulate_open_tandem<double>(spec, alpha, tau, horizon);
        spec.blocking = BlockingRule::communication;
        auto comm = simulate_open_tandem<double>(spec, alpha, tau, horizon);

        for (int n = 0; n < nodes; ++n) {
            for (int k = 0; k < horizon; ++k) {
                CHECK(man.departures[n][k] >= plain.departures[n][k]);
                CHECK(comm.departures[n][k] >= man.departures[n][k]);
            }
        }
    }
}

TEST_CASE("departures are nondecreasing and waits nonnegative on all variants") {
    Rng rng(505);
    for (int trial = 0; trial < 30; ++trial) {
        int nodes = rng.uniform_int(1, 4);
        int horizon = rng.uniform_int(5, 60);
        auto alpha = rng.durations(horizon);
        auto tau = rng.duration_matrix(nodes, horizon);
        TandemSpec spec;
        spec.node_count = nodes;
        spec.buffers.assign(static_cast<size_t>(nodes), kUnbounded);
        for (int n = 1; n < nodes; ++n)
            if (rng.uniform() < 0.5) spec.buffers[n] = rng.uniform_int(0, 2);
        spec.blocking = trial % 2 ? BlockingRule::manufacturing : BlockingRule::communication;
        auto path = simulate_open_tandem<double>(spec, alpha, tau, horizon);
        for (int n = 0; n < nodes; ++n) {
            for (int k = 0; k < horizon; ++k) {
                if (k > 0) CHECK(path.departures[n][k] >= path.departures[n][k - 1]);
                CHECK(path.departures[n][k] >= path.arrivals[n][k] + tau[n][k] - 1e-12);
            }
        }
    }
}

TEST_CASE("monotonicity: raising any single duration never lowers an epoch") {
    Rng rng(606);
    for (int trial = 0; trial < 60; ++trial) {
        int nodes = rng.uniform_int(2, 4);
        int horizon = rng.uniform_int(5, 30);
        TandemProbe probe;
        probe.spec.node_count = nodes;
        probe.spec.buffers.assign(static_cast<size_t>(nodes), kUnbounded);
        for (int n = 1; n < nodes; ++n)
            if (rng.uniform() < 0.5) probe.spec.buffers[n] = rng.uniform_int(0, 2);
        probe.spec.blocking =
            trial % 2 ? BlockingRule::manufacturing : BlockingRule::communication;
        probe.horizon = horizon;

        auto flat = rng.durations((nodes + 1) * horizon);
        auto base = probe.run(flat);
        auto bumped = flat;
        bumped[rng.uniform_int(0, static_cast<int>(flat.size()) - 1)] += rng.uniform(0.1, 1.0);
        auto moved = probe.run(bumped);
        for (int n = 0; n < nodes; ++n)
            for (int k = 0; k < horizon; ++k)
                CHECK(moved.departures[n][k] >= base.departures[n][k]);
    }
}

TEST_CASE("convexity: departures at the midpoint never exceed the average") {
    Rng rng(707);
    for (int trial = 0; trial < 40; ++trial) {
        int nodes = rng.uniform_int(1, 4);
        int horizon = rng.uniform_int(5, 30);
        TandemProbe probe;
        probe.spec.node_count = nodes;
        probe.spec.buffers.assign(static_cast<size_t>(nodes), kUnbounded);
        for (int n = 1; n < nodes; ++n)
            if (rng.uniform() < 0.5) probe.spec.buffers[n] = rng.uniform_int(0, 2);
        probe.spec.blocking =
            trial % 2 ? BlockingRule::manufacturing : BlockingRule::communication;
        probe.horizon = horizon;

        auto x = rng.durations((nodes + 1) * horizon);
        auto y = rng.durations((nodes + 1) * horizon);
        std::vector<double> mid(x.size());
        for (size_t i = 0; i < x.size(); ++i) mid[i] = 0.5 * (x[i] + y[i]);
        auto px = probe.run(x);
        auto py = probe.run(y);
        auto pm = probe.run(mid);
        for (int n = 0; n < nodes; ++n)
            for (int k = 0; k < horizon; ++k)
                CHECK(pm.departures[n][k] <=
                      0.5 * (px.departures[n][k] + py.departures[n][k]) + 1e-9);
    }
}

TEST_CASE("identical inputs produce bit-identical outputs") {
    Rng rng(808);
    auto alpha = rng.durations(100);
    auto tau = rng.duration_matrix(3, 100);
    TandemSpec spec;
    spec.node_count = 3;
    spec.buffers = {kUnbounded, 1, 0};
    spec.blocking = BlockingRule::manufacturing;
    auto a = simulate_open_tandem<double>(spec, alpha, tau, 100);
    auto b = simulate_open_tandem<double>(spec, alpha, tau, 100);
    for (int n = 0; n < 3; ++n) CHECK(departures(a, n) == departures(b, n));
}

TEST_CASE("finished paths satisfy their defining equations to the last bit") {
    // Recompute every equation directly from the finished path; any residual
    // would mean the engine solved something other than the stated system.
    Rng rng(909);
    for (int trial = 0; trial < 30; ++trial) {
        int nodes = rng.uniform_int(2, 5);
        int horizon = rng.uniform_int(5, 80);
        auto alpha = rng.durations(horizon);
        auto tau = rng.duration_matrix(nodes, horizon);

        TandemSpec spec;
        spec.node_count = nodes;
        spec.buffers.assign(static_cast<size_t>(nodes), kUnbounded);
        for (int n = 1; n < nodes; ++n)
            if (rng.uniform() < 0.7) spec.buffers[n] = rng.uniform_int(0, 3);
        const bool manufacturing = trial % 2 == 0;
        spec.blocking = manufacturing ? BlockingRule::manufacturing : BlockingRule::communication;
        auto path = simulate_open_tandem<double>(spec, alpha, tau, horizon);

        auto dep = [&](int n, int k) {  // 1-based customer, 0 anchors at zero
            return k <= 0 ? 0.0 : path.departures[n][k - 1];
        };
        for (int k = 1; k <= horizon; ++k) {
            for (int n = 0; n < nodes; ++n) {
                double upstream = n == 0 ? path.arrivals[0][k - 1] : dep(n - 1, k);
                double release = -1.0;
                if (n + 1 < nodes && spec.buffers[n + 1] != kUnbounded) {
                    int j = k - static_cast<int>(spec.buffers[n + 1]) - 1;
                    if (j >= 1) release = dep(n + 1, j);
                }
                double expected;
                if (manufacturing) {
                    expected = std::max(upstream, dep(n, k - 1)) + tau[n][k - 1];
                    if (release >= 0.0) expected = std::max(expected, release);
                } else {
                    double basis = std::max(upstream, dep(n, k - 1));
                    if (release >= 0.0) basis = std::max(basis, release);
                    expected = basis + tau[n][k - 1];
                }
                CHECK(dep(n, k) == expected);
            }
        }
    }
}

TEST_CASE("closed tandem paths satisfy the ring equations exactly") {
    Rng rng(919);
    for (int trial = 0; trial < 30; ++trial) {
        int nodes = rng.uniform_int(1, 5);
        int horizon = rng.uniform_int(5, 80);
        ClosedTandemSpec spec;
        spec.node_count = nodes;
        spec.populations.assign(static_cast<size_t>(nodes), 0);
        for (int n = 0; n < nodes; ++n) spec.populations[n] = rng.uniform_int(0, 3);
        spec.populations[static_cast<size_t>(rng.uniform_int(0, nodes - 1))] =
            rng.uniform_int(1, 3);
        auto tau = rng.duration_matrix(nodes, horizon);
        auto path = simulate_closed_tandem<double>(spec, tau, horizon);

        for (int k = 1; k <= horizon; ++k) {
            for (int n = 0; n < nodes; ++n) {
                int prev_node = (n + nodes - 1) % nodes;
                auto j = k - spec.populations[n];
                double feed =
                    j < 0 ? -1.0 : (j == 0 ? 0.0 : path.departures[prev_node][j - 1]);
                double prev = k == 1 ? 0.0 : path.departures[n][k - 2];
                double expected = (feed < 0.0 ? prev : std::max(feed, prev)) + tau[n][k - 1];
                CHECK(path.departures[n][k - 1] == expected);
            }
        }
    }
}
