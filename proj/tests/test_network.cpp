#include <doctest.h>

#include <algorithm>

#include "rqsim/des_oracle.hpp"
#include "rqsim/network.hpp"
#include "rqsim/recursions.hpp"
#include "support.hpp"

using namespace rqsim;
using test_support::Rng;

namespace {

NetworkSpec two_node_ring() {
    NetworkSpec spec;
    spec.node_count = 2;
    spec.populations = {1, 0};
    spec.routing.rules = {{{1}, true}, {{0}, true}};
    return spec;
}

// Recomputes every defining equation of the finished path from scratch:
// departures from (arrival, previous departure, service), arrivals from the
// order statistics of the routed departure multisets.
double residual(const NetworkSpec& spec, const std::vector<std::vector<double>>& services,
                const SamplePath<double>& path) {
    double worst = 0.0;
    std::vector<std::vector<double>> routed(static_cast<size_t>(spec.node_count));
    for (int n = 0; n < spec.node_count; ++n) {
        for (size_t k = 0; k < path.departures[n].size(); ++k) {
            int target = spec.routing.target(n, static_cast<long long>(k + 1));
            routed[static_cast<size_t>(target)].push_back(path.departures[n][k]);
        }
    }
    for (auto& r : routed) std::sort(r.begin(), r.end());

    for (int n = 0; n < spec.node_count; ++n) {
        long long population = spec.populations[static_cast<size_t>(n)];
        for (size_t k = 0; k < path.departures[n].size(); ++k) {
            double arrival;
            if (population == kUnbounded || static_cast<long long>(k) < population) {
                arrival = 0.0;
            } else {
                auto j = static_cast<size_t>(static_cast<long long>(k) - population);
                arrival = routed[static_cast<size_t>(n)][j];
            }
            worst = std::max(worst, std::abs(arrival - path.arrivals[n][k]));
            double prev = k > 0 ? path.departures[n][k - 1] : 0.0;
            double expect = std::max(arrival, prev) + services[static_cast<size_t>(n)][k];
            worst = std::max(worst, std::abs(expect - path.departures[n][k]));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("cyclic two-node routing reproduces the closed tandem") {
    std::vector<std::vector<double>> tau{{1, 1, 1}, {2, 2, 2}};
    auto path = simulate_network<double>(two_node_ring(), tau, 3);
    CHECK(path.departures[0] == std::vector<double>{1, 4, 7});
    CHECK(path.departures[1] == std::vector<double>{3, 6, 9});
}

TEST_CASE("self-loop with a single customer") {
    NetworkSpec spec;
    spec.node_count = 1;
    spec.populations = {1};
    spec.routing.rules = {{{0}, true}};
    std::vector<std::vector<double>> tau{{2, 3}};
    auto path = simulate_network<double>(spec, tau, 2);
    CHECK(path.departures[0] == std::vector<double>{2, 5});
    CHECK(path.arrivals[0] == std::vector<double>{0, 2});
}

TEST_CASE("arrival brute force equals the order statistic") {
    std::vector<double> small{3, 1, 2};
    CHECK(arrival_epoch_bruteforce(small, 2) == 2.0);
    std::vector<double> single{5};
    CHECK(arrival_epoch_bruteforce(single, 1) == 5.0);
    Rng rng(12);
    for (int rep = 0; rep < 200; ++rep) {
        int n = rng.uniform_int(1, 12);
        int k = rng.uniform_int(1, std::min(n, 8));
        auto values = rng.durations(n, 0.0, 10.0);
        CHECK(arrival_epoch_bruteforce(values, k) == arrival_epoch_fastpath(values, k));
    }
    CHECK_THROWS_AS((void)arrival_epoch_bruteforce(small, 4), std::invalid_argument);
}

TEST_CASE("network equations hold exactly on random feasible instances") {
    Rng rng(23);
    for (int rep = 0; rep < 25; ++rep) {
        NetworkSpec spec;
        spec.node_count = rng.uniform_int(2, 5);
        spec.populations.assign(static_cast<size_t>(spec.node_count), 0);
        spec.populations[static_cast<size_t>(rng.uniform_int(0, spec.node_count - 1))] =
            rng.uniform_int(1, 3);
        for (int n = 0; n < spec.node_count; ++n)
            if (rng.uniform() < 0.3)
                spec.populations[static_cast<size_t>(n)] = rng.uniform_int(0, 2);
        spec.routing.rules.resize(static_cast<size_t>(spec.node_count));
        for (int n = 0; n < spec.node_count; ++n) {
            std::vector<int> pattern;
            int len = rng.uniform_int(1, 5);
            for (int j = 0; j < len; ++j) pattern.push_back(rng.uniform_int(0, spec.node_count - 1));
            spec.routing.rules[static_cast<size_t>(n)] = {std::move(pattern), true};
        }
        long long budget = spec.node_count * 60;
        auto services = rng.duration_matrix(spec.node_count, static_cast<int>(budget));
        auto probe = des::simulate_network_budget(spec, services, budget);
        std::vector<int> horizons;
        for (const auto& d : probe.departures) horizons.push_back(static_cast<int>(d.size()));
        if (*std::max_element(horizons.begin(), horizons.end()) == 0) continue;

        auto path = simulate_network<double>(spec, services, horizons);
        CHECK(residual(spec, services, path) <= 1e-9);

        for (int n = 0; n < spec.node_count; ++n) {
            for (size_t k = 1; k < path.departures[n].size(); ++k) {
                CHECK(path.departures[n][k] >= path.departures[n][k - 1]);
                CHECK(path.arrivals[n][k] >= path.arrivals[n][k - 1]);
            }
        }

        // Conservation: service initiations at n are bounded by what ever
        // arrived there.
        for (int n = 0; n < spec.node_count; ++n) {
            long long pop = spec.populations[static_cast<size_t>(n)];
            if (pop == kUnbounded) continue;
            long long routed_in = 0;
            for (int i = 0; i < spec.node_count; ++i)
                for (size_t k = 0; k < path.departures[i].size(); ++k)
                    if (spec.routing.target(i, static_cast<long long>(k + 1)) == n) ++routed_in;
            CHECK(static_cast<long long>(path.departures[n].size()) <= pop + routed_in);
        }
    }
}

TEST_CASE("random cyclic-pattern network matches the oracle departures") {
    Rng rng(34);
    NetworkSpec spec;
    spec.node_count = 4;
    spec.populations = {2, 0, 1, 0};
    spec.routing.rules.resize(4);
    for (int n = 0; n < 4; ++n) {
        std::vector<int> pattern{(n + 1) % 4, (n + 2) % 4, (n + 1) % 4};
        spec.routing.rules[static_cast<size_t>(n)] = {std::move(pattern), true};
    }
    long long budget = 4 * 300;
    auto services = rng.duration_matrix(4, static_cast<int>(budget));
    auto probe = des::simulate_network_budget(spec, services, budget);
    std::vector<int> horizons;
    for (const auto& d : probe.departures) horizons.push_back(static_cast<int>(d.size()));
    auto fast = simulate_network<double>(spec, services, horizons);
    auto oracle = des::simulate_network(spec, services, horizons);
    for (int n = 0; n < 4; ++n) {
        CHECK(test_support::max_abs_diff(fast.departures[n], oracle.departures[n]) <= 1e-9);
        CHECK(test_support::max_abs_diff(fast.arrivals[n], oracle.arrivals[n]) <= 1e-9);
    }
}

TEST_CASE("unbounded population realizes an always-backlogged source") {
    NetworkSpec spec;
    spec.node_count = 2;
    spec.populations = {kUnbounded, 0};
    spec.routing.rules = {{{1}, true}, {{0}, true}};
    std::vector<std::vector<double>> tau{{1, 1, 1}, {0.5, 0.5, 0.5}};
    auto path = simulate_network<double>(spec, tau, 3);
    CHECK(path.departures[0] == std::vector<double>{1, 2, 3});
    CHECK(path.arrivals[0] == std::vector<double>{0, 0, 0});
    CHECK(path.departures[1] == std::vector<double>{1.5, 2.5, 3.5});
}

TEST_CASE("starved node reports an under-specified horizon") {
    NetworkSpec spec;
    spec.node_count = 2;
    spec.populations = {1, 0};
    spec.routing.rules = {{{0}, true}, {{1}, true}};  // node 1 feeds itself only
    std::vector<std::vector<double>> tau{{1, 1, 1}, {1, 1, 1}};
    CHECK_THROWS_AS((void)simulate_network<double>(spec, tau, 3), HorizonError);
}

TEST_CASE("network with no customers anywhere deadlocks") {
    NetworkSpec spec;
    spec.node_count = 2;
    spec.populations = {0, 0};
    spec.routing.rules = {{{1}, true}, {{0}, true}};
    std::vector<std::vector<double>> tau{{1, 1}, {1, 1}};
    try {
        (void)simulate_network<double>(spec, tau, 2);
        FAIL("expected DeadlockError");
    } catch (const DeadlockError& dead) {
        CHECK(dead.stalled_nodes == std::vector<int>{0, 1});
    }
}

TEST_CASE("open tandem as a routed network reproduces the tandem departures") {
    Rng rng(45);
    for (int rep = 0; rep < 50; ++rep) {
        TandemSpec tandem;
        tandem.node_count = rng.uniform_int(1, 4);
        tandem.buffers.assign(static_cast<size_t>(tandem.node_count), kUnbounded);
        int horizon = rng.uniform_int(3, 60);
        auto alpha = rng.durations(horizon);
        auto tau = rng.duration_matrix(tandem.node_count, horizon);

        auto direct = simulate_tandem_unbounded<double>(tandem.node_count, alpha, tau, horizon);
        auto enc = tandem_as_network(tandem);
        auto services = enc.services<double>(alpha, tau);
        auto net = simulate_network<double>(enc.network, services, enc.horizons(horizon));

        // The source reproduces the external arrival epochs.
        CHECK(test_support::max_abs_diff(net.departures[0], direct.arrivals[0]) <= 1e-9);
        for (int n = 0; n < tandem.node_count; ++n)
            CHECK(test_support::max_abs_diff(net.departures[enc.network_node(n)],
                                             direct.departures[n]) <= 1e-9);
    }
}

TEST_CASE("gg1 as a routed network equals simulate_gg1") {
    Rng rng(56);
    auto alpha = rng.durations(100);
    auto tau = rng.durations(100);
    auto direct = simulate_gg1<double>(alpha, tau, 100);

    TandemSpec tandem;
    tandem.node_count = 1;
    tandem.buffers = {kUnbounded};
    auto enc = tandem_as_network(tandem);
    auto net = simulate_network<double>(enc.network, enc.services<double>(alpha, {tau}),
                                        enc.horizons(100));
    CHECK(test_support::max_abs_diff(net.departures[1], direct.departures[0]) <= 1e-9);
}

TEST_CASE("closed tandem as a network is the cyclic ring") {
    Rng rng(67);
    for (int rep = 0; rep < 50; ++rep) {
        ClosedTandemSpec closed;
        closed.node_count = rng.uniform_int(1, 4);
        closed.populations.assign(static_cast<size_t>(closed.node_count), 0);
        closed.populations[static_cast<size_t>(rng.uniform_int(0, closed.node_count - 1))] =
            rng.uniform_int(1, 3);
        int horizon = rng.uniform_int(3, 60);
        auto tau = rng.duration_matrix(closed.node_count, horizon);
        auto direct = simulate_closed_tandem<double>(closed, tau, horizon);
        auto net = simulate_network<double>(closed_tandem_as_network(closed), tau, horizon);
        for (int n = 0; n < closed.node_count; ++n)
            CHECK(test_support::max_abs_diff(net.departures[n], direct.departures[n]) <= 1e-9);
    }
}

TEST_CASE("finite-buffer tandem has no network representation") {
    TandemSpec tandem;
    tandem.node_count = 2;
    tandem.buffers = {kUnbounded, 1};
    CHECK_THROWS_AS((void)tandem_as_network(tandem), std::invalid_argument);
}

TEST_CASE("exhausting an explicit routing list is an input error") {
    NetworkSpec spec;
    spec.node_count = 2;
    spec.populations = {1, 0};
    spec.routing.rules = {{{1, 1}, false}, {{0, 0}, false}};  // covers 2 departures per node
    std::vector<std::vector<double>> tau{{1, 1, 1}, {1, 1, 1}};
    auto ok = simulate_network<double>(spec, tau, 2);
    CHECK(ok.departures[0].size() == 2);
    CHECK_THROWS_AS((void)simulate_network<double>(spec, tau, 3), std::invalid_argument);
}
