#pragma once

// Shared helpers for the test suites: deterministic input generators built on
// the library's counter-based stream (so frozen expectations never depend on
// platform RNGs) and a few closed-form queueing oracles.

#include <cmath>
#include <span>
#include <vector>

#include "rqsim/random.hpp"
#include "rqsim/types.hpp"

namespace test_support {

struct Rng {
    rqsim::RandomStream stream;
    explicit Rng(std::uint64_t seed, std::uint64_t id = 0) : stream(seed, id) {}

    double uniform() { return stream.next_uniform(); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(uniform() * (hi - lo + 1));
    }
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    std::vector<double> durations(int count, double lo = 0.0, double hi = 2.0) {
        std::vector<double> out;
        out.reserve(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i) out.push_back(uniform(lo, hi));
        return out;
    }

    std::vector<std::vector<double>> duration_matrix(int nodes, int count, double lo = 0.0,
                                                     double hi = 2.0) {
        std::vector<std::vector<double>> out;
        out.reserve(static_cast<size_t>(nodes));
        for (int n = 0; n < nodes; ++n) out.push_back(durations(count, lo, hi));
        return out;
    }
};

// Mean queueing delay (time from arrival to service start) of the M/M/m
// queue: Erlang-C probability of waiting over the spare service rate.
inline double erlang_c_wait(int servers, double lambda, double mu) {
    double a = lambda / mu;  // offered load
    double term = 1.0;       // a^k / k!
    double sum = 1.0;        // k = 0
    for (int k = 1; k < servers; ++k) {
        term *= a / k;
        sum += term;
    }
    term *= a / servers;  // a^m / m!
    double last = term * servers / (servers - a);
    double p_wait = last / (sum + last);
    return p_wait / (servers * mu - lambda);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double worst = a.size() == b.size() ? 0.0 : std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < a.size() && i < b.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace test_support
