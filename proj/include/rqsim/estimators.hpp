#pragma once

// Monte Carlo estimation of expected performance: independent replications
// for finite-horizon measures, batch means over one long run for steady
// state, antithetic pairing and common-random-number differences for variance
// reduction. Replications may be evaluated concurrently; aggregation always
// runs in replication order with compensated summation, so results do not
// depend on the thread count.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rqsim/errors.hpp"
#include "rqsim/model.hpp"

namespace rqsim {

struct Estimate {
    double mean = 0.0;
    double variance = 0.0;       // sample variance of the replication values
    double half_width_95 = 0.0;  // 95% confidence half-width for the mean
    int replications = 0;
    bool suspected_unstable = false;  // batch means trending monotonically
};

struct EstimatorOptions {
    int threads = 1;
};

namespace detail {

// 0.975 Student-t quantiles for 1..29 degrees of freedom; normal above.
inline double t_quantile_975(int df) {
    static constexpr double table[] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045};
    if (df < 1) throw std::invalid_argument("t quantile: df must be >= 1");
    if (df <= 29) return table[df - 1];
    return 1.959964;
}

inline double kahan_sum(std::span<const double> xs) {
    double sum = 0.0, carry = 0.0;
    for (double x : xs) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

inline Estimate summarize(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    if (n < 1) throw std::invalid_argument("summarize: no values");
    Estimate e;
    e.replications = n;
    e.mean = kahan_sum(values) / n;
    if (n >= 2) {
        std::vector<double> sq(values.size());
        for (size_t i = 0; i < values.size(); ++i) {
            double d = values[i] - e.mean;
            sq[i] = d * d;
        }
        e.variance = kahan_sum(sq) / (n - 1);
        // Normal critical value from 30 replications up, Student-t below.
        double crit = n >= 30 ? 1.959964 : t_quantile_975(n - 1);
        e.half_width_95 = crit * std::sqrt(e.variance / n);
    }
    return e;
}

// values[r] = fn(r) for r in [0, count), chunked over opts.threads. Worker
// errors are reported with the replication index attached.
inline std::vector<double> replicate(int count, const EstimatorOptions& opts,
                                     const std::function<double(int)>& fn) {
    if (count < 1) throw std::invalid_argument("replicate: count must be >= 1");
    std::vector<double> values(static_cast<size_t>(count));
    int threads = opts.threads;
    if (threads < 1) threads = 1;
    threads = std::min(threads, count);

    std::vector<std::string> errors(static_cast<size_t>(threads));
    auto worker = [&](int tid, int lo, int hi) {
        for (int r = lo; r < hi; ++r) {
            try {
                values[static_cast<size_t>(r)] = fn(r);
            } catch (const std::exception& ex) {
                errors[static_cast<size_t>(tid)] =
                    "replication " + std::to_string(r + 1) + ": " + ex.what();
                return;
            }
        }
    };

    if (threads == 1) {
        worker(0, 0, count);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(threads));
        int chunk = count / threads, rem = count % threads, lo = 0;
        for (int t = 0; t < threads; ++t) {
            int hi = lo + chunk + (t < rem ? 1 : 0);
            pool.emplace_back(worker, t, lo, hi);
            lo = hi;
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors)
        if (!err.empty()) throw SimulationError(err);
    return values;
}

}  // namespace detail

// Sample mean / variance / CI of the selected measure over R independent
// replications at fixed horizon.
inline Estimate estimate_finite_horizon(const StochasticModel& model, const MeasureSelector& sel,
                                        std::span<const double> theta, int horizon,
                                        int replications, std::uint64_t seed,
                                        const EstimatorOptions& opts = {}) {
    if (replications < 2) throw std::invalid_argument("finite horizon: need >= 2 replications");
    auto values = detail::replicate(replications, opts, [&](int r) {
        auto inputs = sample_inputs(model, theta, seed, static_cast<std::uint64_t>(r), horizon);
        auto path = simulate(model.structure, inputs, horizon);
        return compute_measure(model.structure, sel, path, inputs, horizon);
    });
    return detail::summarize(values);
}

namespace detail {

// Batch statistic over customers [first, last] (1-based, inclusive) of one
// node. Ratio measures (T, U, J, Q) divide by the departure-time span of the
// batch window; averaged measures divide by the batch size.
template <class T>
double batch_value(const ModelSpec& model, const MeasureSelector& sel, const SamplePath<T>& path,
                   const ModelInputs<T>& inputs, int first, int last, double window_start) {
    const bool ggm = std::holds_alternative<GGmSpec>(model);
    const int node = (sel.kind == MeasureKind::system_total_time ||
                      sel.kind == MeasureKind::system_waiting_time)
                         ? path.node_count() - 1
                         : sel.node;
    const auto& dep = path.departures[static_cast<size_t>(node)];
    const auto& arr = (sel.kind == MeasureKind::system_total_time ||
                       sel.kind == MeasureKind::system_waiting_time)
                          ? path.arrivals[0]
                          : path.arrivals[static_cast<size_t>(node)];
    const auto& stamp = ggm && sel.kind != MeasureKind::throughput &&
                                sel.kind != MeasureKind::utilization
                            ? path.completions
                            : dep;

    double count = last - first + 1;
    double sojourn_sum = 0.0, service_sum = 0.0, idle_sum = 0.0;
    for (int k = first; k <= last; ++k) {
        size_t i = static_cast<size_t>(k - 1);
        sojourn_sum += value_of(stamp[i]) - value_of(arr[i]);
        if (sel.kind == MeasureKind::system_total_time ||
            sel.kind == MeasureKind::system_waiting_time) {
            for (const auto& s : inputs.services) service_sum += value_of(s[i]);
        } else {
            service_sum += value_of(inputs.services[static_cast<size_t>(node)][i]);
        }
        if (sel.kind == MeasureKind::idle_time) {
            double upstream = value_of(path.arrivals[static_cast<size_t>(node)][i]);
            double prev = k > 1 ? value_of(dep[i - 1]) : 0.0;
            idle_sum += value_of(dep[i]) - std::max(upstream, prev) -
                        value_of(inputs.services[static_cast<size_t>(node)][i]);
        }
    }
    double span = value_of(dep[static_cast<size_t>(last - 1)]) - window_start;
    switch (sel.kind) {
        case MeasureKind::total_time:
        case MeasureKind::system_total_time: return sojourn_sum / count;
        case MeasureKind::waiting_time:
        case MeasureKind::system_waiting_time: return (sojourn_sum - service_sum) / count;
        case MeasureKind::idle_time: return idle_sum / count;
        case MeasureKind::throughput:
        case MeasureKind::utilization:
        case MeasureKind::in_system:
        case MeasureKind::queue_length: {
            if (span <= 0.0)
                throw std::domain_error("batch means: departure span of a batch is zero");
            if (sel.kind == MeasureKind::throughput) return count / span;
            if (sel.kind == MeasureKind::utilization) return service_sum / span;
            if (sel.kind == MeasureKind::in_system) return sojourn_sum / span;
            return (sojourn_sum - service_sum) / span;
        }
    }
    throw std::invalid_argument("batch means: unhandled measure kind");
}

}  // namespace detail

// Batch-means estimate of the long-run measure from one path of `horizon`
// customers: drop `warmup` customers, split the rest into `batches` contiguous
// batches, and treat the batch values as replications. Monotonically trending
// batch means mark the estimate as suspect (likely unstable configuration).
inline Estimate estimate_steady_state(const StochasticModel& model, const MeasureSelector& sel,
                                      std::span<const double> theta, int horizon, int warmup,
                                      int batches, std::uint64_t seed) {
    if (batches < 2) throw std::invalid_argument("steady state: need >= 2 batches");
    if (warmup < 0 || warmup >= horizon)
        throw std::invalid_argument("steady state: need 0 <= warmup < horizon");
    if ((horizon - warmup) / batches < 1)
        throw std::invalid_argument("steady state: fewer customers than batches");

    auto inputs = sample_inputs(model, theta, seed, 0, horizon);
    auto path = simulate(model.structure, inputs, horizon);
    (void)compute_measure(model.structure, sel, path, inputs, horizon);  // compatibility checks

    const int span = horizon - warmup;
    const int base = span / batches, rem = span % batches;
    const int node = (sel.kind == MeasureKind::system_total_time ||
                      sel.kind == MeasureKind::system_waiting_time)
                         ? path.node_count() - 1
                         : sel.node;
    if (node < 0 || node >= path.node_count())
        throw std::invalid_argument("steady state: measure node out of range");

    std::vector<double> means;
    means.reserve(static_cast<size_t>(batches));
    int first = warmup + 1;
    double window_start =
        warmup > 0 ? value_of(path.departures[static_cast<size_t>(node)][static_cast<size_t>(warmup - 1)])
                   : 0.0;
    for (int b = 0; b < batches; ++b) {
        int len = base + (b < rem ? 1 : 0);
        int last = first + len - 1;
        means.push_back(detail::batch_value(model.structure, sel, path, inputs, first, last,
                                            window_start));
        window_start = value_of(path.departures[static_cast<size_t>(node)][static_cast<size_t>(last - 1)]);
        first = last + 1;
    }

    Estimate e = detail::summarize(means);
    bool increasing = true, decreasing = true;
    for (size_t i = 1; i < means.size(); ++i) {
        increasing = increasing && means[i] > means[i - 1];
        decreasing = decreasing && means[i] < means[i - 1];
    }
    e.suspected_unstable = increasing || decreasing;
    return e;
}

// Antithetic variates: pair r runs the same substreams with uniforms u and
// 1-u; the estimator averages the pair means. Requires every bound
// distribution to be inversion-sampled, so each duration (and with it the
// measure, by monotonicity of the recursions) is monotone in each uniform.
inline Estimate antithetic_estimate(const StochasticModel& model, const MeasureSelector& sel,
                                    std::span<const double> theta, int horizon, int pair_count,
                                    std::uint64_t seed, const EstimatorOptions& opts = {}) {
    if (pair_count < 2) throw std::invalid_argument("antithetic: need >= 2 pairs");
    if (!is_inversion_monotone(model.interarrival))
        throw std::invalid_argument("antithetic: interarrival family is not inversion-sampled");
    for (const auto& s : model.service)
        if (!is_inversion_monotone(s))
            throw std::invalid_argument("antithetic: service family is not inversion-sampled");

    auto values = detail::replicate(pair_count, opts, [&](int r) {
        double pair_sum = 0.0;
        for (bool anti : {false, true}) {
            auto inputs =
                sample_inputs(model, theta, seed, static_cast<std::uint64_t>(r), horizon, anti);
            auto path = simulate(model.structure, inputs, horizon);
            pair_sum += compute_measure(model.structure, sel, path, inputs, horizon);
        }
        return pair_sum / 2.0;
    });
    return detail::summarize(values);
}

// Common random numbers: estimates E[F(theta1)] - E[F(theta2)] by replaying
// the identical substreams at both parameter values and averaging the paired
// differences.
inline Estimate crn_difference(const StochasticModel& model, const MeasureSelector& sel,
                               std::span<const double> theta1, std::span<const double> theta2,
                               int horizon, int replications, std::uint64_t seed,
                               const EstimatorOptions& opts = {}) {
    if (replications < 2) throw std::invalid_argument("crn: need >= 2 replications");
    auto values = detail::replicate(replications, opts, [&](int r) {
        auto in1 = sample_inputs(model, theta1, seed, static_cast<std::uint64_t>(r), horizon);
        auto p1 = simulate(model.structure, in1, horizon);
        double f1 = compute_measure(model.structure, sel, p1, in1, horizon);
        auto in2 = sample_inputs(model, theta2, seed, static_cast<std::uint64_t>(r), horizon);
        auto p2 = simulate(model.structure, in2, horizon);
        double f2 = compute_measure(model.structure, sel, p2, in2, horizon);
        return f1 - f2;
    });
    return detail::summarize(values);
}

}  // namespace rqsim
