#pragma once

// Infinitesimal perturbation analysis: the recursions are evaluated over Dual
// scalars, so addition adds tangents and max/min keep the winning operand's
// tangent (left operand on exact value ties; every consequential tie is
// counted). The gradient estimator averages pathwise derivatives of a measure
// over replications; the finite-difference estimator with common random
// numbers is the independent cross-check.

#include <cstdint>
#include <span>
#include <vector>

#include "rqsim/estimators.hpp"
#include "rqsim/model.hpp"

namespace rqsim {

template <class T>
struct TangentResult {
    T result;
    std::uint64_t tie_events = 0;
};

// Sample path over (value, tangent) pairs for duration inputs that carry
// their d/d(theta); works for any of the model classes.
inline TangentResult<SamplePath<Dual>> propagate_tangents(const ModelSpec& model,
                                                          const ModelInputs<Dual>& inputs,
                                                          int horizon) {
    dual_tie_events = 0;
    TangentResult<SamplePath<Dual>> out{simulate(model, inputs, horizon), 0};
    out.tie_events = dual_tie_events;
    return out;
}

struct GradientEstimate {
    Estimate estimate;
    std::uint64_t tie_events = 0;  // max/min value ties hit across all replications
};

// Monte Carlo average of d(measure)/d(theta[coord]) over R replications.
inline GradientEstimate ipa_gradient(const StochasticModel& model, const MeasureSelector& sel,
                                     std::span<const double> theta, int coord, int horizon,
                                     int replications, std::uint64_t seed,
                                     const EstimatorOptions& opts = {}) {
    if (replications < 2) throw std::invalid_argument("ipa: need >= 2 replications");
    std::vector<std::uint64_t> ties(static_cast<size_t>(replications), 0);
    auto values = detail::replicate(replications, opts, [&](int r) {
        auto inputs =
            sample_inputs_dual(model, theta, coord, seed, static_cast<std::uint64_t>(r), horizon);
        dual_tie_events = 0;
        auto path = simulate(model.structure, inputs, horizon);
        Dual f = compute_measure(model.structure, sel, path, inputs, horizon);
        ties[static_cast<size_t>(r)] = dual_tie_events;
        return f.t;
    });
    GradientEstimate g;
    g.estimate = detail::summarize(values);
    for (std::uint64_t t : ties) g.tie_events += t;
    return g;
}

// Central finite difference (F(theta + h e_c) - F(theta - h e_c)) / 2h with
// the same random streams on both sides of every replication.
inline Estimate fd_gradient(const StochasticModel& model, const MeasureSelector& sel,
                            std::span<const double> theta, int coord, double h, int horizon,
                            int replications, std::uint64_t seed,
                            const EstimatorOptions& opts = {}) {
    if (replications < 2) throw std::invalid_argument("fd: need >= 2 replications");
    if (!(h > 0)) throw std::invalid_argument("fd: step must be > 0");
    if (coord < 0 || coord >= static_cast<int>(theta.size()))
        throw std::invalid_argument("fd: coordinate out of range");

    std::vector<double> up(theta.begin(), theta.end());
    std::vector<double> down(theta.begin(), theta.end());
    up[static_cast<size_t>(coord)] += h;
    down[static_cast<size_t>(coord)] -= h;

    auto values = detail::replicate(replications, opts, [&](int r) {
        auto in_up = sample_inputs(model, up, seed, static_cast<std::uint64_t>(r), horizon);
        auto p_up = simulate(model.structure, in_up, horizon);
        double f_up = compute_measure(model.structure, sel, p_up, in_up, horizon);
        auto in_dn = sample_inputs(model, down, seed, static_cast<std::uint64_t>(r), horizon);
        auto p_dn = simulate(model.structure, in_dn, horizon);
        double f_dn = compute_measure(model.structure, sel, p_dn, in_dn, horizon);
        return (f_up - f_dn) / (2.0 * h);
    });
    return detail::summarize(values);
}

}  // namespace rqsim
