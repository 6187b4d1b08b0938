#include "rqsim/validate.hpp"

#include <algorithm>
#include <cmath>

#include "rqsim/des_oracle.hpp"
#include "rqsim/random.hpp"

namespace rqsim {

namespace {

// Small self-contained generator facade for corpus construction.
struct Gen {
    RandomStream stream;
    explicit Gen(std::uint64_t seed, std::uint64_t id) : stream(seed, id) {}

    double uniform() { return stream.next_uniform(); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(uniform() * (hi - lo + 1));
    }
};

DistributionSpec random_family(Gen& g) {
    switch (g.uniform_int(0, 3)) {
        case 0: return DistributionSpec::exponential(g.uniform(0.5, 2.0));
        case 1: return DistributionSpec::uniform(0.0, g.uniform(0.5, 2.0));
        case 2: return DistributionSpec::erlang(g.uniform_int(1, 3), g.uniform(0.8, 2.5));
        default:
            // Constants produce many simultaneous events, stressing the
            // tie-handling agreement between the two implementations.
            return DistributionSpec::constant(g.uniform(0.2, 1.5));
    }
}

std::vector<double> draw(Gen& g, int count) {
    DistributionSpec family = random_family(g);
    return sample_durations(family, {}, g.stream, count);
}

std::vector<std::vector<double>> draw_matrix(Gen& g, int nodes, int count) {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<size_t>(nodes));
    for (int n = 0; n < nodes; ++n) out.push_back(draw(g, count));
    return out;
}

}  // namespace

std::vector<ValidationInstance> validation_corpus(std::uint64_t seed, int count) {
    std::vector<ValidationInstance> corpus;
    corpus.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Gen g(derive_seed(seed, 0x5EED), static_cast<std::uint64_t>(i));
        ValidationInstance inst;
        const int cls = i % 6;
        const int horizon = g.uniform_int(40, cls == 5 ? 250 : 1000);
        inst.horizon = horizon;
        switch (cls) {
            case 0: {
                inst.label = "gg1";
                inst.model = Gg1Spec{};
                inst.inputs.interarrivals = draw(g, horizon);
                inst.inputs.services = draw_matrix(g, 1, horizon);
                break;
            }
            case 1: {
                TandemSpec spec;
                spec.node_count = g.uniform_int(1, 5);
                spec.buffers.assign(static_cast<size_t>(spec.node_count), kUnbounded);
                inst.label = "tandem";
                inst.model = spec;
                inst.inputs.interarrivals = draw(g, horizon);
                inst.inputs.services = draw_matrix(g, spec.node_count, horizon);
                break;
            }
            case 2: {
                TandemSpec spec;
                spec.node_count = g.uniform_int(2, 5);
                spec.blocking =
                    g.uniform() < 0.5 ? BlockingRule::manufacturing : BlockingRule::communication;
                spec.buffers.assign(static_cast<size_t>(spec.node_count), kUnbounded);
                for (int n = 1; n < spec.node_count; ++n)
                    if (g.uniform() < 0.8)
                        spec.buffers[static_cast<size_t>(n)] = g.uniform_int(0, 3);
                inst.label = std::string("tandem/") + to_string(spec.blocking);
                inst.model = spec;
                inst.inputs.interarrivals = draw(g, horizon);
                inst.inputs.services = draw_matrix(g, spec.node_count, horizon);
                break;
            }
            case 3: {
                ClosedTandemSpec spec;
                spec.node_count = g.uniform_int(1, 5);
                spec.populations.assign(static_cast<size_t>(spec.node_count), 0);
                for (int n = 0; n < spec.node_count; ++n)
                    spec.populations[static_cast<size_t>(n)] = g.uniform_int(0, 3);
                // Guarantee at least one circulating customer, placed anywhere.
                spec.populations[static_cast<size_t>(g.uniform_int(0, spec.node_count - 1))] =
                    g.uniform_int(1, 3);
                inst.label = "closed_tandem";
                inst.model = spec;
                inst.inputs.services = draw_matrix(g, spec.node_count, horizon);
                break;
            }
            case 4: {
                GGmSpec spec;
                spec.server_count = g.uniform_int(1, 4);
                inst.label = "ggm/m=" + std::to_string(spec.server_count);
                inst.model = spec;
                inst.inputs.interarrivals = draw(g, horizon);
                inst.inputs.services = draw_matrix(g, 1, horizon);
                break;
            }
            default: {
                NetworkSpec spec;
                spec.node_count = g.uniform_int(2, 5);
                spec.populations.assign(static_cast<size_t>(spec.node_count), 0);
                for (int n = 0; n < spec.node_count; ++n)
                    spec.populations[static_cast<size_t>(n)] = g.uniform_int(0, 2);
                spec.populations[static_cast<size_t>(g.uniform_int(0, spec.node_count - 1))] =
                    g.uniform_int(1, 2);
                if (g.uniform() < 0.25)
                    spec.populations[static_cast<size_t>(
                        g.uniform_int(0, spec.node_count - 1))] = kUnbounded;
                spec.routing.rules.resize(static_cast<size_t>(spec.node_count));
                for (int n = 0; n < spec.node_count; ++n) {
                    int len = g.uniform_int(1, 6);
                    std::vector<int> pattern;
                    pattern.reserve(static_cast<size_t>(len));
                    for (int j = 0; j < len; ++j)
                        pattern.push_back(g.uniform_int(0, spec.node_count - 1));
                    spec.routing.rules[static_cast<size_t>(n)] = {std::move(pattern), true};
                }
                inst.label = "network/N=" + std::to_string(spec.node_count);
                inst.model = spec;

                // Budgeted oracle run fixes per-node horizons that are
                // guaranteed mutually feasible.
                long long budget = static_cast<long long>(spec.node_count) * horizon;
                inst.inputs.services =
                    draw_matrix(g, spec.node_count, static_cast<int>(budget));
                auto probe = des::simulate_network_budget(spec, inst.inputs.services, budget);
                inst.horizons.clear();
                for (const auto& dep : probe.departures)
                    inst.horizons.push_back(static_cast<int>(dep.size()));
                // A fully starved instance validates nothing; keep at least
                // the nodes that produced work.
                break;
            }
        }
        corpus.push_back(std::move(inst));
    }
    return corpus;
}

namespace {

void compare_sequences(const std::vector<double>& a, const std::vector<double>& b,
                       const std::string& what, double tolerance, InstanceComparison& out) {
    if (a.size() != b.size()) {
        out.ok = false;
        if (out.detail.empty())
            out.detail = what + ": length " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size());
        return;
    }
    for (size_t i = 0; i < a.size(); ++i) {
        double diff = std::abs(a[i] - b[i]);
        out.max_abs_diff = std::max(out.max_abs_diff, diff);
        if (diff > tolerance) {
            out.ok = false;
            if (out.detail.empty())
                out.detail = what + "[" + std::to_string(i + 1) + "]: " + std::to_string(a[i]) +
                             " vs " + std::to_string(b[i]);
            return;
        }
    }
}

}  // namespace

InstanceComparison compare_engines(const ValidationInstance& inst, double tolerance) {
    SamplePath<double> fast;
    SamplePath<double> oracle;
    if (const auto* net = std::get_if<NetworkSpec>(&inst.model)) {
        fast = simulate_network(*net, inst.inputs.services, inst.horizons);
        oracle = des::simulate_network(*net, inst.inputs.services, inst.horizons);
    } else {
        fast = simulate(inst.model, inst.inputs, inst.horizon);
        oracle = des::simulate_model(inst.model, inst.inputs, inst.horizon);
    }

    InstanceComparison out;
    for (int n = 0; n < fast.node_count(); ++n) {
        auto tag = inst.label + " node " + std::to_string(n + 1);
        compare_sequences(fast.departures[static_cast<size_t>(n)],
                          oracle.departures[static_cast<size_t>(n)], tag + " departures",
                          tolerance, out);
        compare_sequences(fast.arrivals[static_cast<size_t>(n)],
                          oracle.arrivals[static_cast<size_t>(n)], tag + " arrivals", tolerance,
                          out);
    }
    compare_sequences(fast.completions, oracle.completions, inst.label + " completions", tolerance,
                      out);
    return out;
}

ValidationReport run_validation(std::uint64_t seed, int count, double tolerance) {
    ValidationReport report;
    auto corpus = validation_corpus(seed, count);
    for (const auto& inst : corpus) {
        auto cmp = compare_engines(inst, tolerance);
        report.instances += 1;
        report.max_abs_diff = std::max(report.max_abs_diff, cmp.max_abs_diff);
        if (!cmp.ok) {
            report.mismatches += 1;
            report.failures.push_back(cmp.detail);
        }
    }
    return report;
}

}  // namespace rqsim
