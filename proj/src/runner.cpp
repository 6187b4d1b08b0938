#include "rqsim/runner.hpp"

#include <iostream>
#include <ostream>

#include "rqsim/errors.hpp"
#include "rqsim/ipa.hpp"
#include "rqsim/report.hpp"
#include "rqsim/validate.hpp"

namespace rqsim {

namespace {

void run_path_mode(const ExperimentConfig& config, std::ostream& log) {
    const StochasticModel& model = *config.model;
    auto inputs = sample_inputs(model, config.theta, config.seed, 0, config.horizon);
    auto path = simulate(model.structure, inputs, config.horizon);
    write_file(config.out_dir, "path.csv", path_csv(model.structure, path, config.horizon));
    write_file(config.out_dir, "metrics.csv",
               metrics_csv(model.structure, path, inputs, config.horizon));
    if (!config.quiet)
        log << "path: " << model_kind_name(model.structure) << ", " << config.horizon
            << " customers, " << path.node_count() << " node(s)\n";
}

void run_estimate_mode(const ExperimentConfig& config, std::ostream& log) {
    const StochasticModel& model = *config.model;
    EstimatorOptions opts{config.threads};
    std::vector<SummaryEntry> entries;
    for (const auto& sel : config.measures) {
        SummaryEntry entry;
        entry.measure = measure_name(sel);
        if (!config.theta2.empty()) {
            entry.estimator = "crn_difference";
            entry.estimate = crn_difference(model, sel, config.theta, config.theta2,
                                            config.horizon, config.replications, config.seed, opts);
        } else if (config.variance_reduction == "antithetic") {
            entry.estimator = "antithetic";
            entry.estimate = antithetic_estimate(model, sel, config.theta, config.horizon,
                                                 config.replications, config.seed, opts);
        } else {
            entry.estimator = "crude";
            entry.estimate = estimate_finite_horizon(model, sel, config.theta, config.horizon,
                                                     config.replications, config.seed, opts);
        }
        if (!config.quiet)
            log << entry.measure << " [" << entry.estimator << "]: " << entry.estimate.mean
                << " +/- " << entry.estimate.half_width_95 << " (R=" << entry.estimate.replications
                << ")\n";
        entries.push_back(std::move(entry));
    }
    write_file(config.out_dir, "summary.json", summary_json(config, entries));
}

void run_steady_mode(const ExperimentConfig& config, std::ostream& log) {
    const StochasticModel& model = *config.model;
    std::vector<SummaryEntry> entries;
    for (const auto& sel : config.measures) {
        SummaryEntry entry;
        entry.measure = measure_name(sel);
        entry.estimator = "batch_means";
        entry.estimate = estimate_steady_state(model, sel, config.theta, config.horizon,
                                               config.warmup, config.batches, config.seed);
        if (!config.quiet) {
            log << entry.measure << " [batch_means]: " << entry.estimate.mean << " +/- "
                << entry.estimate.half_width_95 << " (B=" << entry.estimate.replications << ")";
            if (entry.estimate.suspected_unstable) log << "  ! batch means trend monotonically";
            log << "\n";
        }
        entries.push_back(std::move(entry));
    }
    write_file(config.out_dir, "summary.json", summary_json(config, entries));
}

void run_ipa_mode(const ExperimentConfig& config, std::ostream& log) {
    const StochasticModel& model = *config.model;
    EstimatorOptions opts{config.threads};
    std::vector<SummaryEntry> entries;
    for (const auto& sel : config.measures) {
        SummaryEntry entry;
        entry.measure = measure_name(sel);
        entry.estimator = "ipa";
        auto grad = ipa_gradient(model, sel, config.theta, config.ipa_coord, config.horizon,
                                 config.replications, config.seed, opts);
        entry.estimate = grad.estimate;
        entry.has_tie_events = true;
        entry.tie_events = grad.tie_events;
        if (!config.quiet)
            log << "d" << entry.measure << "/dtheta[" << config.ipa_coord
                << "] [ipa]: " << entry.estimate.mean << " +/- " << entry.estimate.half_width_95
                << " (ties=" << grad.tie_events << ")\n";
        entries.push_back(entry);

        if (config.fd_step > 0) {
            SummaryEntry fd;
            fd.measure = entry.measure;
            fd.estimator = "fd";
            fd.estimate = fd_gradient(model, sel, config.theta, config.ipa_coord, config.fd_step,
                                      config.horizon, config.replications, config.seed, opts);
            if (!config.quiet)
                log << "d" << fd.measure << "/dtheta[" << config.ipa_coord
                    << "] [fd, h=" << config.fd_step << "]: " << fd.estimate.mean << " +/- "
                    << fd.estimate.half_width_95 << "\n";
            entries.push_back(std::move(fd));
        }
    }
    write_file(config.out_dir, "summary.json", summary_json(config, entries));
}

int run_validate_mode(const ExperimentConfig& config, std::ostream& log) {
    auto report =
        run_validation(config.seed, config.validate_instances, config.validate_tolerance);
    write_file(config.out_dir, "validation.json",
               validation_json(config, report.instances, report.mismatches, report.max_abs_diff,
                               report.failures));
    if (!config.quiet) {
        log << "validate: " << report.instances << " instances, " << report.mismatches
            << " mismatch(es), max |diff| = " << report.max_abs_diff << "\n";
        for (const auto& f : report.failures) log << "  mismatch: " << f << "\n";
    }
    return report.mismatches == 0 ? kExitOk : kExitSimulationError;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
    try {
        write_file(config.out_dir, "manifest.json", manifest_json(config));
        switch (config.mode) {
            case RunMode::path: run_path_mode(config, log); break;
            case RunMode::estimate: run_estimate_mode(config, log); break;
            case RunMode::steady: run_steady_mode(config, log); break;
            case RunMode::ipa: run_ipa_mode(config, log); break;
            case RunMode::validate: return run_validate_mode(config, log);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitSimulationError;
    }
    return kExitOk;
}

}  // namespace rqsim
