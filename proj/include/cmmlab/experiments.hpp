#pragma once

#include "cmmlab/estimators.hpp"
#include "cmmlab/scenario.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cmm {

enum class EstimatorKind { Exact, McIntegration, Weighted, ClosedFormOrthogonal };

// How infeasible trials enter a row's aggregate: Exclude averages the
// feasible trials and reports the rate; CountAsMissing additionally blanks
// the row's mean whenever any trial was infeasible.
enum class InfeasiblePolicy { Exclude, CountAsMissing };

// Declarative sweep description. For the orthogonal road model the sweep
// values are per-direction counts (all four directions equal); for the
// uniform model they are total vehicle counts.
struct ExperimentConfig {
    std::string name = "experiment";
    RoadKind road_kind = RoadKind::UniformRandom;
    std::vector<int> sweep;
    double sigma = 0.3;
    double half_width = 2.0;
    int trials = 5000;
    std::int64_t mc_integration_samples = 10000;
    EstimatorKind estimator = EstimatorKind::Exact;
    std::uint64_t master_seed = 1;
    InfeasiblePolicy infeasible_policy = InfeasiblePolicy::Exclude;
    int threads = 0;             // 0 = hardware concurrency
    double weighted_extent = 0.0;  // 0 = estimator default
    int weighted_nodes = 0;        // 0 = estimator default

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    RoadModel road_model(int sweep_value) const;
};

// One aggregated sweep point. mean_e2/std_error are NaN when no trial was
// feasible (or when the policy blanks the row).
struct ExperimentRow {
    int n = 0;
    int trials_run = 0;
    int trials_feasible = 0;
    double mean_e2 = 0.0;
    double std_error = 0.0;
    double asymptote_e2 = 0.0;
    double infeasible_rate = 0.0;
};

// Runs one trial: derives an independent stream from
// (master_seed, sweep value, trial index), samples a scenario and applies the
// configured estimator. Returns the square error, or nullopt when the trial
// is infeasible (empty or unbounded feasible set, zero accepted samples,
// degenerate weights). Bit-reproducible for a fixed key.
std::optional<double> run_trial(const ExperimentConfig& config, int sweep_value, int trial_index);

// Full sweep; trials run in parallel, aggregation is a sequential reduction
// in trial-index order so the output is identical for any thread count.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

// Mean and standard error of the mean (sample standard deviation over
// sqrt(count)); a single value reports a standard error of 0 by convention.
std::pair<double, double> mean_and_stderr(std::span<const double> values);

// Least-squares slopes of log(mean_e2) against log(n) for two row sets.
// Rows without a positive finite mean are skipped; each set needs >= 3 usable
// points.
std::pair<double, double> compare_slopes(std::span<const ExperimentRow> rows_a,
                                         std::span<const ExperimentRow> rows_b);

double loglog_slope(std::span<const ExperimentRow> rows);

const char* to_string(EstimatorKind k);
const char* to_string(RoadKind k);
const char* to_string(InfeasiblePolicy p);

} // namespace cmm
