#include "cmmlab/experiments.hpp"

#include "cmmlab/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace cmm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double attach_asymptote(const ExperimentConfig& config, int sweep_value) {
    if (config.estimator == EstimatorKind::Weighted) return kNaN;
    if (config.road_kind == RoadKind::Orthogonal) {
        if (sweep_value < 2) return kNaN;
        return expected_e2_orthogonal_leading(
            {sweep_value, sweep_value, sweep_value, sweep_value}, config.sigma);
    }
    return expected_e2_uniform_leading(sweep_value, config.half_width,
                                       NoiseModel::shared_sigma(config.sigma));
}

} // namespace

void ExperimentConfig::validate() const {
    if (sweep.empty()) throw std::invalid_argument("config field 'sweep' must be non-empty");
    for (int n : sweep) {
        if (road_kind == RoadKind::Orthogonal && n < 1) {
            throw std::invalid_argument("config field 'sweep' has an orthogonal count < 1");
        }
        if (road_kind == RoadKind::UniformRandom && n < 3) {
            throw std::invalid_argument("config field 'sweep' has a uniform count < 3");
        }
    }
    if (sigma < 0.0) throw std::invalid_argument("config field 'sigma' must be >= 0");
    if (half_width <= 0.0) throw std::invalid_argument("config field 'half_width' must be > 0");
    if (trials < 1) throw std::invalid_argument("config field 'trials' must be >= 1");
    if (mc_integration_samples < 1) {
        throw std::invalid_argument("config field 'mc_integration_samples' must be >= 1");
    }
    if (threads < 0) throw std::invalid_argument("config field 'threads' must be >= 0");
    if (estimator == EstimatorKind::ClosedFormOrthogonal && road_kind != RoadKind::Orthogonal) {
        throw std::invalid_argument(
            "config field 'estimator': closed-form-orthogonal requires the orthogonal road model");
    }
    if (estimator == EstimatorKind::Weighted && sigma == 0.0) {
        throw std::invalid_argument("config field 'sigma' must be > 0 for the weighted estimator");
    }
    if (weighted_extent < 0.0) {
        throw std::invalid_argument("config field 'weighted_grid.extent' must be > 0");
    }
    if (weighted_nodes != 0 && weighted_nodes < 2) {
        throw std::invalid_argument("config field 'weighted_grid.nodes' must be >= 2");
    }
}

RoadModel ExperimentConfig::road_model(int sweep_value) const {
    if (road_kind == RoadKind::Orthogonal) return RoadModel::orthogonal_equal(sweep_value);
    return RoadModel::uniform_random(sweep_value);
}

std::optional<double> run_trial(const ExperimentConfig& config, int sweep_value, int trial_index) {
    const RngStream trial_root = RngStream::seeded(config.master_seed)
                                     .split(static_cast<std::uint64_t>(sweep_value))
                                     .split(static_cast<std::uint64_t>(trial_index));
    RngStream scenario_stream = trial_root.split(0);
    RngStream estimator_stream = trial_root.split(1);

    const NoiseModel noise = NoiseModel::shared_sigma(config.sigma);
    const Scenario scenario =
        make_scenario(config.road_model(sweep_value), noise, config.half_width, scenario_stream);

    switch (config.estimator) {
        case EstimatorKind::Exact: {
            const EstimateResult r = exact_error(scenario);
            if (!r.feasible) return std::nullopt;
            return r.square_error;
        }
        case EstimatorKind::ClosedFormOrthogonal: {
            const DirectionalExtremes ex = directional_extremes(scenario);
            if (!orthogonal_feasible(ex, config.half_width)) return std::nullopt;
            return closed_form_orthogonal_e2(ex);
        }
        case EstimatorKind::McIntegration: {
            const EstimateResult r =
                mc_integration_error(scenario, config.mc_integration_samples, estimator_stream);
            if (!r.feasible) return std::nullopt;
            return r.square_error;
        }
        case EstimatorKind::Weighted: {
            HypothesisGrid grid = HypothesisGrid::defaults_for(config.half_width, noise);
            if (config.weighted_extent > 0.0) grid.extent = config.weighted_extent;
            if (config.weighted_nodes >= 2) grid.nodes_per_axis = config.weighted_nodes;
            try {
                return weighted_error(scenario, noise, grid).square_error;
            } catch (const std::runtime_error&) {
                return std::nullopt;  // degenerate weights count as infeasible
            }
        }
    }
    throw std::logic_error("run_trial: unknown estimator");
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<int> sweep = config.sweep;
    std::sort(sweep.begin(), sweep.end());

    unsigned thread_count = config.threads > 0
                                ? static_cast<unsigned>(config.threads)
                                : std::max(1u, std::thread::hardware_concurrency());
    thread_count = std::min<unsigned>(thread_count, static_cast<unsigned>(config.trials));

    std::vector<ExperimentRow> rows;
    rows.reserve(sweep.size());
    std::vector<std::optional<double>> results(static_cast<std::size_t>(config.trials));

    for (int n : sweep) {
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int idx = next.fetch_add(1);
                if (idx >= config.trials) break;
                results[static_cast<std::size_t>(idx)] = run_trial(config, n, idx);
            }
        };
        if (thread_count <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(thread_count);
            for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
            for (std::thread& t : pool) t.join();
        }

        // Sequential reduction in index order keeps the sums bit-identical
        // across thread counts.
        std::vector<double> feasible_values;
        feasible_values.reserve(results.size());
        for (const auto& r : results) {
            if (r) feasible_values.push_back(*r);
        }
        const int feasible = static_cast<int>(feasible_values.size());

        ExperimentRow row;
        row.n = n;
        row.trials_run = config.trials;
        row.trials_feasible = feasible;
        row.infeasible_rate =
            static_cast<double>(config.trials - feasible) / static_cast<double>(config.trials);
        row.asymptote_e2 = attach_asymptote(config, n);

        const bool blank = feasible == 0 ||
                           (config.infeasible_policy == InfeasiblePolicy::CountAsMissing &&
                            feasible < config.trials);
        if (blank) {
            row.mean_e2 = kNaN;
            row.std_error = kNaN;
        } else {
            std::tie(row.mean_e2, row.std_error) = mean_and_stderr(feasible_values);
        }
        rows.push_back(row);
    }
    return rows;
}

std::pair<double, double> mean_and_stderr(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean_and_stderr: empty sample");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    const double n = static_cast<double>(values.size());
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

double loglog_slope(std::span<const ExperimentRow> rows) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int k = 0;
    for (const ExperimentRow& r : rows) {
        if (!(std::isfinite(r.mean_e2) && r.mean_e2 > 0.0) || r.n < 1) continue;
        const double x = std::log(static_cast<double>(r.n));
        const double y = std::log(r.mean_e2);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    if (k < 3) throw std::invalid_argument("loglog_slope: need at least 3 usable points");
    const double denom = k * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("loglog_slope: degenerate abscissa");
    return (k * sxy - sx * sy) / denom;
}

std::pair<double, double> compare_slopes(std::span<const ExperimentRow> rows_a,
                                         std::span<const ExperimentRow> rows_b) {
    return {loglog_slope(rows_a), loglog_slope(rows_b)};
}

const char* to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::Exact: return "exact";
        case EstimatorKind::McIntegration: return "mc-integration";
        case EstimatorKind::Weighted: return "weighted";
        case EstimatorKind::ClosedFormOrthogonal: return "closed-form-orthogonal";
    }
    return "unknown";
}

const char* to_string(RoadKind k) {
    return k == RoadKind::Orthogonal ? "orthogonal" : "uniform";
}

const char* to_string(InfeasiblePolicy p) {
    return p == InfeasiblePolicy::Exclude ? "exclude" : "count-as-missing";
}

} // namespace cmm
