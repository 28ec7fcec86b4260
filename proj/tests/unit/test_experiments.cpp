#include "cmmlab/experiments.hpp"

#include "cmmlab/asymptotics.hpp"
#include "cmmlab/experiment_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace cmm;

namespace {

ExperimentConfig small_orthogonal(EstimatorKind estimator) {
    ExperimentConfig cfg;
    cfg.name = "unit";
    cfg.road_kind = RoadKind::Orthogonal;
    cfg.sweep = {2, 4};
    cfg.sigma = 0.3;
    cfg.half_width = 2.0;
    cfg.trials = 50;
    cfg.estimator = estimator;
    cfg.master_seed = 2024;
    return cfg;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("defaults follow the reference protocol") {
    const ExperimentConfig cfg;
    CHECK(cfg.trials == 5000);
    CHECK(cfg.mc_integration_samples == 10000);
    CHECK(cfg.half_width == 2.0);
    CHECK(cfg.infeasible_policy == InfeasiblePolicy::Exclude);
}

TEST_CASE("zero noise orthogonal trial has zero error") {
    ExperimentConfig cfg = small_orthogonal(EstimatorKind::Exact);
    cfg.sigma = 0.0;
    cfg.sweep = {1};
    const auto e2 = run_trial(cfg, 1, 0);
    REQUIRE(e2.has_value());
    CHECK(*e2 <= 1e-30);
}

TEST_CASE("trials are bit reproducible") {
    const ExperimentConfig cfg = small_orthogonal(EstimatorKind::McIntegration);
    const auto a = run_trial(cfg, 4, 17);
    const auto b = run_trial(cfg, 4, 17);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(*a == *b);  // bitwise
    const auto c = run_trial(cfg, 4, 18);
    CHECK(*a != *c);
}

TEST_CASE("exact and closed form see the same stream") {
    const ExperimentConfig exact_cfg = small_orthogonal(EstimatorKind::Exact);
    const ExperimentConfig closed_cfg = small_orthogonal(EstimatorKind::ClosedFormOrthogonal);
    for (int idx = 0; idx < 100; ++idx) {
        const auto a = run_trial(exact_cfg, 4, idx);
        const auto b = run_trial(closed_cfg, 4, idx);
        REQUIRE(a.has_value() == b.has_value());
        if (a) CHECK(std::abs(*a - *b) < 1e-12);
    }
}

TEST_CASE("experiment output is byte identical across thread counts and reruns") {
    ExperimentConfig cfg = small_orthogonal(EstimatorKind::Exact);
    cfg.trials = 200;
    cfg.threads = 1;
    const std::string csv1 = results_to_csv(cfg, run_experiment(cfg));
    cfg.threads = 4;
    const std::string csv4 = results_to_csv(cfg, run_experiment(cfg));
    CHECK(csv1 == csv4);  // the id ignores execution details like threads
    const std::string csv4b = results_to_csv(cfg, run_experiment(cfg));
    CHECK(csv4 == csv4b);
}

TEST_CASE("aggregation matches closed-form statistics") {
    const std::vector<double> values = {1.0, 2.0, 3.0, 4.0};
    const auto [mean, se] = mean_and_stderr(values);
    CHECK(mean == doctest::Approx(2.5).epsilon(1e-15));
    // sample variance 5/3, se = sqrt(5/3)/2
    CHECK(se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-14));
    const auto [m1, se1] = mean_and_stderr(std::vector<double>{7.25});
    CHECK(m1 == 7.25);
    CHECK(se1 == 0.0);
}

TEST_CASE("a single trial gives a degenerate but well-formed row") {
    ExperimentConfig cfg = small_orthogonal(EstimatorKind::Exact);
    cfg.sweep = {3};
    cfg.trials = 1;
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].trials_run == 1);
    CHECK(rows[0].trials_feasible == 1);
    CHECK(rows[0].std_error == 0.0);
    CHECK(rows[0].mean_e2 == run_trial(cfg, 3, 0).value());
}

TEST_CASE("rows carry the matching asymptote") {
    ExperimentConfig cfg = small_orthogonal(EstimatorKind::Exact);
    cfg.sweep = {4};
    cfg.trials = 5;
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].asymptote_e2 ==
          doctest::Approx(expected_e2_orthogonal_leading({4, 4, 4, 4}, 0.3)).epsilon(1e-14));

    ExperimentConfig ucfg = cfg;
    ucfg.road_kind = RoadKind::UniformRandom;
    ucfg.sweep = {12};
    const auto urows = run_experiment(ucfg);
    CHECK(urows[0].asymptote_e2 ==
          doctest::Approx(expected_e2_uniform_leading(12, 2.0, NoiseModel::shared_sigma(0.3)))
              .epsilon(1e-14));

    ExperimentConfig wcfg = cfg;
    wcfg.estimator = EstimatorKind::Weighted;
    wcfg.sweep = {2};
    wcfg.trials = 2;
    wcfg.weighted_nodes = 41;
    const auto wrows = run_experiment(wcfg);
    CHECK(std::isnan(wrows[0].asymptote_e2));
}

TEST_CASE("uniform n=3 often leaves the set unbounded and is counted") {
    ExperimentConfig cfg;
    cfg.road_kind = RoadKind::UniformRandom;
    cfg.sweep = {3};
    cfg.sigma = 0.3;
    cfg.trials = 400;
    cfg.master_seed = 7;
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 1);
    // P(max gap > pi) = 3/4 for three uniform angles.
    CHECK(rows[0].infeasible_rate > 0.6);
    CHECK(rows[0].infeasible_rate < 0.9);
    CHECK(rows[0].trials_feasible + static_cast<int>(rows[0].infeasible_rate * 400 + 0.5) == 400);
    CHECK(std::isfinite(rows[0].mean_e2));

    cfg.infeasible_policy = InfeasiblePolicy::CountAsMissing;
    const auto strict = run_experiment(cfg);
    CHECK(std::isnan(strict[0].mean_e2));
    CHECK(strict[0].trials_feasible == rows[0].trials_feasible);
}

TEST_CASE("monotone error decrease in the vehicle count") {
    ExperimentConfig cfg = small_orthogonal(EstimatorKind::Exact);
    cfg.sweep = {2, 4, 8, 16};
    cfg.trials = 1500;
    cfg.master_seed = 11;
    const auto rows = run_experiment(cfg);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double slack =
            2.0 * std::sqrt(rows[i].std_error * rows[i].std_error +
                            rows[i + 1].std_error * rows[i + 1].std_error);
        CHECK(rows[i + 1].mean_e2 <= rows[i].mean_e2 + slack);
    }

    ExperimentConfig ucfg = cfg;
    ucfg.road_kind = RoadKind::UniformRandom;
    ucfg.sweep = {5, 10, 20, 40};
    ucfg.trials = 1000;
    const auto urows = run_experiment(ucfg);
    for (std::size_t i = 0; i + 1 < urows.size(); ++i) {
        const double slack =
            2.0 * std::sqrt(urows[i].std_error * urows[i].std_error +
                            urows[i + 1].std_error * urows[i + 1].std_error);
        CHECK(urows[i + 1].mean_e2 <= urows[i].mean_e2 + slack);
    }
}

TEST_CASE("slope fit recovers synthetic laws") {
    std::vector<ExperimentRow> inverse_n;
    std::vector<ExperimentRow> inverse_log;
    for (int n : {20, 50, 100, 200, 300}) {
        ExperimentRow r;
        r.n = n;
        r.trials_run = r.trials_feasible = 1;
        r.mean_e2 = 3.7 / n;
        inverse_n.push_back(r);
        r.mean_e2 = 3.7 / std::log(n);
        inverse_log.push_back(r);
    }
    const auto [slope_n, slope_log] = compare_slopes(inverse_n, inverse_log);
    CHECK(slope_n == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(slope_log > -0.35);
    CHECK(slope_log < -0.05);

    std::vector<ExperimentRow> too_few(inverse_n.begin(), inverse_n.begin() + 2);
    CHECK_THROWS_AS(loglog_slope(too_few), std::invalid_argument);
}

TEST_CASE("config validation names the offending field") {
    ExperimentConfig cfg = small_orthogonal(EstimatorKind::Exact);
    cfg.sigma = -1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), "config field 'sigma' must be >= 0",
                         std::invalid_argument);
    cfg = small_orthogonal(EstimatorKind::ClosedFormOrthogonal);
    cfg.road_kind = RoadKind::UniformRandom;
    cfg.sweep = {5};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_orthogonal(EstimatorKind::Exact);
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config json round trip and identifiers") {
    const std::string text = R"({
        "name": "demo",
        "road_model": {"kind": "uniform", "sweep": [5, 10, 15]},
        "sigma": 0.3,
        "half_width": 2.0,
        "trials": 100,
        "estimator": "mc-integration",
        "master_seed": 99,
        "infeasible_policy": "exclude",
        "threads": 2
    })";
    const ExperimentConfig cfg = config_from_json(text);
    CHECK(cfg.name == "demo");
    CHECK(cfg.road_kind == RoadKind::UniformRandom);
    CHECK(cfg.sweep == std::vector<int>{5, 10, 15});
    CHECK(cfg.estimator == EstimatorKind::McIntegration);
    CHECK(cfg.master_seed == 99);

    const ExperimentConfig round = config_from_json(config_to_json(cfg));
    CHECK(config_id(round) == config_id(cfg));
    CHECK(config_id(cfg).size() == 16);

    ExperimentConfig other = cfg;
    other.master_seed = 100;
    CHECK(config_id(other) != config_id(cfg));
}

TEST_CASE("config parse errors carry line numbers, validation names fields") {
    const std::string broken = "{\n  \"road_model\": {\"kind\": \"uniform\",\n  \"sweep\" [5]\n}\n}";
    CHECK_THROWS_WITH_AS(config_from_json(broken),
                         doctest::Contains("line 3"), std::invalid_argument);
    const std::string bad_sigma = R"({"road_model": {"kind": "uniform", "sweep": [5]}, "sigma": -0.5})";
    CHECK_THROWS_WITH_AS(config_from_json(bad_sigma), doctest::Contains("sigma"),
                         std::invalid_argument);
    const std::string unknown = R"({"road_model": {"kind": "uniform", "sweep": [5]}, "sigm": 0.5})";
    CHECK_THROWS_WITH_AS(config_from_json(unknown), doctest::Contains("sigm"),
                         std::invalid_argument);
}

TEST_CASE("csv serialization round trips through the reader") {
    ExperimentConfig cfg = small_orthogonal(EstimatorKind::Exact);
    cfg.sweep = {2, 4};
    cfg.trials = 40;
    const auto rows = run_experiment(cfg);
    const std::string csv = results_to_csv(cfg, rows);
    CHECK(csv.rfind("config_id,road_model,sigma,w,estimator,N,", 0) == 0);

    const auto tmp = std::filesystem::temp_directory_path() / "cmmlab_unit_rows.csv";
    write_results_csv(tmp.string(), cfg, rows);
    const CsvExperiment back = read_results_csv(tmp.string());
    CHECK(back.config_id == config_id(cfg));
    CHECK(back.road_model == "orthogonal");
    CHECK(back.estimator == "exact");
    CHECK(back.sigma == cfg.sigma);
    REQUIRE(back.rows.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back.rows[i].n == rows[i].n);
        CHECK(back.rows[i].mean_e2 == rows[i].mean_e2);  // 17 digits survive the round trip
        CHECK(back.rows[i].std_error == rows[i].std_error);
        CHECK(back.rows[i].asymptote_e2 == rows[i].asymptote_e2);
    }
    std::filesystem::remove(tmp);
}

TEST_CASE("manifest records the seed and the increment density resolution") {
    ExperimentConfig cfg;
    cfg.road_kind = RoadKind::UniformRandom;
    cfg.sweep = {5};
    cfg.master_seed = 424242;
    const std::string manifest = manifest_to_json(cfg);
    CHECK(manifest.find("424242") != std::string::npos);
    CHECK(manifest.find("full-two-pi") != std::string::npos);
    CHECK(manifest.find(config_id(cfg)) != std::string::npos);

    ExperimentConfig orth = cfg;
    orth.road_kind = RoadKind::Orthogonal;
    orth.sweep = {4};
    CHECK(manifest_to_json(orth).find("full-two-pi") == std::string::npos);
}

} // TEST_SUITE
