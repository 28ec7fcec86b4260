#include "cmmlab/asymptotics.hpp"
#include "cmmlab/estimators.hpp"
#include "cmmlab/experiment_io.hpp"
#include "cmmlab/experiments.hpp"
#include "cmmlab/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cmm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

Vec2 parse_vec2(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw std::invalid_argument("expected 'x,y', got '" + text + "'");
    }
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

std::vector<double> load_angles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open angle file: " + path);
    std::vector<double> angles;
    double v = 0.0;
    while (in >> v) angles.push_back(v);
    if (angles.size() < 3) {
        throw std::invalid_argument("angle file needs at least 3 values: " + path);
    }
    return angles;
}

struct RunOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
    std::optional<std::string> estimator;
};

int cmd_run(const RunOptions& opt) {
    ExperimentConfig cfg = load_config(opt.config_path);
    if (opt.seed) cfg.master_seed = *opt.seed;
    if (opt.trials) cfg.trials = *opt.trials;
    if (opt.threads) cfg.threads = *opt.threads;
    if (opt.estimator) {
        // Reuse the config parser for the estimator names.
        ExperimentConfig probe = cfg;
        const std::string json = "{\"road_model\":{\"kind\":\"" +
                                 std::string(to_string(cfg.road_kind)) +
                                 "\",\"sweep\":[4]},\"estimator\":\"" + *opt.estimator + "\"}";
        probe = config_from_json(json);
        cfg.estimator = probe.estimator;
    }
    cfg.validate();

    fs::create_directories(opt.out_dir);
    const std::vector<ExperimentRow> rows = run_experiment(cfg);
    const fs::path base = fs::path(opt.out_dir) / cfg.name;
    write_results_csv((base.string() + ".csv"), cfg, rows);
    write_manifest((base.string() + ".manifest.json"), cfg);
    std::cout << "wrote " << base.string() << ".csv (" << rows.size() << " rows)\n";
    return kExitOk;
}

struct PredictOptions {
    std::string kase;
    std::string counts;
    std::vector<int> n_list;
    double sigma = 0.3;
    double w = 2.0;
    std::string angles_path;
};

int cmd_predict(const PredictOptions& opt) {
    std::printf("%8s  %-14s\n", "N", "e2_predicted");
    if (opt.kase == "orthogonal-leading" || opt.kase == "orthogonal-full") {
        const bool full = opt.kase == "orthogonal-full";
        std::vector<std::array<int, 4>> cases;
        if (!opt.counts.empty()) {
            const std::vector<int> c = parse_int_list(opt.counts);
            if (c.size() != 4) {
                throw std::invalid_argument("--counts needs exactly four comma-separated values");
            }
            cases.push_back({c[0], c[1], c[2], c[3]});
        }
        for (int n : opt.n_list) cases.push_back({n, n, n, n});
        if (cases.empty()) {
            throw std::invalid_argument("orthogonal cases need --counts or --n-list");
        }
        for (const auto& c : cases) {
            double e2 = 0.0;
            if (full) {
                std::array<GumbelParams, 4> params;
                for (int j = 0; j < 4; ++j) params[j] = gumbel_params(c[j], opt.sigma);
                e2 = expected_e2_orthogonal(params);
            } else {
                e2 = expected_e2_orthogonal_leading(c, opt.sigma);
            }
            std::printf("%8d  %-14s\n", c[0], fmt(e2).c_str());
        }
        return kExitOk;
    }
    if (opt.kase == "uniform-leading") {
        std::vector<int> ns = opt.n_list;
        if (!opt.counts.empty()) {
            const std::vector<int> c = parse_int_list(opt.counts);
            ns.insert(ns.end(), c.begin(), c.end());
        }
        if (ns.empty()) throw std::invalid_argument("uniform-leading needs --n-list");
        for (int n : ns) {
            const double e2 =
                expected_e2_uniform_leading(n, opt.w, NoiseModel::shared_sigma(opt.sigma));
            std::printf("%8d  %-14s\n", n, fmt(e2).c_str());
        }
        return kExitOk;
    }
    if (opt.kase == "linearized") {
        if (opt.angles_path.empty()) throw std::invalid_argument("linearized needs --angles FILE");
        const std::vector<double> angles = load_angles(opt.angles_path);
        const LinearizedModel model =
            build_linearized_model(angles, opt.w, NoiseModel::shared_sigma(opt.sigma));
        std::printf("%8zu  %-14s\n", angles.size(), fmt(linearized_expected_e2(model)).c_str());
        return kExitOk;
    }
    throw std::invalid_argument("unknown --case '" + opt.kase + "'");
}

void print_comparison(const CsvExperiment& exp) {
    std::printf("%s  (%s, %s, sigma=%s, w=%s)\n", exp.config_id.c_str(), exp.road_model.c_str(),
                exp.estimator.c_str(), fmt(exp.sigma).c_str(), fmt(exp.half_width).c_str());
    std::printf("%8s  %-13s %-13s %-13s %-10s\n", "N", "mean_e2", "std_error", "asymptote_e2",
                "rel_diff");
    for (const ExperimentRow& r : exp.rows) {
        const double rel = (std::isfinite(r.mean_e2) && r.mean_e2 != 0.0)
                               ? (r.mean_e2 - r.asymptote_e2) / r.mean_e2
                               : std::numeric_limits<double>::quiet_NaN();
        std::printf("%8d  %-13s %-13s %-13s %-10s\n", r.n, fmt(r.mean_e2).c_str(),
                    fmt(r.std_error).c_str(), fmt(r.asymptote_e2).c_str(), fmt(rel).c_str());
    }
}

int cmd_compare(const std::vector<std::string>& csv_paths) {
    const CsvExperiment a = read_results_csv(csv_paths[0]);
    print_comparison(a);
    if (csv_paths.size() == 2) {
        const CsvExperiment b = read_results_csv(csv_paths[1]);
        std::printf("\n");
        print_comparison(b);
        const auto [sa, sb] = compare_slopes(a.rows, b.rows);
        std::printf("\nlog-log slope %s: %s\n", csv_paths[0].c_str(), fmt(sa).c_str());
        std::printf("log-log slope %s: %s\n", csv_paths[1].c_str(), fmt(sb).c_str());
        std::printf("steeper decrement: %s\n", sa < sb ? csv_paths[0].c_str() : csv_paths[1].c_str());
    }
    return kExitOk;
}

void check_n_overlap(const CsvExperiment& a, const CsvExperiment& b) {
    std::vector<int> missing;
    auto has_n = [](const CsvExperiment& e, int n) {
        return std::any_of(e.rows.begin(), e.rows.end(),
                           [n](const ExperimentRow& r) { return r.n == n; });
    };
    for (const ExperimentRow& r : a.rows) {
        if (!has_n(b, r.n)) missing.push_back(r.n);
    }
    for (const ExperimentRow& r : b.rows) {
        if (!has_n(a, r.n)) missing.push_back(r.n);
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        std::string list;
        for (int n : missing) list += (list.empty() ? "" : ", ") + std::to_string(n);
        throw std::invalid_argument("input CSVs do not share these N values: " + list);
    }
}

void write_plot_file(const fs::path& path, const std::string& header,
                     const std::vector<std::vector<double>>& columns,
                     const std::vector<int>& n_values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write plot file: " + path.string());
    out << "# " << header << '\n';
    char buf[40];
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        out << n_values[i];
        for (const auto& col : columns) {
            std::snprintf(buf, sizeof(buf), "%.17g", col[i]);
            out << ' ' << buf;
        }
        out << '\n';
    }
}

int cmd_plot_data(const std::string& figure, const std::vector<std::string>& csv_paths,
                  const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    auto expect_inputs = [&](std::size_t n) {
        if (csv_paths.size() != n) {
            throw std::invalid_argument(figure + " needs exactly " + std::to_string(n) +
                                        " --csv input(s)");
        }
    };

    if (figure == "fig2") {
        expect_inputs(2);
        CsvExperiment closed = read_results_csv(csv_paths[0]);
        CsvExperiment mc = read_results_csv(csv_paths[1]);
        if (closed.estimator != "closed-form-orthogonal") std::swap(closed, mc);
        if (closed.estimator != "closed-form-orthogonal" || mc.estimator != "mc-integration" ||
            closed.road_model != "orthogonal" || mc.road_model != "orthogonal") {
            throw std::invalid_argument(
                "fig2 needs one orthogonal closed-form-orthogonal CSV and one orthogonal "
                "mc-integration CSV");
        }
        check_n_overlap(closed, mc);
        std::vector<int> ns;
        std::vector<double> c1, c2, c3;
        for (const ExperimentRow& r : closed.rows) {
            const auto it = std::find_if(mc.rows.begin(), mc.rows.end(),
                                         [&](const ExperimentRow& m) { return m.n == r.n; });
            ns.push_back(r.n);
            c1.push_back(r.mean_e2);
            c2.push_back(it->mean_e2);
            c3.push_back(r.asymptote_e2);
        }
        write_plot_file(out / "fig2.dat", "N e2_closed_form e2_mc_integration e2_asymptote",
                        {c1, c2, c3}, ns);
        return kExitOk;
    }
    if (figure == "fig3" || figure == "fig4") {
        expect_inputs(1);
        const CsvExperiment exp = read_results_csv(csv_paths[0]);
        if (exp.road_model != "uniform") {
            throw std::invalid_argument(figure + " needs a uniform road model CSV");
        }
        std::vector<int> ns;
        std::vector<double> mean, asym, diff;
        for (const ExperimentRow& r : exp.rows) {
            ns.push_back(r.n);
            mean.push_back(r.mean_e2);
            asym.push_back(r.asymptote_e2);
            diff.push_back(r.mean_e2 - r.asymptote_e2);
        }
        if (figure == "fig3") {
            write_plot_file(out / "fig3.dat", "N mean_e2 asymptote_e2", {mean, asym}, ns);
        } else {
            write_plot_file(out / "fig4.dat", "N mean_minus_asymptote", {diff}, ns);
        }
        return kExitOk;
    }
    if (figure == "fig5") {
        expect_inputs(2);
        CsvExperiment orth = read_results_csv(csv_paths[0]);
        CsvExperiment unif = read_results_csv(csv_paths[1]);
        if (orth.road_model != "orthogonal") std::swap(orth, unif);
        if (orth.road_model != "orthogonal" || unif.road_model != "uniform" ||
            orth.estimator != "weighted" || unif.estimator != "weighted") {
            throw std::invalid_argument(
                "fig5 needs one orthogonal and one uniform weighted-estimator CSV");
        }
        for (const auto& [exp, name] :
             {std::pair{&orth, "fig5_orthogonal.dat"}, std::pair{&unif, "fig5_uniform.dat"}}) {
            std::vector<int> ns;
            std::vector<double> mean;
            for (const ExperimentRow& r : exp->rows) {
                ns.push_back(r.n);
                mean.push_back(r.mean_e2);
            }
            write_plot_file(out / name, "N mean_e2", {mean}, ns);
        }
        return kExitOk;
    }
    throw std::invalid_argument("unknown --figure '" + figure + "' (fig2|fig3|fig4|fig5)");
}

int cmd_demo(std::uint64_t seed, const Vec2& common) {
    RngStream root = RngStream::seeded(seed);
    RngStream scenario_stream = root.split(0);
    RngStream synth_stream = root.split(1);

    const RoadModel model = RoadModel::orthogonal(2, 1, 1, 1);
    const NoiseModel noise = NoiseModel::shared_sigma(0.3);
    const Scenario scenario = make_scenario(model, noise, 2.0, scenario_stream, common);

    const std::size_t n = scenario.size();
    std::vector<Vec2> lane_points;
    std::vector<Vec2> deviations;
    RngStream placement = root.split(2);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 normal = unit_from_angle(scenario.angles[i]);
        const Vec2 tangent{-normal.y, normal.x};
        lane_points.push_back(tangent * (20.0 + 15.0 * static_cast<double>(i)));
        deviations.push_back(normal * placement.normal(0.2));
    }
    const auto obs = synthesize_observations(scenario, lane_points, deviations, synth_stream);

    auto p = [](const Vec2& v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "(%9.4f, %9.4f)", v.x, v.y);
        return std::string(buf);
    };

    std::printf("scene: %zu vehicles, lane half width 2.0 m, shared bias %s\n", n,
                p(common).c_str());
    std::printf("\nper-vehicle decomposition  gnss = lane + deviation + bias + noise\n");
    for (std::size_t i = 0; i < n; ++i) {
        std::printf("  v%zu: %s = %s + %s + %s + %s\n", i, p(obs[i].gnss).c_str(),
                    p(obs[i].lane_point).c_str(), p(obs[i].deviation).c_str(),
                    p(obs[i].common).c_str(), p(obs[i].noncommon).c_str());
    }

    std::printf("\nreduced-frame road constraints (normal . tau <= offset)\n");
    for (const HalfPlane& hp : build_constraints(scenario, true)) {
        std::printf("  %s . tau <= %9.4f\n", p(hp.normal).c_str(), hp.offset);
    }

    const EstimateResult result = exact_error(scenario);
    if (!result.feasible) {
        std::printf("\nfeasible set is empty for this draw; rerun with another --seed\n");
        return kExitOk;
    }
    std::printf("\nfeasible-set area: %.4f m^2\n", result.region_area);
    std::printf("estimated bias:    %s\n", p(result.estimate).c_str());
    std::printf("true bias:         %s\n", p(scenario.common_error).c_str());
    std::printf("residual error:    %s  |e|^2 = %.6f m^2\n", p(result.error).c_str(),
                result.square_error);
    std::printf("\nresidual depends only on the noise draw: rerunning with the bias removed\n");
    Scenario zero_bias = scenario;
    zero_bias.common_error = Vec2{};
    const EstimateResult again = exact_error(zero_bias);
    std::printf("residual error:    %s  (same noise, zero bias)\n", p(again.error).c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cmmlab - cooperative map matching simulation laboratory"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "run an experiment sweep from a config file");
    run->add_option("--config", run_opt.config_path, "experiment config (JSON)")->required();
    run->add_option("--out", run_opt.out_dir, "output directory")->required();
    std::uint64_t seed_val = 0;
    int trials_val = 0;
    int threads_val = 0;
    std::string estimator_val;
    run->add_option("--seed", seed_val, "override master seed");
    run->add_option("--trials", trials_val, "override trials per sweep point");
    run->add_option("--threads", threads_val, "worker threads (0 = hardware)");
    run->add_option("--estimator", estimator_val, "override estimator");

    PredictOptions pred_opt;
    CLI::App* predict = app.add_subcommand("predict", "print asymptotic error predictions");
    predict->add_option("--case", pred_opt.kase,
                        "orthogonal-leading|orthogonal-full|uniform-leading|linearized")
        ->required();
    predict->add_option("--counts", pred_opt.counts, "orthogonal per-direction counts a,b,c,d");
    predict->add_option("--n-list", pred_opt.n_list, "vehicle counts")->delimiter(',');
    predict->add_option("--sigma", pred_opt.sigma, "noise sigma (m)");
    predict->add_option("--w", pred_opt.w, "lane half width (m)");
    predict->add_option("--angles", pred_opt.angles_path, "angle file (radians, whitespace separated)");

    std::vector<std::string> compare_paths;
    CLI::App* compare = app.add_subcommand("compare", "compare simulation against predictions");
    compare->add_option("csv", compare_paths, "one or two results CSVs")
        ->required()
        ->expected(1, 2);

    std::string figure;
    std::vector<std::string> plot_csvs;
    std::string plot_out = ".";
    CLI::App* plot = app.add_subcommand("plot-data", "emit plot-ready data files");
    plot->add_option("--figure", figure, "fig2|fig3|fig4|fig5")->required();
    plot->add_option("--csv", plot_csvs, "results CSV (repeatable)")->required();
    plot->add_option("--out", plot_out, "output directory");

    std::uint64_t demo_seed = 20240614;
    std::string demo_common = "1.2,-0.8";
    CLI::App* demo = app.add_subcommand("demo", "end-to-end walkthrough on a small scene");
    demo->add_option("--seed", demo_seed, "scene seed");
    demo->add_option("--common", demo_common, "true common bias 'x,y'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) {
            if (run->count("--seed")) run_opt.seed = seed_val;
            if (run->count("--trials")) run_opt.trials = trials_val;
            if (run->count("--threads")) run_opt.threads = threads_val;
            if (run->count("--estimator")) run_opt.estimator = estimator_val;
            return cmd_run(run_opt);
        }
        if (predict->parsed()) return cmd_predict(pred_opt);
        if (compare->parsed()) return cmd_compare(compare_paths);
        if (plot->parsed()) return cmd_plot_data(figure, plot_csvs, plot_out);
        if (demo->parsed()) return cmd_demo(demo_seed, parse_vec2(demo_common));
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
