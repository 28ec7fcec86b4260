#include "cmmlab/experiment_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cmm {

namespace {

using json = nlohmann::ordered_json;

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "exact") return EstimatorKind::Exact;
    if (s == "mc-integration") return EstimatorKind::McIntegration;
    if (s == "weighted") return EstimatorKind::Weighted;
    if (s == "closed-form-orthogonal") return EstimatorKind::ClosedFormOrthogonal;
    throw std::invalid_argument("config field 'estimator' has unknown value '" + s + "'");
}

RoadKind road_kind_from_string(const std::string& s) {
    if (s == "orthogonal") return RoadKind::Orthogonal;
    if (s == "uniform") return RoadKind::UniformRandom;
    throw std::invalid_argument("config field 'road_model.kind' has unknown value '" + s + "'");
}

InfeasiblePolicy policy_from_string(const std::string& s) {
    if (s == "exclude") return InfeasiblePolicy::Exclude;
    if (s == "count-as-missing") return InfeasiblePolicy::CountAsMissing;
    throw std::invalid_argument("config field 'infeasible_policy' has unknown value '" + s + "'");
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace

ExperimentConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config parse error at line " +
                                    std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");

    static const std::vector<std::string> known = {
        "name",       "road_model", "sigma",             "half_width",
        "trials",     "mc_integration_samples", "estimator",
        "master_seed", "infeasible_policy",     "threads", "weighted_grid"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::invalid_argument("config field '" + key + "' is not recognized");
        }
    }

    ExperimentConfig cfg;
    try {
        if (doc.contains("name")) cfg.name = doc.at("name").get<std::string>();
        const json& rm = doc.at("road_model");
        cfg.road_kind = road_kind_from_string(rm.at("kind").get<std::string>());
        cfg.sweep = rm.at("sweep").get<std::vector<int>>();
        if (doc.contains("sigma")) cfg.sigma = doc.at("sigma").get<double>();
        if (doc.contains("half_width")) cfg.half_width = doc.at("half_width").get<double>();
        if (doc.contains("trials")) cfg.trials = doc.at("trials").get<int>();
        if (doc.contains("mc_integration_samples")) {
            cfg.mc_integration_samples = doc.at("mc_integration_samples").get<std::int64_t>();
        }
        if (doc.contains("estimator")) {
            cfg.estimator = estimator_from_string(doc.at("estimator").get<std::string>());
        }
        if (doc.contains("master_seed")) cfg.master_seed = doc.at("master_seed").get<std::uint64_t>();
        if (doc.contains("infeasible_policy")) {
            cfg.infeasible_policy = policy_from_string(doc.at("infeasible_policy").get<std::string>());
        }
        if (doc.contains("threads")) cfg.threads = doc.at("threads").get<int>();
        if (doc.contains("weighted_grid")) {
            const json& wg = doc.at("weighted_grid");
            if (wg.contains("extent")) cfg.weighted_extent = wg.at("extent").get<double>();
            if (wg.contains("nodes")) cfg.weighted_nodes = wg.at("nodes").get<int>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config field error: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& config) {
    json doc;
    doc["name"] = config.name;
    doc["road_model"] = {{"kind", to_string(config.road_kind)}, {"sweep", config.sweep}};
    doc["sigma"] = config.sigma;
    doc["half_width"] = config.half_width;
    doc["trials"] = config.trials;
    doc["mc_integration_samples"] = config.mc_integration_samples;
    doc["estimator"] = to_string(config.estimator);
    doc["master_seed"] = config.master_seed;
    doc["infeasible_policy"] = to_string(config.infeasible_policy);
    doc["threads"] = config.threads;
    if (config.weighted_extent > 0.0 || config.weighted_nodes > 0) {
        doc["weighted_grid"] = {{"extent", config.weighted_extent},
                                {"nodes", config.weighted_nodes}};
    }
    return doc.dump(2) + "\n";
}

std::string config_id(const ExperimentConfig& config) {
    // The id names the experiment definition; execution details (name, worker
    // threads) do not change the results and are excluded.
    ExperimentConfig canonical = config;
    canonical.name = "";
    canonical.threads = 0;
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(config_to_json(canonical)));
    return buf;
}

std::string results_to_csv(const ExperimentConfig& config, std::span<const ExperimentRow> rows) {
    std::ostringstream out;
    out << "config_id,road_model,sigma,w,estimator,N,trials_run,trials_feasible,"
           "mean_e2,std_error,asymptote_e2,infeasible_rate\n";
    const std::string id = config_id(config);
    for (const ExperimentRow& r : rows) {
        out << id << ',' << to_string(config.road_kind) << ',' << fmt17(config.sigma) << ','
            << fmt17(config.half_width) << ',' << to_string(config.estimator) << ',' << r.n << ','
            << r.trials_run << ',' << r.trials_feasible << ',' << fmt17(r.mean_e2) << ','
            << fmt17(r.std_error) << ',' << fmt17(r.asymptote_e2) << ','
            << fmt17(r.infeasible_rate) << '\n';
    }
    return out.str();
}

void write_results_csv(const std::string& path, const ExperimentConfig& config,
                       std::span<const ExperimentRow> rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write CSV file: " + path);
    out << results_to_csv(config, rows);
}

std::string manifest_to_json(const ExperimentConfig& config) {
    json doc;
    doc["config_id"] = config_id(config);
    doc["config"] = json::parse(config_to_json(config));
    if (config.road_kind == RoadKind::UniformRandom) {
        // Empirically selected support family for the sorted-angle increment
        // distribution of the uniform sampler (see README).
        doc["increment_density"] = "full-two-pi";
    }
    return doc.dump(2) + "\n";
}

void write_manifest(const std::string& path, const ExperimentConfig& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest file: " + path);
    out << manifest_to_json(config);
}

CsvExperiment read_results_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("CSV file is empty: " + path);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const std::string expected =
        "config_id,road_model,sigma,w,estimator,N,trials_run,trials_feasible,"
        "mean_e2,std_error,asymptote_e2,infeasible_rate";
    if (header != expected) {
        throw std::invalid_argument("CSV header does not match the experiment schema: " + path);
    }

    CsvExperiment exp;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        if (fields.size() != 12) {
            throw std::invalid_argument("CSV row has wrong field count: " + path);
        }
        if (exp.rows.empty()) {
            exp.config_id = fields[0];
            exp.road_model = fields[1];
            exp.sigma = std::stod(fields[2]);
            exp.half_width = std::stod(fields[3]);
            exp.estimator = fields[4];
        }
        ExperimentRow r;
        r.n = std::stoi(fields[5]);
        r.trials_run = std::stoi(fields[6]);
        r.trials_feasible = std::stoi(fields[7]);
        r.mean_e2 = std::stod(fields[8]);
        r.std_error = std::stod(fields[9]);
        r.asymptote_e2 = std::stod(fields[10]);
        r.infeasible_rate = std::stod(fields[11]);
        exp.rows.push_back(r);
    }
    if (exp.rows.empty()) throw std::invalid_argument("CSV file has no data rows: " + path);
    return exp;
}

} // namespace cmm
