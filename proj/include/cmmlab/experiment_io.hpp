#pragma once

#include "cmmlab/experiments.hpp"

#include <span>
#include <string>
#include <vector>

namespace cmm {

// Parses a JSON experiment config. Parse failures throw std::invalid_argument
// with the offending line number; validation failures name the field.
ExperimentConfig config_from_json(const std::string& text);

ExperimentConfig load_config(const std::string& path);

// Canonical JSON form, also the input of config_id().
std::string config_to_json(const ExperimentConfig& config);

// Stable 16-hex-digit identifier derived from the canonical config.
std::string config_id(const ExperimentConfig& config);

// CSV schema:
// config_id,road_model,sigma,w,estimator,N,trials_run,trials_feasible,
// mean_e2,std_error,asymptote_e2,infeasible_rate
// Floats carry 17 significant digits; absent means are written as nan.
std::string results_to_csv(const ExperimentConfig& config, std::span<const ExperimentRow> rows);

void write_results_csv(const std::string& path, const ExperimentConfig& config,
                       std::span<const ExperimentRow> rows);

// Replay manifest: the full config plus derived metadata.
std::string manifest_to_json(const ExperimentConfig& config);

void write_manifest(const std::string& path, const ExperimentConfig& config);

// Read-back of a results CSV (for plot-data and compare).
struct CsvExperiment {
    std::string config_id;
    std::string road_model;
    double sigma = 0.0;
    double half_width = 0.0;
    std::string estimator;
    std::vector<ExperimentRow> rows;
};

CsvExperiment read_results_csv(const std::string& path);

} // namespace cmm
