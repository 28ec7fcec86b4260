#include "cmmlab/asymptotics.hpp"
#include "cmmlab/estimators.hpp"
#include "cmmlab/experiment_io.hpp"
#include "cmmlab/experiments.hpp"
#include "cmmlab/geometry.hpp"
#include "cmmlab/rng.hpp"
#include "cmmlab/scenario.hpp"
#include "cmmlab/vec2.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cstdio>
#include <vector>

namespace py = pybind11;
using namespace cmm;

PYBIND11_MODULE(_cmmlab, m) {
    m.doc() = "Cooperative map matching simulation laboratory";

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("dot", &Vec2::dot)
        .def("norm", &Vec2::norm)
        .def("norm2", &Vec2::norm2)
        .def("__repr__", [](const Vec2& v) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "Vec2(%.17g, %.17g)", v.x, v.y);
            return std::string(buf);
        });

    py::class_<HalfPlane>(m, "HalfPlane")
        .def(py::init([](const Vec2& normal, double offset) {
                 return HalfPlane{normal, offset};
             }),
             py::arg("normal"), py::arg("offset"))
        .def_static("from_angle", &HalfPlane::from_angle, py::arg("theta"), py::arg("offset"))
        .def_readwrite("normal", &HalfPlane::normal)
        .def_readwrite("offset", &HalfPlane::offset)
        .def("signed_distance", &HalfPlane::signed_distance);

    py::enum_<RegionStatus>(m, "RegionStatus")
        .value("Bounded", RegionStatus::Bounded)
        .value("Unbounded", RegionStatus::Unbounded)
        .value("Empty", RegionStatus::Empty);

    py::class_<ConvexRegion>(m, "ConvexRegion")
        .def_readonly("vertices", &ConvexRegion::vertices)
        .def_readonly("status", &ConvexRegion::status)
        .def("bounded", &ConvexRegion::bounded);

    m.def("intersect_halfplanes",
          [](const std::vector<HalfPlane>& hps) { return intersect_halfplanes(hps); },
          py::arg("constraints"));
    m.def("area_and_centroid",
          [](const ConvexRegion& r) {
              const AreaCentroid ac = area_and_centroid(r);
              return py::make_tuple(ac.area, ac.centroid);
          },
          py::arg("region"));
    m.def("contains",
          [](const std::vector<HalfPlane>& hps, const Vec2& p) { return contains(hps, p); },
          py::arg("constraints"), py::arg("point"));

    py::class_<RngStream>(m, "RngStream")
        .def_static("seeded", &RngStream::seeded, py::arg("seed"))
        .def("split", &RngStream::split, py::arg("key"))
        .def("uniform01", &RngStream::uniform01)
        .def("uniform", py::overload_cast<double, double>(&RngStream::uniform))
        .def("normal", py::overload_cast<>(&RngStream::normal))
        .def("normal", py::overload_cast<double>(&RngStream::normal));

    py::enum_<RoadKind>(m, "RoadKind")
        .value("Orthogonal", RoadKind::Orthogonal)
        .value("UniformRandom", RoadKind::UniformRandom);

    py::class_<RoadModel>(m, "RoadModel")
        .def_static("orthogonal", &RoadModel::orthogonal)
        .def_static("orthogonal_equal", &RoadModel::orthogonal_equal)
        .def_static("uniform_random", &RoadModel::uniform_random)
        .def_readonly("kind", &RoadModel::kind)
        .def_readonly("direction_counts", &RoadModel::direction_counts)
        .def("vehicle_count", &RoadModel::vehicle_count);

    py::class_<NoiseModel>(m, "NoiseModel")
        .def_static("shared_sigma", &NoiseModel::shared_sigma, py::arg("sigma"))
        .def_static("per_vehicle", &NoiseModel::per_vehicle, py::arg("sigmas"))
        .def("sigma", &NoiseModel::sigma, py::arg("vehicle"));

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("angles", &Scenario::angles)
        .def_readwrite("projections", &Scenario::projections)
        .def_readwrite("half_width", &Scenario::half_width)
        .def_readwrite("common_error", &Scenario::common_error)
        .def("size", &Scenario::size);

    m.def("sample_angles", &sample_angles, py::arg("model"), py::arg("rng"));
    m.def("sample_projections", &sample_projections, py::arg("n"), py::arg("noise"),
          py::arg("rng"));
    m.def("make_scenario", &make_scenario, py::arg("model"), py::arg("noise"),
          py::arg("half_width"), py::arg("rng"), py::arg("common_error") = Vec2{});
    m.def("build_constraints", &build_constraints, py::arg("scenario"), py::arg("perturbed"));
    m.def("sorted_increments", &sorted_increments, py::arg("angles"));

    py::class_<EstimateResult>(m, "EstimateResult")
        .def_readonly("estimate", &EstimateResult::estimate)
        .def_readonly("error", &EstimateResult::error)
        .def_readonly("square_error", &EstimateResult::square_error)
        .def_readonly("feasible", &EstimateResult::feasible)
        .def_readonly("status", &EstimateResult::status)
        .def_readonly("region_area", &EstimateResult::region_area)
        .def_readonly("diagnostic", &EstimateResult::diagnostic);

    py::class_<DirectionalExtremes>(m, "DirectionalExtremes")
        .def_readonly("max_projection", &DirectionalExtremes::max_projection)
        .def_readonly("counts", &DirectionalExtremes::counts);

    py::class_<HypothesisGrid>(m, "HypothesisGrid")
        .def(py::init([](double extent, int nodes) {
                 return HypothesisGrid{extent, nodes};
             }),
             py::arg("extent"), py::arg("nodes_per_axis"))
        .def_static("defaults_for", &HypothesisGrid::defaults_for)
        .def_readwrite("extent", &HypothesisGrid::extent)
        .def_readwrite("nodes_per_axis", &HypothesisGrid::nodes_per_axis);

    m.def("exact_error", &exact_error, py::arg("scenario"));
    m.def("directional_extremes", &directional_extremes, py::arg("scenario"));
    m.def("closed_form_orthogonal_e2", &closed_form_orthogonal_e2, py::arg("extremes"));
    m.def("mc_integration_error", &mc_integration_error, py::arg("scenario"),
          py::arg("sample_count"), py::arg("rng"));
    m.def("weighted_error", &weighted_error, py::arg("scenario"), py::arg("noise"),
          py::arg("grid"));

    py::class_<GumbelParams>(m, "GumbelParams")
        .def_readonly("mu", &GumbelParams::mu)
        .def_readonly("beta", &GumbelParams::beta)
        .def("__repr__", [](const GumbelParams& g) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "GumbelParams(mu=%.9g, beta=%.9g)", g.mu, g.beta);
            return std::string(buf);
        });

    py::enum_<IncrementSupport>(m, "IncrementSupport")
        .value("PiSupport", IncrementSupport::PiSupport)
        .value("FullTwoPi", IncrementSupport::FullTwoPi);

    py::class_<LinearizedModel>(m, "LinearizedModel")
        .def_readonly("e0", &LinearizedModel::e0)
        .def_readonly("S0", &LinearizedModel::S0)
        .def_readonly("columns", &LinearizedModel::columns)
        .def_readonly("sigmas", &LinearizedModel::sigmas);

    m.attr("EULER_MASCHERONI") = kEulerMascheroni;
    m.def("gumbel_params", &gumbel_params, py::arg("n"), py::arg("sigma"));
    m.def("expected_e2_orthogonal", &expected_e2_orthogonal, py::arg("params"));
    m.def("expected_e2_orthogonal_leading", &expected_e2_orthogonal_leading, py::arg("counts"),
          py::arg("sigma"));
    m.def("build_linearized_model", &build_linearized_model, py::arg("angles"),
          py::arg("half_width"), py::arg("noise"));
    m.def("linearized_expected_e2", &linearized_expected_e2, py::arg("model"));
    m.def("expected_e2_uniform_leading", &expected_e2_uniform_leading, py::arg("n"),
          py::arg("half_width"), py::arg("noise"));
    m.def("e0_squared_geometric", &e0_squared_geometric, py::arg("angles"), py::arg("half_width"));
    m.def("increment_density", &increment_density, py::arg("theta"), py::arg("n"),
          py::arg("support"));
    m.def("increment_cdf", &increment_cdf, py::arg("theta"), py::arg("n"), py::arg("support"));
    m.def("expected_tan2_half_increment", &expected_tan2_half_increment, py::arg("n"));

    py::enum_<EstimatorKind>(m, "EstimatorKind")
        .value("Exact", EstimatorKind::Exact)
        .value("McIntegration", EstimatorKind::McIntegration)
        .value("Weighted", EstimatorKind::Weighted)
        .value("ClosedFormOrthogonal", EstimatorKind::ClosedFormOrthogonal);

    py::enum_<InfeasiblePolicy>(m, "InfeasiblePolicy")
        .value("Exclude", InfeasiblePolicy::Exclude)
        .value("CountAsMissing", InfeasiblePolicy::CountAsMissing);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("name", &ExperimentConfig::name)
        .def_readwrite("road_kind", &ExperimentConfig::road_kind)
        .def_readwrite("sweep", &ExperimentConfig::sweep)
        .def_readwrite("sigma", &ExperimentConfig::sigma)
        .def_readwrite("half_width", &ExperimentConfig::half_width)
        .def_readwrite("trials", &ExperimentConfig::trials)
        .def_readwrite("mc_integration_samples", &ExperimentConfig::mc_integration_samples)
        .def_readwrite("estimator", &ExperimentConfig::estimator)
        .def_readwrite("master_seed", &ExperimentConfig::master_seed)
        .def_readwrite("infeasible_policy", &ExperimentConfig::infeasible_policy)
        .def_readwrite("threads", &ExperimentConfig::threads)
        .def_readwrite("weighted_extent", &ExperimentConfig::weighted_extent)
        .def_readwrite("weighted_nodes", &ExperimentConfig::weighted_nodes)
        .def("validate", &ExperimentConfig::validate);

    py::class_<ExperimentRow>(m, "ExperimentRow")
        .def_readonly("n", &ExperimentRow::n)
        .def_readonly("trials_run", &ExperimentRow::trials_run)
        .def_readonly("trials_feasible", &ExperimentRow::trials_feasible)
        .def_readonly("mean_e2", &ExperimentRow::mean_e2)
        .def_readonly("std_error", &ExperimentRow::std_error)
        .def_readonly("asymptote_e2", &ExperimentRow::asymptote_e2)
        .def_readonly("infeasible_rate", &ExperimentRow::infeasible_rate);

    m.def("run_trial", &run_trial, py::arg("config"), py::arg("sweep_value"),
          py::arg("trial_index"));
    m.def("run_experiment", &run_experiment, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("compare_slopes",
          [](const std::vector<ExperimentRow>& a, const std::vector<ExperimentRow>& b) {
              return compare_slopes(a, b);
          },
          py::arg("rows_a"), py::arg("rows_b"));
    m.def("mean_and_stderr",
          [](const std::vector<double>& v) { return mean_and_stderr(v); },
          py::arg("values"));

    m.def("config_from_json", &config_from_json, py::arg("text"));
    m.def("config_to_json", &config_to_json, py::arg("config"));
    m.def("config_id", &config_id, py::arg("config"));
    m.def("results_to_csv",
          [](const ExperimentConfig& cfg, const std::vector<ExperimentRow>& rows) {
              return results_to_csv(cfg, rows);
          },
          py::arg("config"), py::arg("rows"));
    m.def("manifest_to_json", &manifest_to_json, py::arg("config"));

#ifdef CMMLAB_VERSION
    m.attr("__version__") = CMMLAB_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
