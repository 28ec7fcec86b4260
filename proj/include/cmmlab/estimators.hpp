#pragma once

#include "cmmlab/geometry.hpp"
#include "cmmlab/rng.hpp"
#include "cmmlab/scenario.hpp"
#include "cmmlab/vec2.hpp"

#include <array>
#include <cstdint>

namespace cmm {

// Output of a common-error estimator. `error` is the residual after applying
// the estimate; `diagnostic` is method dependent (polygon vertex count for the
// exact method, accepted-sample count for Monte Carlo integration, effective
// sample size for the weighted method).
struct EstimateResult {
    Vec2 estimate;            // estimated common error
    Vec2 error;               // residual = true common error - estimate
    double square_error = 0.0;
    bool feasible = false;
    RegionStatus status = RegionStatus::Empty;
    double region_area = 0.0;
    double diagnostic = 0.0;
};

// Per-direction maxima of the error projections for the orthogonal road
// model. Direction j covers angle j*pi/2.
struct DirectionalExtremes {
    std::array<double, 4> max_projection{};
    std::array<int, 4> counts{};
};

// Centroid of the perturbed feasible polygon. Empty and unbounded regions are
// reported through `status` with feasible = false.
EstimateResult exact_error(const Scenario& scenario);

// Groups an orthogonal scenario's projections by direction and takes maxima.
// Throws std::invalid_argument if any angle is not one of the four cardinal
// directions.
DirectionalExtremes directional_extremes(const Scenario& scenario);

// ((X3 - X1)^2 + (X4 - X2)^2) / 4, the orthogonal-case square error.
double closed_form_orthogonal_e2(const DirectionalExtremes& extremes);

// Matches the exact method's emptiness classification for the orthogonal box.
bool orthogonal_feasible(const DirectionalExtremes& extremes, double half_width);

// Monte Carlo integration of the feasible-set centroid: uniform proposal over
// the polygon's bounding box (fallback: a symmetric box covering every
// constraint) with acceptance by constraint membership.
EstimateResult mc_integration_error(const Scenario& scenario, std::int64_t sample_count,
                                    RngStream& rng);

// Regular hypothesis grid over [-extent, extent]^2.
struct HypothesisGrid {
    double extent = 0.0;   // meters
    int nodes_per_axis = 0;

    static HypothesisGrid defaults_for(double half_width, const NoiseModel& noise);
};

// Soft-constraint estimator for large noise: every grid hypothesis is
// weighted by the product over vehicles of the probability that the corrected
// position is on-road, i.e. Phi((half_width - projection - tau.normal) / sigma).
// Throws std::runtime_error when the total weight underflows (below 1e-300).
EstimateResult weighted_error(const Scenario& scenario, const NoiseModel& noise,
                              const HypothesisGrid& grid);

} // namespace cmm
