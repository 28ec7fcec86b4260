#pragma once

#include "cmmlab/geometry.hpp"
#include "cmmlab/rng.hpp"
#include "cmmlab/vec2.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace cmm {

enum class RoadKind { Orthogonal, UniformRandom };

// Road direction model. Orthogonal places vehicles on the four cardinal
// directions with per-direction counts; UniformRandom draws each direction
// angle uniformly from [0, 2*pi).
struct RoadModel {
    RoadKind kind = RoadKind::UniformRandom;
    std::array<int, 4> direction_counts{};  // Orthogonal only
    int total = 0;                          // UniformRandom only

    static RoadModel orthogonal(int n1, int n2, int n3, int n4);
    static RoadModel orthogonal_equal(int n_per_direction) {
        return orthogonal(n_per_direction, n_per_direction, n_per_direction, n_per_direction);
    }
    static RoadModel uniform_random(int n);

    int vehicle_count() const;
};

// Standard deviations of the composite (deviation + receiver) error
// projections, either one shared value or one per vehicle.
struct NoiseModel {
    std::vector<double> sigmas;
    bool shared = true;

    static NoiseModel shared_sigma(double sigma);
    static NoiseModel per_vehicle(std::vector<double> sigmas);

    double sigma(std::size_t vehicle) const {
        return shared ? sigmas.front() : sigmas[vehicle];
    }
    // Number of vehicles this model pins down, or 0 when shared (broadcast).
    std::size_t fixed_count() const { return shared ? 0 : sigmas.size(); }
};

// One sampled world in the reduced frame: direction angles, the scalar
// projections of the composite error onto each road normal, the lane half
// width and the true common error (only the demo path uses the latter).
struct Scenario {
    std::vector<double> angles;       // radians in [0, 2*pi)
    std::vector<double> projections;  // meters
    double half_width = 0.0;          // meters
    Vec2 common_error;                // meters

    std::size_t size() const { return angles.size(); }
};

// Full-frame decomposition of one GNSS fix: gnss = lane + deviation + common
// + noncommon, exactly.
struct VehicleObservation {
    Vec2 lane_point;
    Vec2 deviation;
    Vec2 common;
    Vec2 noncommon;
    Vec2 gnss;
};

std::vector<double> sample_angles(const RoadModel& model, RngStream& rng);

std::vector<double> sample_projections(std::size_t n, const NoiseModel& noise, RngStream& rng);

// Convenience: sample angles then projections from one stream.
Scenario make_scenario(const RoadModel& model, const NoiseModel& noise, double half_width,
                       RngStream& rng, Vec2 common_error = {});

// Constraint i has normal (cos theta_i, sin theta_i); offset is
// half_width - projection_i when perturbed, else half_width. The centroid of
// the perturbed intersection is the estimation error; the unperturbed
// intersection is the noise-free feasible set.
std::vector<HalfPlane> build_constraints(const Scenario& scenario, bool perturbed);

// Sorts the angles and returns consecutive gaps with a 2*pi wrap-around term;
// the gaps always sum to 2*pi. Throws std::invalid_argument for < 2 angles.
std::vector<double> sorted_increments(std::vector<double> angles);

// Builds full-frame observations consistent with the scenario: the normal
// component of each noncommon error is fixed by the scenario's projection and
// the given deviation; the free tangential component is drawn standard normal.
std::vector<VehicleObservation> synthesize_observations(const Scenario& scenario,
                                                        const std::vector<Vec2>& lane_points,
                                                        const std::vector<Vec2>& deviations,
                                                        RngStream& rng);

} // namespace cmm
