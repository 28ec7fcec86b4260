#include "cmmlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmm {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

RoadModel RoadModel::orthogonal(int n1, int n2, int n3, int n4) {
    if (n1 < 1 || n2 < 1 || n3 < 1 || n4 < 1) {
        throw std::invalid_argument("RoadModel: orthogonal model needs at least one vehicle per direction");
    }
    RoadModel m;
    m.kind = RoadKind::Orthogonal;
    m.direction_counts = {n1, n2, n3, n4};
    return m;
}

RoadModel RoadModel::uniform_random(int n) {
    if (n < 3) {
        throw std::invalid_argument("RoadModel: uniform random model needs at least 3 vehicles");
    }
    RoadModel m;
    m.kind = RoadKind::UniformRandom;
    m.total = n;
    return m;
}

int RoadModel::vehicle_count() const {
    if (kind == RoadKind::Orthogonal) {
        return direction_counts[0] + direction_counts[1] + direction_counts[2] + direction_counts[3];
    }
    return total;
}

NoiseModel NoiseModel::shared_sigma(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
    NoiseModel m;
    m.sigmas = {sigma};
    m.shared = true;
    return m;
}

NoiseModel NoiseModel::per_vehicle(std::vector<double> sigmas) {
    if (sigmas.empty()) throw std::invalid_argument("NoiseModel: empty sigma list");
    for (double s : sigmas) {
        if (s < 0.0) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
    }
    NoiseModel m;
    m.sigmas = std::move(sigmas);
    m.shared = false;
    return m;
}

std::vector<double> sample_angles(const RoadModel& model, RngStream& rng) {
    std::vector<double> angles;
    if (model.kind == RoadKind::Orthogonal) {
        angles.reserve(static_cast<std::size_t>(model.vehicle_count()));
        for (int dir = 0; dir < 4; ++dir) {
            const double theta = dir * (std::numbers::pi / 2.0);
            for (int k = 0; k < model.direction_counts[static_cast<std::size_t>(dir)]; ++k) {
                angles.push_back(theta);
            }
        }
    } else {
        angles.reserve(static_cast<std::size_t>(model.total));
        for (int k = 0; k < model.total; ++k) {
            angles.push_back(rng.uniform(0.0, kTwoPi));
        }
    }
    return angles;
}

std::vector<double> sample_projections(std::size_t n, const NoiseModel& noise, RngStream& rng) {
    if (noise.fixed_count() != 0 && noise.fixed_count() != n) {
        throw std::invalid_argument("sample_projections: noise model length mismatch");
    }
    std::vector<double> projections(n);
    for (std::size_t i = 0; i < n; ++i) {
        projections[i] = rng.normal(noise.sigma(i));
    }
    return projections;
}

Scenario make_scenario(const RoadModel& model, const NoiseModel& noise, double half_width,
                       RngStream& rng, Vec2 common_error) {
    if (half_width <= 0.0) throw std::invalid_argument("make_scenario: half width must be > 0");
    Scenario s;
    s.angles = sample_angles(model, rng);
    s.projections = sample_projections(s.angles.size(), noise, rng);
    s.half_width = half_width;
    s.common_error = common_error;
    return s;
}

std::vector<HalfPlane> build_constraints(const Scenario& scenario, bool perturbed) {
    if (scenario.angles.size() != scenario.projections.size()) {
        throw std::invalid_argument("build_constraints: angle/projection length mismatch");
    }
    std::vector<HalfPlane> constraints;
    constraints.reserve(scenario.size());
    for (std::size_t i = 0; i < scenario.size(); ++i) {
        const double offset =
            perturbed ? scenario.half_width - scenario.projections[i] : scenario.half_width;
        constraints.push_back(HalfPlane::from_angle(scenario.angles[i], offset));
    }
    return constraints;
}

std::vector<double> sorted_increments(std::vector<double> angles) {
    if (angles.size() < 2) {
        throw std::invalid_argument("sorted_increments: need at least 2 angles");
    }
    std::sort(angles.begin(), angles.end());
    const std::size_t n = angles.size();
    std::vector<double> increments(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        increments[i] = angles[i + 1] - angles[i];
    }
    increments[n - 1] = angles[0] - angles[n - 1] + kTwoPi;
    return increments;
}

std::vector<VehicleObservation> synthesize_observations(const Scenario& scenario,
                                                        const std::vector<Vec2>& lane_points,
                                                        const std::vector<Vec2>& deviations,
                                                        RngStream& rng) {
    const std::size_t n = scenario.size();
    if (lane_points.size() != n || deviations.size() != n) {
        throw std::invalid_argument("synthesize_observations: length mismatch");
    }
    std::vector<VehicleObservation> obs;
    obs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 normal = unit_from_angle(scenario.angles[i]);
        const Vec2 tangent{-normal.y, normal.x};
        // Composite projection = (deviation + noncommon) . normal; solve for
        // the noncommon normal part, tangential part is unconstrained.
        const double noncommon_normal = scenario.projections[i] - deviations[i].dot(normal);
        const Vec2 noncommon = normal * noncommon_normal + tangent * rng.normal();
        VehicleObservation o;
        o.lane_point = lane_points[i];
        o.deviation = deviations[i];
        o.common = scenario.common_error;
        o.noncommon = noncommon;
        o.gnss = o.lane_point + o.deviation + o.common + o.noncommon;
        obs.push_back(o);
    }
    return obs;
}

} // namespace cmm
