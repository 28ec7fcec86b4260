#pragma once

#include "cmmlab/vec2.hpp"

#include <span>
#include <vector>

namespace cmm {

// Tolerances used by the clipping pipeline. All lengths in meters.
inline constexpr double kUnitNormalTol = 1e-12;   // |norm(n) - 1| accepted
inline constexpr double kVertexMergeTol = 1e-9;   // duplicate/collinear vertex merge
inline constexpr double kMinBoundedArea = 1e-12;  // below this a region counts as empty
inline constexpr double kClipBoxFactor = 1e6;     // bounding box side per unit offset

// One linearized road-edge constraint. Feasible side: normal . p <= offset.
struct HalfPlane {
    Vec2 normal;    // unit length
    double offset;  // meters

    static HalfPlane from_angle(double theta, double offset) {
        return {unit_from_angle(theta), offset};
    }

    double signed_distance(const Vec2& p) const { return normal.dot(p) - offset; }
};

enum class RegionStatus { Bounded, Unbounded, Empty };

// Intersection polygon of a constraint set. Vertices are counter-clockwise and
// only present when the region is bounded.
struct ConvexRegion {
    std::vector<Vec2> vertices;
    RegionStatus status = RegionStatus::Empty;

    bool bounded() const { return status == RegionStatus::Bounded; }
};

struct AreaCentroid {
    double area = 0.0;
    Vec2 centroid;
};

// Clips a large origin-centered box against every half-plane. Throws
// std::invalid_argument on an empty constraint list, a non-unit normal or a
// non-finite offset.
ConvexRegion intersect_halfplanes(std::span<const HalfPlane> constraints);

// Shoelace area and first-moment centroid of a bounded region. Throws
// std::domain_error when the region is empty or unbounded.
AreaCentroid area_and_centroid(const ConvexRegion& region);

// Non-strict membership test: true iff normal . point <= offset for every
// constraint (boundary points count as inside).
bool contains(std::span<const HalfPlane> constraints, const Vec2& point);

} // namespace cmm
