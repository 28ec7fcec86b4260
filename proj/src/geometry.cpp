#include "cmmlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmm {

namespace {

// Polygon with per-edge provenance: edge i (from vertices[i] to the next
// vertex) lies on lines[i]. New vertices are computed by solving the two
// defining lines, not by interpolating along the (possibly box-sized) edge,
// which keeps them accurate at their own scale.
struct ClipPolygon {
    std::vector<Vec2> vertices;
    std::vector<HalfPlane> lines;  // n . p = offset for the outgoing edge
};

Vec2 line_intersection(const HalfPlane& a, const HalfPlane& b, const Vec2& fallback_p,
                       const Vec2& fallback_q, double dp, double dq) {
    const double det = a.normal.x * b.normal.y - a.normal.y * b.normal.x;
    if (std::abs(det) < 1e-14) {
        // Nearly parallel defining lines; fall back to segment interpolation.
        const double t = dp / (dp - dq);
        return fallback_p + (fallback_q - fallback_p) * t;
    }
    return {(a.offset * b.normal.y - b.offset * a.normal.y) / det,
            (b.offset * a.normal.x - a.offset * b.normal.x) / det};
}

// Clip against one half-plane (Sutherland-Hodgman with edge provenance).
void clip_polygon(ClipPolygon& poly, const HalfPlane& hp) {
    const std::size_t n = poly.vertices.size();
    if (n == 0) return;
    ClipPolygon out;
    out.vertices.reserve(n + 2);
    out.lines.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly.vertices[i];
        const Vec2& q = poly.vertices[(i + 1) % n];
        const HalfPlane& edge = poly.lines[i];
        const double dp = hp.signed_distance(p);
        const double dq = hp.signed_distance(q);
        if (dp <= 0.0) {
            out.vertices.push_back(p);
            out.lines.push_back(edge);
            if (dq > 0.0) {
                // Leaving the feasible side: the chord along hp starts here.
                out.vertices.push_back(line_intersection(edge, hp, p, q, dp, dq));
                out.lines.push_back(hp);
            }
        } else if (dq <= 0.0) {
            // Re-entering: continue along the old edge line.
            out.vertices.push_back(line_intersection(edge, hp, p, q, dp, dq));
            out.lines.push_back(edge);
        }
    }
    poly = std::move(out);
}

// Merge near-duplicate successive vertices, then drop vertices that are
// collinear with their neighbours (perpendicular distance under the merge
// tolerance).
std::vector<Vec2> clean_polygon(std::vector<Vec2> poly) {
    auto near = [](const Vec2& a, const Vec2& b) {
        return (a - b).norm2() < kVertexMergeTol * kVertexMergeTol;
    };
    std::vector<Vec2> dedup;
    dedup.reserve(poly.size());
    for (const Vec2& v : poly) {
        if (dedup.empty() || !near(dedup.back(), v)) dedup.push_back(v);
    }
    while (dedup.size() >= 2 && near(dedup.front(), dedup.back())) dedup.pop_back();
    if (dedup.size() < 3) return dedup;

    std::vector<Vec2> out;
    out.reserve(dedup.size());
    const std::size_t n = dedup.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = dedup[(i + n - 1) % n];
        const Vec2& b = dedup[i];
        const Vec2& c = dedup[(i + 1) % n];
        const Vec2 ac = c - a;
        const double len = ac.norm();
        if (len < kVertexMergeTol) continue;
        const double dist = std::abs(ac.cross(b - a)) / len;
        if (dist >= kVertexMergeTol) out.push_back(b);
    }
    return out;
}

double shoelace_area(const std::vector<Vec2>& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        twice += poly[i].cross(poly[(i + 1) % n]);
    }
    return 0.5 * twice;
}

} // namespace

ConvexRegion intersect_halfplanes(std::span<const HalfPlane> constraints) {
    if (constraints.empty()) {
        throw std::invalid_argument("intersect_halfplanes: empty constraint list");
    }
    double max_offset = 1.0;
    for (const HalfPlane& hp : constraints) {
        if (!hp.normal.is_finite() || !std::isfinite(hp.offset)) {
            throw std::invalid_argument("intersect_halfplanes: non-finite constraint");
        }
        if (std::abs(hp.normal.norm() - 1.0) > kUnitNormalTol) {
            throw std::invalid_argument("intersect_halfplanes: normal is not unit length");
        }
        max_offset = std::max(max_offset, std::abs(hp.offset));
    }

    const double half = 0.5 * kClipBoxFactor * max_offset;
    ClipPolygon poly;
    poly.vertices = {{-half, -half}, {half, -half}, {half, half}, {-half, half}};
    poly.lines = {{{0.0, -1.0}, half}, {{1.0, 0.0}, half}, {{0.0, 1.0}, half}, {{-1.0, 0.0}, half}};
    for (const HalfPlane& hp : constraints) {
        clip_polygon(poly, hp);
        if (poly.vertices.empty()) break;
    }

    ConvexRegion region;
    if (poly.vertices.empty()) {
        region.status = RegionStatus::Empty;
        return region;
    }

    const double box_edge = half * (1.0 - 1e-9);
    for (const Vec2& v : poly.vertices) {
        if (std::max(std::abs(v.x), std::abs(v.y)) >= box_edge) {
            region.status = RegionStatus::Unbounded;
            return region;
        }
    }

    std::vector<Vec2> cleaned = clean_polygon(std::move(poly.vertices));
    if (cleaned.size() < 3 || shoelace_area(cleaned) < kMinBoundedArea) {
        region.status = RegionStatus::Empty;
        return region;
    }

    region.vertices = std::move(cleaned);
    region.status = RegionStatus::Bounded;
    return region;
}

AreaCentroid area_and_centroid(const ConvexRegion& region) {
    if (!region.bounded()) {
        throw std::domain_error("area_and_centroid: region is not bounded");
    }
    const std::vector<Vec2>& v = region.vertices;
    const std::size_t n = v.size();
    double twice = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        const double cr = a.cross(b);
        twice += cr;
        cx += (a.x + b.x) * cr;
        cy += (a.y + b.y) * cr;
    }
    const double area = 0.5 * twice;
    return {area, Vec2{cx / (6.0 * area), cy / (6.0 * area)}};
}

bool contains(std::span<const HalfPlane> constraints, const Vec2& point) {
    for (const HalfPlane& hp : constraints) {
        if (hp.signed_distance(point) > 0.0) return false;
    }
    return true;
}

} // namespace cmm
