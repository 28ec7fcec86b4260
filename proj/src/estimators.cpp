#include "cmmlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cmm {

namespace {

double standard_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

EstimateResult from_region_centroid(const Scenario& scenario, const ConvexRegion& region) {
    EstimateResult r;
    r.status = region.status;
    if (!region.bounded()) {
        r.feasible = false;
        return r;
    }
    const AreaCentroid ac = area_and_centroid(region);
    r.feasible = true;
    r.error = ac.centroid;
    r.square_error = r.error.norm2();
    r.estimate = scenario.common_error - r.error;
    r.region_area = ac.area;
    r.diagnostic = static_cast<double>(region.vertices.size());
    return r;
}

} // namespace

EstimateResult exact_error(const Scenario& scenario) {
    const std::vector<HalfPlane> constraints = build_constraints(scenario, true);
    return from_region_centroid(scenario, intersect_halfplanes(constraints));
}

DirectionalExtremes directional_extremes(const Scenario& scenario) {
    DirectionalExtremes ex;
    ex.max_projection.fill(-std::numeric_limits<double>::infinity());
    constexpr double kQuarter = std::numbers::pi / 2.0;
    for (std::size_t i = 0; i < scenario.size(); ++i) {
        const double ratio = scenario.angles[i] / kQuarter;
        const long dir = std::lround(ratio);
        if (std::abs(ratio - static_cast<double>(dir)) > 1e-9 || dir < 0 || dir > 3) {
            throw std::invalid_argument("directional_extremes: angle is not a cardinal direction");
        }
        const auto j = static_cast<std::size_t>(dir);
        ex.max_projection[j] = std::max(ex.max_projection[j], scenario.projections[i]);
        ex.counts[j] += 1;
    }
    for (int j = 0; j < 4; ++j) {
        if (ex.counts[static_cast<std::size_t>(j)] == 0) {
            throw std::invalid_argument("directional_extremes: a direction has no vehicles");
        }
    }
    return ex;
}

double closed_form_orthogonal_e2(const DirectionalExtremes& extremes) {
    const auto& x = extremes.max_projection;
    const double dx = (x[2] - x[0]) / 2.0;
    const double dy = (x[3] - x[1]) / 2.0;
    return dx * dx + dy * dy;
}

bool orthogonal_feasible(const DirectionalExtremes& extremes, double half_width) {
    const auto& x = extremes.max_projection;
    const double width_x = 2.0 * half_width - (x[0] + x[2]);
    const double width_y = 2.0 * half_width - (x[1] + x[3]);
    return width_x > 0.0 && width_y > 0.0 && width_x * width_y >= kMinBoundedArea;
}

EstimateResult mc_integration_error(const Scenario& scenario, std::int64_t sample_count,
                                    RngStream& rng) {
    if (sample_count < 1) {
        throw std::invalid_argument("mc_integration_error: sample count must be >= 1");
    }
    const std::vector<HalfPlane> constraints = build_constraints(scenario, true);

    // Proposal box: bounding box of the exact polygon when it exists,
    // otherwise a symmetric box wide enough to cover every constraint line.
    double lo_x;
    double hi_x;
    double lo_y;
    double hi_y;
    const ConvexRegion region = intersect_halfplanes(constraints);
    if (region.status == RegionStatus::Unbounded) {
        // No finite centroid to integrate; report it like the exact method.
        EstimateResult r;
        r.status = region.status;
        r.feasible = false;
        return r;
    }
    if (region.bounded()) {
        lo_x = hi_x = region.vertices.front().x;
        lo_y = hi_y = region.vertices.front().y;
        for (const Vec2& v : region.vertices) {
            lo_x = std::min(lo_x, v.x);
            hi_x = std::max(hi_x, v.x);
            lo_y = std::min(lo_y, v.y);
            hi_y = std::max(hi_y, v.y);
        }
    } else {
        double max_abs_proj = 0.0;
        for (double p : scenario.projections) max_abs_proj = std::max(max_abs_proj, std::abs(p));
        const double b = scenario.half_width + max_abs_proj;
        lo_x = lo_y = -b;
        hi_x = hi_y = b;
    }

    Vec2 sum;
    std::int64_t accepted = 0;
    for (std::int64_t k = 0; k < sample_count; ++k) {
        const Vec2 p{rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
        if (contains(constraints, p)) {
            sum += p;
            ++accepted;
        }
    }

    EstimateResult r;
    r.status = region.status;
    r.diagnostic = static_cast<double>(accepted);
    if (accepted == 0) {
        r.feasible = false;
        return r;
    }
    r.feasible = true;
    r.error = sum / static_cast<double>(accepted);
    r.square_error = r.error.norm2();
    r.estimate = scenario.common_error - r.error;
    const double box_area = (hi_x - lo_x) * (hi_y - lo_y);
    r.region_area = box_area * static_cast<double>(accepted) / static_cast<double>(sample_count);
    return r;
}

HypothesisGrid HypothesisGrid::defaults_for(double half_width, const NoiseModel& noise) {
    double max_sigma = 0.0;
    for (double s : noise.sigmas) max_sigma = std::max(max_sigma, s);
    return {3.0 * std::max(half_width, 3.0 * max_sigma), 201};
}

EstimateResult weighted_error(const Scenario& scenario, const NoiseModel& noise,
                              const HypothesisGrid& grid) {
    if (grid.extent <= 0.0 || grid.nodes_per_axis < 2) {
        throw std::invalid_argument("weighted_error: grid needs extent > 0 and >= 2 nodes per axis");
    }
    const std::size_t n = scenario.size();
    if (noise.fixed_count() != 0 && noise.fixed_count() != n) {
        throw std::invalid_argument("weighted_error: noise model length mismatch");
    }

    std::vector<Vec2> normals(n);
    for (std::size_t i = 0; i < n; ++i) normals[i] = unit_from_angle(scenario.angles[i]);

    const int m = grid.nodes_per_axis;
    const double step = 2.0 * grid.extent / (m - 1);
    const double w = scenario.half_width;

    // Log-space weights; the shift keeps the normalized sums representable
    // even when every hypothesis is deep in a Gaussian tail.
    std::vector<double> log_weights(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    double max_log = -std::numeric_limits<double>::infinity();
    std::size_t idx = 0;
    for (int iy = 0; iy < m; ++iy) {
        const double ty = -grid.extent + iy * step;
        for (int ix = 0; ix < m; ++ix, ++idx) {
            const double tx = -grid.extent + ix * step;
            double lw = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double margin = w - scenario.projections[i] - (tx * normals[i].x + ty * normals[i].y);
                const double sigma = noise.sigma(i);
                if (sigma == 0.0) {
                    if (margin < 0.0) {
                        lw = -std::numeric_limits<double>::infinity();
                        break;
                    }
                    continue;
                }
                const double phi = standard_normal_cdf(margin / sigma);
                if (phi <= 0.0) {
                    lw = -std::numeric_limits<double>::infinity();
                    break;
                }
                lw += std::log(phi);
            }
            log_weights[idx] = lw;
            max_log = std::max(max_log, lw);
        }
    }

    double sum_w = 0.0;
    double sum_w2 = 0.0;
    Vec2 sum_tw;
    if (std::isfinite(max_log)) {
        idx = 0;
        for (int iy = 0; iy < m; ++iy) {
            const double ty = -grid.extent + iy * step;
            for (int ix = 0; ix < m; ++ix, ++idx) {
                const double lw = log_weights[idx];
                if (!std::isfinite(lw)) continue;
                const double wt = std::exp(lw - max_log);
                const double tx = -grid.extent + ix * step;
                sum_w += wt;
                sum_w2 += wt * wt;
                sum_tw += Vec2{tx, ty} * wt;
            }
        }
    }

    // Total weight in linear space is exp(max_log) * sum_w.
    constexpr double kLogFloor = -690.77552789821368;  // log(1e-300)
    if (!std::isfinite(max_log) || max_log + std::log(sum_w) < kLogFloor) {
        throw std::runtime_error("weighted_error: degenerate weights (widen the grid or loosen sigma)");
    }

    EstimateResult r;
    r.feasible = true;
    r.status = RegionStatus::Bounded;
    r.error = sum_tw / sum_w;
    r.square_error = r.error.norm2();
    r.estimate = scenario.common_error - r.error;
    r.region_area = sum_w * std::exp(max_log) * step * step;
    r.diagnostic = sum_w * sum_w / sum_w2;  // effective sample size
    return r;
}

} // namespace cmm
