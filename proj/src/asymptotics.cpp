#include "cmmlab/asymptotics.hpp"

#include "cmmlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmm {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

GumbelParams gumbel_params(int n, double sigma) {
    if (n < 2) throw std::domain_error("gumbel_params: n must be >= 2");
    if (sigma <= 0.0) throw std::domain_error("gumbel_params: sigma must be > 0");
    const double root = std::sqrt(2.0 * std::log(static_cast<double>(n)));
    return {sigma * root, sigma / root};
}

double expected_e2_orthogonal(const std::array<GumbelParams, 4>& p) {
    double beta2_sum = 0.0;
    for (const GumbelParams& g : p) beta2_sum += g.beta * g.beta;
    const double dx = p[0].mu - p[2].mu + kEulerMascheroni * (p[0].beta - p[2].beta);
    const double dy = p[1].mu - p[3].mu + kEulerMascheroni * (p[1].beta - p[3].beta);
    return (kPi * kPi / 24.0) * beta2_sum + 0.25 * dx * dx + 0.25 * dy * dy;
}

double expected_e2_orthogonal_leading(const std::array<int, 4>& counts, double sigma) {
    double inv_log_sum = 0.0;
    for (int n : counts) {
        if (n < 2) throw std::domain_error("expected_e2_orthogonal_leading: counts must be >= 2");
        inv_log_sum += 1.0 / std::log(static_cast<double>(n));
    }
    return (kPi * kPi * sigma * sigma / 48.0) * inv_log_sum;
}

LinearizedModel build_linearized_model(const std::vector<double>& angles, double half_width,
                                       const NoiseModel& noise) {
    const std::size_t n = angles.size();
    if (noise.fixed_count() != 0 && noise.fixed_count() != n) {
        throw std::invalid_argument("build_linearized_model: noise model length mismatch");
    }

    Scenario base;
    base.angles = angles;
    base.projections.assign(n, 0.0);
    base.half_width = half_width;

    const ConvexRegion region0 = intersect_halfplanes(build_constraints(base, true));
    if (!region0.bounded()) {
        throw std::domain_error("build_linearized_model: noise-free feasible set is not bounded");
    }
    const AreaCentroid ac0 = area_and_centroid(region0);

    LinearizedModel model;
    model.e0 = ac0.centroid;
    model.S0 = ac0.area;
    model.columns.resize(n);
    model.sigmas.resize(n);
    for (std::size_t i = 0; i < n; ++i) model.sigmas[i] = noise.sigma(i);

    const double h = 1e-6 * half_width;
    Scenario probe = base;
    for (std::size_t i = 0; i < n; ++i) {
        probe.projections[i] = h;
        const Vec2 plus =
            area_and_centroid(intersect_halfplanes(build_constraints(probe, true))).centroid;
        probe.projections[i] = -h;
        const Vec2 minus =
            area_and_centroid(intersect_halfplanes(build_constraints(probe, true))).centroid;
        probe.projections[i] = 0.0;
        model.columns[i] = (plus - minus) * (model.S0 / (2.0 * h));
    }
    return model;
}

double linearized_expected_e2(const LinearizedModel& model) {
    double trace = 0.0;
    for (std::size_t i = 0; i < model.columns.size(); ++i) {
        trace += model.sigmas[i] * model.sigmas[i] * model.columns[i].norm2();
    }
    return model.e0.norm2() + trace / (model.S0 * model.S0);
}

double expected_e2_uniform_leading(int n, double half_width, const NoiseModel& noise) {
    if (n < 3) throw std::domain_error("expected_e2_uniform_leading: n must be >= 3");
    if (noise.fixed_count() != 0 && noise.fixed_count() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("expected_e2_uniform_leading: noise model length mismatch");
    }
    double sigma2_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = noise.sigma(static_cast<std::size_t>(i));
        sigma2_sum += s * s;
    }
    const double nd = static_cast<double>(n);
    return 2.0 * half_width * half_width / (9.0 * nd) + 3.0 * sigma2_sum / (2.0 * nd * nd);
}

double e0_squared_geometric(const std::vector<double>& angles, double half_width) {
    if (angles.size() < 3) {
        throw std::domain_error("e0_squared_geometric: need at least 3 angles");
    }
    std::vector<double> sorted = angles;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    // Tangential polygon circumscribing the circle of radius half_width:
    // area S0 = w^2 sum tan(g_i/2); first moment
    // M = (w^3/3) sum tan^2(g_i/2) sin(g_i/2) m_i with m_i the unit bisector
    // between consecutive edge normals.
    double tan_sum = 0.0;
    Vec2 moment;
    for (std::size_t i = 0; i < n; ++i) {
        const double next = (i + 1 < n) ? sorted[i + 1] : sorted[0] + kTwoPi;
        const double gap = next - sorted[i];
        if (gap >= kPi) {
            throw std::domain_error("e0_squared_geometric: angle gap >= pi, polygon unbounded");
        }
        const double t = std::tan(0.5 * gap);
        tan_sum += t;
        moment += t * t * std::sin(0.5 * gap) * unit_from_angle(sorted[i] + 0.5 * gap);
    }
    const double w = half_width;
    const double s0 = w * w * tan_sum;
    moment = moment * (w * w * w / 3.0);
    return moment.norm2() / (s0 * s0);
}

double increment_density(double theta, int n, IncrementSupport support) {
    if (n < 1) throw std::domain_error("increment_density: n must be >= 1");
    const double span = (support == IncrementSupport::PiSupport) ? kPi : kTwoPi;
    const bool inside = (support == IncrementSupport::PiSupport)
                            ? (theta >= 0.0 && theta <= span)
                            : (theta >= 0.0 && theta < span);
    if (!inside) throw std::domain_error("increment_density: theta outside support");
    const double nd = static_cast<double>(n);
    return (nd / span) * std::pow(1.0 - theta / span, nd - 1.0);
}

double increment_cdf(double theta, int n, IncrementSupport support) {
    if (n < 1) throw std::domain_error("increment_cdf: n must be >= 1");
    const double span = (support == IncrementSupport::PiSupport) ? kPi : kTwoPi;
    if (theta <= 0.0) return 0.0;
    if (theta >= span) return 1.0;
    return 1.0 - std::pow(1.0 - theta / span, static_cast<double>(n));
}

double expected_tan2_half_increment(int n) {
    if (n < 3) throw std::domain_error("expected_tan2_half_increment: n must be >= 3");
    const double nd = static_cast<double>(n);
    return kPi * kPi / (2.0 * nd * nd);
}

} // namespace cmm
