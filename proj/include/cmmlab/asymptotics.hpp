#pragma once

#include "cmmlab/scenario.hpp"
#include "cmmlab/vec2.hpp"

#include <array>
#include <vector>

namespace cmm {

// Mean of the standard Gumbel distribution.
inline constexpr double kEulerMascheroni = 0.5772156649015329;

// Location/scale of the limiting distribution of the maximum of n Gaussian
// projections.
struct GumbelParams {
    double mu = 0.0;    // meters
    double beta = 0.0;  // meters
};

// Leading-order normalization constants: mu = sigma*sqrt(2 ln n),
// beta = sigma/sqrt(2 ln n). Throws std::domain_error for n < 2 or sigma <= 0.
GumbelParams gumbel_params(int n, double sigma);

// Expected square error of the orthogonal-road estimator from the four
// directional Gumbel parameter pairs.
double expected_e2_orthogonal(const std::array<GumbelParams, 4>& params);

// Leading-order form: (pi^2 sigma^2 / 48) * sum_j 1/ln(N_j). Throws
// std::domain_error when any count is < 2.
double expected_e2_orthogonal_leading(const std::array<int, 4>& counts, double sigma);

// First-order model of the estimation error around the noise-free feasible
// set: error ~ e0 + C * projections / S0.
struct LinearizedModel {
    Vec2 e0;                     // noise-free centroid
    double S0 = 0.0;             // noise-free area
    std::vector<Vec2> columns;   // column i = S0 * d(centroid)/d(projection_i)
    std::vector<double> sigmas;  // per-vehicle projection sigmas
};

// Builds the model from exact geometry; the sensitivity columns come from
// central finite differences with step 1e-6 * half_width. Throws
// std::domain_error when the noise-free set is empty or unbounded.
LinearizedModel build_linearized_model(const std::vector<double>& angles, double half_width,
                                       const NoiseModel& noise);

// |e0|^2 + sum_i sigma_i^2 |column_i|^2 / S0^2.
double linearized_expected_e2(const LinearizedModel& model);

// Leading-order expected square error for uniformly random road directions:
// 2 w^2 / (9 n) + 3 sum(sigma_i^2) / (2 n^2).
double expected_e2_uniform_leading(int n, double half_width, const NoiseModel& noise);

// Noise-free square error from the tangential-polygon moment formula
// (tan^2-weighted edge sums over the sorted angle increments, divided by the
// exact polygon area squared). Throws std::domain_error when any increment
// reaches pi (unbounded polygon).
double e0_squared_geometric(const std::vector<double>& angles, double half_width);

// Candidate densities for a single sorted-angle increment.
enum class IncrementSupport { PiSupport, FullTwoPi };

// PiSupport:   (n/pi)   * (1 - theta/pi)^(n-1)    on [0, pi]
// FullTwoPi: (n/2 pi) * (1 - theta/2 pi)^(n-1)  on [0, 2 pi)
// Throws std::domain_error outside the chosen support.
double increment_density(double theta, int n, IncrementSupport support);

double increment_cdf(double theta, int n, IncrementSupport support);

// Leading-order E[tan^2(increment/2)] under the PiSupport density: pi^2/(2 n^2).
double expected_tan2_half_increment(int n);

} // namespace cmm
