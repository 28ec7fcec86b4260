#include "cmmlab/asymptotics.hpp"

#include "cmmlab/estimators.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace cmm;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> bounded_random_angles(RngStream& rng, int n, double max_gap = kPi) {
    for (;;) {
        std::vector<double> angles(static_cast<std::size_t>(n));
        for (double& a : angles) a = rng.uniform(0.0, 2.0 * kPi);
        const auto inc = sorted_increments(angles);
        if (*std::max_element(inc.begin(), inc.end()) < max_gap) return angles;
    }
}

} // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("gumbel normalization constants") {
    const GumbelParams g = gumbel_params(1000, 0.3);
    CHECK(g.mu == doctest::Approx(1.1150757).epsilon(1e-6));
    CHECK(g.beta == doctest::Approx(0.0807117).epsilon(1e-5));
    CHECK_THROWS_AS(gumbel_params(1, 0.3), std::domain_error);
    CHECK_THROWS_AS(gumbel_params(10, 0.0), std::domain_error);
}

TEST_CASE("gumbel constants satisfy the defining identities") {
    for (int n : {2, 7, 100, 100000}) {
        for (double sigma : {0.1, 0.3, 2.0}) {
            const GumbelParams g = gumbel_params(n, sigma);
            // mu * beta = sigma^2 and mu / beta = 2 ln n, the ln-forcing form.
            CHECK(g.mu * g.beta == doctest::Approx(sigma * sigma).epsilon(1e-14));
            CHECK(g.mu / g.beta == doctest::Approx(2.0 * std::log(n)).epsilon(1e-14));
        }
    }
}

TEST_CASE("inverse-cdf max sampler matches brute force") {
    RngStream rng_a = RngStream::seeded(101);
    RngStream rng_b = RngStream::seeded(102);
    const int reps = 20000;
    double mean_fast = 0.0;
    double mean_brute = 0.0;
    double ss_fast = 0.0;
    double ss_brute = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double f = oracles::max_gaussian_sample(100, rng_a);
        const double b = oracles::brute_force_max_gaussian(100, rng_b);
        mean_fast += f;
        mean_brute += b;
        ss_fast += f * f;
        ss_brute += b * b;
    }
    mean_fast /= reps;
    mean_brute /= reps;
    const double var_fast = ss_fast / reps - mean_fast * mean_fast;
    const double var_brute = ss_brute / reps - mean_brute * mean_brute;
    const double se = std::sqrt((var_fast + var_brute) / reps);
    CHECK(std::abs(mean_fast - mean_brute) <= 3.0 * se);
}

TEST_CASE("normal quantile round trip") {
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
        const double x = oracles::normal_quantile(p);
        CHECK(oracles::standard_normal_cdf(x) == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("gumbel mean approximation improves with n") {
    // Relative gap between the empirical mean of the maximum and mu + gamma*beta.
    RngStream rng = RngStream::seeded(103);
    double previous_gap = 1e9;
    for (const std::int64_t n : {100L, 10000L}) {
        const int reps = 4000;
        double mean = 0.0;
        for (int r = 0; r < reps; ++r) mean += oracles::max_gaussian_sample(n, rng);
        mean /= reps;
        const GumbelParams g = gumbel_params(static_cast<int>(n), 1.0);
        const double predicted = g.mu + kEulerMascheroni * g.beta;
        const double gap = std::abs(mean - predicted) / predicted;
        CHECK(gap < previous_gap);
        previous_gap = gap;
    }
}

TEST_CASE("orthogonal expectation collapses for symmetric parameters") {
    const GumbelParams g = gumbel_params(250, 0.3);
    const double full = expected_e2_orthogonal({g, g, g, g});
    CHECK(full == doctest::Approx(kPi * kPi / 6.0 * g.beta * g.beta).epsilon(1e-14));
    CHECK(full == doctest::Approx(0.0134064).epsilon(1e-4));

    const double leading = expected_e2_orthogonal_leading({250, 250, 250, 250}, 0.3);
    CHECK(std::abs(full - leading) < 1e-12);  // algebraically identical here
    CHECK(leading == doctest::Approx(0.0134064).epsilon(1e-4));
}

TEST_CASE("orthogonal expectation with frozen scales") {
    std::array<GumbelParams, 4> p{};
    p[0] = {0.5, 0.0};
    p[1] = {0.2, 0.0};
    p[2] = {0.1, 0.0};
    p[3] = {0.6, 0.0};
    // beta = 0 leaves only the quarter-square differences.
    CHECK(expected_e2_orthogonal(p) ==
          doctest::Approx(0.25 * 0.4 * 0.4 + 0.25 * 0.4 * 0.4).epsilon(1e-14));
}

TEST_CASE("orthogonal leading form scales as sigma squared") {
    const std::array<int, 4> counts = {25, 50, 75, 100};
    const double base = expected_e2_orthogonal_leading(counts, 0.3);
    CHECK(expected_e2_orthogonal_leading(counts, 0.6) == doctest::Approx(4.0 * base).epsilon(1e-14));
    CHECK_THROWS_AS(expected_e2_orthogonal_leading({1, 25, 25, 25}, 0.3), std::domain_error);
}

TEST_CASE("linearized model of the unit orthogonal configuration") {
    const std::vector<double> angles = {0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0};
    const LinearizedModel m = build_linearized_model(angles, 2.0, NoiseModel::shared_sigma(0.3));
    CHECK(m.S0 == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(m.e0.norm() < 1e-12);
    REQUIRE(m.columns.size() == 4);
    // d(e_x)/d(X_0) = -1/2, so column 0 = S0 * (-1/2, 0).
    CHECK(m.columns[0].x == doctest::Approx(-8.0).epsilon(1e-6));
    CHECK(std::abs(m.columns[0].y) < 1e-6);
    CHECK(m.columns[2].x == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(m.columns[1].y == doctest::Approx(-8.0).epsilon(1e-6));
    CHECK(m.columns[3].y == doctest::Approx(8.0).epsilon(1e-6));
}

TEST_CASE("equilateral configuration area") {
    const std::vector<double> angles = {0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0};
    const LinearizedModel m = build_linearized_model(angles, 2.0, NoiseModel::shared_sigma(0.1));
    CHECK(m.S0 == doctest::Approx(12.0 * std::sqrt(3.0)).epsilon(1e-9));
    CHECK(m.e0.norm() < 1e-12);
}

TEST_CASE("linearized model requires a bounded noise-free set") {
    CHECK_THROWS_AS(build_linearized_model({0.0, 0.1, 0.2}, 2.0, NoiseModel::shared_sigma(0.1)),
                    std::domain_error);
}

TEST_CASE("linearized prediction reproduces the symmetric orthogonal law") {
    // For one vehicle per direction the exact expectation is sigma^2.
    const std::vector<double> angles = {0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0};
    const double sigma = 0.01;
    const LinearizedModel m = build_linearized_model(angles, 2.0, NoiseModel::shared_sigma(sigma));
    const double predicted = linearized_expected_e2(m);
    CHECK(predicted == doctest::Approx(sigma * sigma).epsilon(1e-6));

    RngStream rng = RngStream::seeded(104);
    const int trials = 100000;
    double mean = 0.0;
    Scenario s;
    s.angles = angles;
    s.half_width = 2.0;
    for (int t = 0; t < trials; ++t) {
        s.projections = sample_projections(4, NoiseModel::shared_sigma(sigma), rng);
        mean += exact_error(s).square_error;
    }
    mean /= trials;
    CHECK(mean == doctest::Approx(predicted).epsilon(0.02));
}

TEST_CASE("linearized prediction equals the Gaussian quadratic identity") {
    RngStream rng = RngStream::seeded(105);
    const auto angles = bounded_random_angles(rng, 10, kPi - 0.3);
    const NoiseModel noise = NoiseModel::shared_sigma(0.05);
    const LinearizedModel m = build_linearized_model(angles, 2.0, noise);
    const double predicted = linearized_expected_e2(m);

    const int reps = 100000;
    double mean = 0.0;
    double ss = 0.0;
    for (int r = 0; r < reps; ++r) {
        Vec2 e = m.e0;
        for (std::size_t i = 0; i < m.columns.size(); ++i) {
            e += m.columns[i] * (rng.normal(m.sigmas[i]) / m.S0);
        }
        const double v = e.norm2();
        mean += v;
        ss += v * v;
    }
    mean /= reps;
    const double se = std::sqrt((ss / reps - mean * mean) / reps);
    CHECK(std::abs(mean - predicted) <= 3.0 * se);
}

TEST_CASE("sigma scaling of the linearized trace term") {
    RngStream rng = RngStream::seeded(106);
    const auto angles = bounded_random_angles(rng, 8, kPi - 0.3);
    const LinearizedModel m1 = build_linearized_model(angles, 2.0, NoiseModel::shared_sigma(0.02));
    const LinearizedModel m3 = build_linearized_model(angles, 2.0, NoiseModel::shared_sigma(0.06));
    const double t1 = linearized_expected_e2(m1) - m1.e0.norm2();
    const double t3 = linearized_expected_e2(m3) - m3.e0.norm2();
    CHECK(t3 == doctest::Approx(9.0 * t1).epsilon(1e-9));
    const LinearizedModel m0 = build_linearized_model(angles, 2.0, NoiseModel::shared_sigma(0.0));
    CHECK(linearized_expected_e2(m0) == doctest::Approx(m0.e0.norm2()).epsilon(1e-15));
}

TEST_CASE("linearization has a quadratic remainder") {
    RngStream rng = RngStream::seeded(107);
    const auto angles = bounded_random_angles(rng, 8, kPi - 0.3);
    const LinearizedModel m = build_linearized_model(angles, 2.0, NoiseModel::shared_sigma(1.0));
    std::vector<double> direction(angles.size());
    for (double& d : direction) d = rng.normal();

    auto remainder = [&](double eps) {
        Scenario s;
        s.angles = angles;
        s.half_width = 2.0;
        s.projections.resize(angles.size());
        Vec2 linear = m.e0;
        for (std::size_t i = 0; i < angles.size(); ++i) {
            s.projections[i] = eps * direction[i];
            linear += m.columns[i] * (eps * direction[i] / m.S0);
        }
        return (exact_error(s).error - linear).norm();
    };
    const double r_coarse = remainder(1e-3);
    const double r_fine = remainder(1e-4);
    REQUIRE(r_fine > 0.0);
    const double ratio = r_coarse / r_fine;  // ~100 for a quadratic remainder
    CHECK(ratio > 50.0);
    CHECK(ratio < 200.0);
}

TEST_CASE("uniform leading prediction") {
    CHECK(expected_e2_uniform_leading(30, 2.0, NoiseModel::shared_sigma(0.3)) ==
          doctest::Approx(0.0341296296296).epsilon(1e-10));
    CHECK(expected_e2_uniform_leading(30, 2.0, NoiseModel::shared_sigma(0.0)) ==
          doctest::Approx(2.0 * 4.0 / (9.0 * 30.0)).epsilon(1e-14));
    CHECK_THROWS_AS(expected_e2_uniform_leading(2, 2.0, NoiseModel::shared_sigma(0.3)),
                    std::domain_error);
}

TEST_CASE("uniform leading prediction is homogeneous of degree two") {
    for (double s : {0.5, 2.0, 3.7}) {
        const double base = expected_e2_uniform_leading(20, 2.0, NoiseModel::shared_sigma(0.3));
        const double scaled =
            expected_e2_uniform_leading(20, 2.0 * s, NoiseModel::shared_sigma(0.3 * s));
        CHECK(scaled == doctest::Approx(s * s * base).epsilon(1e-12));
    }
}

TEST_CASE("noise-free square error formula is exact against clipping") {
    RngStream rng = RngStream::seeded(108);
    for (int rep = 0; rep < 20; ++rep) {
        const auto angles = bounded_random_angles(rng, 20);
        const double formula = e0_squared_geometric(angles, 2.0);
        Scenario s;
        s.angles = angles;
        s.projections.assign(angles.size(), 0.0);
        s.half_width = 2.0;
        const EstimateResult exact = exact_error(s);
        REQUIRE(exact.feasible);
        CHECK(formula == doctest::Approx(exact.square_error).epsilon(0.05));
    }
}

TEST_CASE("symmetric angle sets have zero noise-free error") {
    for (int n : {3, 4, 6, 9, 12}) {
        std::vector<double> angles(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) angles[static_cast<std::size_t>(i)] = 2.0 * kPi * i / n + 0.37;
        CHECK(e0_squared_geometric(angles, 2.0) <= 1e-18);
    }
    CHECK(e0_squared_geometric({0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0}, 2.0) <= 1e-18);

    // Any rotation symmetry kills the moment, not just equal spacing: an
    // irregular half-turn-symmetric set (k = 2).
    RngStream rng = RngStream::seeded(109);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> half = {rng.uniform(0.0, 0.9), rng.uniform(1.0, 1.9),
                                    rng.uniform(2.0, 2.9)};
        std::vector<double> angles = half;
        for (double a : half) angles.push_back(a + kPi);
        CHECK(e0_squared_geometric(angles, 2.0) <= 1e-18);
    }

    CHECK_THROWS_AS(e0_squared_geometric({0.0, 0.1, 0.2}, 2.0), std::domain_error);
}

TEST_CASE("increment density values and normalization") {
    CHECK(increment_density(0.0, 10, IncrementSupport::PiSupport) ==
          doctest::Approx(10.0 / kPi).epsilon(1e-12));
    const double total_pi = oracles::integrate(
        [](double t) { return increment_density(t, 10, IncrementSupport::PiSupport); }, 0.0, kPi);
    CHECK(total_pi == doctest::Approx(1.0).epsilon(1e-10));
    const double total_2pi = oracles::integrate(
        [](double t) { return increment_density(t, 10, IncrementSupport::FullTwoPi); }, 0.0,
        2.0 * kPi * (1.0 - 1e-15));
    CHECK(total_2pi == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(increment_density(-0.1, 10, IncrementSupport::PiSupport), std::domain_error);
    CHECK_THROWS_AS(increment_density(kPi + 0.1, 10, IncrementSupport::PiSupport), std::domain_error);
    CHECK_THROWS_AS(increment_density(2.0 * kPi, 10, IncrementSupport::FullTwoPi),
                    std::domain_error);
}

TEST_CASE("expected squared half-increment tangent") {
    CHECK(expected_tan2_half_increment(100) == doctest::Approx(kPi * kPi / 20000.0).epsilon(1e-14));
    CHECK_THROWS_AS(expected_tan2_half_increment(2), std::domain_error);

    double previous = 1e9;
    for (int n = 3; n <= 50; ++n) {
        const double v = expected_tan2_half_increment(n);
        CHECK(v < previous);
        previous = v;
    }

    // Quadrature of the defining integral under the pi-support density.
    const int n = 200;
    const double quad = oracles::integrate(
        [&](double t) {
            return std::tan(0.5 * t) * std::tan(0.5 * t) *
                   increment_density(t, n, IncrementSupport::PiSupport);
        },
        0.0, kPi * (1.0 - 1e-12), 1e-14, 256);
    CHECK(quad == doctest::Approx(expected_tan2_half_increment(n)).epsilon(0.05));
}

} // TEST_SUITE
