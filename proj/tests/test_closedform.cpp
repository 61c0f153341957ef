#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "hmcf/closedform.hpp"

using namespace hmcf;
using Catch::Approx;
constexpr double kPi = std::numbers::pi;

TEST_CASE("euclidean unit sphere quantities", "[closedform]") {
    const auto q = sphere_quantities(0.0, 1.0);
    CHECK(q.area == Approx(4.0 * kPi).epsilon(1e-14));
    CHECK(q.total_mean_curvature == Approx(8.0 * kPi).epsilon(1e-14));
    CHECK(q.total_gauss_curvature == Approx(4.0 * kPi).epsilon(1e-14));
    CHECK(q.volume == Approx(4.0 * kPi / 3.0).epsilon(1e-14));
    CHECK(q.kappa == Approx(1.0));
}

TEST_CASE("hyperbolic unit sphere quantities", "[closedform]") {
    const auto q = sphere_quantities(-1.0, 1.0);
    const double sh = std::sinh(1.0), ch = std::cosh(1.0);
    CHECK(q.area == Approx(4.0 * kPi * sh * sh).epsilon(1e-14));
    CHECK(q.area == Approx(17.355442).epsilon(2e-4));
    CHECK(q.total_mean_curvature == Approx(8.0 * kPi * sh * ch).epsilon(1e-14));
    CHECK(q.total_gauss_curvature == Approx(4.0 * kPi * ch * ch).epsilon(1e-14));
    CHECK(q.total_gauss_curvature == Approx(29.921813).epsilon(2e-4));
    CHECK(q.volume == Approx(kPi * (std::sinh(2.0) - 2.0)).epsilon(1e-14));
    CHECK(q.volume == Approx(5.1110606).epsilon(2e-4));
    CHECK(q.kappa == Approx(1.0 / std::tanh(1.0)).epsilon(1e-14));

    const auto half = sphere_quantities(-1.0, 0.5);
    CHECK(half.area == Approx(3.4124549).epsilon(2e-4));
    CHECK(half.total_gauss_curvature == Approx(15.978826).epsilon(2e-4));
}

TEST_CASE("closed-form total curvature satisfies the Gauss-Bonnet identity", "[closedform]") {
    for (double a : {0.0, -0.5, -1.0, -2.0}) {
        for (double rho : {0.25, 0.5, 1.0, 2.0}) {
            const auto q = sphere_quantities(a, rho);
            CHECK(q.total_gauss_curvature ==
                  Approx(4.0 * kPi - a * q.area).epsilon(1e-12));
        }
    }
}

TEST_CASE("sphere radius validation", "[closedform]") {
    CHECK_THROWS_AS(sphere_quantities(-1.0, 0.0), NegativeRadiusError);
    CHECK_THROWS_AS(sphere_quantities(0.0, -1.0), NegativeRadiusError);
}

TEST_CASE("phi at lambda 2 on hyperbolic spheres", "[closedform]") {
    for (double rho : {0.5, 1.0, 2.0}) {
        const auto q = sphere_quantities(-1.0, rho);
        const double sh = std::sinh(rho);
        CHECK(phi(q.total_mean_curvature, q.area, -1.0, 2.0) ==
              Approx(32.0 * kPi * kPi * sh * sh * sh * sh).epsilon(1e-11));
    }
    const auto q1 = sphere_quantities(-1.0, 1.0);
    CHECK(phi(q1.total_mean_curvature, q1.area, -1.0, 2.0) == Approx(602.41659).epsilon(2e-4));
}

TEST_CASE("phi at lambda 4 vanishes on hyperbolic spheres", "[closedform]") {
    for (double rho = 0.25; rho <= 2.51; rho += 0.25) {
        const auto q = sphere_quantities(-1.0, rho);
        const double scale = q.total_mean_curvature * q.total_mean_curvature;
        CHECK(std::abs(phi(q.total_mean_curvature, q.area, -1.0, 4.0)) < 1e-9 * scale);
        // Below the critical weight phi is positive, above it negative.
        CHECK(phi(q.total_mean_curvature, q.area, -1.0, 3.9) > 0.0);
        CHECK(phi(q.total_mean_curvature, q.area, -1.0, 4.1) < 0.0);
    }
}

TEST_CASE("phi scaling homogeneity", "[closedform]") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> um(10.0, 80.0), ua(5.0, 40.0), uc(0.5, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double m = um(rng), area = ua(rng), c = uc(rng);
        const double lambda = 2.0, a = -1.0;
        // Metric rescaling g -> c^2 g sends (M, A, a) to (cM, c^2 A, a/c^2)
        // and every term of phi picks up exactly c^2.
        const double lhs = phi(c * m, c * c * area, a / (c * c), lambda);
        const double rhs = c * c * phi(m, area, a, lambda);
        CHECK(lhs == Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("tube family limits", "[closedform]") {
    const auto l1 = ns_limits(1.0);
    CHECK(l1.area == Approx(4.0 * kPi * (std::cosh(1.0) - 1.0)).epsilon(1e-14));
    CHECK(l1.area == Approx(6.8245864).epsilon(2e-4));
    CHECK(l1.total_mean_curvature == Approx(2.0 * kPi * kPi * std::sinh(1.0)).epsilon(1e-14));
    CHECK(l1.lambda_threshold == Approx(4.1887).epsilon(1e-4));

    CHECK(ns_limits(3.0).lambda_threshold == Approx(2.5705).epsilon(1e-4));
    CHECK(ns_limits(8.0).lambda_threshold == Approx(kPi * kPi / 4.0).epsilon(1e-3));
    CHECK_THROWS_AS(ns_limits(0.0), ConfigError);
}

TEST_CASE("lambda threshold decreases to pi^2/4", "[closedform]") {
    const double limit = kPi * kPi / 4.0;
    double prev = ns_lambda_threshold(1.0);
    for (double r = 1.1; r <= 10.001; r += 0.1) {
        const double cur = ns_lambda_threshold(r);
        CHECK(cur < prev);
        CHECK(cur > limit);
        prev = cur;
    }
    CHECK(ns_lambda_threshold(20.0) == Approx(limit).epsilon(1e-8));
}

TEST_CASE("lambda threshold crosses 4 between r = 1 and r = 1.5", "[closedform]") {
    double lo = 1.0, hi = 1.5;
    REQUIRE(ns_lambda_threshold(lo) > 4.0);
    REQUIRE(ns_lambda_threshold(hi) < 4.0);
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (ns_lambda_threshold(mid) > 4.0 ? lo : hi) = mid;
    }
    CHECK(lo > 1.0);
    CHECK(hi < 1.5);
    CHECK(hi - lo < 1e-12);
}

TEST_CASE("volume bound right-hand side", "[closedform]") {
    // Euclidean ball: inradius equals the area radius and the bound is the
    // ball volume itself.
    CHECK(bonnesen_rhs(4.0 * kPi, 1.0) == Approx(4.0 * kPi / 3.0).epsilon(1e-14));

    const double area = 4.0 * kPi * std::sinh(1.0) * std::sinh(1.0);
    const double R = std::sinh(1.0);
    const double expect = (4.0 * kPi / 3.0) * (R * R * R - std::pow(R - 1.0, 3.0));
    CHECK(bonnesen_rhs(area, 1.0) == Approx(expect).epsilon(1e-14));
    CHECK(bonnesen_rhs(area, 1.0) == Approx(6.7761).epsilon(1e-4));

    CHECK_THROWS_AS(bonnesen_rhs(4.0 * kPi, 1.2), InradExceedsRadiusError);
    CHECK_THROWS_AS(bonnesen_rhs(-1.0, 0.5), ConfigError);
}
