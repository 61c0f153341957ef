#pragma once

#include <cmath>
#include <numbers>

#include "hmcf/ambient.hpp"
#include "hmcf/errors.hpp"

namespace hmcf {

struct SphereQuantities {
    double area = 0.0;
    double total_mean_curvature = 0.0;   // integral of H
    double total_gauss_curvature = 0.0;  // integral of the extrinsic G
    double volume = 0.0;
    double kappa = 0.0;                  // common principal curvature
};

// Geodesic sphere of radius rho in curvature a: kappa = sn'/sn and the
// integrals reduce to powers of sn.
inline SphereQuantities sphere_quantities(double a, double rho) {
    if (!(rho > 0.0)) throw NegativeRadiusError("sphere radius must be positive");
    constexpr double four_pi = 4.0 * std::numbers::pi;
    SphereQuantities q;
    const double s = sn(a, rho);
    const double sp = sn_prime(a, rho);
    q.area = four_pi * s * s;
    q.total_mean_curvature = 2.0 * four_pi * s * sp;
    q.total_gauss_curvature = four_pi * sp * sp;
    q.volume = four_pi * sn_squared_integral(a, rho);
    q.kappa = sp / s;
    return q;
}

// Deficit functional phi = M^2 - 16 pi A + lambda a A^2.  Nonnegative phi is
// the quadratic form of the Minkowski-type inequality at weight lambda.
inline double phi(double total_mean_curvature, double area, double a, double lambda) {
    const double m = total_mean_curvature;
    return m * m - 16.0 * std::numbers::pi * area + lambda * a * area * area;
}

// Limits of the collapsing tube family around a totally geodesic disc of
// radius r at a = -1, and the largest lambda the family tolerates.
struct NsLimits {
    double area = 0.0;
    double total_mean_curvature = 0.0;
    double lambda_threshold = 0.0;
};

inline double ns_lambda_threshold(double r) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double sh = std::sinh(r);
    const double cm1 = std::cosh(r) - 1.0;
    return (pi2 * sh * sh - 16.0 * cm1) / (4.0 * cm1 * cm1);
}

inline NsLimits ns_limits(double r) {
    if (!(r > 0.0)) throw ConfigError("disc radius must be positive");
    constexpr double pi = std::numbers::pi;
    NsLimits l;
    l.area = 4.0 * pi * (std::cosh(r) - 1.0);
    l.total_mean_curvature = 2.0 * pi * pi * std::sinh(r);
    l.lambda_threshold = ns_lambda_threshold(r);
    return l;
}

// Upper volume bound from area and inradius: the ball shell of the same area
// whose inner cavity has depth inrad.
inline double bonnesen_rhs(double area, double inrad) {
    constexpr double pi = std::numbers::pi;
    if (!(area > 0.0)) throw ConfigError("area must be positive");
    if (!(inrad >= 0.0)) throw ConfigError("inradius must be nonnegative");
    const double R = std::sqrt(area / (4.0 * pi));
    // Equality holds for round balls, where roundoff can leave the measured
    // inradius a few ulps past R; only a real excess is an error.
    if (inrad > R * (1.0 + 1e-9)) {
        throw InradExceedsRadiusError("inradius exceeds the area radius sqrt(area / 4 pi)");
    }
    const double t = std::max(R - inrad, 0.0);
    return (4.0 * pi / 3.0) * (R * R * R - t * t * t);
}

}  // namespace hmcf
