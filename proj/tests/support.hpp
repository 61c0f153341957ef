#pragma once

#include <cmath>

#include "hmcf/surface.hpp"

namespace hmcf::testsupport {

// Radial graph of a geodesic sphere of radius R about a point at distance
// delta from the graph center: for each ray, solve the (hyperbolic) law of
// cosines for r.  Curvatures of the result are known exactly, which makes it
// an absolute oracle for surfaces with nonconstant radii.
inline RadialSurface offset_sphere(const ModelSpace& m, double R, double delta, int nt, int np) {
    RadialSurface s = sphere_surface(m, R, nt, np);
    const SphereGrid& g = *s.grid;
    for (int i = 0; i < g.ntheta; ++i) {
        for (int j = 0; j < g.nphi; ++j) {
            const double cosg = g.cos_t[i];  // angle between the ray and the offset axis
            if (m.flat()) {
                s.r(i, j) = delta * cosg + std::sqrt(R * R - delta * delta * (1.0 - cosg * cosg));
            } else {
                const double sc = m.s();
                auto f = [&](double r) {
                    return std::cosh(sc * delta) * std::cosh(sc * r) -
                           std::sinh(sc * delta) * std::sinh(sc * r) * cosg - std::cosh(sc * R);
                };
                double lo = R - delta, hi = R + delta;
                for (int it = 0; it < 90; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (f(mid) > 0.0 ? hi : lo) = mid;
                }
                s.r(i, j) = 0.5 * (lo + hi);
            }
        }
    }
    return s;
}

}  // namespace hmcf::testsupport
