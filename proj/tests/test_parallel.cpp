#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hmcf/closedform.hpp"
#include "hmcf/parallel.hpp"
#include "support.hpp"

using namespace hmcf;
using hmcf::testsupport::offset_sphere;
using Catch::Approx;

TEST_CASE("sphere offsets are exact", "[parallel]") {
    for (double a : {0.0, -1.0}) {
        ModelSpace m(a);
        const RadialSurface s = sphere_surface(m, 1.0, 32, 64);
        for (double t : {0.3, -0.4}) {
            const RadialSurface p = parallel_surface(s, t);
            for (double r : p.r.v) CHECK(r == Approx(1.0 + t).margin(1e-10));
        }
    }
}

TEST_CASE("euclidean offsets obey the exact tube formula", "[parallel][oracle]") {
    // In flat space the parallel area of a convex surface is a polynomial in
    // the offset: A + M t + 4 pi t^2 (total Gauss curvature is always 4 pi).
    ModelSpace m(0.0);
    const RadialSurface s = perturbed_sphere(m, 1.0, {{2, 0, 0.08}, {3, 2, 0.04}}, 48, 96);
    const SurfaceIntegrals base = integrals(s);
    for (double t : {0.25, 0.6}) {
        const SurfaceIntegrals off = integrals(parallel_surface(s, t));
        const double predict = base.area + base.total_mean_curvature * t +
                               4.0 * std::numbers::pi * t * t;
        CHECK(off.area == Approx(predict).epsilon(1e-7));
    }
}

TEST_CASE("offsets compose and invert", "[parallel]") {
    ModelSpace m(-1.0);
    const RadialSurface s = perturbed_sphere(m, 1.0, {{2, 0, 0.05}, {3, 1, 0.03}}, 48, 96);

    const RadialSurface two_step = parallel_surface(parallel_surface(s, 0.2), 0.3);
    const RadialSurface direct = parallel_surface(s, 0.5);
    double derr = 0.0;
    for (size_t n = 0; n < direct.r.v.size(); ++n) {
        derr = std::max(derr, std::abs(two_step.r.v[n] - direct.r.v[n]));
    }
    CHECK(derr < 1e-8);

    const RadialSurface back = parallel_surface(parallel_surface(s, 0.4), -0.4);
    double rerr = 0.0;
    for (size_t n = 0; n < s.r.v.size(); ++n) {
        rerr = std::max(rerr, std::abs(back.r.v[n] - s.r.v[n]));
    }
    CHECK(rerr < 1e-8);
}

TEST_CASE("inward offsets past the focal set fail loudly", "[parallel]") {
    // All normals of an off-center sphere meet at its true center, so pushing
    // inward past that point leaves some target rays with no preimage.
    ModelSpace m(0.0);
    const RadialSurface s = offset_sphere(m, 1.0, 0.3, 32, 64);
    CHECK_THROWS_AS(parallel_surface(s, -1.1), ReachExceededError);
}

TEST_CASE("disc neighborhood boundary matches flat closed forms", "[parallel][oracle]") {
    // Flat-space boundary of the eps-neighborhood of a disc of radius r:
    // two faces, a half-torus rim, and the sphere term,
    //   A = 2 pi r^2 * 2 + 2 pi r * pi eps + 4 pi eps^2
    //   V = 2 pi r^2 eps + 2 pi r * pi eps^2 / 2 + (4/3) pi eps^3.
    ModelSpace m(0.0);
    const double r = 1.0, eps = 0.2;
    const RadialSurface s = ns_surface(m, r, eps, 2048, 32);
    const SurfaceIntegrals si = integrals(s);
    constexpr double pi = std::numbers::pi;

    const double area_exact = 2.0 * pi * r * r + 2.0 * pi * r * pi * eps + 4.0 * pi * eps * eps;
    const double vol_exact =
        2.0 * pi * r * r * eps + pi * pi * r * eps * eps + (4.0 / 3.0) * pi * eps * eps * eps;
    CHECK(si.area == Approx(area_exact).epsilon(1e-5));
    CHECK(si.volume == Approx(vol_exact).epsilon(1e-5));
    CHECK(gauss_bonnet_residual(si, 0.0) < 5e-3 * si.total_gauss_curvature);
}

TEST_CASE("hyperbolic disc neighborhood is consistent", "[parallel]") {
    ModelSpace m(-1.0);
    const RadialSurface s = ns_surface(m, 1.0, 0.2, 2048, 32);
    const SurfaceIntegrals si = integrals(s);

    // Faces alone contribute 2 cosh^2(eps) times the disc area; the rim adds
    // a positive amount bounded by the full tube around the rim circle.
    const double disc_area = 2.0 * std::numbers::pi * (std::cosh(1.0) - 1.0);
    const double faces = 2.0 * std::cosh(0.2) * std::cosh(0.2) * disc_area;
    const double rim_cap = 2.0 * std::numbers::pi * std::sinh(1.0) *
                           std::numbers::pi * std::sinh(0.2) * std::cosh(0.2) * 1.5;
    CHECK(si.area > faces);
    CHECK(si.area < faces + rim_cap);
    CHECK(gauss_bonnet_residual(si, -1.0) < 5e-3 * si.total_gauss_curvature);

    // Radii: eps along the axis, disc radius + eps in the disc plane.
    const SphereGrid& g = *s.grid;
    CHECK(s.r(0, 0) == Approx(0.2).margin(2e-3));
    double r_eq = 0.0;
    for (int i = 0; i < g.ntheta; ++i) r_eq = std::max(r_eq, s.r(i, 0));
    CHECK(r_eq == Approx(1.2).margin(1e-6));
}

TEST_CASE("inradius estimates", "[parallel]") {
    ModelSpace hyp(-1.0);
    CHECK(estimate_inradius(sphere_surface(hyp, 1.0, 32, 64)) == Approx(1.0).margin(1e-8));

    ModelSpace flat(0.0);
    CHECK(estimate_inradius(offset_sphere(flat, 1.0, 0.3, 48, 96)) == Approx(1.0).margin(2e-3));
    CHECK(estimate_inradius(offset_sphere(hyp, 1.0, 0.3, 48, 96)) == Approx(1.0).margin(2e-3));

    // The disc neighborhood admits exactly the eps-ball around its center.
    CHECK(estimate_inradius(ns_surface(hyp, 1.0, 0.2, 2048, 32)) == Approx(0.2).margin(2e-3));

    const RadialSurface p = perturbed_sphere(hyp, 1.0, {{2, 0, 0.05}}, 32, 64);
    const double inr = estimate_inradius(p);
    const double rmin = *std::min_element(p.r.v.begin(), p.r.v.end());
    const double rmax = *std::max_element(p.r.v.begin(), p.r.v.end());
    CHECK(inr >= rmin - 1e-9);
    CHECK(inr <= rmax);
}

TEST_CASE("family bookkeeping", "[parallel]") {
    ModelSpace m(-1.0);
    const RadialSurface s = sphere_surface(m, 1.0, 32, 64);
    CHECK_THROWS_AS(parallel_family(s, 0.5, 0.1, 8), ConfigError);
    CHECK_THROWS_AS(parallel_family(s, 0.0, 1.0, 1), ConfigError);

    const ParallelFamily fam = parallel_family(s, 0.0, 0.5, 6);
    REQUIRE(fam.offsets.size() == 6);
    REQUIRE(fam.surfaces.size() == 6);
    REQUIRE(fam.integrals.size() == 6);
    CHECK(fam.offsets.front() == 0.0);
    CHECK(fam.offsets.back() == 0.5);
    for (size_t k = 1; k < fam.integrals.size(); ++k) {
        CHECK(fam.integrals[k].area > fam.integrals[k - 1].area);
    }
    // Offsetting a sphere equals a sphere of the offset radius; compare on the
    // same grid so discretization cancels.
    const SurfaceIntegrals direct = integrals(sphere_surface(m, 1.5, 32, 64));
    CHECK(fam.integrals.back().area == Approx(direct.area).epsilon(1e-9));
}
