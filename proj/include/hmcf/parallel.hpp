#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hmcf/surface.hpp"

namespace hmcf {

// Normal offsets of a radial graph.  The offset surface is the image of the
// push x -> exp_x(t nu); to express it as a radial graph again, each target
// ray is matched to its preimage angles by a two-variable Newton iteration.

namespace detail {

// Radii and first derivatives at arbitrary angles.  Azimuth uses each row's
// trigonometric interpolant, which is globally smooth, so the only remaining
// interpolation seams are the colatitude stencil windows.  Colatitude uses a
// 6-node Lagrange window with the usual pole continuation.
struct RadialPatch {
    const RadialSurface* s = nullptr;
    std::vector<double> ca, cb;  // per-row Fourier coefficients, (np/2+1) each

    explicit RadialPatch(const RadialSurface* surf) : s(surf) {
        const SphereGrid& g = *s->grid;
        const int nt = g.ntheta, np = g.nphi, nm = np / 2 + 1;
        ca.assign(static_cast<size_t>(nt) * nm, 0.0);
        cb.assign(static_cast<size_t>(nt) * nm, 0.0);
        for (int i = 0; i < nt; ++i) {
            for (int m = 0; m < nm; ++m) {
                double a = 0.0, b = 0.0;
                for (int j = 0; j < np; ++j) {
                    a += s->r(i, j) * g.four_cos[static_cast<size_t>(m) * np + j];
                    b += s->r(i, j) * g.four_sin[static_cast<size_t>(m) * np + j];
                }
                ca[static_cast<size_t>(i) * nm + m] = a;
                cb[static_cast<size_t>(i) * nm + m] = b;
            }
        }
    }

    // One row's series at azimuth be; ghost rows shift the azimuth by pi.
    void row_eval(int ext_i, double be, double& val, double& dval) const {
        const SphereGrid& g = *s->grid;
        const int np = g.nphi, half = np / 2;
        int row, shift;
        g.wrap_row(ext_i, row, shift);
        const double ang = be + (shift ? std::numbers::pi : 0.0);
        const double* a = &ca[static_cast<size_t>(row) * (half + 1)];
        const double* b = &cb[static_cast<size_t>(row) * (half + 1)];

        const double c1 = std::cos(ang), s1 = std::sin(ang);
        double cm = c1, sm = s1;
        double v = a[0] / np, d = 0.0;
        for (int m = 1; m < half; ++m) {
            v += (2.0 / np) * (a[m] * cm + b[m] * sm);
            d += (2.0 / np) * m * (b[m] * cm - a[m] * sm);
            const double cn = cm * c1 - sm * s1;
            sm = sm * c1 + cm * s1;
            cm = cn;
        }
        v += (a[half] / np) * cm;
        d -= (a[half] / np) * half * sm;
        val = v;
        dval = d;
    }

    void eval(double al, double be, double& r, double& rt, double& rp) const {
        const SphereGrid& g = *s->grid;
        constexpr int K = 6;
        const auto& th = g.theta;
        const int lo = static_cast<int>(std::lower_bound(th.begin(), th.end(), al) - th.begin());
        const int start =
            std::clamp(lo - K / 2, -SphereGrid::kGhost, g.ntheta + SphereGrid::kGhost - K);
        double wt[K], dwt[K];
        lagrange_basis(&g.theta_ext[start + SphereGrid::kGhost], K, al, wt, dwt);

        r = rt = rp = 0.0;
        for (int kt = 0; kt < K; ++kt) {
            double v, dv;
            row_eval(start + kt, be, v, dv);
            r += wt[kt] * v;
            rt += dwt[kt] * v;
            rp += wt[kt] * dv;
        }
    }
};

// Evaluates the pushed point exp_X(t nu) at arbitrary source angles, with the
// normal built from the interpolated radii and their first derivatives.
struct NormalPush {
    const RadialSurface* s = nullptr;
    RadialPatch patch;
    double t = 0.0;

    Point point(double al, double be) const {
        const ModelSpace& m = s->space;
        double r, rt, rp;
        patch.eval(al, be, r, rt, rp);
        if (!(r > 0.0)) throw NegativeRadiusError("parallel push: nonpositive source radius");

        const double st = std::sin(al), ctn = std::cos(al);
        const double cp = std::cos(be), sp = std::sin(be);
        const Vec4 u = (st * cp) * s->frame[0] + (st * sp) * s->frame[1] + ctn * s->frame[2];
        const Vec4 ua = (ctn * cp) * s->frame[0] + (ctn * sp) * s->frame[1] - st * s->frame[2];
        const Vec4 ub = (-st * sp) * s->frame[0] + (st * cp) * s->frame[1];

        Vec4 x, xa, xb, tr;
        if (m.flat()) {
            x = s->center.x + r * u;
            x[0] = 0.0;
            tr = u;
            xa = rt * u + r * ua;
            xb = rp * u + r * ub;
        } else {
            const double sc = m.s();
            const double ch = std::cosh(sc * r), sh = std::sinh(sc * r);
            x = ch * s->center.x + (sh / sc) * u;
            tr = (sc * sh) * s->center.x + ch * u;
            xa = rt * tr + (sh / sc) * ua;
            xb = rp * tr + (sh / sc) * ub;
        }

        Vec4 n = m.flat() ? cross3(xa, xb) : mcross(x, xa, xb);
        const double n2 = mdot(n, n);
        if (!(n2 > 0.0)) throw SingularMetricError("parallel push: degenerate tangent plane");
        n = (1.0 / std::sqrt(n2)) * n;
        if (mdot(n, tr) < 0.0) n = -1.0 * n;

        if (m.flat()) {
            Vec4 y = x + t * n;
            y[0] = 0.0;
            return Point{y};
        }
        const double sc = m.s();
        return normalize_point(m, std::cosh(sc * t) * x + (std::sinh(sc * t) / sc) * n);
    }

    // Colatitude/azimuth of y seen from the surface center.
    void angles(const Point& y, double& th_out, double& ph_out) const {
        const TangentVector d = direction(s->space, s->center, y);
        const double d1 = mdot(d.v, s->frame[0]);
        const double d2 = mdot(d.v, s->frame[1]);
        const double d3 = mdot(d.v, s->frame[2]);
        th_out = std::atan2(std::hypot(d1, d2), d3);
        ph_out = std::atan2(d2, d1);
    }
};

inline double solve_parallel_ray(const NormalPush& push, double th_t, double ph_t) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const ModelSpace& m = push.s->space;
    const SphereGrid& g = *push.s->grid;
    const double al_lo = -g.theta[1], al_hi = std::numbers::pi + g.theta[1];
    const double scale = std::max(std::sin(th_t), 1e-3);

    // The colatitude interpolant is piecewise polynomial, so its value jumps
    // by the interpolation error where the stencil window shifts.  If the
    // preimage happens to sit on such a seam, Newton stalls at that floor;
    // accept the best stalled point as long as the residual stays small (the
    // radius error is second order in the angle residual).
    double best_res = std::numeric_limits<double>::infinity();
    Point best_y = push.s->center;

    double al = th_t, be = ph_t;
    for (int iter = 0; iter < 60; ++iter) {
        const Point y = push.point(al, be);
        double th, ph;
        push.angles(y, th, ph);
        const double r1 = th - th_t;
        const double r2 = std::remainder(ph - ph_t, two_pi) * scale;
        const double res = std::abs(r1) + std::abs(r2);
        if (res < best_res) {
            best_res = res;
            best_y = y;
        }
        if (res < 1e-10) return distance(m, push.s->center, y);

        // Newton starts exactly on a knot of the patch, where the derivative
        // fields feeding the normal jump by the interpolation error (1e-6 at
        // 32 rows, growing fast on coarser grids).  The difference step must
        // dominate that jump or the Jacobian can come out with the wrong sign
        // and trap the iteration in a two-cycle, so it scales with the row
        // spacing; truncation stays below a percent, which Newton absorbs.
        const double h = std::max(1e-3, 0.06 / g.ntheta);
        double tha, pha, thb, phb;
        push.angles(push.point(al + h, be), tha, pha);
        push.angles(push.point(al, be + h), thb, phb);
        const double j11 = (tha - th) / h;
        const double j21 = std::remainder(pha - ph, two_pi) * scale / h;
        const double j12 = (thb - th) / h;
        const double j22 = std::remainder(phb - ph, two_pi) * scale / h;
        const double det = j11 * j22 - j12 * j21;
        if (!(std::abs(det) > 1e-14)) break;

        const double dal = std::clamp((j22 * r1 - j12 * r2) / det, -0.5, 0.5);
        const double dbe = std::clamp((-j21 * r1 + j11 * r2) / det, -0.5 / scale, 0.5 / scale);
        al = std::clamp(al - dal, al_lo, al_hi);
        be -= dbe;
    }
    // The stall floor is the seam jump of the interpolant, which scales like
    // a high power of the row spacing; the acceptance threshold follows it so
    // coarse grids remain usable.  A genuine focal crossing leaves residuals
    // orders of magnitude above either bound.
    const double dth = std::numbers::pi / g.ntheta;
    if (best_res < std::max(1e-7, dth * dth * dth * dth * dth)) {
        return distance(m, push.s->center, best_y);
    }
    throw ReachExceededError("parallel surface: normal map could not be inverted");
}

}  // namespace detail

inline RadialSurface parallel_surface(const RadialSurface& s, double t) {
    if (t == 0.0) return s;
    const detail::NormalPush push{&s, detail::RadialPatch(&s), t};
    RadialSurface out = s;
    const SphereGrid& g = *s.grid;
    std::vector<char> fail(g.ntheta, 0);
    parallel_for(g.ntheta, [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            try {
                for (int j = 0; j < g.nphi; ++j) {
                    out.r(i, j) = detail::solve_parallel_ray(push, g.theta[i], g.phi[j]);
                }
            } catch (...) {
                fail[i] = 1;
            }
        }
    });
    for (char f : fail) {
        if (f) throw ReachExceededError("parallel surface: normal map not invertible at this offset");
    }
    for (double r : out.r.v) {
        if (!(r > 0.0)) throw ReachExceededError("parallel surface: offset reached the center");
    }
    return out;
}

struct ParallelFamily {
    std::vector<double> offsets;
    std::vector<RadialSurface> surfaces;
    std::vector<SurfaceIntegrals> integrals;
};

// Offsets sampled uniformly on [t0, t1], each built from the base surface.
inline ParallelFamily parallel_family(const RadialSurface& s, double t0, double t1, int count) {
    if (count < 2 || !(t1 > t0)) {
        throw ConfigError("parallel family needs count >= 2 and t1 > t0");
    }
    ParallelFamily fam;
    for (int k = 0; k < count; ++k) {
        const double t = t0 + (t1 - t0) * k / (count - 1.0);
        RadialSurface sk = parallel_surface(s, t);
        fam.offsets.push_back(t);
        fam.integrals.push_back(integrals(sk));
        fam.surfaces.push_back(std::move(sk));
    }
    return fam;
}

// Boundary of the eps-neighborhood of a solid totally geodesic disc, as a
// radial graph about the disc center.  The body is rotationally symmetric
// about the disc normal (the third frame axis), so the distance equation is
// solved once per colatitude row and broadcast in phi.
inline RadialSurface ns_surface(const ModelSpace& m, double disc_radius, double eps, int nt,
                                int np) {
    if (!(eps > 0.0)) throw ConfigError("neighborhood half-width must be positive");
    const DiscBody disc =
        make_disc(m, m.origin(), Vec4{0, 1, 0, 0}, Vec4{0, 0, 1, 0}, disc_radius);
    RadialSurface s{m, disc.center, orthonormal_frame(m, disc.center), make_grid(nt, np),
                    Grid2(nt, np)};
    const SphereGrid& g = *s.grid;
    parallel_for(nt, [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            const TangentVector u{s.direction(i, 0)};
            auto crossing = [&](double rho) {
                return dist_to_disc(m, disc, geodesic(m, disc.center, u, rho)) - eps;
            };
            // The body is convex and contains the center, so each ray crosses
            // the boundary exactly once, between these brackets.
            double lo = 0.5 * eps, hi = disc_radius + eps + 0.1;
            for (int it = 0; it < 70; ++it) {
                const double mid = 0.5 * (lo + hi);
                (crossing(mid) < 0.0 ? lo : hi) = mid;
            }
            const double rho = 0.5 * (lo + hi);
            for (int j = 0; j < g.nphi; ++j) s.r(i, j) = rho;
        }
    });
    return s;
}

// Radius of the largest inscribed ball, via compass search over the ball
// center.  The surface is represented by its nodes, so the result carries a
// quadratic-in-spacing sampling error.
inline double estimate_inradius(const RadialSurface& s) {
    const ModelSpace& m = s.space;
    const VecField x = embed(s);
    auto min_dist = [&](const Point& q) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec4& p : x) best = std::min(best, distance(m, q, Point{p}));
        return best;
    };

    Point c = s.center;
    double val = min_dist(c);
    double step = 0.25 * val;
    while (step > 1e-10 * std::max(val, 1.0)) {
        bool improved = false;
        const std::array<Vec4, 3> fr = orthonormal_frame(m, c);
        for (int d = 0; d < 6 && !improved; ++d) {
            const Vec4 dir = (d % 2 ? -1.0 : 1.0) * fr[d / 2];
            const Point q = geodesic(m, c, TangentVector{dir}, step);
            const double v = min_dist(q);
            if (v > val + 1e-15) {
                c = q;
                val = v;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return val;
}

}  // namespace hmcf
