#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "hmcf/errors.hpp"

namespace hmcf {

// 4-component vectors back both models.  Euclidean data keeps component 0 at
// zero, so the Minkowski product <u,v> = -u0 v0 + u.v doubles as the ordinary
// dot product there and most formulas need no branching.
using Vec4 = std::array<double, 4>;

inline Vec4 operator+(const Vec4& u, const Vec4& v) {
    return {u[0] + v[0], u[1] + v[1], u[2] + v[2], u[3] + v[3]};
}
inline Vec4 operator-(const Vec4& u, const Vec4& v) {
    return {u[0] - v[0], u[1] - v[1], u[2] - v[2], u[3] - v[3]};
}
inline Vec4 operator*(double c, const Vec4& v) {
    return {c * v[0], c * v[1], c * v[2], c * v[3]};
}
inline Vec4& operator+=(Vec4& u, const Vec4& v) {
    u[0] += v[0]; u[1] += v[1]; u[2] += v[2]; u[3] += v[3];
    return u;
}

inline double mdot(const Vec4& u, const Vec4& v) {
    return -u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3];
}

// Vector Minkowski-orthogonal to three given vectors (generalized cross
// product with the metric folded in).
inline Vec4 mcross(const Vec4& a, const Vec4& b, const Vec4& c) {
    auto det3 = [](double a0, double a1, double a2, double b0, double b1, double b2,
                   double c0, double c1, double c2) {
        return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0);
    };
    // Cofactor expansion of det[e; a; b; c], then lower the first index.
    const double w0 = det3(a[1], a[2], a[3], b[1], b[2], b[3], c[1], c[2], c[3]);
    const double w1 = -det3(a[0], a[2], a[3], b[0], b[2], b[3], c[0], c[2], c[3]);
    const double w2 = det3(a[0], a[1], a[3], b[0], b[1], b[3], c[0], c[1], c[3]);
    const double w3 = -det3(a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]);
    return {-w0, w1, w2, w3};
}

inline Vec4 cross3(const Vec4& u, const Vec4& v) {
    return {0.0, u[2] * v[3] - u[3] * v[2], u[3] * v[1] - u[1] * v[3], u[1] * v[2] - u[2] * v[1]};
}

struct Point {
    Vec4 x{0.0, 0.0, 0.0, 0.0};
};

struct TangentVector {
    Vec4 v{0.0, 0.0, 0.0, 0.0};
};

// Simply connected model space of constant curvature a <= 0.  For a < 0 points
// live on the hyperboloid sheet <x,x> = 1/a, x0 > 0; for a = 0 they are flat
// 3-vectors in components 1..3.
struct ModelSpace {
    double a = 0.0;

    explicit ModelSpace(double curvature) : a(curvature) {
        if (!(a <= 0.0)) throw ConfigError("model space requires curvature a <= 0");
    }

    bool flat() const { return a == 0.0; }
    double s() const { return std::sqrt(-a); }

    Point origin() const {
        if (flat()) return Point{{0.0, 0.0, 0.0, 0.0}};
        return Point{{1.0 / s(), 0.0, 0.0, 0.0}};
    }
};

// sn(a, rho): solution of y'' + a y = 0 with y(0)=0, y'(0)=1.  Geodesic spheres
// of radius rho have area 4 pi sn^2 and principal curvature ct = sn'/sn.
inline double sn(double a, double rho) {
    if (a == 0.0) return rho;
    const double s = std::sqrt(-a);
    return std::sinh(s * rho) / s;
}

inline double sn_prime(double a, double rho) {
    if (a == 0.0) return 1.0;
    return std::cosh(std::sqrt(-a) * rho);
}

inline double ct(double a, double rho) { return sn_prime(a, rho) / sn(a, rho); }

// Integral of sn(a, t)^2 over [0, rho]; radial volume element of the ball.
inline double sn_squared_integral(double a, double rho) {
    if (a == 0.0) return rho * rho * rho / 3.0;
    const double s = std::sqrt(-a);
    return std::sinh(2.0 * s * rho) / (4.0 * s * s * s) - rho / (2.0 * s * s);
}

// Rescales a drifted hyperboloid point back onto the sheet by recomputing the
// time component from the spatial part.
inline Point normalize_point(const ModelSpace& m, Vec4 x) {
    if (m.flat()) {
        x[0] = 0.0;
        return Point{x};
    }
    const double s2 = x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    x[0] = std::sqrt(1.0 / (-m.a) + s2);
    return Point{x};
}

// Removes the component of v along p and scales to unit length.
inline TangentVector normalize_tangent(const ModelSpace& m, const Point& p, Vec4 v) {
    if (m.flat()) {
        v[0] = 0.0;
    } else {
        v = v - (m.a * mdot(v, p.x)) * p.x;
    }
    const double n2 = mdot(v, v);
    if (!(n2 > 0.0)) throw SingularMetricError("degenerate tangent vector");
    return TangentVector{(1.0 / std::sqrt(n2)) * v};
}

// Unit-speed geodesic from p with unit tangent v, evaluated at arc length t.
inline Point geodesic(const ModelSpace& m, const Point& p, const TangentVector& v, double t) {
    if (m.flat()) {
        Vec4 x = p.x + t * v.v;
        x[0] = 0.0;
        return Point{x};
    }
    const double s = m.s();
    Vec4 x = std::cosh(s * t) * p.x + (std::sinh(s * t) / s) * v.v;
    return normalize_point(m, x);
}

inline double distance(const ModelSpace& m, const Point& p, const Point& q) {
    const Vec4 d = p.x - q.x;
    const double c2 = mdot(d, d);  // squared chord in the embedding
    if (m.flat()) return std::sqrt(std::max(c2, 0.0));
    const double u = std::max((-m.a) * c2 / 2.0, 0.0);
    return std::asinh(std::sqrt(u * (2.0 + u))) / m.s();
}

// Unit tangent at p pointing toward q.  Requires distinct points.
inline TangentVector direction(const ModelSpace& m, const Point& p, const Point& q) {
    if (m.flat()) {
        return normalize_tangent(m, p, q.x - p.x);
    }
    const double d = distance(m, p, q);
    const double s = m.s();
    if (d < 1e-14) {
        // Degenerate; fall back to the chord projected to the tangent space.
        return normalize_tangent(m, p, q.x - p.x);
    }
    Vec4 v = (s / std::sinh(s * d)) * (q.x - std::cosh(s * d) * p.x);
    return normalize_tangent(m, p, v);
}

// Orthonormal tangent frame at p, Gram-Schmidt applied to seed vectors (the
// canonical spatial axes by default).
inline std::array<Vec4, 3> orthonormal_frame(const ModelSpace& m, const Point& p,
                                             const std::array<Vec4, 3>& seeds = {
                                                 Vec4{0, 1, 0, 0}, Vec4{0, 0, 1, 0}, Vec4{0, 0, 0, 1}}) {
    std::array<Vec4, 3> frame{};
    int have = 0;
    for (const Vec4& seed : seeds) {
        Vec4 v = seed;
        if (m.flat()) {
            v[0] = 0.0;
        } else {
            v = v - (m.a * mdot(v, p.x)) * p.x;
        }
        for (int k = 0; k < have; ++k) v = v - mdot(v, frame[k]) * frame[k];
        const double n2 = mdot(v, v);
        if (n2 < 1e-20) throw SingularMetricError("frame seeds are linearly dependent");
        frame[have++] = (1.0 / std::sqrt(n2)) * v;
    }
    return frame;
}

// Totally geodesic disc: center, orthonormal tangent pair spanning its plane,
// and intrinsic radius.
struct DiscBody {
    Point center;
    Vec4 u1{}, u2{};
    double radius = 0.0;
};

inline DiscBody make_disc(const ModelSpace& m, const Point& center, const Vec4& seed1,
                          const Vec4& seed2, double radius) {
    if (!(radius > 0.0)) throw ConfigError("disc radius must be positive");
    Vec4 u1 = normalize_tangent(m, center, seed1).v;
    Vec4 u2raw = seed2;
    if (m.flat()) {
        u2raw[0] = 0.0;
    } else {
        u2raw = u2raw - (m.a * mdot(u2raw, center.x)) * center.x;
    }
    u2raw = u2raw - mdot(u2raw, u1) * u1;
    const double n2 = mdot(u2raw, u2raw);
    if (n2 < 1e-20) throw SingularMetricError("disc seed vectors are collinear");
    return DiscBody{center, u1, (1.0 / std::sqrt(n2)) * u2raw, radius};
}

// Unit normal of the totally geodesic plane carrying the disc.  For a < 0 this
// is the spacelike 4-vector Minkowski-orthogonal to span(center, u1, u2).
inline Vec4 disc_plane_normal(const ModelSpace& m, const DiscBody& d) {
    Vec4 n = m.flat() ? cross3(d.u1, d.u2) : mcross(d.center.x, d.u1, d.u2);
    const double n2 = mdot(n, n);
    if (!(n2 > 0.0)) throw SingularMetricError("degenerate disc plane");
    return (1.0 / std::sqrt(n2)) * n;
}

// Exact distance from p to the solid disc.  Projects to the disc plane; if the
// foot lands inside the disc the plane distance is the answer, otherwise the
// nearest point sits on the rim along the center-to-foot geodesic.
inline double dist_to_disc(const ModelSpace& m, const DiscBody& d, const Point& p) {
    const Vec4 n = disc_plane_normal(m, d);
    if (m.flat()) {
        const Vec4 rel = p.x - d.center.x;
        const double h = mdot(rel, n);
        const Vec4 q = rel - h * n;
        const double rho = std::sqrt(std::max(mdot(q, q), 0.0));
        if (rho <= d.radius) return std::abs(h);
        const double over = rho - d.radius;
        return std::sqrt(h * h + over * over);
    }
    const double s = m.s();
    const double delta = mdot(p.x, n);
    Vec4 q = p.x - delta * n;
    if (q[0] < 0.0) q = -1.0 * q;
    const double q2 = mdot(q, q);  // timelike: q2 < 0
    Point foot{(1.0 / (s * std::sqrt(-q2))) * q};
    const double dcf = distance(m, d.center, foot);
    if (dcf <= d.radius) {
        return std::asinh(s * std::abs(delta)) / s;
    }
    const TangentVector w = direction(m, d.center, foot);
    const Point rim = geodesic(m, d.center, w, d.radius);
    return distance(m, p, rim);
}

}  // namespace hmcf
