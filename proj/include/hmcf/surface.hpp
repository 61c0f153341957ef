#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <utility>
#include <vector>

#include "hmcf/ambient.hpp"
#include "hmcf/closedform.hpp"
#include "hmcf/grid.hpp"
#include "hmcf/threading.hpp"

namespace hmcf {

// Closed convex surface stored as a radial graph: distance r(theta, phi) from
// a fixed center along the geodesic in direction
//   u = sin(theta) cos(phi) E1 + sin(theta) sin(phi) E2 + cos(theta) E3.
struct RadialSurface {
    ModelSpace space{0.0};
    Point center;
    std::array<Vec4, 3> frame{};
    std::shared_ptr<const SphereGrid> grid;
    Grid2 r;

    Vec4 direction(int i, int j) const {
        const SphereGrid& g = *grid;
        const double st = g.sin_t[i], ctn = g.cos_t[i];
        const double cp = g.cos_p[j], sp = g.sin_p[j];
        return (st * cp) * frame[0] + (st * sp) * frame[1] + ctn * frame[2];
    }

    Vec4 direction_at(double theta, double phi) const {
        const double st = std::sin(theta), ctn = std::cos(theta);
        return (st * std::cos(phi)) * frame[0] + (st * std::sin(phi)) * frame[1] + ctn * frame[2];
    }
};

using VecField = std::vector<Vec4>;  // row-major, one entry per grid node

struct SurfaceIntegrals {
    double area = 0.0;
    double total_mean_curvature = 0.0;
    double total_gauss_curvature = 0.0;
    double volume = 0.0;
};

struct CurvatureField {
    int nt = 0, np = 0;
    VecField pos;  // embedded node positions
    VecField nu;   // outward unit normals
    Grid2 g11, g12, g22;
    Grid2 b11, b12, b22;
    Grid2 k1, k2, H, G;
    Grid2 W;             // graph factor 1 / <nu, radial tangent>
    Grid2 area_density;  // sqrt(det g), per (theta, phi) chart area

    double min_k1() const { return *std::min_element(k1.v.begin(), k1.v.end()); }
};

inline double gauss_bonnet_residual(const SurfaceIntegrals& si, double a) {
    constexpr double four_pi = 4.0 * std::numbers::pi;
    return std::abs(si.total_gauss_curvature - (four_pi - a * si.area));
}

namespace detail {

// Embedded position of one node.
inline Vec4 embed_node(const ModelSpace& m, const Point& c, const Vec4& u, double r) {
    if (m.flat()) {
        Vec4 x = c.x + r * u;
        x[0] = 0.0;
        return x;
    }
    const double s = m.s();
    return std::cosh(s * r) * c.x + (std::sinh(s * r) / s) * u;
}

// Unit tangent of the radial geodesic at distance r (the "outward" direction
// the graph is measured along).
inline Vec4 radial_tangent(const ModelSpace& m, const Point& c, const Vec4& u, double r) {
    if (m.flat()) return u;
    const double s = m.s();
    return (s * std::sinh(s * r)) * c.x + std::cosh(s * r) * u;
}

inline const Vec4& vf_at(const SphereGrid& g, const VecField& f, int i, int j) {
    int row, shift;
    g.wrap_row(i, row, shift);
    int col = (j + shift) % g.nphi;
    if (col < 0) col += g.nphi;
    return f[static_cast<size_t>(row) * g.nphi + col];
}

}  // namespace detail

inline VecField embed(const RadialSurface& s) {
    const SphereGrid& g = *s.grid;
    VecField x(static_cast<size_t>(g.ntheta) * g.nphi);
    parallel_for(g.ntheta, [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            for (int j = 0; j < g.nphi; ++j) {
                const double r = s.r(i, j);
                x[static_cast<size_t>(i) * g.nphi + j] =
                    detail::embed_node(s.space, s.center, s.direction(i, j), r);
            }
        }
    });
    return x;
}

// First and second fundamental forms, principal curvatures, normals.  Second
// derivatives of the embedding are taken in the flat ambient chart; for the
// hyperboloid the correction is parallel to the position and drops out of
// <d2 X, nu> because nu is tangent to the sheet.
inline CurvatureField fundamental_forms(const RadialSurface& s) {
    const SphereGrid& g = *s.grid;
    const int nt = g.ntheta, np = g.nphi;
    for (double r : s.r.v) {
        if (!(r > 0.0)) throw NegativeRadiusError("radial graph requires positive radii");
    }

    CurvatureField f;
    f.nt = nt;
    f.np = np;
    f.pos = embed(s);
    f.nu.resize(f.pos.size());
    for (Grid2* grid : {&f.g11, &f.g12, &f.g22, &f.b11, &f.b12, &f.b22, &f.k1, &f.k2,
                        &f.H, &f.G, &f.W, &f.area_density}) {
        *grid = Grid2(nt, np);
    }

    // phi derivatives first: they wrap like plain fields, so the theta
    // stencils below can be applied to them directly for the mixed term.
    VecField xp(f.pos.size());
    parallel_for(nt, [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            for (int j = 0; j < np; ++j) {
                Vec4 acc{0, 0, 0, 0};
                for (int k = 0; k < 7; ++k) {
                    int col = (j - 3 + k) % np;
                    if (col < 0) col += np;
                    acc += g.d1p[k] * f.pos[static_cast<size_t>(i) * np + col];
                }
                xp[static_cast<size_t>(i) * np + j] = acc;
            }
        }
    });

    std::vector<char> bad(nt, 0);
    parallel_for(nt, [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            for (int j = 0; j < np; ++j) {
                Vec4 xt{0, 0, 0, 0}, xtt{0, 0, 0, 0}, xtp{0, 0, 0, 0}, xpp{0, 0, 0, 0};
                for (int k = 0; k < 7; ++k) {
                    const Vec4& row_val = detail::vf_at(g, f.pos, i - 3 + k, j);
                    xt += g.d1t[i][k] * row_val;
                    xtt += g.d2t[i][k] * row_val;
                    xtp += g.d1t[i][k] * detail::vf_at(g, xp, i - 3 + k, j);
                }
                for (int k = 0; k < 7; ++k) {
                    int col = (j - 3 + k) % np;
                    if (col < 0) col += np;
                    xpp += g.d2p[k] * f.pos[static_cast<size_t>(i) * np + col];
                }

                const size_t idx = static_cast<size_t>(i) * np + j;
                const Vec4& x = f.pos[idx];
                const Vec4& xph = xp[idx];

                const double m11 = mdot(xt, xt);
                const double m12 = mdot(xt, xph);
                const double m22 = mdot(xph, xph);
                const double det = m11 * m22 - m12 * m12;
                if (!(det > 0.0) || !std::isfinite(det)) {
                    bad[i] = 1;
                    continue;
                }

                Vec4 n = s.space.flat() ? cross3(xt, xph) : mcross(x, xt, xph);
                const double n2 = mdot(n, n);
                if (!(n2 > 0.0)) {
                    bad[i] = 1;
                    continue;
                }
                n = (1.0 / std::sqrt(n2)) * n;
                const Vec4 t = detail::radial_tangent(s.space, s.center, s.direction(i, j), s.r(i, j));
                double w = mdot(n, t);
                if (w < 0.0) {
                    n = -1.0 * n;
                    w = -w;
                }
                if (!(w > 1e-12)) {
                    bad[i] = 1;
                    continue;
                }

                const double c11 = -mdot(xtt, n);
                const double c12 = -mdot(xtp, n);
                const double c22 = -mdot(xpp, n);

                const double hh = (m22 * c11 - 2.0 * m12 * c12 + m11 * c22) / det;
                const double gg = (c11 * c22 - c12 * c12) / det;
                const double disc = std::max(hh * hh - 4.0 * gg, 0.0);
                const double root = std::sqrt(disc);

                f.nu[idx] = n;
                f.g11(i, j) = m11;
                f.g12(i, j) = m12;
                f.g22(i, j) = m22;
                f.b11(i, j) = c11;
                f.b12(i, j) = c12;
                f.b22(i, j) = c22;
                f.H(i, j) = hh;
                f.G(i, j) = gg;
                f.k1(i, j) = 0.5 * (hh - root);
                f.k2(i, j) = 0.5 * (hh + root);
                f.W(i, j) = 1.0 / w;
                f.area_density(i, j) = std::sqrt(det);
            }
        }
    });
    for (int i = 0; i < nt; ++i) {
        if (bad[i]) throw SingularMetricError("degenerate radial graph (metric or orientation)");
    }
    return f;
}

inline void require_convex(const CurvatureField& f, const char* what = "surface") {
    if (!(f.min_k1() > 0.0)) {
        throw NonConvexError(std::string(what) + ": nonpositive principal curvature");
    }
}

// Quadrature of the stored densities.  Row sums run serially inside each row
// and rows are combined in index order, so results do not depend on the
// worker count.
inline SurfaceIntegrals integrals(const RadialSurface& s, const CurvatureField& f) {
    const SphereGrid& g = *s.grid;
    const int nt = g.ntheta, np = g.nphi;
    std::vector<double> row_area(nt), row_m(nt), row_g(nt), row_vol(nt);
    parallel_for(nt, [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            double sa = 0.0, sm = 0.0, sg = 0.0, sv = 0.0;
            for (int j = 0; j < np; ++j) {
                const double da = f.area_density(i, j);
                sa += da;
                sm += f.H(i, j) * da;
                sg += f.G(i, j) * da;
                sv += sn_squared_integral(s.space.a, s.r(i, j));
            }
            row_area[i] = sa * g.chart_weight[i];
            row_m[i] = sm * g.chart_weight[i];
            row_g[i] = sg * g.chart_weight[i];
            row_vol[i] = sv * g.wq[i] * g.wphi;
        }
    });
    SurfaceIntegrals si;
    for (int i = 0; i < nt; ++i) {
        si.area += row_area[i];
        si.total_mean_curvature += row_m[i];
        si.total_gauss_curvature += row_g[i];
        si.volume += row_vol[i];
    }
    return si;
}

inline SurfaceIntegrals integrals(const RadialSurface& s) { return integrals(s, fundamental_forms(s)); }

struct SphericalMode {
    int l = 0;
    int m = 0;
    double amplitude = 0.0;
};

// Real orthonormal spherical harmonic: m > 0 pairs with cos(m phi), m < 0 with
// sin(|m| phi).  Normalized so the amplitude is the L2 coefficient, keeping
// shapes of different degree on a comparable scale.
inline double mode_shape(const SphericalMode& mode, double theta, double phi) {
    const double x = std::cos(theta);
    const int mm = std::abs(mode.m);
    const double p = (mm == 0) ? std::legendre(mode.l, x) : std::assoc_legendre(mode.l, mm, x);
    double norm = std::sqrt((2.0 * mode.l + 1.0) / (4.0 * std::numbers::pi));
    for (int k = mode.l - mm + 1; k <= mode.l + mm; ++k) norm /= std::sqrt(double(k));
    if (mode.m == 0) return norm * p;
    norm *= std::sqrt(2.0);
    return (mode.m > 0) ? norm * p * std::cos(mm * phi) : norm * p * std::sin(mm * phi);
}

inline RadialSurface sphere_surface(const ModelSpace& space, double rho, int nt, int np,
                                    const Point* center = nullptr,
                                    const std::array<Vec4, 3>* frame = nullptr) {
    if (!(rho > 0.0)) throw NegativeRadiusError("sphere radius must be positive");
    RadialSurface s{space, center ? *center : space.origin(), {}, make_grid(nt, np), Grid2(nt, np)};
    s.frame = frame ? *frame : orthonormal_frame(space, s.center);
    std::fill(s.r.v.begin(), s.r.v.end(), rho);
    return s;
}

// rho0 plus a sum of harmonic bumps; validates positivity and convexity.
inline RadialSurface perturbed_sphere(const ModelSpace& space, double rho0,
                                      const std::vector<SphericalMode>& modes, int nt, int np,
                                      const Point* center = nullptr,
                                      const std::array<Vec4, 3>* frame = nullptr) {
    RadialSurface s = sphere_surface(space, rho0, nt, np, center, frame);
    const SphereGrid& g = *s.grid;
    for (int i = 0; i < g.ntheta; ++i) {
        for (int j = 0; j < g.nphi; ++j) {
            double r = rho0;
            for (const auto& mode : modes) r += mode.amplitude * mode_shape(mode, g.theta[i], g.phi[j]);
            if (!(r > 0.0)) throw NonConvexError("perturbation drives the radius nonpositive");
            s.r(i, j) = r;
        }
    }
    require_convex(fundamental_forms(s), "perturbed sphere");
    return s;
}

// Interpolates the radii onto a new grid: trigonometric interpolation in phi,
// then 8-node Lagrange interpolation in theta with pole continuation.
inline RadialSurface resample(const RadialSurface& s, int nt2, int np2) {
    const SphereGrid& g = *s.grid;
    if (nt2 == g.ntheta && np2 == g.nphi) {
        return s;  // exact copy; shapes and values are preserved bit for bit
    }
    auto grid2 = make_grid(nt2, np2);
    const int nt = g.ntheta, np = g.nphi;

    // Stage 1: each existing row to the new phi nodes via its Fourier series.
    Grid2 stage(nt, np2);
    const int half = np / 2;
    std::vector<double> am(half + 1), bm(half + 1);
    for (int i = 0; i < nt; ++i) {
        for (int m = 0; m <= half; ++m) {
            double a = 0.0, b = 0.0;
            for (int j = 0; j < np; ++j) {
                a += s.r(i, j) * g.four_cos[static_cast<size_t>(m) * np + j];
                b += s.r(i, j) * g.four_sin[static_cast<size_t>(m) * np + j];
            }
            am[m] = a;
            bm[m] = b;
        }
        for (int j2 = 0; j2 < np2; ++j2) {
            const double ph = grid2->phi[j2];
            double acc = am[0] / np;
            for (int m = 1; m < half; ++m) {
                acc += (2.0 / np) * (am[m] * std::cos(m * ph) + bm[m] * std::sin(m * ph));
            }
            acc += (am[half] / np) * std::cos(half * ph);
            stage(i, j2) = acc;
        }
    }

    // Stage 2: down each new column, interpolate in theta using extended nodes;
    // ghost rows read the antipodal column of the stage grid.
    auto stage_at = [&](int i, int j2) {
        int row = i, shift = 0;
        if (i < 0) {
            row = -1 - i;
            shift = np2 / 2;
        } else if (i >= nt) {
            row = 2 * nt - 1 - i;
            shift = np2 / 2;
        }
        return stage(row, (j2 + shift) % np2);
    };

    RadialSurface out{s.space, s.center, s.frame, grid2, Grid2(nt2, np2)};
    constexpr int K = 8;
    for (int i2 = 0; i2 < nt2; ++i2) {
        const double t = grid2->theta[i2];
        int lo = static_cast<int>(std::lower_bound(g.theta.begin(), g.theta.end(), t) - g.theta.begin());
        int start = std::clamp(lo - K / 2, -SphereGrid::kGhost, nt + SphereGrid::kGhost - K);
        double wts[K];
        lagrange_basis(&g.theta_ext[start + SphereGrid::kGhost], K, t, wts, nullptr);
        for (int j2 = 0; j2 < np2; ++j2) {
            double acc = 0.0;
            for (int k = 0; k < K; ++k) acc += wts[k] * stage_at(start + k, j2);
            out.r(i2, j2) = acc;
        }
    }
    for (double r : out.r.v) {
        if (!(r > 0.0)) throw NegativeRadiusError("resampled radii must stay positive");
    }
    return out;
}

}  // namespace hmcf
