#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "hmcf/errors.hpp"

namespace hmcf {

// Finite-difference weights on arbitrary nodes (Fornberg).  Fills w[d][k] with
// the weight of node x[k] for the d-th derivative at x0, d <= maxd.
inline void fd_weights(double x0, const double* x, int n, int maxd,
                       std::array<std::array<double, 7>, 3>& w) {
    double c1 = 1.0;
    double c4 = x[0] - x0;
    for (auto& row : w) row.fill(0.0);
    w[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, maxd);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    w[k][i] = c1 * (k * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                w[k][j] = ((x[i] - x0) * w[k][j] - k * w[k - 1][j]) / c3;
            }
            w[0][j] = (x[i] - x0) * w[0][j] / c3;
        }
        c1 = c2;
    }
}

inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    constexpr double pi = std::numbers::pi;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pd = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pd = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / pd;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        // z is the (i+1)-th root from the top; store ascending.
        x[i] = -z;
        x[n - 1 - i] = z;
        const double wi = 2.0 / ((1.0 - z * z) * pd * pd);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
}

// Latitude-longitude grid covering the unit sphere of directions.  Colatitude
// nodes are arccos of Gauss-Legendre points, so the poles are excluded, the
// spacing is nearly uniform, and sums with the stored row weights integrate
// over the sphere exactly for the polynomial degrees the rule supports.
// Differentiation continues across the poles via the antipodal identity
// f(-theta, phi) = f(theta, phi + pi), which needs nphi even.
struct SphereGrid {
    static constexpr int kGhost = 3;
    static constexpr int kStencil = 7;

    int ntheta = 0;
    int nphi = 0;
    std::vector<double> theta;        // ascending, in (0, pi)
    std::vector<double> wq;           // sum_i wq[i] f(theta_i) ~ int f sin(theta) dtheta
    std::vector<double> sin_t, cos_t;
    std::vector<double> phi, sin_p, cos_p;
    double wphi = 0.0;                // 2 pi / nphi
    std::vector<double> chart_weight; // wq / sin(theta) * wphi, per row
    double dtheta_min = 0.0;

    std::vector<double> theta_ext;    // ntheta + 2*kGhost values
    std::vector<std::array<double, 7>> d1t, d2t;  // per-row stencils over theta_ext
    std::array<double, 7> d1p{}, d2p{};           // uniform periodic stencils

    std::vector<int> filter_mmax;     // per-row azimuthal mode cutoff
    std::vector<double> four_cos, four_sin;  // (nphi/2+1) x nphi tables

    int ext_row(int i) const { return i + kGhost; }

    // Maps an extended row index to (physical row, phi shift in columns).
    void wrap_row(int i, int& row, int& shift) const {
        if (i < 0) {
            row = -1 - i;
            shift = nphi / 2;
        } else if (i >= ntheta) {
            row = 2 * ntheta - 1 - i;
            shift = nphi / 2;
        } else {
            row = i;
            shift = 0;
        }
    }
};

inline std::shared_ptr<const SphereGrid> make_grid(int ntheta, int nphi) {
    if (ntheta < 16) throw ConfigError("grid needs at least 16 colatitude rows");
    if (nphi < 32 || nphi % 2 != 0) throw ConfigError("grid needs an even azimuthal count >= 32");

    static std::mutex cache_mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const SphereGrid>> cache;
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find({ntheta, nphi});
        if (it != cache.end()) return it->second;
    }

    auto g = std::make_shared<SphereGrid>();
    g->ntheta = ntheta;
    g->nphi = nphi;
    constexpr double pi = std::numbers::pi;

    std::vector<double> x, w;
    gauss_legendre(ntheta, x, w);
    g->theta.resize(ntheta);
    g->wq.resize(ntheta);
    for (int i = 0; i < ntheta; ++i) {
        // x ascending in (-1,1) maps to theta descending; flip to ascend.
        g->theta[i] = std::acos(x[ntheta - 1 - i]);
        g->wq[i] = w[ntheta - 1 - i];
    }
    g->sin_t.resize(ntheta);
    g->cos_t.resize(ntheta);
    g->chart_weight.resize(ntheta);
    g->wphi = 2.0 * pi / nphi;
    for (int i = 0; i < ntheta; ++i) {
        g->sin_t[i] = std::sin(g->theta[i]);
        g->cos_t[i] = std::cos(g->theta[i]);
        g->chart_weight[i] = g->wq[i] / g->sin_t[i] * g->wphi;
    }
    g->phi.resize(nphi);
    g->sin_p.resize(nphi);
    g->cos_p.resize(nphi);
    for (int j = 0; j < nphi; ++j) {
        g->phi[j] = g->wphi * j;
        g->sin_p[j] = std::sin(g->phi[j]);
        g->cos_p[j] = std::cos(g->phi[j]);
    }

    g->dtheta_min = 2.0 * pi;
    for (int i = 0; i + 1 < ntheta; ++i) {
        g->dtheta_min = std::min(g->dtheta_min, g->theta[i + 1] - g->theta[i]);
    }
    g->dtheta_min = std::min({g->dtheta_min, 2.0 * g->theta[0], 2.0 * (pi - g->theta[ntheta - 1])});

    const int ghost = SphereGrid::kGhost;
    g->theta_ext.resize(ntheta + 2 * ghost);
    for (int i = -ghost; i < ntheta + ghost; ++i) {
        double t;
        if (i < 0) {
            t = -g->theta[-1 - i];
        } else if (i >= ntheta) {
            t = 2.0 * pi - g->theta[2 * ntheta - 1 - i];
        } else {
            t = g->theta[i];
        }
        g->theta_ext[i + ghost] = t;
    }

    g->d1t.resize(ntheta);
    g->d2t.resize(ntheta);
    for (int i = 0; i < ntheta; ++i) {
        std::array<std::array<double, 7>, 3> wk{};
        fd_weights(g->theta[i], &g->theta_ext[i - 3 + ghost], 7, 2, wk);
        g->d1t[i] = wk[1];
        g->d2t[i] = wk[2];
    }

    {
        const double h = g->wphi;
        const std::array<double, 7> c1 = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
        const std::array<double, 7> c2 = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
        for (int k = 0; k < 7; ++k) {
            g->d1p[k] = c1[k] / h;
            g->d2p[k] = c2[k] / (h * h);
        }
    }

    // Azimuthal cutoff keeping the resolved wavelength near a row no finer
    // than the colatitude spacing; protects explicit stepping near the poles.
    g->filter_mmax.resize(ntheta);
    for (int i = 0; i < ntheta; ++i) {
        const int m = static_cast<int>(std::floor(pi * g->sin_t[i] / g->dtheta_min));
        g->filter_mmax[i] = std::clamp(m, 4, nphi / 2);
    }
    const int nmodes = nphi / 2 + 1;
    g->four_cos.resize(static_cast<size_t>(nmodes) * nphi);
    g->four_sin.resize(static_cast<size_t>(nmodes) * nphi);
    for (int m = 0; m < nmodes; ++m) {
        for (int j = 0; j < nphi; ++j) {
            const double ang = 2.0 * pi * m * j / nphi;
            g->four_cos[static_cast<size_t>(m) * nphi + j] = std::cos(ang);
            g->four_sin[static_cast<size_t>(m) * nphi + j] = std::sin(ang);
        }
    }

    std::lock_guard<std::mutex> lock(cache_mutex);
    auto [it, inserted] = cache.try_emplace({ntheta, nphi}, std::move(g));
    return it->second;
}

// Row-major scalar field on a SphereGrid.
struct Grid2 {
    int nt = 0, np = 0;
    std::vector<double> v;

    Grid2() = default;
    Grid2(int ntheta, int nphi) : nt(ntheta), np(nphi), v(static_cast<size_t>(ntheta) * nphi, 0.0) {}

    double& operator()(int i, int j) { return v[static_cast<size_t>(i) * np + j]; }
    double operator()(int i, int j) const { return v[static_cast<size_t>(i) * np + j]; }
};

// Value with pole wraparound in theta and periodic phi.
inline double grid_value(const SphereGrid& g, const Grid2& f, int i, int j) {
    int row, shift;
    g.wrap_row(i, row, shift);
    int col = (j + shift) % g.nphi;
    if (col < 0) col += g.nphi;
    return f(row, col);
}

// Removes azimuthal modes above the per-row cutoff.  Smooth fields on the
// sphere carry almost no energy there, so this is a stability device, not a
// model change.
inline void polar_filter(const SphereGrid& g, Grid2& f) {
    const int np = g.nphi;
    const int nmodes = np / 2 + 1;
    std::vector<double> am(nmodes), bm(nmodes), out(np);
    for (int i = 0; i < g.ntheta; ++i) {
        const int mmax = g.filter_mmax[i];
        if (mmax >= np / 2) continue;
        double* row = &f.v[static_cast<size_t>(i) * np];
        for (int m = 0; m <= mmax; ++m) {
            const double* cs = &g.four_cos[static_cast<size_t>(m) * np];
            const double* sp = &g.four_sin[static_cast<size_t>(m) * np];
            double a = 0.0, b = 0.0;
            for (int j = 0; j < np; ++j) {
                a += row[j] * cs[j];
                b += row[j] * sp[j];
            }
            am[m] = a;
            bm[m] = b;
        }
        for (int j = 0; j < np; ++j) {
            double acc = am[0] / np;
            for (int m = 1; m <= mmax; ++m) {
                const double scale = (2.0 / np);
                acc += scale * (am[m] * g.four_cos[static_cast<size_t>(m) * np + j] +
                                bm[m] * g.four_sin[static_cast<size_t>(m) * np + j]);
            }
            out[j] = acc;
        }
        std::copy(out.begin(), out.end(), row);
    }
}

// Lagrange basis values and first derivatives at x over nodes t[0..k).
inline void lagrange_basis(const double* t, int k, double x, double* val, double* der) {
    for (int i = 0; i < k; ++i) {
        double p = 1.0;
        for (int j = 0; j < k; ++j) {
            if (j != i) p *= (x - t[j]) / (t[i] - t[j]);
        }
        val[i] = p;
        if (der) {
            double d = 0.0;
            for (int m = 0; m < k; ++m) {
                if (m == i) continue;
                double q = 1.0 / (t[i] - t[m]);
                for (int j = 0; j < k; ++j) {
                    if (j != i && j != m) q *= (x - t[j]) / (t[i] - t[j]);
                }
                d += q;
            }
            der[i] = d;
        }
    }
}

}  // namespace hmcf
