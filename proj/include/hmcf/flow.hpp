#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "hmcf/closedform.hpp"
#include "hmcf/surface.hpp"

namespace hmcf {

// Inward normal flow with speed G/H, the harmonic mean of the principal
// curvatures.  In graph form the radii obey dr/dt = -W * G/H, where W is the
// graph factor from surface.hpp.

struct FlowConfig {
    double dt_init = 1e-3;
    double rel_tol = 1e-6;        // step-doubling acceptance threshold on radii
    double area_stop_frac = 0.05; // stop once area falls to this fraction of start
    long max_steps = 100000;
    double lambda_phi = 2.0;      // deficit coefficient recorded along the run
    double fixed_dt = 0.0;        // > 0: constant step size, adaptivity off
    double dt_max = 0.0;          // > 0: extra ceiling on the step size
    bool record_surfaces = false; // keep every accepted surface, not just the last
};

enum class FlowTermination { AreaStop, MaxSteps, StepCollapse };

struct FlowSample {
    double t = 0.0;
    SurfaceIntegrals integrals;
    double phi = 0.0;         // isoperimetric deficit at lambda_phi
    double kappa_min = 0.0;
    double F_max = 0.0;       // largest normal speed G/H over the surface
    double gf_integral = 0.0; // integral of (G - a) G/H, drives d/dt of total mean curvature
    double dt_used = 0.0;     // step that produced this sample; 0 for the start
};

struct FlowTrace {
    std::vector<FlowSample> samples;
    FlowTermination termination = FlowTermination::AreaStop;
    std::optional<RadialSurface> final_surface;
    std::vector<RadialSurface> surfaces; // parallel to samples when recorded
};

namespace detail {

inline FlowSample make_sample(double t, const RadialSurface& s, const CurvatureField& f,
                              double lambda, double dt_used) {
    FlowSample smp;
    smp.t = t;
    smp.integrals = integrals(s, f);
    smp.phi = phi(smp.integrals.total_mean_curvature, smp.integrals.area, s.space.a, lambda);
    smp.kappa_min = f.min_k1();
    smp.dt_used = dt_used;
    const SphereGrid& g = *s.grid;
    double fmax = 0.0, gf = 0.0;
    for (int i = 0; i < g.ntheta; ++i) {
        for (int j = 0; j < g.nphi; ++j) {
            const size_t n = static_cast<size_t>(i) * g.nphi + j;
            const double F = f.G.v[n] / f.H.v[n];
            fmax = std::max(fmax, F);
            gf += g.chart_weight[i] * f.area_density.v[n] * (f.G.v[n] - s.space.a) * F;
        }
    }
    smp.F_max = fmax;
    smp.gf_integral = gf;
    return smp;
}

// Parabolic step ceiling: the flow diffuses with coefficient at most
// max(k1^2, k2^2)/H^2 (the curvature gradients of G/H), amplified by the graph
// factor.  The shortest physical grid spacing after the polar filter is about
// dtheta_min times the smallest radius.
inline double stable_dt_cap(const RadialSurface& s, const CurvatureField& f) {
    const double rmin = *std::min_element(s.r.v.begin(), s.r.v.end());
    double rate = 0.0;
    for (size_t n = 0; n < f.W.v.size(); ++n) {
        const double kmax = std::max(f.k1.v[n] * f.k1.v[n], f.k2.v[n] * f.k2.v[n]);
        rate = std::max(rate, f.W.v[n] * kmax / (f.H.v[n] * f.H.v[n]));
    }
    const double h = s.grid->dtheta_min * rmin;
    return 0.5 * h * h / rate;
}

}  // namespace detail

// Graph velocity W * G/H with the polar filter applied, so that high azimuthal
// modes near the poles cannot feed back into the time stepping.
inline Grid2 flow_velocity(const RadialSurface& s, const CurvatureField& f) {
    const SphereGrid& g = *s.grid;
    Grid2 vel(g.ntheta, g.nphi);
    for (size_t n = 0; n < vel.v.size(); ++n) {
        vel.v[n] = f.W.v[n] * f.G.v[n] / f.H.v[n];
    }
    polar_filter(g, vel);
    return vel;
}

// One explicit midpoint step.  Throws if either stage leaves the convex/graph
// regime; the caller treats that as a rejected step.
inline RadialSurface flow_step(const RadialSurface& s, double dt) {
    CurvatureField f1 = fundamental_forms(s);
    require_convex(f1, "flow step");
    const Grid2 v1 = flow_velocity(s, f1);

    RadialSurface mid = s;
    for (size_t n = 0; n < mid.r.v.size(); ++n) {
        mid.r.v[n] -= 0.5 * dt * v1.v[n];
        if (!(mid.r.v[n] > 0.0)) throw NegativeRadiusError("flow step left the graph regime");
    }
    CurvatureField f2 = fundamental_forms(mid);
    require_convex(f2, "flow step");
    const Grid2 v2 = flow_velocity(mid, f2);

    RadialSurface out = s;
    for (size_t n = 0; n < out.r.v.size(); ++n) {
        out.r.v[n] -= dt * v2.v[n];
        if (!(out.r.v[n] > 0.0)) throw NegativeRadiusError("flow step left the graph regime");
    }
    return out;
}

inline FlowTrace run_flow(const RadialSurface& initial, const FlowConfig& cfg) {
    if (!(cfg.dt_init > 0.0) || !(cfg.rel_tol > 0.0) || cfg.max_steps < 1 ||
        !(cfg.area_stop_frac > 0.0 && cfg.area_stop_frac < 1.0)) {
        throw ConfigError("flow config: need dt_init > 0, rel_tol > 0, max_steps >= 1, "
                          "area_stop_frac in (0, 1)");
    }
    const bool fixed = cfg.fixed_dt > 0.0;
    const double dt_floor = 1e-12 * (fixed ? cfg.fixed_dt : cfg.dt_init);

    FlowTrace trace;
    RadialSurface s = initial;
    CurvatureField f = fundamental_forms(s);
    require_convex(f, "flow start");
    trace.samples.push_back(detail::make_sample(0.0, s, f, cfg.lambda_phi, 0.0));
    if (cfg.record_surfaces) trace.surfaces.push_back(s);

    const double area0 = trace.samples.front().integrals.area;
    double t = 0.0;
    double dt = fixed ? cfg.fixed_dt : cfg.dt_init;
    long steps = 0;

    while (true) {
        if (trace.samples.back().integrals.area <= cfg.area_stop_frac * area0) {
            trace.termination = FlowTermination::AreaStop;
            break;
        }
        if (steps >= cfg.max_steps) {
            trace.termination = FlowTermination::MaxSteps;
            break;
        }

        double dt_try = fixed ? cfg.fixed_dt : std::min(dt, detail::stable_dt_cap(s, f));
        if (cfg.dt_max > 0.0) dt_try = std::min(dt_try, cfg.dt_max);

        bool accepted = false, collapsed = false;
        while (!accepted) {
            if (dt_try < dt_floor) {
                collapsed = true;
                break;
            }
            try {
                if (fixed) {
                    s = flow_step(s, dt_try);
                    accepted = true;
                    break;
                }
                const RadialSurface full = flow_step(s, dt_try);
                const RadialSurface half = flow_step(flow_step(s, 0.5 * dt_try), 0.5 * dt_try);

                double err = 0.0, scale = 0.0;
                for (size_t n = 0; n < full.r.v.size(); ++n) {
                    err = std::max(err, std::abs(full.r.v[n] - half.r.v[n]));
                    scale = std::max(scale, std::abs(s.r.v[n]));
                }
                err /= scale;
                const double factor = 0.9 * std::cbrt(cfg.rel_tol / std::max(err, 1e-300));
                if (err <= cfg.rel_tol) {
                    s = half;
                    accepted = true;
                    dt = dt_try * std::clamp(factor, 1.0, 2.0);
                } else {
                    dt_try *= std::clamp(factor, 0.25, 0.9);
                }
            } catch (const Error&) {
                if (fixed) throw; // constant-step runs surface their failures
                dt_try *= 0.5;
            }
        }
        if (collapsed) {
            trace.termination = FlowTermination::StepCollapse;
            break;
        }

        f = fundamental_forms(s);
        require_convex(f, "flow sample");
        t += dt_try;
        ++steps;
        trace.samples.push_back(detail::make_sample(t, s, f, cfg.lambda_phi, dt_try));
        if (cfg.record_surfaces) trace.surfaces.push_back(s);
    }

    trace.final_surface = s;
    return trace;
}

// Continues the exact area law dA/dt = -Gtot from the last recorded state; for
// shrinking surfaces Gtot tends to the round value, so this lands close to the
// true extinction time.
inline double estimate_collapse_time(const FlowTrace& trace) {
    if (trace.samples.empty()) throw ConfigError("collapse estimate needs a nonempty trace");
    const FlowSample& last = trace.samples.back();
    return last.t + last.integrals.area / last.integrals.total_gauss_curvature;
}

struct FlowIdentityResiduals {
    double area_residual = 0.0; // dA/dt versus -Gtot, relative
    double mean_residual = 0.0; // dM/dt versus -2 * gf_integral, relative
};

// Differentiates the recorded traces in time (3-point, nonuniform spacing) and
// compares against the exact evolution identities for area and total mean
// curvature.  Residuals shrink quadratically with the step size.
inline FlowIdentityResiduals flow_identities_audit(const FlowTrace& trace) {
    const auto& smp = trace.samples;
    if (smp.size() < 3) throw ConfigError("identity audit needs at least three samples");
    FlowIdentityResiduals out;
    for (size_t k = 1; k + 1 < smp.size(); ++k) {
        const double hn = smp[k].t - smp[k - 1].t;
        const double hp = smp[k + 1].t - smp[k].t;
        const double denom = hn * hp * (hn + hp);
        auto ddt = [&](auto&& field) {
            return (hn * hn * field(smp[k + 1]) + (hp * hp - hn * hn) * field(smp[k]) -
                    hp * hp * field(smp[k - 1])) /
                   denom;
        };
        const double dA = ddt([](const FlowSample& x) { return x.integrals.area; });
        const double dM = ddt([](const FlowSample& x) { return x.integrals.total_mean_curvature; });
        const double gtot = smp[k].integrals.total_gauss_curvature;
        out.area_residual = std::max(out.area_residual, std::abs(dA + gtot) / std::abs(gtot));
        out.mean_residual = std::max(out.mean_residual, std::abs(dM + 2.0 * smp[k].gf_integral) /
                                                            std::abs(2.0 * smp[k].gf_integral));
    }
    return out;
}

}  // namespace hmcf
