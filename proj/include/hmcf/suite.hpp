#pragma once

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "hmcf/audit.hpp"
#include "hmcf/flow.hpp"

namespace hmcf {

// Tolerances below are pinned at values the shipped grids meet with margin;
// tol_scale loosens or tightens all of them at once for diagnostic runs and
// must stay 1 for a normative verdict.
struct SuiteOptions {
    double tol_scale = 1.0;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::string fmt(const char* pattern, double x, double y = 0.0, double z = 0.0) {
    char buf[192];
    std::snprintf(buf, sizeof buf, pattern, x, y, z);
    return buf;
}

inline double rel_err(double measured, double want) {
    return std::abs(measured - want) / std::abs(want);
}

// Reference radius history for a shrinking geodesic sphere, where the flow
// reduces to drho/dt = -ct(a, rho)/2.  Classic fourth-order Runge-Kutta at a
// step far below the flow solver's own resolution.
inline double sphere_radius_reference(double a, double rho0, double t_end) {
    auto rhs = [a](double rho) { return -0.5 * sn_prime(a, rho) / sn(a, rho); };
    double rho = rho0;
    const int n = static_cast<int>(std::ceil(t_end / 1e-4));
    const double h = t_end / n;
    for (int i = 0; i < n; ++i) {
        const double k1 = rhs(rho);
        const double k2 = rhs(rho + 0.5 * h * k1);
        const double k3 = rhs(rho + 0.5 * h * k2);
        const double k4 = rhs(rho + h * k3);
        rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

// Radius implied by an area sample, interpolated to time t with a cubic
// through the four nearest trace samples.
inline double traced_sphere_radius(const FlowTrace& trace, double a, double t) {
    const auto& s = trace.samples;
    size_t hi = 1;
    while (hi + 1 < s.size() && s[hi].t < t) ++hi;
    const size_t lo = (hi >= 2) ? hi - 2 : 0;
    const size_t n = std::min<size_t>(4, s.size() - lo);
    double val = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double w = 1.0;
        for (size_t j = 0; j < n; ++j) {
            if (j != i) w *= (t - s[lo + j].t) / (s[lo + i].t - s[lo + j].t);
        }
        const double rad = std::sqrt(s[lo + i].integrals.area / (4.0 * std::numbers::pi));
        val += w * ((a == 0.0) ? rad : std::asinh(rad * std::sqrt(-a)) / std::sqrt(-a));
    }
    return val;
}

}  // namespace detail

// Closed-form integrals on a grid of spaces and radii.
inline CriterionResult criterion_sphere_battery(const SuiteOptions& opt) {
    const double tol = 1e-6 * opt.tol_scale;
    double worst = 0.0, worst_gb = 0.0;
    for (double a : {0.0, -0.5, -1.0, -2.0}) {
        ModelSpace m(a);
        for (double rho : {0.25, 0.5, 1.0, 2.0}) {
            const SurfaceIntegrals si = integrals(sphere_surface(m, rho, 64, 128));
            const SphereQuantities q = sphere_quantities(a, rho);
            worst = std::max({worst, detail::rel_err(si.area, q.area),
                              detail::rel_err(si.total_mean_curvature, q.total_mean_curvature),
                              detail::rel_err(si.total_gauss_curvature, q.total_gauss_curvature),
                              detail::rel_err(si.volume, q.volume)});
            worst_gb = std::max(worst_gb, gauss_bonnet_residual(si, a) /
                                              si.total_gauss_curvature);
        }
    }
    return {1, "sphere oracle battery", worst <= tol && worst_gb <= tol,
            detail::fmt("max rel err %.2e, closure %.2e (tol %.0e)", worst, worst_gb, tol)};
}

// Equality cases of the area bound: exact in flat space, margin
// 32 pi^2 sinh^4(rho) at a = -1 via the weight-2 deficit.
inline CriterionResult criterion_minkowski_equality(const SuiteOptions& opt) {
    const SurfaceIntegrals flat = integrals(sphere_surface(ModelSpace(0.0), 1.0, 64, 128));
    const double m2 = flat.total_mean_curvature * flat.total_mean_curvature;
    const double flat_defect = std::abs(m2 - 16.0 * std::numbers::pi * flat.area);

    const SurfaceIntegrals hyp = integrals(sphere_surface(ModelSpace(-1.0), 1.0, 64, 128));
    const double slack = phi(hyp.total_mean_curvature, hyp.area, -1.0, 2.0);
    const double sh = std::sinh(1.0);
    const double oracle = 32.0 * std::numbers::pi * std::numbers::pi * sh * sh * sh * sh;

    const bool ok = flat_defect < 1e-6 * m2 * opt.tol_scale &&
                    detail::rel_err(slack, oracle) < 1e-3 * opt.tol_scale;
    return {2, "minkowski equality on spheres", ok,
            detail::fmt("flat defect %.2e, weight-2 slack off by %.2e rel", flat_defect,
                        detail::rel_err(slack, oracle))};
}

// Shrinking spheres against the one-dimensional reduction of the flow.
inline CriterionResult criterion_flow_exactness(const SuiteOptions& opt) {
    FlowConfig flat_cfg;
    flat_cfg.area_stop_frac = 0.05;
    const FlowTrace flat = run_flow(sphere_surface(ModelSpace(0.0), 1.0, 32, 64), flat_cfg);
    // A flat unit sphere under speed G/H = 1/(2 rho) collapses at exactly 1.
    const double t_collapse = estimate_collapse_time(flat);

    FlowConfig hyp_cfg;
    hyp_cfg.rel_tol = 1e-7;
    hyp_cfg.area_stop_frac = 0.4;
    const FlowTrace hyp = run_flow(sphere_surface(ModelSpace(-1.0), 1.0, 32, 64), hyp_cfg);
    const double rho_traced = detail::traced_sphere_radius(hyp, -1.0, 0.3);
    const double rho_ref = detail::sphere_radius_reference(-1.0, 1.0, 0.3);

    const bool ok = std::abs(t_collapse - 1.0) < 0.01 * opt.tol_scale &&
                    std::abs(rho_traced - rho_ref) < 1e-4 * opt.tol_scale;
    return {3, "flow collapse exactness", ok,
            detail::fmt("flat T=%.6f, rho(0.3) off by %.2e", t_collapse,
                        std::abs(rho_traced - rho_ref))};
}

// The weight-2 deficit must never rise along the flow, and every sample must
// respect the area bound.
inline CriterionResult criterion_phi_monotone(const SuiteOptions& opt) {
    const std::vector<std::vector<SphericalMode>> shapes = {
        {{2, 0, 0.05}},
        {{3, 1, 0.03}},
        {{2, 2, 0.04}, {4, 1, 0.015}},
        {{3, 3, 0.02}, {5, 2, 0.01}},
        {{4, 0, 0.03}, {2, 1, 0.02}},
    };
    ModelSpace m(-1.0);
    int increase_events = 0, audit_failures = 0;
    double worst_rise = 0.0;
    for (const auto& modes : shapes) {
        FlowConfig cfg;
        cfg.area_stop_frac = 0.5;
        const FlowTrace trace = run_flow(perturbed_sphere(m, 1.0, modes, 32, 64), cfg);
        for (size_t k = 0; k < trace.samples.size(); ++k) {
            const FlowSample& s = trace.samples[k];
            if (k > 0) {
                const double rise = s.phi - trace.samples[k - 1].phi;
                const double allowed =
                    1e-6 * std::max(1.0, std::abs(s.phi)) * opt.tol_scale;
                worst_rise = std::max(worst_rise, rise);
                if (rise > allowed) ++increase_events;
            }
            if (!minkowski_audit(s.integrals, -1.0).pass) ++audit_failures;
        }
    }
    return {4, "phi monotonicity along flows", increase_events == 0 && audit_failures == 0,
            detail::fmt("0 allowed: %.0f rise events, %.0f audit failures (worst rise %.1e)",
                        double(increase_events), double(audit_failures), worst_rise)};
}

// Area and mean-curvature derivatives along the flow against their integral
// identities, including second-order convergence under step halving.
inline CriterionResult criterion_flow_identities(const SuiteOptions& opt) {
    ModelSpace m(-1.0);
    const RadialSurface s = sphere_surface(m, 1.0, 32, 64);

    FlowConfig cfg;
    cfg.area_stop_frac = 0.5;
    const FlowTrace adaptive = run_flow(s, cfg);
    const FlowIdentityResiduals res = flow_identities_audit(adaptive);
    const double worst = std::max(res.area_residual, res.mean_residual);

    // The initial mean-curvature derivative has the closed form
    // -4 pi sinh(1) cosh(1) (coth(1)^2 + 1); pinning it to 1e-8 needs the
    // finer grid, the 32x64 flow grid only reaches about 1e-8 itself.
    const RadialSurface fine_s = sphere_surface(m, 1.0, 64, 128);
    const FlowSample s0 = detail::make_sample(0.0, fine_s, fundamental_forms(fine_s), 2.0, 0.0);
    const double gf0 = -2.0 * s0.gf_integral;
    const double c = 1.0 / std::tanh(1.0);
    const double oracle = -4.0 * std::numbers::pi * std::sinh(1.0) * std::cosh(1.0) * (c * c + 1.0);

    FlowConfig coarse_cfg = cfg;
    coarse_cfg.fixed_dt = 2e-3;
    coarse_cfg.max_steps = 100;
    FlowConfig fine_cfg = cfg;
    fine_cfg.fixed_dt = 1e-3;
    fine_cfg.max_steps = 200;
    const FlowIdentityResiduals coarse = flow_identities_audit(run_flow(s, coarse_cfg));
    const FlowIdentityResiduals fine = flow_identities_audit(run_flow(s, fine_cfg));
    const double ra = coarse.area_residual / fine.area_residual;
    const double rm = coarse.mean_residual / fine.mean_residual;

    const bool ok = worst < 1e-2 * opt.tol_scale &&
                    detail::rel_err(gf0, oracle) < 1e-8 * opt.tol_scale && ra > 3.0 &&
                    ra < 5.0 && rm > 3.0 && rm < 5.0;
    return {5, "flow identity residuals", ok,
            detail::fmt("max rel %.2e, halving ratios %.2f/%.2f", worst, ra, rm)};
}

// Collapsing disc neighborhoods against their closed-form limits.
inline CriterionResult criterion_ns_reproduction(const SuiteOptions& opt) {
    const NsScanResult scan = ns_scan(-1.0, {1.0, 3.0}, {0.2, 0.1, 0.05});
    bool ok = scan.rs.size() == 2 && scan.skipped_rs.empty();
    double worst_area = 0.0, worst_mean = 0.0;
    for (size_t k = 0; ok && k < scan.rs.size(); ++k) {
        const NsLimits lim = ns_limits(scan.rs[k]);
        worst_area = std::max(worst_area, detail::rel_err(scan.area_extrap[k], lim.area));
        worst_mean = std::max(worst_mean,
                              detail::rel_err(scan.mean_extrap[k], lim.total_mean_curvature));
    }
    ok = ok && worst_area < 0.01 * opt.tol_scale && worst_mean < 0.02 * opt.tol_scale;

    // The threshold formula should have essentially reached its large-radius
    // floor by r = 8.
    const double floor = std::numbers::pi * std::numbers::pi / 4.0;
    ok = ok && detail::rel_err(ns_lambda_threshold(8.0), floor) < 1e-3 * opt.tol_scale;

    // The coefficient-4 bound fails on the family at r in {3, 8} and passes
    // with vanishing slack on round spheres.
    int confirmed_failures = 0;
    for (const AuditReport& r : scan.reports) {
        if (r.name == "santalo-ns-limit" && r.metadata.at("r") == 3.0) {
            if (r.expected_to_fail && r.pass) ++confirmed_failures;
        }
        ok = ok && r.pass;
    }
    const NsScanResult far = ns_scan(-1.0, {8.0}, {0.2, 0.1, 0.05});
    for (const AuditReport& r : far.reports) {
        if (r.name == "santalo-ns-limit" && r.expected_to_fail && r.pass) ++confirmed_failures;
        ok = ok && r.pass;
    }
    ok = ok && confirmed_failures == 2;

    const AuditReport sphere =
        santalo_audit(integrals(sphere_surface(ModelSpace(-1.0), 1.0, 96, 192)), -1.0);
    ok = ok && sphere.pass && std::abs(sphere.slack) < 1e-6 * opt.tol_scale;

    return {6, "disc-neighborhood reproduction", ok,
            detail::fmt("area off %.2e, mean off %.2e, sphere slack %.1e", worst_area,
                        worst_mean, sphere.slack)};
}

// Parallel-area expansion: identity in flat space, strict bound at a < 0,
// and audit passes across randomized convex shapes.
inline CriterionResult criterion_steiner(const SuiteOptions& opt) {
    const RadialSurface flat = sphere_surface(ModelSpace(0.0), 1.0, 96, 192);
    double flat_defect = 0.0;
    for (double t : {0.1, 0.5, 1.0}) {
        flat_defect = std::max(flat_defect, std::abs(steiner_audit(flat, t).slack));
    }

    const AuditReport hyp = steiner_audit(sphere_surface(ModelSpace(-1.0), 1.0, 64, 128), 0.5);
    const double sh = std::sinh(1.5);
    const double lhs_oracle = 4.0 * std::numbers::pi * sh * sh;
    const SphereQuantities q = sphere_quantities(-1.0, 1.0);
    const double rhs_oracle = q.area + 0.5 * q.total_mean_curvature +
                              0.25 * q.total_gauss_curvature;
    const double slack_oracle = lhs_oracle - rhs_oracle;

    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> amp(0.01, 0.03);
    std::uniform_real_distribution<double> rad(0.8, 1.2);
    std::uniform_int_distribution<int> ell(2, 4);
    int audited = 0, failed = 0;
    for (int k = 0; k < 10; ++k) {
        ModelSpace m(k % 2 ? 0.0 : -1.0);
        // Draws hoisted into declarations: inside a call expression their
        // order would be unspecified and the shapes compiler-dependent.
        const double rho0 = rad(rng);
        const int l1 = ell(rng), l2 = ell(rng);
        std::uniform_int_distribution<int> em1(-l1, l1), em2(-l2, l2);
        const SphericalMode mode1{l1, em1(rng), amp(rng)};
        const SphericalMode mode2{l2, em2(rng), amp(rng)};
        const RadialSurface s = perturbed_sphere(m, rho0, {mode1, mode2}, 32, 64);
        for (double t : {0.1, 0.5, 1.0}) {
            ++audited;
            if (!steiner_audit(s, t).pass) ++failed;
        }
    }

    const bool ok = flat_defect < 1e-8 * opt.tol_scale &&
                    detail::rel_err(hyp.slack, slack_oracle) < 1e-3 * opt.tol_scale &&
                    audited == 30 && failed == 0;
    return {7, "steiner parallel bound", ok,
            detail::fmt("flat defect %.1e, slack off %.1e rel, %.0f/30 random audits failed",
                        flat_defect, detail::rel_err(hyp.slack, slack_oracle), double(failed))};
}

// Central differences of parallel areas converge quadratically to the total
// mean curvature.  The order is only visible at a < 0: in flat space the
// parallel area is a polynomial in the offset and the difference is exact.
inline CriterionResult criterion_first_variation(const SuiteOptions& opt) {
    bool ok = true;
    double worst_lo = 10.0, worst_hi = 0.0;
    ModelSpace m(-1.0);
    const RadialSurface shapes[] = {
        sphere_surface(m, 1.0, 48, 96),
        perturbed_sphere(m, 1.0, {{2, 0, 0.05}, {3, 1, 0.03}}, 48, 96),
        perturbed_sphere(m, 1.2, {{3, 2, 0.04}}, 48, 96),
    };
    for (const RadialSurface& s : shapes) {
        const AuditReport coarse = first_variation_audit(s, 1e-3);
        const AuditReport fine = first_variation_audit(s, 5e-4);
        const double ratio = std::abs(coarse.slack) / std::abs(fine.slack);
        worst_lo = std::min(worst_lo, ratio);
        worst_hi = std::max(worst_hi, ratio);
        ok = ok && coarse.pass && fine.pass && ratio > 3.5 / opt.tol_scale &&
             ratio < 4.5 * opt.tol_scale;
    }
    return {8, "first variation order", ok,
            detail::fmt("halving ratios in [%.2f, %.2f] (want [3.5, 4.5])", worst_lo, worst_hi)};
}

// Volume bound from area and inradius, with the coarea identity backing the
// volume computation.
inline CriterionResult criterion_bonnesen(const SuiteOptions& opt) {
    const SurfaceIntegrals hyp = integrals(sphere_surface(ModelSpace(-1.0), 1.0, 64, 128));
    const AuditReport r = bonnesen_audit(hyp, -1.0, 1.0);
    const double sh = std::sinh(1.0), ch = std::cosh(1.0);
    const double vol_oracle = 2.0 * std::numbers::pi * (sh * ch - 1.0);
    const double R = sh;
    const double t = R - 1.0;
    const double rhs_oracle = 4.0 * std::numbers::pi / 3.0 * (R * R * R - t * t * t);

    const AuditReport flat =
        bonnesen_audit(integrals(sphere_surface(ModelSpace(0.0), 1.0, 48, 96)), 0.0, 1.0);

    double coarea_defect = 0.0;
    for (double a : {0.0, -1.0}) {
        const AuditReport c = coarea_volume_audit(sphere_surface(ModelSpace(a), 1.0, 48, 96),
                                                  0.5, 9);
        coarea_defect = std::max(coarea_defect, std::abs(c.slack));
    }

    const bool ok = r.pass && detail::rel_err(r.rhs, vol_oracle) < 1e-4 * opt.tol_scale &&
                    detail::rel_err(r.lhs, rhs_oracle) < 1e-4 * opt.tol_scale &&
                    std::abs(flat.slack) < 1e-8 * opt.tol_scale &&
                    coarea_defect < 1e-4 * opt.tol_scale;
    return {9, "bonnesen volume bound", ok,
            detail::fmt("flat defect %.1e, coarea defect %.1e", std::abs(flat.slack),
                        coarea_defect)};
}

// Randomized nesting and outward sweeps must order areas and total mean
// curvatures without exception.
inline CriterionResult criterion_monotonicity(const SuiteOptions&) {
    std::mt19937 rng(6180339);
    std::uniform_real_distribution<double> amp(0.005, 0.025);
    std::uniform_real_distribution<double> rad(0.7, 1.3);
    std::uniform_real_distribution<double> gap(0.25, 0.5);
    std::uniform_real_distribution<double> sweep(0.3, 0.6);
    std::uniform_int_distribution<int> ell(2, 4);

    // Draws are hoisted into declarations throughout: inside a call
    // expression their order would be unspecified and compiler-dependent.
    auto random_modes = [&]() {
        const int l1 = ell(rng), l2 = ell(rng);
        std::uniform_int_distribution<int> em1(-l1, l1), em2(-l2, l2);
        const SphericalMode mode1{l1, em1(rng), amp(rng)};
        const SphericalMode mode2{l2, em2(rng), amp(rng)};
        return std::vector<SphericalMode>{mode1, mode2};
    };

    int checked = 0, violations = 0;
    for (int k = 0; k < 50; ++k) {
        ModelSpace m(k % 2 ? 0.0 : -1.0);
        const double rho_in = rad(rng);
        const double rho_out = rho_in + gap(rng);
        const std::vector<SphericalMode> modes_in = random_modes();
        const std::vector<SphericalMode> modes_out = random_modes();
        const RadialSurface inner = perturbed_sphere(m, rho_in, modes_in, 32, 64);
        const RadialSurface outer = perturbed_sphere(m, rho_out, modes_out, 32, 64);
        // Radial domination about a shared center guarantees containment.
        double rin = 0.0, rout = 1e300;
        for (size_t n = 0; n < inner.r.v.size(); ++n) {
            rin = std::max(rin, inner.r.v[n]);
            rout = std::min(rout, outer.r.v[n]);
        }
        if (!(rin < rout)) {
            ++violations;
            continue;
        }
        ++checked;
        for (const AuditReport& r : nesting_audit(integrals(inner), integrals(outer), m.a)) {
            if (!r.pass) ++violations;
        }
    }
    for (int k = 0; k < 50; ++k) {
        ModelSpace m(k % 2 ? 0.0 : -1.0);
        const double rho = rad(rng);
        const std::vector<SphericalMode> modes = random_modes();
        const RadialSurface s = perturbed_sphere(m, rho, modes, 32, 64);
        const ParallelFamily fam = parallel_family(s, 0.0, sweep(rng), 3);
        ++checked;
        for (size_t i = 1; i < fam.integrals.size(); ++i) {
            for (const AuditReport& r :
                 nesting_audit(fam.integrals[i - 1], fam.integrals[i], m.a)) {
                if (!r.pass) ++violations;
            }
        }
    }
    return {10, "ordering monotonicity sweep", checked == 100 && violations == 0,
            detail::fmt("%.0f randomized checks, %.0f violations", double(checked),
                        double(violations))};
}

// Stronger deficit coefficient under horosphere convexity, with its
// mixed-integral ingredient checked on every input.
inline CriterionResult criterion_hconvex(const SuiteOptions& opt) {
    ModelSpace m(-1.0);
    const double sh = std::sinh(1.0);
    const double oracle = 8.0 * std::numbers::pi * std::numbers::pi * sh * sh * sh * sh;

    double slack_err = 1.0;
    int failed = 0, audited = 0;
    struct Input {
        double rho;
        std::vector<SphericalMode> modes;
    };
    const std::vector<Input> inputs = {
        {0.5, {}}, {1.0, {}}, {2.0, {}},
        {1.0, {{2, 0, 0.05}}},
        {1.5, {{3, 1, 0.04}}},
        {2.0, {{2, 2, 0.03}}},
    };
    for (const Input& in : inputs) {
        const RadialSurface s = in.modes.empty()
                                    ? sphere_surface(m, in.rho, 64, 128)
                                    : perturbed_sphere(m, in.rho, in.modes, 64, 128);
        const CurvatureField f = fundamental_forms(s);
        for (const AuditReport& r : hconvex_audit(s, f)) {
            ++audited;
            if (!r.pass) ++failed;
            if (in.rho == 1.0 && in.modes.empty() && r.name == "hconvex-deficit") {
                slack_err = detail::rel_err(r.slack, oracle);
            }
        }
    }
    const bool ok = failed == 0 && audited == 12 && slack_err < 1e-3 * opt.tol_scale;
    return {11, "h-convex deficit audit", ok,
            detail::fmt("sphere slack off %.1e rel, %.0f/12 audits failed", slack_err,
                        double(failed))};
}

inline CriterionResult run_criterion(int id, const SuiteOptions& opt) {
    switch (id) {
        case 1: return criterion_sphere_battery(opt);
        case 2: return criterion_minkowski_equality(opt);
        case 3: return criterion_flow_exactness(opt);
        case 4: return criterion_phi_monotone(opt);
        case 5: return criterion_flow_identities(opt);
        case 6: return criterion_ns_reproduction(opt);
        case 7: return criterion_steiner(opt);
        case 8: return criterion_first_variation(opt);
        case 9: return criterion_bonnesen(opt);
        case 10: return criterion_monotonicity(opt);
        case 11: return criterion_hconvex(opt);
        default: throw ConfigError("criterion id out of range");
    }
}

inline std::vector<CriterionResult> run_suite(const SuiteOptions& opt = {}) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 11; ++id) {
        try {
            out.push_back(run_criterion(id, opt));
        } catch (const Error& e) {
            out.push_back({id, "criterion " + std::to_string(id), false,
                           std::string("exception: ") + e.what()});
        }
    }
    return out;
}

inline std::string format_criterion(const CriterionResult& r) {
    char buf[320];
    std::snprintf(buf, sizeof buf, "[%s] %2d %-32s %s", r.pass ? "PASS" : "FAIL", r.id,
                  r.name.c_str(), r.detail.c_str());
    return buf;
}

}  // namespace hmcf
