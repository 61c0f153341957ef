#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "hmcf/audit.hpp"
#include "hmcf/flow.hpp"
#include "hmcf/io.hpp"
#include "support.hpp"

using namespace hmcf;
using Catch::Approx;

TEST_CASE("report verdicts follow the slack conventions", "[audit]") {
    const AuditReport ok = make_report("x", 2.0, 1.0, 0.1);
    CHECK(ok.slack == Approx(1.0));
    CHECK(ok.pass);

    const AuditReport grazing = make_report("x", 0.95, 1.0, 0.1);
    CHECK(grazing.pass);  // one-sided audits forgive slack down to -tol

    const AuditReport broken = make_report("x", 0.5, 1.0, 0.1);
    CHECK_FALSE(broken.pass);

    const AuditReport vindicated = make_report("x", 0.5, 1.0, 0.1, false, true);
    CHECK(vindicated.pass);  // a demonstrated violation is the point

    const AuditReport surprise = make_report("x", 2.0, 1.0, 0.1, false, true);
    CHECK_FALSE(surprise.pass);  // expected failure that refuses to fail

    CHECK(make_report("x", 1.05, 1.0, 0.1, true).pass);
    CHECK_FALSE(make_report("x", 1.2, 1.0, 0.1, true).pass);
    CHECK_FALSE(make_report("x", 0.8, 1.0, 0.1, true).pass);
}

TEST_CASE("area bound on total mean curvature", "[audit]") {
    // Flat spheres achieve equality; negatively curved ones keep a strict
    // margin of 32 (-a) pi^2 sn^4 / (M + bound).
    {
        ModelSpace m(0.0);
        const AuditReport r = minkowski_audit(integrals(sphere_surface(m, 1.0, 48, 96)), 0.0);
        CHECK(r.pass);
        CHECK(std::abs(r.slack) < 5e-8);
    }
    {
        ModelSpace m(-1.0);
        const AuditReport r = minkowski_audit(integrals(sphere_surface(m, 1.0, 64, 128)), -1.0);
        CHECK(r.pass);
        CHECK(r.slack == Approx(7.1734010503522327).margin(1e-8));
        CHECK(r.metadata.at("area") == Approx(17.355387381771433).margin(1e-8));
    }
    {
        ModelSpace m(-1.0);
        const RadialSurface s = perturbed_sphere(m, 1.0, {{2, 0, 0.05}, {3, 2, 0.02}}, 64, 128);
        const AuditReport r = minkowski_audit(integrals(s), -1.0);
        CHECK(r.pass);
        CHECK(r.slack > 0.0);
    }
}

TEST_CASE("coefficient-4 deficit vanishes on spheres", "[audit]") {
    ModelSpace m(-1.0);
    const AuditReport r = santalo_audit(integrals(sphere_surface(m, 1.0, 64, 128)), -1.0);
    CHECK(r.pass);
    CHECK(std::abs(r.slack) <= r.tol);
    CHECK(r.metadata.at("deficit") == Approx(r.slack).margin(1e-12));

    // The collapsing disc-neighborhood limits at r = 1.5 sit past the
    // threshold crossing, so the bound must fail there, and saying so in
    // advance flips the verdict.
    const NsLimits lim = ns_limits(1.5);
    SurfaceIntegrals si;
    si.area = lim.area;
    si.total_mean_curvature = lim.total_mean_curvature;
    si.total_gauss_curvature = 4.0 * std::numbers::pi + lim.area;
    const AuditReport fail = santalo_audit(si, -1.0, true);
    CHECK(fail.slack < 0.0);
    CHECK(fail.expected_to_fail);
    CHECK(fail.pass);
}

TEST_CASE("h-convex deficit bound and its mixed-integral step", "[audit][oracle]") {
    ModelSpace m(-1.0);
    {
        const RadialSurface s = sphere_surface(m, 1.0, 64, 128);
        const CurvatureField f = fundamental_forms(s);
        const auto reports = hconvex_audit(s, f);
        REQUIRE(reports.size() == 2);

        CHECK(reports[0].name == "hconvex-deficit");
        CHECK(reports[0].pass);
        CHECK(reports[0].slack == Approx(150.60473558567557).margin(1e-6));
        CHECK(reports[0].metadata.at("kappa_min") == Approx(1.0 / std::tanh(1.0)).margin(1e-9));

        CHECK(reports[1].name == "hconvex-mixed-integrals");
        CHECK(reports[1].pass);
        CHECK(reports[1].lhs == Approx(519.3037011664636).epsilon(1e-9));
        CHECK(reports[1].rhs == Approx(301.2094711713511).epsilon(1e-9));
    }
    {
        // Still horosphere-convex after a mild bump.
        const RadialSurface s = perturbed_sphere(m, 1.0, {{2, 0, 0.05}}, 64, 128);
        const CurvatureField f = fundamental_forms(s);
        REQUIRE(is_h_convex(f, -1.0));
        for (const AuditReport& r : hconvex_audit(s, f)) CHECK(r.pass);
    }
    {
        // A strong bump keeps the surface convex but drags the smallest
        // curvature below sqrt(-a), which voids the precondition.
        const RadialSurface s = perturbed_sphere(m, 1.0, {{2, 0, 0.3}}, 64, 128);
        const CurvatureField f = fundamental_forms(s);
        REQUIRE(f.min_k1() > 0.0);
        CHECK_FALSE(is_h_convex(f, -1.0));
        CHECK_THROWS_AS(hconvex_audit(s, f), NotHConvexError);
    }
    {
        ModelSpace flat(0.0);
        const RadialSurface s = sphere_surface(flat, 1.0, 32, 64);
        const CurvatureField f = fundamental_forms(s);
        CHECK_THROWS_AS(hconvex_audit(s, f), ConfigError);
    }
}

TEST_CASE("volume against the inradius-corrected ball", "[audit][oracle]") {
    {
        // A flat ball meets the bound exactly: the shell of its own area with
        // cavity depth equal to the radius is the ball itself.
        ModelSpace m(0.0);
        const AuditReport r = bonnesen_audit(integrals(sphere_surface(m, 1.0, 48, 96)), 0.0, 1.0);
        CHECK(r.pass);
        CHECK(std::abs(r.slack) < 1e-7);
    }
    {
        ModelSpace m(-1.0);
        const AuditReport r = bonnesen_audit(integrals(sphere_surface(m, 1.0, 64, 128)), -1.0, 1.0);
        CHECK(r.pass);
        CHECK(r.lhs == Approx(6.7761638407925355).margin(1e-9));
        CHECK(r.rhs == Approx(5.1109327057082883).margin(1e-9));
    }
    {
        ModelSpace m(-1.0);
        const RadialSurface s = perturbed_sphere(m, 1.0, {{2, 0, 0.05}, {3, 1, 0.03}}, 48, 96);
        const double inrad = estimate_inradius(s);
        const AuditReport r = bonnesen_audit(integrals(s), -1.0, inrad);
        CHECK(r.pass);
        CHECK(r.metadata.at("inradius") == Approx(inrad));
    }
    CHECK_THROWS_AS(bonnesen_rhs(4.0 * std::numbers::pi, 2.0), InradExceedsRadiusError);
}

TEST_CASE("nested surfaces order their integrals", "[audit]") {
    ModelSpace m(-1.0);
    const SurfaceIntegrals inner = integrals(sphere_surface(m, 1.0, 48, 96));
    const SurfaceIntegrals outer = integrals(sphere_surface(m, 1.5, 48, 96));

    for (const AuditReport& r : nesting_audit(inner, outer, -1.0)) {
        CHECK(r.pass);
        CHECK(r.slack > 0.0);
    }
    // Swapping the roles must be caught, not papered over.
    for (const AuditReport& r : nesting_audit(outer, inner, -1.0)) {
        CHECK_FALSE(r.pass);
        CHECK(r.slack < 0.0);
    }
}

TEST_CASE("parallel areas dominate the quadratic expansion", "[audit][oracle]") {
    {
        ModelSpace m(-1.0);
        const AuditReport r = steiner_audit(sphere_surface(m, 1.0, 48, 96), 0.5);
        CHECK(r.pass);
        CHECK(r.lhs == Approx(56.973800622341564).margin(1e-6));
        CHECK(r.rhs == Approx(47.62406290657983).margin(1e-6));
    }
    {
        // Flat space turns the bound into an identity.
        ModelSpace m(0.0);
        const AuditReport r = steiner_audit(sphere_surface(m, 1.0, 48, 96), 0.25);
        CHECK(r.pass);
        CHECK(std::abs(r.slack) < 1e-6);
    }
    CHECK_THROWS_AS(steiner_audit(sphere_surface(ModelSpace(-1.0), 1.0, 32, 64), -0.1),
                    ConfigError);
}

TEST_CASE("area derivative recovers total mean curvature", "[audit]") {
    ModelSpace m(-1.0);
    const RadialSurface s = sphere_surface(m, 1.0, 48, 96);
    const AuditReport coarse = first_variation_audit(s, 1e-3);
    const AuditReport fine = first_variation_audit(s, 5e-4);
    CHECK(coarse.pass);
    CHECK(fine.pass);
    // Central differences converge quadratically, so halving the step should
    // cut the defect by about four.
    const double ratio = std::abs(coarse.slack) / std::abs(fine.slack);
    CHECK(ratio > 3.4);
    CHECK(ratio < 4.6);
    CHECK_THROWS_AS(first_variation_audit(s, 0.0), ConfigError);
}

TEST_CASE("volume equals the stack of inner parallel areas", "[audit]") {
    for (double a : {0.0, -1.0}) {
        ModelSpace m(a);
        const AuditReport r = coarea_volume_audit(sphere_surface(m, 1.0, 48, 96), 0.5, 9);
        CHECK(r.pass);
        CHECK(std::abs(r.slack) < 1e-4);
    }
    const RadialSurface s = sphere_surface(ModelSpace(-1.0), 1.0, 32, 64);
    CHECK_THROWS_AS(coarea_volume_audit(s, 0.5, 8), ConfigError);
    CHECK_THROWS_AS(coarea_volume_audit(s, 0.5, 1), ConfigError);
    CHECK_THROWS_AS(coarea_volume_audit(s, -0.2, 9), ConfigError);
}

TEST_CASE("mean curvature growth matches the curvature flux", "[audit]") {
    ModelSpace m(-1.0);
    const ParallelFamily fam = parallel_family(sphere_surface(m, 1.0, 48, 96), 0.0, 0.5, 9);
    const AuditReport r = parallel_monotone_audit(fam, -1.0);
    CHECK(r.pass);
    // In negative curvature the flux is strictly positive, so the family's
    // total mean curvature must climb.
    for (size_t k = 1; k < fam.integrals.size(); ++k) {
        CHECK(fam.integrals[k].total_mean_curvature >
              fam.integrals[k - 1].total_mean_curvature);
    }
    CHECK_THROWS_AS(parallel_monotone_audit(ParallelFamily{}, -1.0), ConfigError);
}

TEST_CASE("disc-neighborhood scan reproduces the collapse limits", "[audit][ns][oracle]") {
    const NsScanResult res = ns_scan(-1.0, {1.0, 1.5}, {0.2, 0.1, 0.05});

    REQUIRE(res.rs.size() == 2);
    REQUIRE(res.rows.size() == 6);
    CHECK(res.skipped_rs.empty());

    // Extrapolated geometry against the closed-form limits.
    CHECK(res.area_extrap[0] == Approx(6.8245525305698038).margin(0.02));
    CHECK(res.mean_extrap[0] == Approx(23.197541745904658).margin(0.06));
    CHECK(res.lambda_extrap[0] == Approx(ns_lambda_threshold(1.0)).margin(0.01));
    CHECK(res.area_extrap[1] == Approx(16.994880447569535).margin(0.05));
    CHECK(res.mean_extrap[1] == Approx(42.030291762305914).margin(0.11));
    CHECK(res.lambda_extrap[1] == Approx(ns_lambda_threshold(1.5)).margin(0.02));

    for (const NsScanRow& row : res.rows) {
        CHECK(row.mean_width_derivative > 0.0);
        CHECK(row.integrals.area > 0.0);
    }

    int expected_failures = 0;
    for (const AuditReport& r : res.reports) {
        INFO(r.name << " at r=" << r.metadata.at("r"));
        CHECK(r.pass);
        expected_failures += r.expected_to_fail;
    }
    // Only the r = 1.5 coefficient-4 check sits past the threshold crossing.
    CHECK(expected_failures == 1);
}

TEST_CASE("scan falls back to closed forms when the rim is unresolvable", "[audit][ns]") {
    const NsScanResult res = ns_scan(-1.0, {8.0}, {0.2, 0.1, 0.05});
    CHECK(res.rows.empty());
    CHECK(res.rs.empty());
    REQUIRE(res.skipped_rs == std::vector<double>{8.0});
    REQUIRE(res.reports.size() == 2);

    CHECK(res.reports[0].name == "ns-threshold-floor");
    CHECK(res.reports[0].pass);
    CHECK(res.reports[0].rhs == Approx(std::numbers::pi * std::numbers::pi / 4.0));
    // At r = 8 the threshold has nearly reached its floor.
    CHECK(res.reports[0].lhs == Approx(res.reports[0].rhs).epsilon(1e-3));

    CHECK(res.reports[1].name == "santalo-ns-limit");
    CHECK(res.reports[1].expected_to_fail);
    CHECK(res.reports[1].pass);
    CHECK(res.reports[1].metadata.at("closed_form") == 1.0);

    CHECK_THROWS_AS(ns_scan(-0.5, {1.0}, {0.2, 0.1, 0.05}), ConfigError);
    CHECK_THROWS_AS(ns_scan(-1.0, {1.0}, {0.2, 0.1, 0.06}), ConfigError);
    CHECK_THROWS_AS(ns_scan(-1.0, {1.0}, {0.2, 0.1}), ConfigError);
}

TEST_CASE("surface snapshots round trip bit for bit", "[io]") {
    ModelSpace m(-1.0);
    const Point c =
        geodesic(m, m.origin(), normalize_tangent(m, m.origin(), Vec4{0, 0.6, -0.3, 0.7}), 0.37);
    const RadialSurface s =
        perturbed_sphere(m, 1.0, {{2, 0, 0.05}, {3, 2, 0.02}}, 32, 64, &c);

    std::stringstream buf;
    save_surface(s, buf);
    const RadialSurface back = load_surface(buf);

    CHECK(back.space.a == s.space.a);
    CHECK(back.center.x == s.center.x);
    for (int e = 0; e < 3; ++e) CHECK(back.frame[e] == s.frame[e]);
    REQUIRE(back.grid->ntheta == 32);
    REQUIRE(back.grid->nphi == 64);
    CHECK(back.r.v == s.r.v);

    // Loaded snapshots are immediately usable.
    const SurfaceIntegrals a0 = integrals(s);
    const SurfaceIntegrals a1 = integrals(back);
    CHECK(a1.area == a0.area);
}

TEST_CASE("malformed snapshots are rejected", "[io]") {
    ModelSpace m(0.0);
    const RadialSurface s = sphere_surface(m, 1.0, 16, 32);
    std::stringstream buf;
    save_surface(s, buf);
    const std::string good = buf.str();

    auto load_from = [](const std::string& text) {
        std::stringstream in(text);
        return load_surface(in);
    };

    CHECK_THROWS_AS(load_from(""), ConfigError);
    CHECK_THROWS_AS(load_from("hmcf-flow 1\n"), ConfigError);
    CHECK_THROWS_AS(load_from("hmcf-surface 2\n"), ConfigError);
    CHECK_THROWS_AS(load_from(good.substr(0, good.size() / 2)), ConfigError);

    std::string huge = good;
    huge.replace(huge.find("grid 16 32"), 10, "grid 99999999 32");
    CHECK_THROWS_AS(load_from(huge), ConfigError);

    std::string negative = good;
    const size_t table = negative.find("grid 16 32") + 11;
    negative.insert(table, "-");
    CHECK_THROWS_AS(load_from(negative), ConfigError);

    CHECK_THROWS_AS(load_surface("/nonexistent/dir/surface.txt"), ConfigError);
    CHECK_THROWS_AS(save_surface(s, "/nonexistent/dir/surface.txt"), ConfigError);
}

TEST_CASE("reports serialize to json and csv", "[io]") {
    ModelSpace m(-1.0);
    std::vector<AuditReport> reports;
    reports.push_back(minkowski_audit(integrals(sphere_surface(m, 1.0, 32, 64)), -1.0));
    reports.push_back(make_report("demo", 0.5, 1.0, 0.1, false, true));

    const nlohmann::json j = reports_to_json(reports);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 2);
    CHECK(j[0]["name"] == "minkowski");
    CHECK(j[0]["pass"] == true);
    CHECK(j[0]["lhs"].get<double>() == reports[0].lhs);
    CHECK(j[0]["metadata"]["curvature_param"] == -1.0);
    CHECK(j[1]["expected_to_fail"] == true);
    CHECK(j[1]["slack"].get<double>() == -0.5);

    const std::string path =
        (std::filesystem::temp_directory_path() / "hmcf_reports_roundtrip.json").string();
    write_reports_json(reports, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    const nlohmann::json parsed = nlohmann::json::parse(in);
    CHECK(parsed == j);

    std::stringstream csv;
    write_reports_csv(reports, csv);
    std::string line;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "name,lhs,rhs,slack,pass");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("flow traces and parallel families export as csv", "[io]") {
    ModelSpace m(0.0);
    FlowConfig cfg;
    cfg.area_stop_frac = 0.5;
    const FlowTrace trace = run_flow(sphere_surface(m, 1.0, 16, 32), cfg);
    REQUIRE(trace.samples.size() >= 2);

    std::stringstream csv;
    write_flow_trace_csv(trace, csv);
    std::string line;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "t,area,M,Gtot,phi,kappa_min,F_max,dt");
    size_t rows = 0;
    std::string first_row;
    while (std::getline(csv, line)) {
        if (rows == 0) first_row = line;
        ++rows;
    }
    CHECK(rows == trace.samples.size());
    CHECK(first_row.substr(0, 2) == "0,");

    const ParallelFamily fam = parallel_family(sphere_surface(m, 1.0, 16, 32), 0.0, 0.3, 4);
    std::stringstream fcsv;
    write_family_csv(fam, fcsv);
    REQUIRE(std::getline(fcsv, line));
    CHECK(line == "t,area,M,Gtot,volume");
    rows = 0;
    while (std::getline(fcsv, line)) ++rows;
    CHECK(rows == 4);
}
