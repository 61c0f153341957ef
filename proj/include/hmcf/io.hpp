#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmcf/audit.hpp"
#include "hmcf/flow.hpp"

namespace hmcf {

// All numeric output uses %.17g so that doubles survive a text round trip
// bit for bit.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    return os;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open for reading: " + path);
    return is;
}

}  // namespace detail

// Surface snapshot, line oriented:
//   hmcf-surface 1
//   a <curvature parameter>
//   center <4 components>
//   frame <4 components>         (three lines, E1 E2 E3)
//   grid <ntheta> <nphi>
//   <ntheta lines of nphi radii>
inline void save_surface(const RadialSurface& s, std::ostream& os) {
    os << "hmcf-surface 1\n";
    os << "a " << fmt17(s.space.a) << "\n";
    os << "center";
    for (double c : s.center.x) os << ' ' << fmt17(c);
    os << "\n";
    for (const Vec4& e : s.frame) {
        os << "frame";
        for (double c : e) os << ' ' << fmt17(c);
        os << "\n";
    }
    const SphereGrid& g = *s.grid;
    os << "grid " << g.ntheta << ' ' << g.nphi << "\n";
    for (int i = 0; i < g.ntheta; ++i) {
        for (int j = 0; j < g.nphi; ++j) {
            os << (j ? " " : "") << fmt17(s.r(i, j));
        }
        os << "\n";
    }
}

inline void save_surface(const RadialSurface& s, const std::string& path) {
    auto os = detail::open_out(path);
    save_surface(s, os);
}

inline RadialSurface load_surface(std::istream& is) {
    auto fail = [](const std::string& what) -> ConfigError {
        return ConfigError("surface snapshot: " + what);
    };
    std::string word;
    int version = 0;
    if (!(is >> word >> version) || word != "hmcf-surface" || version != 1) {
        throw fail("bad header");
    }
    double a = 0.0;
    if (!(is >> word >> a) || word != "a") throw fail("missing curvature line");
    ModelSpace m(a);

    Point center;
    if (!(is >> word) || word != "center") throw fail("missing center line");
    for (double& c : center.x) {
        if (!(is >> c)) throw fail("short center line");
    }
    std::array<Vec4, 3> frame{};
    for (Vec4& e : frame) {
        if (!(is >> word) || word != "frame") throw fail("missing frame line");
        for (double& c : e) {
            if (!(is >> c)) throw fail("short frame line");
        }
    }
    int nt = 0, np = 0;
    if (!(is >> word >> nt >> np) || word != "grid") throw fail("missing grid line");
    if (nt < 16 || nt > (1 << 20) || np < 32 || np > (1 << 20)) {
        throw fail("implausible grid size");
    }

    RadialSurface s{m, center, frame, make_grid(nt, np), Grid2(nt, np)};
    for (double& r : s.r.v) {
        if (!(is >> r)) throw fail("short radius table");
        if (!(r > 0.0)) throw fail("nonpositive radius");
    }
    return s;
}

inline RadialSurface load_surface(const std::string& path) {
    auto is = detail::open_in(path);
    return load_surface(is);
}

inline void write_flow_trace_csv(const FlowTrace& trace, std::ostream& os) {
    os << "t,area,M,Gtot,phi,kappa_min,F_max,dt\n";
    for (const FlowSample& s : trace.samples) {
        os << fmt17(s.t) << ',' << fmt17(s.integrals.area) << ','
           << fmt17(s.integrals.total_mean_curvature) << ','
           << fmt17(s.integrals.total_gauss_curvature) << ',' << fmt17(s.phi) << ','
           << fmt17(s.kappa_min) << ',' << fmt17(s.F_max) << ',' << fmt17(s.dt_used) << "\n";
    }
}

inline void write_flow_trace_csv(const FlowTrace& trace, const std::string& path) {
    auto os = detail::open_out(path);
    write_flow_trace_csv(trace, os);
}

inline void write_family_csv(const ParallelFamily& fam, std::ostream& os) {
    os << "t,area,M,Gtot,volume\n";
    for (size_t k = 0; k < fam.offsets.size(); ++k) {
        const SurfaceIntegrals& si = fam.integrals[k];
        os << fmt17(fam.offsets[k]) << ',' << fmt17(si.area) << ','
           << fmt17(si.total_mean_curvature) << ',' << fmt17(si.total_gauss_curvature) << ','
           << fmt17(si.volume) << "\n";
    }
}

inline void write_family_csv(const ParallelFamily& fam, const std::string& path) {
    auto os = detail::open_out(path);
    write_family_csv(fam, os);
}

inline nlohmann::json report_to_json(const AuditReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["tol"] = r.tol;
    j["two_sided"] = r.two_sided;
    j["expected_to_fail"] = r.expected_to_fail;
    j["pass"] = r.pass;
    for (const auto& [k, v] : r.metadata) j["metadata"][k] = v;
    return j;
}

inline nlohmann::json reports_to_json(const std::vector<AuditReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const AuditReport& r : reports) arr.push_back(report_to_json(r));
    return arr;
}

inline void write_reports_json(const std::vector<AuditReport>& reports, const std::string& path) {
    auto os = detail::open_out(path);
    os << reports_to_json(reports).dump(2) << "\n";
}

inline void write_reports_csv(const std::vector<AuditReport>& reports, std::ostream& os) {
    os << "name,lhs,rhs,slack,pass\n";
    for (const AuditReport& r : reports) {
        os << r.name << ',' << fmt17(r.lhs) << ',' << fmt17(r.rhs) << ',' << fmt17(r.slack) << ','
           << (r.pass ? 1 : 0) << "\n";
    }
}

inline void write_reports_csv(const std::vector<AuditReport>& reports, const std::string& path) {
    auto os = detail::open_out(path);
    write_reports_csv(reports, os);
}

}  // namespace hmcf
