#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/interpolators/barycentric_rational.hpp>
#include <json.hpp>

#include "core.hpp"
#include "potential.hpp"
#include "raygeom.hpp"
#include "rhsolver.hpp"
#include "scattering_data.hpp"

namespace cubic_scatter::io {

using json = nlohmann::json;

/// Shortest-exact decimal for CSV cells (17 significant digits).
[[nodiscard]] inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << text;
}

[[nodiscard]] inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + p.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

[[nodiscard]] inline json read_json(const std::filesystem::path& p) {
    try {
        return json::parse(read_text(p));
    } catch (const json::exception& e) {
        throw ConfigError("bad JSON in " + p.string() + ": " + e.what());
    }
}

inline void write_json(const std::filesystem::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

/// Numeric CSV with a header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

[[nodiscard]] inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
    out += "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + fmt(r[i]);
        out += "\n";
    }
    return out;
}

[[nodiscard]] inline Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("CSV: empty input");
    {
        std::istringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ',')) t.header.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> r;
        std::istringstream rs(line);
        std::string cell;
        while (std::getline(rs, cell, ',')) {
            try {
                r.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("CSV: bad number '" + cell + "'");
            }
        }
        if (r.size() != t.header.size()) throw ConfigError("CSV: row width does not match header");
        t.rows.push_back(std::move(r));
    }
    return t;
}

[[nodiscard]] inline std::filesystem::path sidecar(const std::filesystem::path& csv) {
    auto p = csv;
    p.replace_extension(".json");
    return p;
}

// -- complex values in JSON --------------------------------------------------------

[[nodiscard]] inline json cj(cx v) { return json::array({v.real(), v.imag()}); }
[[nodiscard]] inline cx cx_of(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

// -- potential ------------------------------------------------------------------

inline void write_potential(const std::filesystem::path& csv, const Potential& q, const std::vector<double>& x) {
    Table t{{"x", "q"}, {}};
    for (double v : x) t.rows.push_back({v, q.q(v)});
    write_text(csv, to_csv(t));
    write_json(sidecar(csv), json{{"decay_a", q.decay_a}, {"moment", q.moment}, {"normalized", q.normalized},
                                  {"name", q.name}});
}

inline void write_potential_samples(const std::filesystem::path& csv, const std::vector<double>& x,
                                    const std::vector<double>& v, double decay_a, double moment, bool normalized) {
    Table t{{"x", "q"}, {}};
    for (std::size_t i = 0; i < x.size(); ++i) t.rows.push_back({x[i], v[i]});
    write_text(csv, to_csv(t));
    write_json(sidecar(csv), json{{"decay_a", decay_a}, {"moment", moment}, {"normalized", normalized}});
}

/// Potential from (x, q) samples interpolated by a barycentric rational
/// (zero beyond the last node).
[[nodiscard]] inline Potential read_potential(const std::filesystem::path& csv) {
    auto t = parse_csv(read_text(csv));
    if (t.header.size() != 2) throw ConfigError("potential CSV needs columns x,q");
    auto meta = read_json(sidecar(csv));
    std::vector<double> x, v;
    for (auto& r : t.rows) {
        x.push_back(r[0]);
        v.push_back(r[1]);
    }
    if (x.size() < 4) throw ConfigError("potential CSV: need at least 4 samples");
    double xmax = x.back(), xmin = x.front();
    auto interp = std::make_shared<boost::math::barycentric_rational<double>>(x.begin(), x.end(), v.begin(), 3);
    Potential p([interp, xmin, xmax](double s) { return (s < xmin || s > xmax) ? 0.0 : (*interp)(s); },
                meta.at("decay_a").get<double>(), xmax);
    p.name = meta.value("name", csv.stem().string());
    return p;
}

// -- functions on rays ---------------------------------------------------------------

inline void write_rayfn(const std::filesystem::path& csv, const raygeom::RayFn& f) {
    Table t{{"x", "re", "im"}, {}};
    for (std::size_t i = 0; i < f.grid.size(); ++i) t.rows.push_back({f.grid[i], f.values[i].real(), f.values[i].imag()});
    write_text(csv, to_csv(t));
    write_json(sidecar(csv), json{{"k", f.label.k},
                                  {"orientation", f.label.orientation == raygeom::Orientation::outgoing ? "outgoing" : "incoming"},
                                  {"decay", f.decay}});
}

[[nodiscard]] inline raygeom::RayFn read_rayfn(const std::filesystem::path& csv) {
    auto t = parse_csv(read_text(csv));
    if (t.header.size() != 3) throw ConfigError("ray CSV needs columns x,re,im");
    auto meta = read_json(sidecar(csv));
    raygeom::RayLabel l{meta.at("k").get<int>(), meta.at("orientation").get<std::string>() == "outgoing"
                                                     ? raygeom::Orientation::outgoing
                                                     : raygeom::Orientation::incoming};
    std::vector<double> x;
    std::vector<cx> v;
    for (auto& r : t.rows) {
        x.push_back(r[0]);
        v.push_back({r[1], r[2]});
    }
    return raygeom::RayFn(l, std::move(x), std::move(v), meta.at("decay").get<double>());
}

// -- scattering data ---------------------------------------------------------------

[[nodiscard]] inline json to_json(const ScatteringData& om) {
    json lines = json::array();
    for (int k = 1; k <= 3; ++k) {
        json L = json::array();
        for (const auto& s : om.lines[k - 1])
            L.push_back({{"lambda", cj(s.lambda)}, {"S2", cj(s.S2)}, {"S3", cj(s.S3)}, {"C", cj(s.C)}});
        lines.push_back({{"k", k}, {"samples", L}});
    }
    json tail = json::array();
    for (const auto& t : om.tail) tail.push_back({t.k, t.outgoing ? 1 : 0, t.rho, t.G.real(), t.G.imag()});
    json pts = json::array();
    for (cx p : om.Ealpha_points) pts.push_back(cj(p));
    return json{{"a_prime", om.a_prime},
                {"r", om.r},
                {"breaks", om.breaks},
                {"lines", lines},
                {"tail", tail},
                {"Ealpha", {{"zk", om.Ealpha.zk}, {"ws", om.Ealpha.ws}, {"points", pts}}}};
}

[[nodiscard]] inline ScatteringData scattering_from_json(const json& j) {
    try {
        ScatteringData om;
        om.a_prime = j.at("a_prime").get<double>();
        om.r = j.at("r").get<int>();
        om.breaks = j.at("breaks").get<std::vector<double>>();
        for (const auto& L : j.at("lines")) {
            int k = L.at("k").get<int>();
            if (k < 1 || k > 3) throw ConfigError("scattering data: bad line index");
            for (const auto& s : L.at("samples"))
                om.lines[k - 1].push_back({cx_of(s.at("lambda")), cx_of(s.at("S2")), cx_of(s.at("S3")), cx_of(s.at("C"))});
        }
        for (const auto& t : j.at("tail"))
            om.tail.push_back({t.at(0).get<int>(), t.at(1).get<int>() == 1, t.at(2).get<double>(),
                               {t.at(3).get<double>(), t.at(4).get<double>()}});
        const auto& E = j.at("Ealpha");
        om.Ealpha.zk = E.at("zk").get<std::vector<double>>();
        om.Ealpha.ws = E.at("ws").get<std::vector<double>>();
        for (const auto& p : E.at("points")) om.Ealpha_points.push_back(cx_of(p));
        return om;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scattering data: ") + e.what());
    }
}

inline void write_scattering(const std::filesystem::path& p, const ScatteringData& om) { write_json(p, to_json(om)); }
[[nodiscard]] inline ScatteringData read_scattering(const std::filesystem::path& p) {
    return scattering_from_json(read_json(p));
}

// -- RH coefficient dump ---------------------------------------------------------

/// Per line: {grid t, re, im, unwrapped_phase}; `breaks` restores the grid.
[[nodiscard]] inline json coefficients_json(const rh::RHProblem& P) {
    json lines = json::array();
    for (int k = 1; k <= 3; ++k) {
        const auto& G = P.G[k - 1];
        const auto& h = P.logG[k - 1];
        std::vector<double> t, re, im, ph;
        for (std::size_t i = 0; i < G.v.size(); ++i) {
            t.push_back(G.t(i));
            re.push_back(G.v[i].real());
            im.push_back(G.v[i].imag());
            ph.push_back(h.v[i].imag());
        }
        lines.push_back({{"k", k}, {"grid", t}, {"re", re}, {"im", im}, {"unwrapped_phase", ph},
                         {"winding", P.diag[k - 1].winding}});
    }
    return json{{"breaks", P.grid.breaks}, {"lines", lines}};
}

[[nodiscard]] inline rh::RHProblem coefficients_from_json(const json& j) {
    auto grid = rh::ContourGrid::from_breaks(j.at("breaks").get<std::vector<double>>());
    std::array<std::vector<cx>, 3> s;
    for (const auto& L : j.at("lines")) {
        int k = L.at("k").get<int>();
        auto re = L.at("re").get<std::vector<double>>(), im = L.at("im").get<std::vector<double>>();
        for (std::size_t i = 0; i < re.size(); ++i) s[k - 1].push_back({re[i], im[i]});
    }
    return rh::RHProblem(std::move(grid), s);
}

} // namespace cubic_scatter::io
