#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "direct.hpp"
#include "inverse.hpp"
#include "io.hpp"
#include "potential.hpp"
#include "scattering_data.hpp"
#include "selftest.hpp"

/// Command implementations behind the command-line tool. Each command writes
/// a human-readable log to `log` and returns its exit code.
namespace cubic_scatter::app {

using json = nlohmann::json;

enum ExitCode : int { ok = 0, validation = 2, numerical = 3, config = 4 };

struct RunConfig {
    std::string potential = "xexp"; // builtin name or path to an (x, q) CSV with JSON sidecar
    double alpha = 0.3;
    double a_prime = 0.0;           // 0: automatic
    int grid = 101;                 // samples per output table
    std::map<std::string, double> tol{{"alpha", 1e-6}, {"q", 1e-3}, {"q_full", 5e-2},
                                      {"relation", 1e-8}, {"holo", 1e-7}};
    std::filesystem::path out = ".";
    std::string format = "csv";
    bool oracle_F = false;
    std::string filter;
    std::filesystem::path omega;    // invert: scattering data file (default out/scattering_data.json)
    std::string inject;             // selftest: deliberate fault ("s2-sign")
    double x_max = 5.0;

    /// Applies "name=value"; unknown names and non-positive values are errors.
    void set_tolerance(const std::string& kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--tol expects name=value, got '" + kv + "'");
        std::string name = kv.substr(0, eq);
        if (!tol.count(name)) throw ConfigError("unknown tolerance '" + name + "'");
        double v;
        try {
            v = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad tolerance value in '" + kv + "'");
        }
        if (!(v > 0)) throw ConfigError("tolerance '" + name + "' must be positive");
        tol[name] = v;
    }

    void check() const {
        if (format != "csv" && format != "json") throw ConfigError("--format must be csv or json");
        if (grid < 2) throw ConfigError("--grid must be at least 2");
        if (a_prime < 0) throw ConfigError("--a-prime must be non-negative");
    }
};

[[nodiscard]] inline Potential load_potential(const std::string& spec) {
    if (std::filesystem::exists(spec)) return io::read_potential(spec);
    return Potential::builtin(spec);
}

/// Normalization |int x q dx| = 1, which the recovery of alpha relies on.
inline void require_normalized(const Potential& q) {
    double m = q.raw_moment(1);
    if (std::abs(std::abs(m) - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "potential '" << q.name << "' is not normalized: |int x q dx| = " << std::abs(m)
           << (m == 0.0 ? " (normalization unsatisfiable)" : "");
        throw ConfigError(os.str());
    }
}

/// Runs `body`, mapping the error taxonomy onto exit codes.
[[nodiscard]] inline int guarded(std::ostream& log, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        log << "validation error: " << e.what() << "\n";
        return validation;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return config;
    } catch (const StageError& e) {
        log << "numerical error [" << e.stage << "]: " << e.what() << "\n";
        return numerical;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "I/O error: " << e.what() << "\n";
        return config;
    } catch (const std::exception& e) {
        log << "numerical error: " << e.what() << "\n";
        return numerical;
    }
}

// -- writers ------------------------------------------------------------------------

/// Writes `t` as <stem>.csv or <stem>.json (columns as arrays).
inline std::filesystem::path write_table(const RunConfig& cfg, const std::string& stem, const io::Table& t) {
    if (cfg.format == "csv") {
        auto p = cfg.out / (stem + ".csv");
        io::write_text(p, io::to_csv(t));
        return p;
    }
    json j;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        std::vector<double> col;
        for (const auto& r : t.rows) col.push_back(r[c]);
        j[t.header[c]] = col;
    }
    auto p = cfg.out / (stem + ".json");
    io::write_json(p, j);
    return p;
}

[[nodiscard]] inline json report_json(const inverse::OmegaReport& r) {
    json a = json::array();
    for (const auto& c : r.checks)
        a.push_back({{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}, {"tol", c.tol}, {"where", c.where}});
    return a;
}

[[nodiscard]] inline json bound_states_json(const direct::BoundStateSet& b) {
    json pts = json::array();
    for (cx p : b.points()) pts.push_back(io::cj(p));
    return {{"zk", b.zk}, {"ws", b.ws}, {"include_zero", b.include_zero}, {"points", pts},
            {"dispersion_only", b.dispersion_only}};
}

inline void print_report(std::ostream& log, const inverse::OmegaReport& r) {
    for (const auto& c : r.checks) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-18s %-4s residual %.3e  tol %.1e", c.name.c_str(), c.passed ? "ok" : "FAIL",
                      c.residual, c.tol);
        log << buf << (c.where.empty() ? "" : "  (" + c.where + ")") << "\n";
    }
}

// -- selftest -----------------------------------------------------------------------

[[nodiscard]] inline std::vector<selftest::Suite> run_suites(const std::string& filter, const std::string& inject = {}) {
    using namespace selftest;
    auto want = [&](const std::string& name) {
        if (filter.empty()) return true;
        if (filter == "direct")
            return name.rfind("convolution", 0) == 0 || name.rfind("jost", 0) == 0 || name.rfind("scattering", 0) == 0;
        return name.rfind(filter, 0) == 0;
    };
    SEval eval;
    if (inject == "s2-sign") eval = [](int p, cx z) { return (p == 2 ? -1.0 : 1.0) * trig3::eval_s(p, z); };
    else if (!inject.empty()) throw ConfigError("unknown fault '" + inject + "'");
    std::vector<Suite> out;
    if (want("trig3")) out.push_back(trig3_identities(200, 3.0, 1e-12, 7, eval));
    if (want("zeros")) out.push_back(zeros_suite());
    if (want("convolution")) {
        out.push_back(convolution_suite(Potential::builtin("exp"), "exp"));
        out.push_back(convolution_suite(Potential::builtin("xexp").without_closed_forms(), "xexp quadrature"));
    }
    const auto xexp = Potential::builtin("xexp");
    if (want("jost"))
        for (double a : {0.0, 0.3, -0.5}) out.push_back(jost_suite(xexp, a));
    if (want("scattering")) {
        out.push_back(scattering_suite(xexp, 0.3, direct::CFunc::one()));
        out.push_back(scattering_suite(xexp, -0.5, direct::CFunc::monomial(1)));
    }
    if (out.empty()) throw ConfigError("--filter '" + filter + "' matches no suite");
    return out;
}

[[nodiscard]] inline int cmd_selftest(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        auto suites = run_suites(cfg.filter, cfg.inject);
        std::vector<std::string> failing;
        for (const auto& s : suites) {
            log << s.name << (s.passed() ? "  PASS" : "  FAIL") << "\n";
            for (const auto& c : s.checks) {
                char buf[200];
                std::snprintf(buf, sizeof buf, "  %-58s %.3e  tol %.0e  %s", c.name.c_str(), c.residual, c.tol,
                              c.passed() ? "ok" : (c.gate ? "FAIL" : "differs (printed form)"));
                log << buf << "\n";
                if (c.gate && !c.passed()) failing.push_back(s.name + ": " + c.name);
            }
        }
        if (failing.empty()) {
            log << "all identity suites pass\n";
            return int(ok);
        }
        log << "first failing identity: " << failing.front() << "\n";
        log << "failing identities:";
        for (const auto& f : failing) log << "\n  " << f;
        log << "\n";
        return int(validation);
    });
}

// -- direct ------------------------------------------------------------------------

/// psi_k(lambda, 0) and b on `n` points of each disc diameter.
[[nodiscard]] inline io::Table jost_table(direct::Coupling c, const Potential& q, double ap, int n) {
    io::Table t{{"line", "t", "lambda_re", "lambda_im", "b_re", "b_im", "psi1_re", "psi1_im", "psi2_re", "psi2_im",
                 "psi3_re", "psi3_im"},
                {}};
    t.rows.resize(3 * n);
    parallel_for(t.rows.size(), [&](std::size_t idx) {
        int k = static_cast<int>(idx / n) + 1;
        double s = -ap + 2.0 * ap * ((idx % n) + 0.5) / n; // half-step offset avoids 0
        cx l = s * zeta(k);
        std::vector<double> r{double(k), s, l.real(), l.imag()};
        cx b = direct::b_coeff(c, q, l);
        r.insert(r.end(), {b.real(), b.imag()});
        for (int j = 1; j <= 3; ++j) {
            cx p = direct::jost(c, q, j, l, 0.0).psi;
            r.insert(r.end(), {p.real(), p.imag()});
        }
        t.rows[idx] = std::move(r);
    });
    return t;
}

[[nodiscard]] inline ExportOptions export_options(const RunConfig& cfg) {
    ExportOptions o;
    o.a_prime = cfg.a_prime;
    o.tol = cfg.tol.at("relation");
    return o;
}

[[nodiscard]] inline inverse::ValidateOptions validate_options(const RunConfig& cfg) {
    inverse::ValidateOptions o;
    o.holo_tol = cfg.tol.at("holo");
    o.relation_tol = cfg.tol.at("relation");
    return o;
}

/// Forward step shared by `direct` and `roundtrip`.
[[nodiscard]] inline ScatteringData do_direct(const RunConfig& cfg, const Potential& q, std::ostream& log) {
    direct::Coupling c{cfg.alpha};
    auto om = export_scattering(c, q, direct::CFunc::one(), export_options(cfg));
    io::write_scattering(cfg.out / "scattering_data.json", om);
    write_table(cfg, "jost_grid", jost_table(c, q, om.a_prime, cfg.grid));
    io::write_json(cfg.out / "bound_states.json", bound_states_json(om.Ealpha));
    log << "potential " << q.name << ", alpha " << cfg.alpha << ", a' " << om.a_prime << ", "
        << om.lines[0].size() << " samples per diameter, " << om.Ealpha_points.size() << " point(s) in E_alpha\n";
    auto rep = inverse::validate_omega(om, validate_options(cfg));
    log << "validation of the exported data:\n";
    print_report(log, rep);
    if (!rep.passed()) throw ValidationError("exported scattering data fail validation");
    return om;
}

[[nodiscard]] inline int cmd_direct(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        cfg.check();
        auto q = load_potential(cfg.potential);
        (void)do_direct(cfg, q, log);
        log << "wrote scattering_data.json, jost_grid." << cfg.format << ", bound_states.json to " << cfg.out.string() << "\n";
        return int(ok);
    });
}

// -- invert -------------------------------------------------------------------------

struct InvertOutcome {
    inverse::PipelineResult result;
    std::vector<double> x, q;
    std::string failed_stage; // empty on success
    std::string error;
    [[nodiscard]] bool ok() const { return failed_stage.empty(); }
};

/// Inverse step shared by `invert` and `roundtrip`. Alpha is reported even
/// when a later stage fails; report.json records the failing stage.
[[nodiscard]] inline InvertOutcome do_invert(const RunConfig& cfg, const ScatteringData& om,
                                             const std::optional<Potential>& truth, std::ostream& log) {
    json report{{"mode", cfg.oracle_F ? "oracle-F" : "full"}};
    auto rep = inverse::validate_omega(om, validate_options(cfg));
    report["validation"] = report_json(rep);
    if (!rep.passed()) {
        log << "scattering data fail validation:\n";
        print_report(log, rep);
        report["status"] = "failed";
        report["stage"] = "validation";
        io::write_json(cfg.out / "report.json", report);
        throw ValidationError("scattering data fail validation");
    }
    inverse::PipelineOptions po;
    po.qopt.x_max = cfg.x_max;
    po.qopt.samples = cfg.grid;
    po.recover_q = false;
    if (cfg.oracle_F) {
        if (!truth) throw ConfigError("--oracle-F needs --potential");
        require_normalized(*truth);
        po.oracle_F = inverse::oracle_F(*truth);
    }
    InvertOutcome out;
    out.result = inverse::run_pipeline(om, po);
    auto& r = out.result;
    io::write_text(cfg.out / "alpha_hat.txt", io::fmt(r.an.alpha) + "\n");
    report["alpha_hat"] = r.an.alpha;
    report["modified"] = r.bv.modified;
    report["psi1_0"] = io::cj(r.an.psi1_0);
    log << "alpha_hat = " << io::fmt(r.an.alpha) << (r.bv.modified ? " (modified problem)" : "") << "\n";
    try {
        inverse::recover_q_stage(om, po, r);
        out.x = r.q->x;
        out.q = r.q->q;
        io::Table t{{"x", "q"}, {}};
        for (std::size_t i = 0; i < out.x.size(); ++i) t.rows.push_back({out.x[i], out.q[i]});
        write_table(cfg, "q_hat", t);
        report["status"] = "ok";
    } catch (const StageError& e) {
        out.failed_stage = e.stage;
        out.error = e.what();
    } catch (const Error& e) {
        out.failed_stage = "continuation";
        out.error = e.what();
    }
    if (!out.ok()) {
        report["status"] = "failed";
        report["stage"] = out.failed_stage;
        report["error"] = out.error;
        log << "q recovery failed [" << out.failed_stage << "]: " << out.error << "\n";
    }
    report["residuals"] = r.residuals;
    report["warnings"] = r.warnings;
    io::write_json(cfg.out / "report.json", report);
    for (const auto& [k, v] : r.residuals) log << "  " << k << " = " << v << "\n";
    for (const auto& w : r.warnings) log << "  warning: " << w << "\n";
    return out;
}

[[nodiscard]] inline int cmd_invert(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        cfg.check();
        auto path = cfg.omega.empty() ? cfg.out / "scattering_data.json" : cfg.omega;
        auto om = io::read_scattering(path);
        std::optional<Potential> truth;
        if (cfg.oracle_F) truth = load_potential(cfg.potential);
        auto res = do_invert(cfg, om, truth, log);
        log << "wrote alpha_hat.txt" << (res.ok() ? ", q_hat." + cfg.format : "") << ", report.json to "
            << cfg.out.string() << "\n";
        return int(res.ok() ? ok : numerical);
    });
}

// -- roundtrip -------------------------------------------------------------------------

[[nodiscard]] inline int cmd_roundtrip(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        cfg.check();
        auto q = load_potential(cfg.potential);
        require_normalized(q);
        std::string mode = cfg.oracle_F ? "oracle-F" : "full";
        double q_tol = cfg.tol.at(cfg.oracle_F ? "q" : "q_full"), a_tol = cfg.tol.at("alpha");
        json verdict{{"mode", mode}, {"alpha", cfg.alpha}, {"tol_alpha", a_tol}, {"tol_q", q_tol}};
        auto om = do_direct(cfg, q, log);
        auto inv = do_invert(cfg, om, q, log);
        double ea = std::abs(inv.result.an.alpha - cfg.alpha);
        verdict["alpha_hat"] = inv.result.an.alpha;
        verdict["alpha_error"] = ea;
        if (!inv.ok()) {
            verdict["pass"] = false;
            verdict["stage"] = inv.failed_stage;
            verdict["error"] = inv.error;
            io::write_json(cfg.out / "roundtrip.json", verdict);
            log << "roundtrip (" << mode << "): |alpha_hat - alpha| = " << ea << ", q not recovered ["
                << inv.failed_stage << "]  FAIL\n";
            return int(numerical);
        }
        double eq = 0.0;
        for (std::size_t i = 0; i < inv.x.size(); ++i) eq = std::max(eq, std::abs(inv.q[i] - q.q(inv.x[i])));
        bool pass = ea <= a_tol && eq <= q_tol;
        verdict["q_error"] = eq;
        verdict["x_max"] = cfg.x_max;
        verdict["pass"] = pass;
        io::write_json(cfg.out / "roundtrip.json", verdict);
        log << "roundtrip (" << mode << "): |alpha_hat - alpha| = " << ea << ", max |q_hat - q| on [0, " << cfg.x_max
            << "] = " << eq << "  " << (pass ? "PASS" : "FAIL") << "\n";
        return int(pass ? ok : numerical);
    });
}

// -- bound states ------------------------------------------------------------------------

[[nodiscard]] inline int cmd_bound_states(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        cfg.check();
        auto q = load_potential(cfg.potential);
        auto b = direct::bound_states(direct::Coupling{cfg.alpha}, q);
        io::write_json(cfg.out / "bound_states.json", bound_states_json(b));
        log << "E_alpha = {0}";
        for (double z : b.zk) log << ", z2^l * " << io::fmt(z);
        for (double w : b.ws) log << ", z2^l * " << io::fmt(w);
        log << "  (l = 0, 1, 2)\n";
        if (!b.dispersion_only.empty()) {
            log << "dispersion roots failing the filter:";
            for (double d : b.dispersion_only) log << " " << io::fmt(d);
            log << "\n";
        }
        return int(ok);
    });
}

} // namespace cubic_scatter::app
