#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cubic_scatter/app.hpp"

using cubic_scatter::app::RunConfig;

int main(int argc, char** argv) {
    CLI::App cli{"Direct and inverse scattering for the third-order operator with a rank-one potential"};
    cli.require_subcommand(1);
    RunConfig cfg;
    std::vector<std::string> tols;
    std::string omega;

    auto common = [&](CLI::App* sc) {
        sc->add_option("--potential", cfg.potential, "builtin (exp, xexp, x2exp, zero) or path to x,q CSV")
            ->capture_default_str();
        sc->add_option("--alpha", cfg.alpha, "coupling constant")->capture_default_str();
        sc->add_option("--a-prime", cfg.a_prime, "disc radius for the data (0: 0.95 decay/3)")->capture_default_str();
        sc->add_option("--grid", cfg.grid, "samples per output table")->capture_default_str();
        sc->add_option("--tol", tols, "tolerance override name=value (alpha, q, q_full, relation, holo)");
        sc->add_option("--out", cfg.out, "output directory")->capture_default_str();
        sc->add_option("--format", cfg.format, "table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    };

    auto* self = cli.add_subcommand("selftest", "run the identity suites");
    self->add_option("--filter", cfg.filter, "suite prefix (trig3, zeros, convolution, jost, scattering, direct)");
    self->add_option("--inject", cfg.inject, "deliberate fault to demonstrate detection (s2-sign)")->group("");
    auto* dir = cli.add_subcommand("direct", "export scattering data for a potential");
    common(dir);
    auto* inv = cli.add_subcommand("invert", "recover alpha and q from scattering data");
    common(inv);
    inv->add_option("--omega", omega, "scattering data file (default <out>/scattering_data.json)");
    inv->add_flag("--oracle-F", cfg.oracle_F, "feed the hybrid-transform stage the exact F of --potential");
    auto* rt = cli.add_subcommand("roundtrip", "direct then invert, compared against the input");
    common(rt);
    rt->add_flag("--oracle-F", cfg.oracle_F, "use the exact F for the final stages");
    auto* bs = cli.add_subcommand("bound-states", "locate the bound-state set");
    common(bs);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = cli.exit(e);
        return rc == 0 ? 0 : cubic_scatter::app::config;
    }
    int rc = cubic_scatter::app::guarded(std::cerr, [&] {
        for (const auto& t : tols) cfg.set_tolerance(t);
        if (!omega.empty()) cfg.omega = omega;
        return 0;
    });
    if (rc != 0) return rc;

    using namespace cubic_scatter::app;
    if (*self) return cmd_selftest(cfg, std::cout);
    if (*dir) return cmd_direct(cfg, std::cout);
    if (*inv) return cmd_invert(cfg, std::cout);
    if (*rt) return cmd_roundtrip(cfg, std::cout);
    return cmd_bound_states(cfg, std::cout);
}
