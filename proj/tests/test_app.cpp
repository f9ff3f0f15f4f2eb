#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "cubic_scatter/app.hpp"

using namespace cubic_scatter;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("cubic_scatter_app_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args) {
    std::string cmd = std::string(CUBIC_SCATTER_CLI) + " " + args + " > /dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

} // namespace

TEST(RunConfig, Tolerances) {
    app::RunConfig c;
    c.set_tolerance("q=1e-4");
    EXPECT_EQ(c.tol.at("q"), 1e-4);
    EXPECT_THROW(c.set_tolerance("nope=1"), ConfigError);
    EXPECT_THROW(c.set_tolerance("q=-1"), ConfigError);
    EXPECT_THROW(c.set_tolerance("q"), ConfigError);
}

TEST(RunConfig, PotentialLoading) {
    EXPECT_EQ(app::load_potential("xexp").name, "xexp");
    EXPECT_THROW((void)app::load_potential("no/such/file.csv"), ConfigError);
    EXPECT_THROW(app::require_normalized(Potential::builtin("zero")), ConfigError);
    EXPECT_NO_THROW(app::require_normalized(Potential::builtin("exp")));
}

TEST(Guarded, MapsErrorsToExitCodes) {
    std::ostringstream log;
    EXPECT_EQ(app::guarded(log, [] { return 0; }), app::ok);
    EXPECT_EQ(app::guarded(log, []() -> int { throw ValidationError("v"); }), app::validation);
    EXPECT_EQ(app::guarded(log, []() -> int { throw ConfigError("c"); }), app::config);
    EXPECT_EQ(app::guarded(log, []() -> int { throw StageError("WedgeSolveFail", "s"); }), app::numerical);
    EXPECT_EQ(app::guarded(log, []() -> int { throw DomainError("d"); }), app::numerical);
}

TEST(Cli, HelpAndParseErrors) {
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run(""), app::config);
    EXPECT_EQ(run("direct --grid notanumber"), app::config);
    EXPECT_EQ(run("direct --format xml"), app::config);
}

TEST(Cli, Selftest) {
    EXPECT_EQ(run("selftest --filter trig3"), 0);
    EXPECT_EQ(run("selftest --filter trig3 --inject s2-sign"), app::validation);
}

TEST(Cli, ConfigErrors) {
    auto d = scratch("config");
    EXPECT_EQ(run("direct --a-prime 0.5 --out " + d.string()), app::config);
    EXPECT_EQ(run("direct --tol bogus=1 --out " + d.string()), app::config);
    EXPECT_EQ(run("roundtrip --potential zero --out " + d.string()), app::config);
    EXPECT_EQ(run("invert --omega " + (d / "missing.json").string() + " --out " + d.string()), app::config);
}

TEST(Cli, DirectIsDeterministic) {
    auto a = scratch("det_a"), b = scratch("det_b");
    ASSERT_EQ(run("direct --out " + a.string()), 0);
    ASSERT_EQ(run("direct --out " + b.string()), 0);
    for (const char* f : {"scattering_data.json", "jost_grid.csv", "bound_states.json"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(io::read_text(a / f), io::read_text(b / f)) << f;
    }
    auto c = scratch("det_json");
    ASSERT_EQ(run("direct --format json --out " + c.string()), 0);
    EXPECT_TRUE(fs::exists(c / "jost_grid.json"));
}

TEST(Cli, InvertWithOracle) {
    auto d = scratch("invert");
    ASSERT_EQ(run("direct --out " + d.string()), 0);
    ASSERT_EQ(run("invert --oracle-F --out " + d.string()), 0);
    double alpha = std::stod(io::read_text(d / "alpha_hat.txt"));
    EXPECT_NEAR(alpha, 0.3, 1e-6);
    auto rep = io::read_json(d / "report.json");
    EXPECT_EQ(rep.at("status").get<std::string>(), "ok");
    auto q = io::parse_csv(io::read_text(d / "q_hat.csv"));
    EXPECT_EQ(q.header.size(), 2u);
}

TEST(Cli, FullModeReportsAlphaAndStage) {
    auto d = scratch("full");
    ASSERT_EQ(run("direct --out " + d.string()), 0);
    EXPECT_EQ(run("invert --out " + d.string()), app::numerical);
    EXPECT_NEAR(std::stod(io::read_text(d / "alpha_hat.txt")), 0.3, 1e-6);
    auto rep = io::read_json(d / "report.json");
    EXPECT_EQ(rep.at("status").get<std::string>(), "failed");
    EXPECT_EQ(rep.at("stage").get<std::string>(), "LaplaceInversionUnstable");
}

TEST(Cli, RoundtripOracle) {
    auto d = scratch("roundtrip");
    ASSERT_EQ(run("roundtrip --oracle-F --out " + d.string()), 0);
    auto j = io::read_json(d / "roundtrip.json");
    EXPECT_TRUE(j.at("pass").get<bool>());
    EXPECT_LT(j.at("alpha_error").get<double>(), 1e-6);
    EXPECT_LT(j.at("q_error").get<double>(), 1e-3);
}

TEST(Cli, BoundStates) {
    auto d = scratch("bs");
    ASSERT_EQ(run("bound-states --out " + d.string()), 0);
    auto j = io::read_json(d / "bound_states.json");
    EXPECT_TRUE(j.contains("points"));
}
