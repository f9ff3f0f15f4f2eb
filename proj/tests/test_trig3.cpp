#include <gtest/gtest.h>

#include "cubic_scatter/selftest.hpp"
#include "cubic_scatter/trig3.hpp"

using namespace cubic_scatter;
using trig3::eval_s;

namespace {

// Reference values from 30-digit partial sums of the defining series.
constexpr double s0_1 = 1.16805831337591852551625692961;
constexpr double s1_1 = 1.04186535509890984630133661502;
constexpr double s2_1 = 0.50835815998421686354269392672;

void expect_suite(const selftest::Suite& s) {
    for (const auto& c : s.checks) {
        if (!c.gate) continue;
        EXPECT_TRUE(c.passed()) << s.name << ": " << c.name << " residual " << c.residual;
    }
}

} // namespace

TEST(Trig3, SeriesValuesAtOne) {
    EXPECT_NEAR(eval_s(0, 1.0).real(), s0_1, 1e-14);
    EXPECT_NEAR(eval_s(1, 1.0).real(), s1_1, 1e-14);
    EXPECT_NEAR(eval_s(2, 1.0).real(), s2_1, 1e-14);
    EXPECT_EQ(eval_s(1, 1.0).imag(), 0.0);
}

TEST(Trig3, ComplexArgument) {
    cx v = eval_s(1, cx(0.5, 0.3));
    EXPECT_NEAR(v.real(), 0.497313023814716825022895237758, 1e-14);
    EXPECT_NEAR(v.imag(), 0.303997278559687722978827348564, 1e-14);
}

TEST(Trig3, ValuesAtZero) {
    EXPECT_EQ(eval_s(0, 0.0), cx(1.0));
    EXPECT_EQ(eval_s(1, 0.0), cx(0.0));
    EXPECT_EQ(eval_s(2, 0.0), cx(0.0));
}

TEST(Trig3, LargeArgumentsStayRelativelyAccurate) {
    // s0 + s1 + s2 = e^z; the terms cancel when Re z < 0, so the scale is the largest term.
    for (cx z : {cx(12.0, 0.0), cx(-9.0, 4.0), cx(0.0, 15.0), cx(20.0, -20.0)}) {
        cx a = eval_s(0, z), b = eval_s(1, z), c = eval_s(2, z);
        double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
        EXPECT_LT(std::abs(a + b + c - std::exp(z)), 1e-14 * scale) << z;
    }
}

TEST(Trig3, IndexIsTakenModThree) {
    cx z(0.7, -0.2);
    EXPECT_EQ(eval_s(4, z), eval_s(1, z));
    EXPECT_EQ(eval_s(-1, z), eval_s(2, z));
    EXPECT_EQ(trig3::eval_s_deriv(0, 1, z), eval_s(2, z));
}

TEST(Trig3, IdentitySuite) { expect_suite(selftest::trig3_identities()); }

TEST(Trig3, IdentitySuiteDetectsSignFault) {
    auto bad = [](int p, cx z) { return ((p % 3) + 3) % 3 == 2 ? -eval_s(2, z) : eval_s(p, z); };
    EXPECT_FALSE(selftest::trig3_identities(50, 3.0, 1e-12, 7, bad).passed());
}

TEST(Trig3, ZerosMatchSeriesRoots) {
    auto z0 = trig3::zeros_s(0, 2), z1 = trig3::zeros_s(1, 2), z2 = trig3::zeros_s(2, 2);
    EXPECT_NEAR(z0[0], 1.84981279919014347629432620581, 1e-11);
    EXPECT_EQ(z1[0], 0.0);
    EXPECT_EQ(z2[0], 0.0);
    EXPECT_NEAR(z1[1], 3.01674421208407851792857674622, 1e-11);
    EXPECT_NEAR(z2[1], 4.23320719243895656091540892155, 1e-11);
    for (double x : z0) EXPECT_LT(std::abs(eval_s(0, -x)), 1e-11);
}

TEST(Trig3, ZerosSuite) { expect_suite(selftest::zeros_suite()); }

TEST(Trig3, ZerosRejectBadArguments) {
    EXPECT_THROW((void)trig3::zeros_s(3, 2), DomainError);
    EXPECT_THROW((void)trig3::zeros_s(0, 0), DomainError);
}

TEST(Trig3, CauchySolveHomogeneousMatchesKernels) {
    cx l(0.4, 0.1);
    trig3::CauchyData d{1.0, 0.0, 0.0, l, {}};
    for (double x : {0.0, 0.5, 2.0}) EXPECT_LT(std::abs(trig3::cauchy_solve(d, x) - eval_s(0, I * l * x)), 1e-14);
}

TEST(Trig3, CauchySolveZeroLambdaGivesPolynomial) {
    // i y''' = 0 with y(0)=1, y'(0)=1, y''(0)=2 is y = 1 + x + x^2; y(1) = 3.
    trig3::CauchyData d{1.0, 1.0, 2.0, 0.0, {}};
    EXPECT_LT(std::abs(trig3::cauchy_solve(d, 1.0) - 3.0), 1e-14);
}

TEST(Trig3, CauchySolveForcedSatisfiesEquation) {
    cx l(0.3, -0.2);
    trig3::CauchyData d{0.5, cx(0, 1), -1.0, l, [](double t) { return cx(std::exp(-t), t); }};
    double x = 1.3, h = 1e-3;
    auto ddy = [&](double s) { return trig3::cauchy_solve_full(d, s).ddy; };
    cx d3 = (ddy(x + h) - ddy(x - h)) / (2 * h);
    cx res = I * d3 - l * l * l * trig3::cauchy_solve(d, x) - d.forcing(x);
    EXPECT_LT(std::abs(res), 1e-6);
    auto v0 = trig3::cauchy_solve_full(d, 0.0);
    EXPECT_EQ(v0.y, d.y0);
    EXPECT_EQ(v0.dy, d.y1);
    EXPECT_EQ(v0.ddy, d.y2);
}

TEST(Trig3, CauchySolveRejectsNegativeX) {
    trig3::CauchyData d{1.0, 0.0, 0.0, 1.0, {}};
    EXPECT_THROW((void)trig3::cauchy_solve(d, -1.0), DomainError);
}
