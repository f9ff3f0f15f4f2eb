#include <gtest/gtest.h>

#include "cubic_scatter/rhsolver.hpp"

using namespace cubic_scatter;
using namespace cubic_scatter::rh;

namespace {

// Zero-free rational sectional function with value 1 at infinity: one
// zero/pole pair per sector, both outside that sector.
cx manufactured(int p, cx z) {
    double r = 0.7 + 0.1 * p;
    cx b = std::polar(r, (2 * p - 1) * pi / 6 + pi);
    double kap = (p % 2) ? 0.8 : 1.3;
    return (z - kap * b) / (z - b);
}

// As above with boundary zeros at 0.4 and -0.3; each neighbouring sector
// carries a compensating pole on its own bisector so the sectional function
// still tends to 1.
const std::vector<cx> boundary_zeros{0.4, -0.3};

cx with_zeros(int p, cx z) {
    cx v = manufactured(p, z);
    for (cx e : boundary_zeros) {
        auto [L, R] = ray_sectors(ray_of(e));
        if (L != p && R != p) continue;
        int other = L == p ? R : L;
        cx pole = std::polar(1.1 * std::abs(e) + 0.3, (2 * other - 1) * pi / 6);
        v *= (z - e) / (z - pole);
    }
    return v;
}

std::vector<cx> test_points() {
    std::vector<cx> z;
    for (int p = 1; p <= 6; ++p)
        for (double r : {0.01, 0.3, 1.0, 2.5, 10.0})
            for (double a : {0.1, 0.5, 0.9}) z.push_back(std::polar(r, (p - 1 + a) * pi / 3));
    return z;
}

const ContourGrid& grid() {
    static const ContourGrid g = ContourGrid::graded(2.0, 2e3);
    return g;
}

LineFunction line_samples(int k, const std::function<cx(double)>& h) {
    LineFunction f;
    f.k = k;
    f.grid = &grid();
    f.v.resize(2 * grid().size());
    for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] = h(f.t(i));
    f.fit_tails();
    return f;
}

} // namespace

TEST(CauchyIntegral, ZeroDensity) {
    auto h = line_samples(2, [](double) { return cx{}; });
    EXPECT_EQ(cauchy_line_integral(h, cx(0.3, 0.7)), cx{});
}

TEST(CauchyIntegral, ResidueOracle) {
    // Closing upward: residues at i (-1) and at z (4/3) give 1/3 at z = i/2.
    auto h = line_samples(1, [](double t) { return cx(1.0 / (t * t + 1.0)); });
    EXPECT_LT(std::abs(cauchy_line_integral(h, cx(0, 0.5)) - 1.0 / 3.0), 1e-10);
    // Closing downward (clockwise) at z = -i/2 gives -1/3.
    EXPECT_LT(std::abs(cauchy_line_integral(h, cx(0, -0.5)) - (-1.0 / 3.0)), 1e-10);
}

TEST(CauchyIntegral, SokhotskiJump) {
    auto hfun = [](double t) { return cx(1.0 / (t * t + 1.0), 0.2 * t / (t * t + 4.0)); };
    auto h = line_samples(1, hfun);
    for (std::size_t i = 40; i < h.v.size() - 40; i += 53) {
        if (std::abs(h.t(i)) > 5) continue;
        auto [plus, minus] = plemelj(h, i);
        EXPECT_LT(std::abs(plus - minus - h.v[i]), 1e-14);
        // Finite-eps limits from either side.
        double t = h.t(i), eps = 1e-7;
        EXPECT_LT(std::abs(cauchy_line_integral(h, cx(t, eps), 0.0) - plus), 1e-5) << t;
        EXPECT_LT(std::abs(cauchy_line_integral(h, cx(t, -eps), 0.0) - minus), 1e-5) << t;
    }
}

TEST(CauchyIntegral, RotatedLine) {
    // The same density transported to L_{zeta_2}: C(z zeta_2) equals the line-1 value at z.
    auto f = [](double t) { return cx(1.0 / (t * t + 1.0)); };
    auto h1 = line_samples(1, f), h2 = line_samples(2, f);
    cx z(0.2, 0.5);
    EXPECT_LT(std::abs(cauchy_line_integral(h2, z * zeta(2)) - cauchy_line_integral(h1, z)), 1e-12);
}

TEST(CauchyIntegral, TooCloseToContour) {
    auto h = line_samples(1, [](double t) { return cx(1.0 / (t * t + 1.0)); });
    EXPECT_THROW((void)cauchy_line_integral(h, cx(0.5, 0.0)), TooCloseToContour);
}

TEST(SolveRH, TrivialCoefficient) {
    RHProblem P(grid(), [](Ray, double) { return cx(1.0); });
    for (cx z : {cx(0.3, 0.1), cx(-2.0, 0.5), cx(0.0, -1.0)}) EXPECT_LT(std::abs(P.solve(z) - 1.0), 1e-15);
    EXPECT_TRUE(P.index_zero());
}

TEST(SolveRH, ManufacturedRational) {
    RHProblem P(grid(), jumps_from_sectional(manufactured));
    EXPECT_TRUE(P.index_zero());
    double err = 0;
    for (cx z : test_points()) {
        int p = raygeom::sector_of(z);
        err = std::max(err, std::abs(P.solve(z) - manufactured(p, z)));
    }
    EXPECT_LT(err, 1e-9);
    for (int p = 1; p <= 6; ++p) EXPECT_LT(std::abs(P.at_origin(p) - manufactured(p, 0.0)), 1e-9);
}

TEST(SolveRH, BoundaryValuesAndJump) {
    RHProblem P(grid(), jumps_from_sectional(manufactured));
    for (int k = 1; k <= 3; ++k)
        for (std::size_t i = 0; i < P.G[k - 1].v.size(); i += 37) {
            double t = P.G[k - 1].t(i);
            auto [L, R] = ray_sectors(Ray{k, t > 0});
            cx l = t * zeta(k);
            auto [plus, minus] = P.boundary(k, i);
            EXPECT_LT(std::abs(plus - manufactured(L, l)), 1e-9);
            EXPECT_LT(std::abs(minus - manufactured(R, l)), 1e-9);
            EXPECT_LT(std::abs(plus / minus - P.G[k - 1].v[i]), 1e-8);
        }
}

TEST(SolveRH, NormalizationAtInfinity) {
    RHProblem P(grid(), jumps_from_sectional(manufactured));
    for (int p = 1; p <= 6; ++p) {
        cx z = std::polar(10.0 * grid().R(), (2 * p - 1) * pi / 6);
        EXPECT_LT(std::abs(P.solve(z) - 1.0), 1e-4);
    }
}

TEST(SolveRH, FactorsMultiplyToSolution) {
    RHProblem P(grid(), jumps_from_sectional(manufactured));
    cx z(0.4, 0.9);
    EXPECT_LT(std::abs(P.phi(1, z) * P.phi(2, z) * P.phi(3, z) - P.solve(z)), 1e-13);
}

TEST(SolveRH, RejectsPointsOnContour) {
    RHProblem P(grid(), jumps_from_sectional(manufactured));
    EXPECT_THROW((void)P.solve(0.5 * zeta(3)), TooCloseToContour);
}

TEST(RationalModify, UnmodifiedProblemHasNonzeroIndex) {
    EXPECT_THROW(RHProblem(grid(), jumps_from_sectional(with_zeros)), IndexNonZero);
}

TEST(RationalModify, RecoversAndIsIndependentOfTheta) {
    std::vector<cx> first;
    for (double th : {0.5, 1.0, 2.0}) {
        Modification M{ThetaFrame(std::polar(th, pi / 6)), boundary_zeros};
        RHProblem P(grid(), jumps_from_sectional(with_zeros), M);
        EXPECT_TRUE(P.index_zero());
        std::vector<cx> vals;
        for (cx z : test_points()) {
            cx v = P.solve(z);
            EXPECT_LT(std::abs(v - with_zeros(raygeom::sector_of(z), z)), 1e-8) << th << " " << z;
            vals.push_back(v);
        }
        for (int p = 1; p <= 6; ++p) EXPECT_LT(std::abs(P.at_origin(p) - with_zeros(p, 0.0)), 1e-8);
        if (first.empty()) first = vals;
        for (std::size_t j = 0; j < vals.size(); ++j) EXPECT_LT(std::abs(vals[j] - first[j]), 1e-6);
    }
}

TEST(RationalModify, OnlyZeroMeansNoFactors) {
    direct::BoundStateSet e;
    auto M = rational_modify(e, ThetaFrame::standard(0.3));
    EXPECT_TRUE(M.zeros.empty());
    EXPECT_EQ(M.factor(3, cx(0.1, 0.2)), cx(1.0));
    EXPECT_EQ(M.jump_factor(Ray{2, false}, cx(0.1, 0.2)), cx(1.0));
}

TEST(RationalModify, SinglePositivePointTouchesItsRays) {
    direct::BoundStateSet e;
    e.zk = {0.2};
    auto M = rational_modify(e, ThetaFrame::standard(0.3));
    EXPECT_EQ(M.zeros.size(), 3u);
    // Each zero sits on a ray of L_{zeta_k} and touches the two sectors beside it.
    int touched = 0;
    for (int p = 1; p <= 6; ++p)
        if (std::abs(M.factor(p, cx(5.0, 3.0)) - 1.0) > 1e-12) ++touched;
    EXPECT_EQ(touched, 6);
}

TEST(ThetaFrameTest, RejectsContourAndOffBisector) {
    EXPECT_THROW(ThetaFrame(1.0), ThetaOnContour);
    EXPECT_THROW(ThetaFrame(std::polar(1.0, 0.3)), ThetaOnContour);
    ThetaFrame f = ThetaFrame::standard(0.4);
    for (int p = 1; p <= 6; ++p) EXPECT_EQ(raygeom::sector_of(f.theta(p)), p);
}
