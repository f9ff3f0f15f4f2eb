#include <gtest/gtest.h>

#include <random>

#include "cubic_scatter/raygeom.hpp"

using namespace cubic_scatter;
using namespace cubic_scatter::raygeom;

namespace {

RayFn expfn(int k, double rate = 1.0) {
    return RayFn({k, Orientation::outgoing}, [rate](double x) { return cx(std::exp(-rate * x)); }, rate);
}

} // namespace

TEST(Regions, TriangleExamples) {
    EXPECT_TRUE(region_contains(Region::triangle(1.0), 0.0));
    EXPECT_FALSE(region_contains(Region::triangle(1.0), cx(0, 2)));
    EXPECT_TRUE(region_contains(Region::disc(1.0), 0.5));
    // Bottom vertex at -2a i lies on the closed edges.
    EXPECT_TRUE(region_contains(Region::triangle(1.0), cx(0, -2)));
    EXPECT_FALSE(region_contains(Region::triangle(1.0), cx(0, 1)));
    EXPECT_TRUE(region_contains(Region::triangle_star(1.0), cx(0, 1.5)));
}

TEST(Regions, TriangleIsIntersectionOfHalfPlanes) {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 2000; ++i) {
        cx l(u(g), u(g));
        bool hp = true;
        for (int k = 1; k <= 3; ++k) hp = hp && region_contains(Region::half_plane(k, 1.0, -1), l);
        // The triangle's two lower edges are closed, the half-planes open.
        bool on_edge = std::abs(l.imag() - (sqrt3 * l.real() - 2)) < 1e-12 || std::abs(l.imag() + sqrt3 * l.real() + 2) < 1e-12;
        if (!on_edge) {
            EXPECT_EQ(hp, region_contains(Region::triangle(1.0), l)) << l;
        }
    }
}

TEST(Regions, SectorIndexing) {
    for (int p = 1; p <= 6; ++p) {
        cx bis = std::polar(1.0, (2 * p - 1) * pi / 6);
        EXPECT_EQ(sector_of(bis), p);
        EXPECT_TRUE(region_contains(Region::sector(p), bis));
        EXPECT_EQ(sector_of(std::polar(1.0, (p - 1) * pi / 3), 1e-12), 0);
    }
}

TEST(RayLabel, RotationCyclesIndex) {
    RayLabel l{3, Orientation::incoming};
    EXPECT_EQ(l.rotated(), (RayLabel{1, Orientation::incoming}));
    for (int k = 1; k <= 3; ++k) {
        RayLabel r{k, Orientation::outgoing};
        EXPECT_LT(std::abs(zeta(2) * r.direction() - r.rotated().direction()), 1e-15);
    }
}

TEST(RayTransform, ExponentialClosedForm) {
    for (double l : {-2.0, 0.0, 0.7, 3.0}) {
        cx v = ray_transform(1, expfn(1), l);
        EXPECT_LT(std::abs(v - 1.0 / (1.0 + I * l)), 1e-12) << l;
    }
    EXPECT_LT(std::abs(ray_transform(3, expfn(3), 0.0) - 1.0), 1e-13);
}

TEST(RayTransform, ZeroFunction) {
    RayFn z({2, Orientation::outgoing}, [](double) { return cx{}; }, 1.0);
    EXPECT_EQ(ray_transform(2, z, cx(0.1, 0.2)), cx{});
}

TEST(RayTransform, OutsideHalfPlaneIsRejected) {
    // Along l_{zeta_1} the transform needs Im(lambda) < a.
    EXPECT_THROW((void)ray_transform(1, expfn(1), cx(0, 1.5)), DomainError);
    EXPECT_NO_THROW((void)ray_transform(1, expfn(1), cx(0, 0.5)));
}

TEST(RayTransform, SampledMatchesClosedForm) {
    std::vector<double> x;
    std::vector<cx> v;
    for (int i = 0; i <= 800; ++i) {
        x.push_back(40.0 * i / 800);
        v.push_back(std::exp(-x.back()));
    }
    RayFn f({1, Orientation::outgoing}, x, v, 1.0);
    EXPECT_LT(std::abs(ray_transform(1, f, 0.5) - 1.0 / (1.0 + 0.5 * I)), 1e-6);
}

TEST(RayTransform, HolomorphicInsideTriangle) {
    auto f = [&](cx l) { return full_transform({expfn(1), expfn(2), expfn(3)}, l); };
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int i = 0; i < 20; ++i) {
        cx l(u(g), u(g));
        double h = 1e-4;
        cx dx = (f(l + h) - f(l - h)) / (2 * h);
        cx dy = (f(l + I * h) - f(l - I * h)) / (2 * h);
        EXPECT_LT(std::abs(dx + I * dy), 1e-6) << l; // Cauchy-Riemann: f_x + i f_y = 0
    }
}

TEST(RayTransform, Parseval) {
    // ||x e^{-x}||^2 = 1/4; the transform side is sampled through l = tan(th).
    RayFn f({1, Orientation::outgoing}, [](double x) { return cx(x * std::exp(-x)); }, 1.0);
    double rhs = quad::integrate(
        [&](double th) {
            double c = std::cos(th);
            return std::norm(ray_transform(1, f, std::tan(th))) / (c * c);
        },
        -pi / 2 + 1e-9, pi / 2 - 1e-9, 1e-10);
    EXPECT_NEAR(rhs / (2 * pi), 0.25, 1e-6);
}

TEST(SymmetricTransform, Examples) {
    auto g = expfn(1);
    EXPECT_LT(std::abs(symmetric_transform(0, g, 0.0) - 3.0), 1e-12);
    EXPECT_LT(std::abs(symmetric_transform(2, g, 0.0)), 1e-14);
    for (cx l : {cx(0.2, 0.1), cx(-0.4, 0.0), cx(0.0, -0.3)}) {
        cx want = 1.0 / (1.0 + I * l) + zeta(3) / (1.0 + I * l * zeta(2)) + zeta(2) / (1.0 + I * l * zeta(3));
        EXPECT_LT(std::abs(symmetric_transform(1, g, l) - want), 1e-11) << l;
    }
}

TEST(SymmetricTransform, EqualsFullTransformOfExtension) {
    auto g = RayFn({1, Orientation::outgoing}, [](double x) { return cx(x * std::exp(-x)); }, 1.0);
    for (int p = 0; p < 3; ++p)
        for (cx l : {cx(0.1, 0.05), cx(-0.2, -0.1)}) {
            cx a = symmetric_transform(p, g, l);
            cx b = full_transform(symmetric_extension(p, g), l);
            EXPECT_LT(std::abs(a - b), 1e-10) << p << " " << l;
        }
}

TEST(SymmetricTransform, RejectsPointsOutsideTriangle) {
    EXPECT_THROW((void)symmetric_transform(0, expfn(1), cx(0, 2)), DomainError);
}

TEST(JDecompose, Cases) {
    std::vector<double> x{0.0, 0.5, 1.0};
    std::vector<cx> g{1.0, cx(0.5, 0.2), 0.25};
    auto mk = [&](cx w2, cx w3) {
        std::vector<cx> v2, v3;
        for (cx v : g) {
            v2.push_back(w2 * v);
            v3.push_back(w3 * v);
        }
        return std::array<RayFn, 3>{RayFn({1, Orientation::outgoing}, x, g, 1.0),
                                    RayFn({2, Orientation::outgoing}, x, v2, 1.0),
                                    RayFn({3, Orientation::outgoing}, x, v3, 1.0)};
    };
    auto a = j_decompose(mk(1.0, 1.0));
    auto b = j_decompose(mk(zeta(3), zeta(2)));
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_LT(std::abs(a.phi[i] - g[i]), 1e-15);
        EXPECT_LT(std::abs(a.psi[i]) + std::abs(a.h[i]), 1e-15);
        EXPECT_LT(std::abs(b.psi[i] - g[i]), 1e-15);
        EXPECT_LT(std::abs(b.phi[i]) + std::abs(b.h[i]), 1e-15);
    }
    std::vector<cx> zero(3);
    auto zz = j_decompose({RayFn({1, Orientation::outgoing}, x, zero, 1.0), RayFn({2, Orientation::outgoing}, x, zero, 1.0),
                           RayFn({3, Orientation::outgoing}, x, zero, 1.0)});
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(std::abs(zz.phi[i]) + std::abs(zz.psi[i]) + std::abs(zz.h[i]), 0.0);
}

TEST(JDecompose, ReconstructsAndIsOrthogonal) {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> n;
    std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    std::array<RayFn, 3> f;
    for (int k = 0; k < 3; ++k) {
        std::vector<cx> v;
        for (std::size_t i = 0; i < x.size(); ++i) v.push_back({n(gen), n(gen)});
        f[k] = RayFn({k + 1, Orientation::outgoing}, x, v, 1.0);
    }
    auto d = j_decompose(f);
    auto P = d.Phi(), S = d.Psi(), H = d.H();
    cx ip_ps{}, ip_ph{}, ip_sh{};
    for (int k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < x.size(); ++i) {
            EXPECT_LT(std::abs(P[k][i] + S[k][i] + H[k][i] - f[k].values[i]), 1e-14);
            ip_ps += P[k][i] * std::conj(S[k][i]);
            ip_ph += P[k][i] * std::conj(H[k][i]);
            ip_sh += S[k][i] * std::conj(H[k][i]);
        }
    EXPECT_LT(std::abs(ip_ps) + std::abs(ip_ph) + std::abs(ip_sh), 1e-13);
    // J^3 = identity.
    std::array<std::vector<cx>, 3> raw{f[0].values, f[1].values, f[2].values};
    auto r3 = j_apply(j_apply(j_apply(raw)));
    EXPECT_EQ(r3, raw);
}

TEST(JDecompose, GridMismatch) {
    std::array<RayFn, 3> f{RayFn({1, Orientation::outgoing}, {0.0, 1.0}, {1.0, 1.0}, 1.0),
                           RayFn({2, Orientation::outgoing}, {0.0, 2.0}, {1.0, 1.0}, 1.0),
                           RayFn({3, Orientation::outgoing}, {0.0, 1.0}, {1.0, 1.0}, 1.0)};
    EXPECT_THROW((void)j_decompose(f), DomainError);
}

TEST(RayFn, RejectsBadSamples) {
    EXPECT_THROW(RayFn({1, Orientation::outgoing}, {0.0, 0.0}, {1.0, 1.0}, 1.0), DomainError);
    EXPECT_THROW(RayFn({1, Orientation::outgoing}, {0.0, 1.0}, {1.0, cx(NAN, 0)}, 1.0), DomainError);
}
