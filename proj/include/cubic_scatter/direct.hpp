#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "potential.hpp"
#include "quad.hpp"
#include "raygeom.hpp"
#include "trig3.hpp"

namespace cubic_scatter::direct {

struct Coupling {
    double alpha = 0.0;
};

/// True when |lambda| < a/3 for decay rate a.
[[nodiscard]] inline bool in_disc(const Potential& q, cx lambda) {
    return std::abs(lambda) < q.decay_a / 3.0;
}

inline void require_disc(const Potential& q, cx lambda, const char* who) {
    if (!in_disc(q, lambda)) {
        std::ostringstream os;
        os << who << ": lambda = " << lambda << " outside the disc |lambda| < " << q.decay_a / 3.0;
        throw DomainError(os.str());
    }
}

/// lambda on L_{zeta_k} (to a relative tolerance) or inside the disc.
[[nodiscard]] inline bool in_LD(const Potential& q, int k, cx lambda) {
    if (in_disc(q, lambda)) return true;
    cx eta = lambda * std::conj(zeta(k));
    return std::abs(eta.imag()) <= 1e-12 * std::max(1.0, std::abs(lambda));
}

// -- convolution functions ---------------------------------------------------

[[nodiscard]] inline double autocorr(const Potential& q, double s) {
    if (s < 0) throw DomainError("autocorr: s must be non-negative");
    return q.g(s);
}

/// m_k(lambda); DomainError outside LD(k, a).
[[nodiscard]] inline cx m_conv(const Potential& q, int k, cx lambda) {
    if (!in_LD(q, k, lambda)) throw DomainError("m_conv: lambda outside LD(k,a)");
    return q.m(k, lambda);
}

/// m_{s_p}(lambda), regular at lambda = 0.
[[nodiscard]] inline cx m_sp(const Potential& q, int p, cx lambda) {
    require_disc(q, lambda, "m_sp");
    return q.m_s(p, lambda);
}

/// b(lambda) = 1 + alpha i m_{s_2}(lambda).
[[nodiscard]] inline cx b_coeff(Coupling c, const Potential& q, cx lambda) {
    require_disc(q, lambda, "b_coeff");
    return 1.0 + c.alpha * I * q.m_s(2, lambda);
}

/// Index of the conjugated transform paired with psi_k: 1->1, 2->3, 3->2.
[[nodiscard]] inline int sigma(int k) { return k == 1 ? 1 : 5 - k; }

// -- Jost solutions ------------------------------------------------------------

struct JostEval {
    int k = 1;
    cx lambda{};
    double x = 0.0;
    cx psi{}, dpsi{}, ddpsi{};
    cx b{};
};

/// Tail integrals I_n(x) = int_x^inf d^n/dx^n [s_2(i l (x-t))/(i l)^2] q(t) dt,
/// n = 0, 1, 2, i.e. int_0^inf kernel(2-n, l, -s) q(x+s) ds.
[[nodiscard]] inline std::array<cx, 3> tail_integrals(const Potential& q, cx lambda, double x) {
    std::array<cx, 3> out{};
    const auto& xs = q.nodes();
    const auto& ws = q.weights();
    if (x == 0.0 && q.closed() && std::abs(lambda) > 0.05) {
        cx il = I * lambda;
        for (int n = 0; n < 3; ++n) out[n] = q.qt_s(2 - n, lambda) / std::pow(il, 2 - n);
        return out;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double qv = q.q(x + xs[i]);
        if (qv == 0.0) continue;
        for (int n = 0; n < 3; ++n) out[n] += ws[i] * trig3::kernel(2 - n, lambda, -xs[i]) * qv;
    }
    return out;
}

/// psi_k(lambda, x) = b e^{i l zeta_k x} - alpha i q~*_{sigma(k)}(l) I_0(x), with
/// first and second x-derivatives from the kernel chain.
[[nodiscard]] inline JostEval jost(Coupling c, const Potential& q, int k, cx lambda, double x) {
    require_disc(q, lambda, "jost");
    if (x < 0) throw DomainError("jost: x must be non-negative");
    JostEval e;
    e.k = k;
    e.lambda = lambda;
    e.x = x;
    e.b = 1.0 + c.alpha * I * q.m_s(2, lambda);
    cx ilz = I * lambda * zeta(k);
    cx ex = std::exp(ilz * x);
    e.psi = e.b * ex;
    e.dpsi = e.b * ilz * ex;
    e.ddpsi = e.b * ilz * ilz * ex;
    if (c.alpha != 0.0) {
        auto t = tail_integrals(q, lambda, x);
        cx coef = c.alpha * I * q.qt_star(sigma(k), lambda);
        e.psi -= coef * t[0];
        e.dpsi -= coef * t[1];
        e.ddpsi -= coef * t[2];
    }
    return e;
}

/// Residual of i u''' + alpha <u,q> q - lambda^3 u at x, with u''' from
/// central differences of psi''. Used only as an oracle.
[[nodiscard]] inline cx jost_equation_residual(Coupling c, const Potential& q, int k, cx lambda,
                                               double x, double h = 1e-4) {
    auto e = jost(c, q, k, lambda, x);
    cx d3 = (jost(c, q, k, lambda, x + h).ddpsi - jost(c, q, k, lambda, std::max(0.0, x - h)).ddpsi) /
            (x - h < 0 ? x + h : 2 * h);
    // <psi_k, q> equals q~*_{sigma(k)}.
    cx inner = q.qt_star(sigma(k), lambda);
    return I * d3 + c.alpha * inner * q.q(x) - lambda * lambda * lambda * e.psi;
}

// -- boundary values psi_k(lambda,0) on whole sectors -------------------------

/// Which of the six sectional functions.
enum class BV { psi1, psi2, psi3, psi1s, psi2s, psi3s };

/// Sector (1..6) in which each boundary value is holomorphic and tends to 1.
/// psi1: S2, psi2: S6, psi3: S4, psi1*: S5, psi2*: S1, psi3*: S3.
[[nodiscard]] inline int home_sector(BV f) {
    switch (f) {
    case BV::psi1: return 2;
    case BV::psi2: return 6;
    case BV::psi3: return 4;
    case BV::psi1s: return 5;
    case BV::psi2s: return 1;
    case BV::psi3s: return 3;
    }
    return 0;
}

/// Sectional function living on sector p.
[[nodiscard]] inline BV sector_function(int p) {
    static constexpr BV table[6] = {BV::psi2s, BV::psi1, BV::psi3s, BV::psi3, BV::psi1s, BV::psi2};
    return table[((p - 1) % 6 + 6) % 6];
}

/// psi_1(lambda, 0) on the closed sector S2 at any radius, written so every
/// transform converges there:
///   1 - (alpha i / 3 l^2) [ -m1* + z2 (m2 - q2 q1*) + z3 (m3 - q3 q1*) ].
/// Inside the disc near 0 the equivalent regular form b - alpha i q1* I_0(0)
/// is used to avoid the 1/l^2 cancellation.
[[nodiscard]] inline cx psi1_at0(Coupling c, const Potential& q, cx lambda) {
    if (c.alpha == 0.0) return 1.0;
    double r = std::abs(lambda);
    double small = q.closed() ? 0.05 : 0.5 * q.decay_a / 3.0;
    if (r < small || (r < q.decay_a / 3.0 && !q.closed())) return jost(c, q, 1, lambda, 0.0).psi;
    cx q1s = q.qt_star(1, lambda);
    cx br = -q.m_star(1, lambda) + zeta(2) * (q.m(2, lambda) - q.qt(2, lambda) * q1s) +
            zeta(3) * (q.m(3, lambda) - q.qt(3, lambda) * q1s);
    return 1.0 - c.alpha * I / (3.0 * lambda * lambda) * br;
}

/// Any of the six boundary values at lambda, via rotation and conjugation of
/// psi_1(., 0). Valid on the closed home sector at any radius, and on the
/// whole disc.
[[nodiscard]] inline cx boundary_value(Coupling c, const Potential& q, BV f, cx lambda) {
    auto P = [&](cx z) { return psi1_at0(c, q, z); };
    auto Pd = [&](cx z) {
        // In the disc use the direct Jost formula so every BV is defined there.
        if (in_disc(q, z)) return c.alpha == 0.0 ? cx{1.0} : jost(c, q, 1, z, 0.0).psi;
        return P(z);
    };
    switch (f) {
    case BV::psi1: return Pd(lambda);
    case BV::psi2: return Pd(lambda * zeta(2));
    case BV::psi3: return Pd(lambda * zeta(3));
    case BV::psi1s: return std::conj(Pd(std::conj(lambda)));
    case BV::psi2s: return std::conj(Pd(std::conj(lambda) * zeta(2)));
    case BV::psi3s: return std::conj(Pd(std::conj(lambda) * zeta(3)));
    }
    return 0.0;
}

/// Value of the sectional (piecewise holomorphic) function at an off-line point.
[[nodiscard]] inline cx sectional_value(Coupling c, const Potential& q, cx z) {
    int p = raygeom::sector_of(z);
    if (p == 0) throw TooCloseToContour("sectional_value: point on the contour");
    return boundary_value(c, q, sector_function(p), z);
}

// -- Wronskians and scattering coefficients -----------------------------------

[[nodiscard]] inline cx wronskian(const JostEval& ek, const JostEval& es) {
    if (ek.lambda != es.lambda || ek.x != es.x) throw DomainError("wronskian: mismatched evaluations");
    return ek.psi * es.dpsi - es.psi * ek.dpsi;
}

[[nodiscard]] inline cx wronskian(Coupling c, const Potential& q, int k, int s, cx lambda) {
    return wronskian(jost(c, q, k, lambda, 0.0), jost(c, q, s, lambda, 0.0));
}

/// Matching-coefficient factor C(lambda) with rotation law C(l z2) = z2^r C(l).
struct CFunc {
    std::function<cx(cx)> f = [](cx) { return cx{1.0}; };
    int r = 0;
    [[nodiscard]] cx operator()(cx l) const { return f(l); }
    static CFunc one() { return {}; }
    static CFunc monomial(int r) {
        return {[r](cx l) { return std::pow(l, r); }, ((r % 3) + 3) % 3};
    }
};

struct Scattering {
    cx S2{}, S3{}, a{};
};

/// Solves S2 psi2 + S3 psi3 = -psi1, S2 psi2' + S3 psi3' = -psi1' + a at x = 0
/// with a = C b.
[[nodiscard]] inline Scattering scattering_coeffs(Coupling c, const Potential& q, const CFunc& C, cx lambda) {
    require_disc(q, lambda, "scattering_coeffs");
    auto e1 = jost(c, q, 1, lambda, 0.0);
    auto e2 = jost(c, q, 2, lambda, 0.0);
    auto e3 = jost(c, q, 3, lambda, 0.0);
    cx det = e2.psi * e3.dpsi - e3.psi * e2.dpsi;
    double scale = std::max({std::abs(e2.psi * e3.dpsi), std::abs(e3.psi * e2.dpsi), 1e-300});
    if (std::abs(det) <= 1e-13 * scale || det == 0.0)
        throw SingularSystem("scattering_coeffs: W_{2,3} vanishes (lambda in E_alpha)");
    Scattering s;
    s.a = C(lambda) * e1.b;
    cx r1 = -e1.psi, r2 = -e1.dpsi + s.a;
    s.S2 = (r1 * e3.dpsi - e3.psi * r2) / det;
    s.S3 = (e2.psi * r2 - r1 * e2.dpsi) / det;
    return s;
}

/// T, the printed U, and the u that actually links psi3* to psi3.
struct TU {
    cx T{}, U{}, u{};
};

/// Given S2(l), S3(l z2), C(l):
///   T = (S3(l z2) - z2^r) / (S2(l) z2^r - 1)
///   U = z3 C (1 - 1/S2) / (sqrt3 (S3(l z2) - 1))          (printed form)
///   u = z3 C (S2 z2^r - 1) / (sqrt3 l (S2 S3(l z2) - 1))  (psi3* = u psi3)
[[nodiscard]] inline TU tu_funcs(cx S2, cx S3_rot, cx C, int r, cx lambda) {
    cx zr = zeta2_pow(r);
    cx dT = S2 * zr - 1.0;
    cx dU = S3_rot - 1.0;
    cx du = lambda * (S2 * S3_rot - 1.0);
    if (dT == 0.0 || dU == 0.0 || du == 0.0 || S2 == 0.0)
        throw DivisionByZero("tu_funcs: vanishing denominator");
    TU o;
    o.T = (S3_rot - zr) / dT;
    o.U = zeta(3) * C * (1.0 - 1.0 / S2) / (sqrt3 * dU);
    o.u = zeta(3) * C * dT / (sqrt3 * du);
    return o;
}

/// Sampler of S2, S3, C at arbitrary disc points (forward model).
struct ScatSampler {
    std::function<cx(cx)> S2, S3, C;
    int r = 0;
    [[nodiscard]] TU tu(cx l) const { return tu_funcs(S2(l), S3(l * zeta(2)), C(l), r, l); }
    [[nodiscard]] cx T(cx l) const { return tu(l).T; }
    [[nodiscard]] cx u(cx l) const { return tu(l).u; }
    [[nodiscard]] cx U(cx l) const { return tu(l).U; }
};

[[nodiscard]] inline ScatSampler forward_sampler(Coupling c, const Potential& q, const CFunc& C) {
    ScatSampler s;
    s.S2 = [c, &q, C](cx l) { return scattering_coeffs(c, q, C, l).S2; };
    s.S3 = [c, &q, C](cx l) { return scattering_coeffs(c, q, C, l).S3; };
    s.C = C.f;
    s.r = C.r;
    return s;
}

// -- jump coefficients on the six rays ------------------------------------------

/// A ray of the contour: line k, half t > 0 (outgoing) or t < 0 (incoming).
/// Points are lambda = t zeta_k.
struct Ray {
    int k = 1;
    bool outgoing = true;
    [[nodiscard]] cx point(double rho) const { return (outgoing ? rho : -rho) * zeta(k); }
    [[nodiscard]] double angle() const { return std::arg(point(1.0)); }
};

/// Sectional functions on the left (+) and right (-) of line k's direction,
/// along the given half. The jump is left = G * right.
[[nodiscard]] inline std::pair<BV, BV> ray_pair(Ray ray) {
    if (ray.k == 1) return ray.outgoing ? std::pair{BV::psi2s, BV::psi2} : std::pair{BV::psi3s, BV::psi3};
    if (ray.k == 2) return ray.outgoing ? std::pair{BV::psi3s, BV::psi1} : std::pair{BV::psi1s, BV::psi2};
    return ray.outgoing ? std::pair{BV::psi1s, BV::psi3} : std::pair{BV::psi2s, BV::psi1};
}

/// Jump coefficient from T and u (valid in the disc):
///   L1 out: -z2 T(l z3) u(l z3);  L1 in: u(l)
///   L2 out: -z2 T(l z2) u(l z2);  L2 in: u(l z3)
///   L3 out: -z2 T(l) u(l);        L3 in: u(l z2)
[[nodiscard]] inline cx jump_from_tu(const ScatSampler& s, Ray ray, cx l) {
    auto Tu = [&](cx z) {
        auto t = s.tu(z);
        return -zeta(2) * t.T * t.u;
    };
    switch (ray.k) {
    case 1: return ray.outgoing ? Tu(l * zeta(3)) : s.u(l);
    case 2: return ray.outgoing ? Tu(l * zeta(2)) : s.u(l * zeta(3));
    default: return ray.outgoing ? Tu(l) : s.u(l * zeta(2));
    }
}

/// Jump coefficient as the ratio of the adjacent sectional boundary values;
/// defined on the whole ray (the forward model's ground truth).
[[nodiscard]] inline cx jump_forward(Coupling c, const Potential& q, Ray ray, double rho) {
    auto [left, right] = ray_pair(ray);
    cx l = ray.point(rho);
    return boundary_value(c, q, left, l) / boundary_value(c, q, right, l);
}

/// Coefficients as printed: G2(l) = U(l z2) on l_{z2}, G3(l) = -z2 U(l) T(l)
/// on l_{z3}, G1(l) = -z3 U(l z3) / T(l) on l_{z1}; extension to the
/// incoming rays by G_k(l z2). `use_u` swaps the printed U for u.
[[nodiscard]] inline cx paper_G(const ScatSampler& s, int k, cx l, bool use_u) {
    auto UU = [&](cx z) { return use_u ? s.u(z) : s.U(z); };
    switch (k) {
    case 2: return UU(l * zeta(2));
    case 3: return -zeta(2) * UU(l) * s.T(l);
    default: return -zeta(3) * UU(l * zeta(3)) / s.T(l);
    }
}
[[nodiscard]] inline cx paper_G_hat(const ScatSampler& s, Ray ray, double rho, bool use_u) {
    cx l = ray.point(rho);
    return ray.outgoing ? paper_G(s, ray.k, l, use_u) : paper_G(s, ray.k, l * zeta(2), use_u);
}

/// Named boundary coefficient (RayLabel interface): jump across the ray.
[[nodiscard]] inline cx boundary_coeffs(const ScatSampler& s, raygeom::RayLabel ray, cx l) {
    return jump_from_tu(s, Ray{ray.k, ray.orientation == raygeom::Orientation::outgoing}, l);
}

// -- dispersion relation and bound states --------------------------------------

/// |q~_1(t)|^2 for real t.
[[nodiscard]] inline double q1_abs2(const Potential& q, double t) { return std::norm(q.qt(1, t)); }

/// PV int_R f(t)/(t - l) dt. The symmetric neighbourhood |t - l| < reach is
/// folded into int_0^reach (f(l+s) - f(l-s))/s ds, which is regular, and
/// integrated on panels graded geometrically from `scale`; the rest uses
/// mapped tails t = l +- reach/u. No excision width enters the result.
template <class F>
[[nodiscard]] double pv_integral(F&& f, double l, double scale, double reach = 8.0) {
    static const auto rule = quad::gauss_legendre<16>();
    auto panel = [&](auto&& g, double a, double b) {
        double s = 0.0, h = 0.5 * (b - a), c = 0.5 * (a + b);
        for (std::size_t j = 0; j < rule.x.size(); ++j) s += rule.w[j] * g(c + h * rule.x[j]);
        return s * h;
    };
    auto folded = [&](double s) { return (f(l + s) - f(l - s)) / s; };
    double h = std::min(0.25 * scale, reach);
    double sum = panel(folded, 0.0, h);
    for (double d = h; d < reach; d *= 2.0) sum += panel(folded, d, std::min(2.0 * d, reach));
    auto tail = [&](double sign) {
        return [&, sign](double u) {
            double t = l + sign * reach / u;
            return f(t) / (t - l) * reach / (u * u);
        };
    };
    for (int k = 0; k < 8; ++k) {
        double a = k / 8.0, b = (k + 1) / 8.0;
        sum += panel(tail(+1.0), a, b) + panel(tail(-1.0), a, b);
    }
    return sum;
}

/// PV int_R |q1(t)|^2/(t^3 - l^3) dt + 2 pi / alpha, the root function in the
/// printed form. It omits the term of `dispersion_root` and does not vanish
/// at zeros of b; kept for comparison.
[[nodiscard]] inline double pv_dispersion(Coupling c, const Potential& q, double lambda) {
    if (lambda == 0.0) throw DomainError("pv_dispersion: lambda must be nonzero");
    if (std::abs(lambda) >= q.decay_a / 3.0) throw DomainError("pv_dispersion: |lambda| >= a/3");
    auto f = [&](double t) { return q1_abs2(q, t) / (t * t + t * lambda + lambda * lambda); };
    double pv = pv_integral(f, lambda, std::abs(lambda));
    return pv + (c.alpha != 0.0 ? 2 * pi / c.alpha : std::numeric_limits<double>::infinity());
}

/// Real part of (2 pi/alpha) b(l) for real l, from the dispersion relations:
///   2 pi/alpha + PV int |q1|^2/(t^3 - l^3) dt + sgn(l) (2 pi/(3 l^2)) Im(z2 q2 q3*)(l).
/// Its imaginary counterpart is -(pi/(3 l^2)) times the filter value, so b = 0
/// exactly where both vanish.
[[nodiscard]] inline double dispersion_root(Coupling c, const Potential& q, double lambda) {
    double corr = std::copysign(1.0, lambda) * 2 * pi / (3 * lambda * lambda) *
                  (zeta(2) * q.qt(2, lambda) * q.qt_star(3, lambda)).imag();
    return pv_dispersion(c, q, lambda) + corr;
}

/// m_1(l) = (1/2) q1 q1*(l) - (1/2 pi i) PV int |q1(t)|^2/(t - l) dt, l real.
[[nodiscard]] inline cx m1_sokhotski(const Potential& q, double lambda) {
    double pv = pv_integral([&](double t) { return q1_abs2(q, t); }, lambda, 1.0);
    return 0.5 * q.qt(1, lambda) * q.qt_star(1, lambda) - pv / (2 * pi * I);
}

/// First-line filter quantity q1 q1* + z2 q2 q3* + z3 q3 q2*.
[[nodiscard]] inline cx filter_value(const Potential& q, cx l) {
    return q.qt(1, l) * q.qt_star(1, l) + zeta(2) * q.qt(2, l) * q.qt_star(3, l) +
           zeta(3) * q.qt(3, l) * q.qt_star(2, l);
}

struct BoundStateSet {
    std::vector<double> zk;  // positive points of E_alpha on L_{zeta_1}
    std::vector<double> ws;  // negative points
    bool include_zero = true;
    std::vector<double> dispersion_only; // roots of the dispersion relation failing the filter

    /// Full set {z2^l z_k} u {z2^l w_s} u {0}.
    [[nodiscard]] std::vector<cx> points() const {
        std::vector<cx> out;
        if (include_zero) out.push_back(0.0);
        for (int l = 0; l < 3; ++l) {
            for (double z : zk) out.push_back(zeta2_pow(l) * z);
            for (double w : ws) out.push_back(zeta2_pow(l) * w);
        }
        return out;
    }
    [[nodiscard]] bool trivial() const { return zk.empty() && ws.empty(); }
};

/// Scans (-a/3, a/3) for sign changes of `dispersion_root`, refines by
/// bisection and keeps roots passing the filter to `filter_tol`.
[[nodiscard]] inline BoundStateSet bound_states(Coupling c, const Potential& q, int scan = 200,
                                                double filter_tol = 1e-8) {
    BoundStateSet out;
    if (c.alpha == 0.0) return out;
    double rmax = q.decay_a / 3.0 * (1.0 - 1e-6);
    std::vector<double> grid;
    for (int i = 0; i < scan; ++i) {
        double t = -rmax + (i + 0.5) * 2.0 * rmax / scan; // half-step offset avoids 0
        grid.push_back(t);
    }
    auto F = [&](double l) { return dispersion_root(c, q, l); };
    std::vector<double> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { vals[i] = F(grid[i]); });
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (grid[i] < 0 && grid[i + 1] > 0) continue; // the 1/l^2 term changes sign through 0
        if (vals[i] * vals[i + 1] >= 0) continue;
        double a = grid[i], b = grid[i + 1], fa = vals[i];
        for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
            double m = 0.5 * (a + b), fm = F(m);
            if ((fm < 0) == (fa < 0)) { a = m; fa = fm; } else b = m;
        }
        double root = 0.5 * (a + b);
        // Inside the disc the root function equals (2 pi/alpha) Re b, which is
        // computed without the PV tail; polish on it when it brackets as well.
        auto reb = [&](double l) { return b_coeff(c, q, l).real(); };
        double pa = grid[i], pb = grid[i + 1], fpa = reb(pa);
        if (fpa * reb(pb) < 0) {
            for (int it = 0; it < 80 && pb - pa > 1e-15; ++it) {
                double m = 0.5 * (pa + pb), fm = reb(m);
                if ((fm < 0) == (fpa < 0)) { pa = m; fpa = fm; } else pb = m;
            }
            root = 0.5 * (pa + pb);
        }
        if (std::abs(filter_value(q, root)) <= filter_tol) (root > 0 ? out.zk : out.ws).push_back(root);
        else out.dispersion_only.push_back(root);
    }
    return out;
}

/// Bound-state eigenfunction psi_1(l_m, x) = -alpha i q1*(l_m) I_0(x) (b(l_m) = 0).
[[nodiscard]] inline std::function<cx(double)> eigenfunction(Coupling c, const Potential& q, cx lm,
                                                             double tol = 1e-8) {
    if (lm == 0.0) throw NotABoundState("eigenfunction: lambda_m = 0 carries no eigenfunction");
    cx b = b_coeff(c, q, lm);
    if (std::abs(b) > tol) {
        std::ostringstream os;
        os << "eigenfunction: |b(lambda_m)| = " << std::abs(b) << " exceeds tolerance";
        throw NotABoundState(os.str());
    }
    cx coef = -c.alpha * I * q.qt_star(1, lm);
    const Potential* qp = &q;
    return [coef, lm, qp](double x) { return coef * tail_integrals(*qp, lm, x)[0]; };
}

} // namespace cubic_scatter::direct
