#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "core.hpp"
#include "quad.hpp"

namespace cubic_scatter::trig3 {

/// Below this modulus s_p is summed from its Taylor series; the three
/// exponential form loses digits to cancellation near the origin.
inline constexpr double series_radius = 0.5;

namespace detail {

// s_p(z) / z^p = sum_n z^{3n} / (3n+p)!; exact at z = 0.
[[nodiscard]] inline cx reduced_series(int p, cx z) {
    cx z3 = z * z * z;
    double f = 1.0;
    for (int j = 2; j <= p; ++j) f *= j;
    cx term = 1.0 / f, sum = term;
    for (int n = 1; n < 40; ++n) {
        double d = (3.0 * n + p) * (3.0 * n + p - 1) * (3.0 * n + p - 2);
        term *= z3 / d;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

[[nodiscard]] inline cx exp_form(int p, cx z) {
    cx s{};
    for (int k = 1; k <= 3; ++k) s += std::pow(zeta(k), -p) * std::exp(z * zeta(k));
    return s / 3.0;
}

} // namespace detail

/// s_p(z) = (1/3) sum_k zeta_k^{-p} exp(z zeta_k), p in {0,1,2}.
[[nodiscard]] inline cx eval_s(int p, cx z) {
    p = ((p % 3) + 3) % 3;
    if (std::abs(z) < series_radius) return detail::reduced_series(p, z) * std::pow(z, p);
    return detail::exp_form(p, z);
}

/// n-th derivative of s_p: s_0' = s_2, s_1' = s_0, s_2' = s_1.
[[nodiscard]] inline cx eval_s_deriv(int p, int n, cx z) { return eval_s(p - n, z); }

/// s_p(z) / z^p, analytic through z = 0. Used for the lambda -> 0 limits of
/// s_1(i lambda x)/(i lambda) and s_2(i lambda x)/(i lambda)^2.
[[nodiscard]] inline cx eval_s_reduced(int p, cx z) {
    p = ((p % 3) + 3) % 3;
    if (std::abs(z) < series_radius) return detail::reduced_series(p, z);
    return detail::exp_form(p, z) / std::pow(z, p);
}

/// s_p(i lambda x) / (i lambda)^p without dividing by lambda; finite at lambda = 0.
[[nodiscard]] inline cx kernel(int p, cx lambda, double x) {
    p = ((p % 3) + 3) % 3;
    return eval_s_reduced(p, I * lambda * x) * std::pow(x, p);
}

/// Kernel d^n/dx^n [ s_p(i lambda x)/(i lambda)^p ] for n <= p: equals
/// s_{p-n}(i lambda x)/(i lambda)^{p-n}.
[[nodiscard]] inline cx kernel_dx(int p, int n, cx lambda, double x) {
    return kernel(p - n, lambda, x);
}

/// Residual function of the zero equations, written in theta = sqrt(3) x / 2:
///   p=0: cos(theta) + exp(-sqrt3 theta)/2
///   p=1: cos(theta - pi/3) - exp(-sqrt3 theta)/2
///   p=2: cos(theta + pi/3) - exp(-sqrt3 theta)/2
/// Each vanishes exactly when s_p(-x) = 0.
[[nodiscard]] inline double zero_equation(int p, double x) {
    double th = 0.5 * sqrt3 * x;
    double e = 0.5 * std::exp(-1.5 * x);
    switch (p) {
    case 0: return std::cos(th) + e;
    case 1: return std::cos(th - pi / 3) - e;
    case 2: return std::cos(th + pi / 3) - e;
    default: throw DomainError("zero_equation: p must be 0, 1 or 2");
    }
}

/// First `count` non-negative roots x_p(k) of the zero equations, ascending.
/// The zero set of s_p is {-zeta_2^l x_p(k)}.
[[nodiscard]] inline std::vector<double> zeros_s(int p, int count, double tol = 1e-12) {
    if (count < 1) throw DomainError("zeros_s: count must be positive");
    if (p < 0 || p > 2) throw DomainError("zeros_s: p must be 0, 1 or 2");
    std::vector<double> out;
    double start = 0.0;
    if (p != 0) {
        // x = 0 is a root for p = 1 (simple) and p = 2 (double, tangent), so
        // it is recorded directly and the scan starts just past it.
        out.push_back(0.0);
        start = 0.1;
    }
    const double step = pi / sqrt3;
    double lo = start;
    double flo = zero_equation(p, lo);
    int guard = 0;
    while (static_cast<int>(out.size()) < count) {
        double hi = lo + step;
        double fhi = zero_equation(p, hi);
        if (++guard > 4 * count + 16) {
            std::ostringstream os;
            os << "zeros_s: no sign change found for p=" << p << " near [" << lo << ", " << hi << "]";
            throw BracketFailure(os.str());
        }
        if (flo == 0.0) {
            out.push_back(lo);
        } else if (flo * fhi < 0.0) {
            double a = lo, b = hi, fa = flo;
            while (b - a > tol) {
                double m = 0.5 * (a + b);
                double fm = zero_equation(p, m);
                if (fm == 0.0) { a = b = m; break; }
                if ((fa < 0) == (fm < 0)) { a = m; fa = fm; } else b = m;
            }
            out.push_back(0.5 * (a + b));
        }
        lo = hi;
        flo = fhi;
    }
    return out;
}

/// Data of the Cauchy problem i y''' = lambda^3 y + f, y(0)=y0, y'(0)=y1, y''(0)=y2.
struct CauchyData {
    cx y0{}, y1{}, y2{};
    cx lambda{};
    std::function<cx(double)> forcing; // empty means f = 0
};

/// Solution value and first two x-derivatives.
struct CauchyValue {
    cx y, dy, ddy;
};

/// Variation of constants solution
///   y = y0 s0(i l x) + y1 s1(i l x)/(i l) + y2 s2(i l x)/(i l)^2
///       - i int_0^x s2(i l (x-t))/(i l)^2 f(t) dt.
[[nodiscard]] inline CauchyValue cauchy_solve_full(const CauchyData& d, double x,
                                                   double tol = quad::default_tol) {
    if (x < 0) throw DomainError("cauchy_solve: x must be non-negative");
    const cx l = d.lambda;
    const cx il = I * l;
    CauchyValue v;
    // k_p denotes s_p(i l x)/(i l)^p; d/dx k_p = k_{p-1}, d/dx k_0 = (i l)^3 k_2.
    cx k0 = kernel(0, l, x), k1 = kernel(1, l, x), k2 = kernel(2, l, x);
    cx l3 = il * il * il;
    v.y = d.y0 * k0 + d.y1 * k1 + d.y2 * k2;
    v.dy = d.y0 * l3 * k2 + d.y1 * k0 + d.y2 * k1;
    v.ddy = d.y0 * l3 * k1 + d.y1 * l3 * k2 + d.y2 * k0;
    if (d.forcing && x > 0) {
        auto part = [&](int p) {
            return quad::integrate(
                [&](double t) { return kernel(p, l, x - t) * d.forcing(t); }, 0.0, x, tol);
        };
        v.y -= I * part(2);
        v.dy -= I * part(1);
        v.ddy -= I * part(0);
    }
    return v;
}

[[nodiscard]] inline cx cauchy_solve(const CauchyData& d, double x, double tol = quad::default_tol) {
    return cauchy_solve_full(d, x, tol).y;
}

} // namespace cubic_scatter::trig3
