#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "core.hpp"
#include "quad.hpp"

namespace cubic_scatter::transforms {

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<cx(cx)>;

/// int_0^inf f(t) sin(x t) dt for f decaying at least like exp(-rate t).
[[nodiscard]] inline double sine_transform(const RealFn& f, double x, double rate, double tol = 1e-12) {
    return quad::integrate_tail([&](double t) { return f(t) * std::sin(x * t); }, 0.0, rate, tol);
}

/// int_0^inf exp(-x t) g(t) dt for x > 0 and g bounded by a power of t.
[[nodiscard]] inline double laplace_transform(const RealFn& g, double x, double tol = 1e-12) {
    if (!(x > 0)) throw DomainError("laplace_transform: need x > 0");
    return quad::integrate_tail([&](double t) { return std::exp(-x * t) * g(t); }, 0.0, x, tol);
}

/// Hybrid transform F(y) = int_0^inf exp(-y t) sin(sqrt3 y t) q(t) dt.
[[nodiscard]] inline double hybrid_transform(const RealFn& q, double y, double decay, double tol = 1e-12) {
    if (y == 0.0) return 0.0;
    return quad::integrate_tail([&](double t) { return std::exp(-y * t) * std::sin(sqrt3 * y * t) * q(t); },
                                0.0, decay + y, tol);
}

// -- wedge stage ------------------------------------------------------------

/// Odd extension across the wedge bisector: the harmonic function Im L[q]
/// takes F(y) on the side arg w = -pi/3 (at w = 2y e^{-i pi/3}) and -F(y) on
/// arg w = pi/3. Parametrized by s in R: s > 0 is the lower side, s < 0 the
/// upper one.
[[nodiscard]] inline RealFn odd_extension(RealFn F) {
    return [F](double s) { return s >= 0 ? F(s) : -F(-s); };
}

/// int_0^inf F(y)/(y - y0) dy for F = O(1/y). A pole close to the positive
/// axis is subtracted: F(x0)/(y - y0) with x0 = Re y0 integrates in closed form.
[[nodiscard]] inline cx halfline_cauchy(const RealFn& F, cx y0, double tol = 1e-12) {
    double x0 = y0.real();
    bool near = x0 > 0 && std::abs(y0.imag()) < 0.5 * x0;
    double Y = near ? 2.0 * x0 : std::max(1.0, 2.0 * std::abs(y0));
    cx head;
    if (near) {
        double Fx = F(x0);
        auto f = [&](double y) { return (F(y) - Fx) / (y - y0); };
        head = quad::integrate(f, 0.0, x0, tol) + quad::integrate(f, x0, Y, tol);
        head += Fx * (std::log(cx(Y, 0.0) - y0) - std::log(-y0));
    } else {
        head = quad::integrate([&](double y) { return F(y) / (y - y0); }, 0.0, Y, tol);
    }
    // y = 1/u beyond Y: F(1/u) / (u (1 - y0 u)).
    auto g = [&](double u) { return u == 0.0 ? cx{} : F(1.0 / u) / (u * (1.0 - y0 * u)); };
    return head + quad::integrate(g, 0.0, 1.0 / Y, tol);
}

/// Laplace transform of q inside the wedge |arg z| < pi/3 from its hybrid
/// transform. Mapping the wedge to a half-plane by w = z^{3/2} and applying
/// the Schwarz integral to the boundary data of Im L[q] folds into
///   L[q](z) = (24/pi) int_0^inf y^2 F(y) / (8 y^3 + z^3) dy,
/// evaluated through y^2/(8y^3 + z^3) = (1/24) sum_j 1/(y - y_j) with
/// y_j = (z/2) {-1, e^{i pi/3}, e^{-i pi/3}}.
[[nodiscard]] inline cx laplace_from_F(const RealFn& F, cx z, double tol = 1e-12) {
    if (std::abs(std::arg(z)) >= pi / 3) throw DomainError("laplace_from_F: z outside the wedge |arg z| < pi/3");
    cx sum{};
    for (cx w : {cx(-1.0, 0.0), std::polar(1.0, pi / 3), std::polar(1.0, -pi / 3)})
        sum += halfline_cauchy(F, 0.5 * z * w, tol);
    return sum / pi;
}

// -- inverse Laplace ----------------------------------------------------------

/// Weeks expansion f(t) = e^{(sigma - b) t} sum_n a_n L_n(2 b t), with the
/// coefficients taken from F on the circle |w| = radius of the Moebius map
/// s = sigma + b (1 + w)/(1 - w). For sigma = 0, b = 1, radius 0.5 the sample
/// points stay in |arg s| < 53 degrees.
struct WeeksOptions {
    double sigma = 0.0, b = 1.0, radius = 0.5;
    int points = 64;     // FFT length; the first points/2 coefficients are kept
    double noise = 1e-13; // relative accuracy of the F samples
};

struct WeeksExpansion {
    double sigma = 0.0, b = 1.0;
    std::vector<double> a;
    double imag_leak = 0.0; // max |Im a_n|, zero for real f
    double tail = 0.0;      // max |a_n| over the last quarter of kept terms
    int dropped = 0;        // coefficients under their noise bound, set to zero

    [[nodiscard]] double operator()(double t) const {
        double x = 2.0 * b * t, l0 = 1.0, l1 = 1.0 - x, s = a.empty() ? 0.0 : a[0];
        if (a.size() > 1) s += a[1] * l1;
        for (std::size_t n = 1; n + 1 < a.size(); ++n) {
            double l2 = ((2.0 * n + 1.0 - x) * l1 - n * l0) / (n + 1.0);
            s += a[n + 1] * l2;
            l0 = l1;
            l1 = l2;
        }
        return std::exp((sigma - b) * t) * s;
    }
};

/// Points on the sampling circle, exposed so callers can precompute F there.
[[nodiscard]] inline std::vector<cx> weeks_nodes(const WeeksOptions& o) {
    std::vector<cx> s;
    for (int j = 0; j <= o.points / 2; ++j) {
        cx w = std::polar(o.radius, 2.0 * pi * j / o.points);
        s.push_back(o.sigma + o.b * (1.0 + w) / (1.0 - w));
    }
    return s;
}

/// Expansion from F values at weeks_nodes(o); the lower half circle follows by
/// F(conj s) = conj F(s).
[[nodiscard]] inline WeeksExpansion weeks_from_values(const std::vector<cx>& Fs, const WeeksOptions& o) {
    const int N = o.points;
    if (static_cast<int>(Fs.size()) != N / 2 + 1) throw DomainError("weeks_from_values: wrong sample count");
    std::vector<cx> g(N);
    for (int j = 0; j < N; ++j) {
        int jj = j <= N / 2 ? j : N - j;
        cx w = std::polar(o.radius, 2.0 * pi * j / N);
        cx Fv = j <= N / 2 ? Fs[jj] : std::conj(Fs[jj]);
        g[j] = 2.0 * o.b / (1.0 - w) * Fv;
    }
    WeeksExpansion e;
    e.sigma = o.sigma;
    e.b = o.b;
    const int keep = N / 2;
    double gmax = 0.0;
    for (const auto& v : g) gmax = std::max(gmax, std::abs(v));
    e.a.resize(keep);
    for (int n = 0; n < keep; ++n) {
        cx s{};
        for (int j = 0; j < N; ++j) s += g[j] * std::polar(1.0, -2.0 * pi * j * n / N);
        double rn = std::pow(o.radius, n);
        s /= N * rn;
        // Sample noise is amplified by radius^{-n}; coefficients under that
        // floor carry no information.
        double floor = 10.0 * o.noise * gmax / rn;
        if (std::abs(s) < floor) {
            s = 0.0;
            ++e.dropped;
        }
        e.a[n] = s.real();
        e.imag_leak = std::max(e.imag_leak, std::abs(s.imag()));
    }
    for (int n = 3 * keep / 4; n < keep; ++n) e.tail = std::max(e.tail, std::abs(e.a[n]));
    return e;
}

[[nodiscard]] inline WeeksExpansion weeks(const ComplexFn& F, const WeeksOptions& o = {}) {
    auto nodes = weeks_nodes(o);
    std::vector<cx> vals(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) { vals[i] = F(nodes[i]); });
    return weeks_from_values(vals, o);
}

/// Bromwich inversion on a vertical line (Abate-Whitt Fourier series with
/// Euler summation). A sets the discretization error near e^{-A}.
[[nodiscard]] inline double bromwich_euler(const ComplexFn& F, double t, double A = 18.4, int n = 15, int m = 11) {
    if (!(t > 0)) throw DomainError("bromwich_euler: need t > 0");
    double h = A / (2.0 * t);
    double scale = std::exp(A / 2.0) / t;
    std::vector<double> partial(n + m + 1);
    double s = 0.5 * F(cx(h, 0.0)).real();
    for (int k = 1; k <= n + m; ++k) {
        s += (k % 2 ? -1.0 : 1.0) * F(cx(h, pi * k / t)).real();
        partial[k] = s;
    }
    // Binomial average of the partial sums n .. n+m.
    double avg = 0.0, c = 1.0;
    for (int j = 0; j <= m; ++j) {
        avg += c * partial[n + j];
        c = c * (m - j) / (j + 1.0);
    }
    return scale * avg / std::pow(2.0, m);
}

} // namespace cubic_scatter::transforms
