#pragma once

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "core.hpp"

namespace cubic_scatter::quad {

inline constexpr double default_tol = 1e-10;

/// Adaptive Gauss-Kronrod (21 point) on a finite interval. Works for real and
/// complex valued integrands.
template <class F>
[[nodiscard]] auto integrate(F&& f, double a, double b, double tol = default_tol,
                             unsigned max_depth = 18) {
    using R = decltype(f(a));
    if (a == b) return R{};
    return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, max_depth, tol);
}

/// Length beyond `a` after which a tail decaying like exp(-rate x) drops under `cut`.
[[nodiscard]] inline double truncation_length(double rate, double cut = 1e-14) {
    if (!(rate > 0)) throw DomainError("truncation_length: non-positive decay rate");
    return -std::log(cut) / rate;
}

/// Integral over [a, inf) of an integrand decaying at least like exp(-rate x).
/// The range is truncated and split into unit-ish panels so the adaptive rule
/// never has to resolve the whole decay at once.
template <class F>
[[nodiscard]] auto integrate_tail(F&& f, double a, double rate, double tol = default_tol) {
    using R = decltype(f(a));
    double len = truncation_length(rate);
    double h = std::max(1.0, 4.0 / rate);
    int panels = std::max(1, static_cast<int>(std::ceil(len / h)));
    h = len / panels;
    R sum{};
    for (int i = 0; i < panels; ++i) sum += integrate(f, a + i * h, a + (i + 1) * h, tol);
    return sum;
}

/// Gauss-Legendre rule on [-1, 1].
struct Rule {
    std::vector<double> x, w;
};

template <unsigned N>
[[nodiscard]] Rule gauss_legendre() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    Rule r;
    // Boost stores the non-negative half; mirror it.
    for (std::size_t i = ab.size(); i-- > 0;) {
        if (ab[i] == 0.0) continue;
        r.x.push_back(-ab[i]);
        r.w.push_back(wt[i]);
    }
    for (std::size_t i = 0; i < ab.size(); ++i) {
        r.x.push_back(ab[i]);
        r.w.push_back(wt[i]);
    }
    return r;
}

} // namespace cubic_scatter::quad
