#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/interpolators/barycentric_rational.hpp>

#include "core.hpp"
#include "quad.hpp"
#include "trig3.hpp"

namespace cubic_scatter::raygeom {

enum class Orientation { outgoing, incoming };

/// Ray l_{zeta_k} (outgoing, points x zeta_k with x >= 0) or its complement
/// on the line L_{zeta_k} (incoming).
struct RayLabel {
    int k = 1;
    Orientation orientation = Orientation::outgoing;

    [[nodiscard]] cx direction() const {
        return orientation == Orientation::outgoing ? zeta(k) : -zeta(k);
    }
    /// zeta_2 * l_{zeta_k} = l_{zeta_{k+1}}.
    [[nodiscard]] RayLabel rotated() const { return {next_index(k), orientation}; }
    bool operator==(const RayLabel&) const = default;
};

/// Complex function on a ray, given by samples, a closed form, or both.
/// Closed form wins when present. Samples are interpolated with a
/// barycentric rational interpolant and taken as 0 past the last node.
class RayFn {
public:
    RayLabel label{};
    double decay = 0.0;
    std::vector<double> grid;
    std::vector<cx> values;

    RayFn() = default;
    RayFn(RayLabel l, std::function<cx(double)> f, double decay_rate)
        : label(l), decay(decay_rate), closed_(std::move(f)) {}
    RayFn(RayLabel l, std::vector<double> x, std::vector<cx> v, double decay_rate)
        : label(l), decay(decay_rate), grid(std::move(x)), values(std::move(v)) {
        check_samples();
    }

    [[nodiscard]] bool has_closed_form() const { return static_cast<bool>(closed_); }

    /// Value at parameter x >= 0 (the point x * direction on the ray).
    [[nodiscard]] cx operator()(double x) const {
        if (closed_) return closed_(x);
        if (grid.empty()) return 0.0;
        if (x < grid.front() || x > grid.back()) return 0.0;
        build_interp();
        return {(*re_)(x), (*im_)(x)};
    }

    /// Upper end of the integration range for quadrature.
    [[nodiscard]] double support_end(double rate_margin) const {
        if (!closed_ && !grid.empty()) return grid.back();
        return quad::truncation_length(rate_margin);
    }

    void check_samples() const {
        if (grid.size() != values.size()) throw DomainError("RayFn: grid/value size mismatch");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1])) throw DomainError("RayFn: grid must be strictly ascending");
        for (auto& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw DomainError("RayFn: non-finite sample");
    }

private:
    using Interp = boost::math::barycentric_rational<double>;
    std::function<cx(double)> closed_;
    mutable std::shared_ptr<Interp> re_, im_;

    void build_interp() const {
        if (re_) return;
        std::vector<double> r(values.size()), i(values.size());
        for (std::size_t j = 0; j < values.size(); ++j) {
            r[j] = values[j].real();
            i[j] = values[j].imag();
        }
        re_ = std::make_shared<Interp>(grid.data(), r.data(), grid.size(), 3);
        im_ = std::make_shared<Interp>(grid.data(), i.data(), grid.size(), 3);
    }
};

// Regions ------------------------------------------------------------------

/// Im(lambda zeta_k): the quantity bounded in the half-planes C_-(., a).
/// C_-(zeta_1, a) is Im(lambda) < a; the transform along l_{zeta_k} lives on
/// the half-plane where Im(lambda zeta_k) < a.
[[nodiscard]] inline double rotated_imag(cx lambda, int k) { return (lambda * zeta(k)).imag(); }

enum class RegionKind { half_plane, triangle, triangle_star, disc, sector };

struct Region {
    RegionKind kind = RegionKind::disc;
    double a = 1.0;  // decay rate (triangles, half-planes) or radius (disc)
    int k = 1;       // half-plane index, or sector index p in 1..6
    int sign = -1;   // half-plane: -1 for C_-, +1 for C_+

    static Region half_plane(int k, double a, int sign) { return {RegionKind::half_plane, a, k, sign}; }
    static Region triangle(double a) { return {RegionKind::triangle, a, 1, -1}; }
    static Region triangle_star(double a) { return {RegionKind::triangle_star, a, 1, 1}; }
    /// Disc of radius r (D_{a/3} for a decay rate a is disc(a/3)).
    static Region disc(double r) { return {RegionKind::disc, r, 1, 0}; }
    static Region sector(int p) { return {RegionKind::sector, 0.0, p, 0}; }
};

/// Sector index 1..6 containing lambda (arg in ((p-1) pi/3, p pi/3)), or 0 on a line.
[[nodiscard]] inline int sector_of(cx lambda, double tol = 0.0) {
    if (std::abs(lambda) == 0.0) return 0;
    double ang = std::arg(lambda);
    if (ang < 0) ang += 2 * pi;
    double u = ang / (pi / 3);
    double f = u - std::floor(u);
    if (f <= tol || f >= 1 - tol) return 0;
    return static_cast<int>(std::floor(u)) % 6 + 1;
}

/// Membership predicate. C_-(zeta_1,a): nu < a; C_-(zeta_3,a) is the image of
/// C_-(zeta_1,a) under multiplication by zeta_3, i.e. Im(lambda zeta_2) < a,
/// likewise C_-(zeta_2,a): Im(lambda zeta_3) < a. C_+(zeta_k,-a) flips the
/// inequality to > -a. T_a uses the mixed closed/open form nu < a,
/// nu >= sqrt3 mu - 2a, nu >= -sqrt3 mu - 2a; T_a* is its conjugate.
[[nodiscard]] inline bool region_contains(const Region& r, cx lambda) {
    const double mu = lambda.real(), nu = lambda.imag();
    switch (r.kind) {
    case RegionKind::half_plane: {
        // Half-plane labelled by zeta_k is the zeta_k-rotation of C_-(zeta_1):
        // lambda = zeta_k eta, so eta = lambda conj(zeta_k).
        double im = (lambda * std::conj(zeta(r.k))).imag();
        return r.sign < 0 ? im < r.a : im > -r.a;
    }
    case RegionKind::triangle:
        return nu < r.a && nu >= sqrt3 * mu - 2 * r.a && nu >= -sqrt3 * mu - 2 * r.a;
    case RegionKind::triangle_star:
        return -nu < r.a && -nu >= sqrt3 * mu - 2 * r.a && -nu >= -sqrt3 * mu - 2 * r.a;
    case RegionKind::disc:
        return std::abs(lambda) < r.a;
    case RegionKind::sector:
        return sector_of(lambda) == r.k;
    }
    return false;
}

// Transforms ---------------------------------------------------------------

/// Transform of a component along l_{zeta_k}:
///   f~_k(lambda) = int_0^inf exp(-i lambda zeta_k x) f(x zeta_k) dx.
/// Requires Im(lambda zeta_k) < decay (on the line itself when decay = 0).
[[nodiscard]] inline cx ray_transform(int k, const RayFn& f, cx lambda,
                                      double tol = quad::default_tol) {
    double growth = rotated_imag(lambda, k);
    double margin = f.decay - growth;
    if (f.decay > 0 ? !(margin > 0) : growth > 1e-14)
        throw DomainError("ray_transform: lambda outside the admissible half-plane");
    const cx w = -I * lambda * zeta(k);
    auto integrand = [&](double x) { return std::exp(w * x) * f(x); };
    if (!f.has_closed_form() && !f.grid.empty())
        return quad::integrate(integrand, 0.0, f.grid.back(), tol);
    if (!(margin > 0)) throw DomainError("ray_transform: closed form needs positive decay margin");
    return quad::integrate_tail(integrand, 0.0, margin, tol);
}

/// Full transform F(f)(lambda) = sum_k f~_k(lambda) for a triple on the bundle.
[[nodiscard]] inline cx full_transform(const std::array<RayFn, 3>& f, cx lambda,
                                       double tol = quad::default_tol) {
    cx s{};
    for (int k = 1; k <= 3; ++k) s += ray_transform(k, f[k - 1], lambda, tol);
    return s;
}

/// 3 int_0^inf s_p(-i lambda x) g(x) dx: the s_p-kernel analogue of the
/// cosine and sine transforms. Requires lambda in T_a for g's decay a.
[[nodiscard]] inline cx symmetric_transform(int p, const RayFn& g, cx lambda,
                                            double tol = quad::default_tol) {
    if (g.decay > 0 && !region_contains(Region::triangle(g.decay), lambda))
        throw DomainError("symmetric_transform: lambda outside T_a");
    double growth = 0.0;
    for (int k = 1; k <= 3; ++k) growth = std::max(growth, rotated_imag(lambda, k));
    auto integrand = [&](double x) { return trig3::eval_s(p, -I * lambda * x) * g(x); };
    if (!g.has_closed_form() && !g.grid.empty())
        return 3.0 * quad::integrate(integrand, 0.0, g.grid.back(), tol);
    double margin = g.decay - growth;
    if (!(margin > 0)) throw DomainError("symmetric_transform: lambda on the boundary of T_a");
    return 3.0 * quad::integrate_tail(integrand, 0.0, margin, tol);
}

/// Symmetric extension of g used by symmetric_transform(p): the triple with
/// components g, zeta^{-p}-weighted so that F(ext) = 3 int s_p(-i l x) g.
[[nodiscard]] inline std::array<RayFn, 3> symmetric_extension(int p, const RayFn& g) {
    std::array<RayFn, 3> out;
    for (int k = 1; k <= 3; ++k) {
        cx wgt = std::pow(zeta(k), -p);
        RayLabel lab{k, Orientation::outgoing};
        if (g.has_closed_form()) {
            out[k - 1] = RayFn(lab, [g, wgt](double x) { return wgt * g(x); }, g.decay);
        } else {
            std::vector<cx> v(g.values.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = wgt * g.values[i];
            out[k - 1] = RayFn(lab, g.grid, v, g.decay);
        }
    }
    return out;
}

/// Components of the decomposition over the eigenspaces of the 2 pi / 3
/// rotation J: f = Phi + Psi + H, with profiles phi, psi, h on the ray.
struct JParts {
    std::vector<cx> phi, psi, h;
    /// Component k (1..3) of each part evaluated back on l_{zeta_k}.
    [[nodiscard]] std::array<std::vector<cx>, 3> Phi() const { return spread(phi, 0); }
    [[nodiscard]] std::array<std::vector<cx>, 3> Psi() const { return spread(psi, 1); }
    [[nodiscard]] std::array<std::vector<cx>, 3> H() const { return spread(h, 2); }

private:
    // Eigenvector weights: Phi (1,1,1), Psi (1, z3, z2), H (1, z2, z3).
    [[nodiscard]] static std::array<std::vector<cx>, 3> spread(const std::vector<cx>& v, int which) {
        std::array<cx, 3> w;
        if (which == 0) w = {1.0, 1.0, 1.0};
        else if (which == 1) w = {1.0, zeta(3), zeta(2)};
        else w = {1.0, zeta(2), zeta(3)};
        std::array<std::vector<cx>, 3> out;
        for (int k = 0; k < 3; ++k) {
            out[k].resize(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) out[k][i] = w[k] * v[i];
        }
        return out;
    }
};

/// Projections of a sampled triple onto E_{zeta_1}, E_{zeta_2}, E_{zeta_3}
/// by the averaging formulas.
[[nodiscard]] inline JParts j_decompose(const std::array<RayFn, 3>& f) {
    const auto& g = f[0].grid;
    for (int k = 1; k < 3; ++k)
        if (f[k].grid != g || f[k].values.size() != f[0].values.size())
            throw DomainError("j_decompose: components must share a grid");
    JParts out;
    std::size_t n = f[0].values.size();
    out.phi.resize(n);
    out.psi.resize(n);
    out.h.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        cx f1 = f[0].values[i], f2 = f[1].values[i], f3 = f[2].values[i];
        out.phi[i] = (f1 + f2 + f3) / 3.0;
        out.psi[i] = (f1 + zeta(2) * f2 + zeta(3) * f3) / 3.0;
        out.h[i] = (f1 + zeta(3) * f2 + zeta(2) * f3) / 3.0;
    }
    return out;
}

/// Rotation J: (f1, f2, f3) -> (f3, f1, f2).
[[nodiscard]] inline std::array<std::vector<cx>, 3> j_apply(const std::array<std::vector<cx>, 3>& f) {
    return {f[2], f[0], f[1]};
}

} // namespace cubic_scatter::raygeom
