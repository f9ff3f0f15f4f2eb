#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "direct.hpp"
#include "quad.hpp"

namespace cubic_scatter::rh {

using direct::Ray;

/// Radial quadrature on [0, R]: composite Gauss-Legendre panels, finer near 0,
/// with `disc` as an exact breakpoint so disc samples and tail samples never
/// share a panel.
struct ContourGrid {
    std::vector<double> breaks; // 0 = b_0 < ... < b_M = R
    std::vector<double> rho, w; // nodes and weights, ascending
    static constexpr int order = 16;

    [[nodiscard]] double R() const { return breaks.back(); }
    [[nodiscard]] std::size_t panels() const { return breaks.size() - 1; }
    [[nodiscard]] std::size_t size() const { return rho.size(); }

    static ContourGrid from_breaks(std::vector<double> b) {
        if (b.size() < 2 || b.front() != 0.0) throw ConfigError("ContourGrid: breaks must start at 0");
        for (std::size_t i = 1; i < b.size(); ++i)
            if (!(b[i] > b[i - 1])) throw ConfigError("ContourGrid: breaks must increase");
        ContourGrid g;
        g.breaks = std::move(b);
        static const auto rule = quad::gauss_legendre<order>();
        for (std::size_t p = 0; p + 1 < g.breaks.size(); ++p) {
            double c = 0.5 * (g.breaks[p] + g.breaks[p + 1]), h = 0.5 * (g.breaks[p + 1] - g.breaks[p]);
            for (std::size_t j = 0; j < rule.x.size(); ++j) {
                g.rho.push_back(c + h * rule.x[j]);
                g.w.push_back(h * rule.w[j]);
            }
        }
        return g;
    }

    /// Breaks 0, disc/8, disc/4, disc/2, disc, then growing by `ratio` to R.
    static ContourGrid graded(double disc, double R = 2e3, double ratio = 1.5) {
        if (!(disc > 0) || !(R > disc)) throw ConfigError("ContourGrid: need 0 < disc < R");
        std::vector<double> b{0.0, disc / 8, disc / 4, disc / 2, disc};
        while (b.back() < R) b.push_back(std::min(R, std::max(b.back() * ratio, b.back() + disc / 2)));
        return from_breaks(std::move(b));
    }
};

// -- product integration on a panel ---------------------------------------------

namespace detail {

/// Inverse Vandermonde (monomials on the Legendre nodes), built once.
inline const std::vector<std::vector<double>>& inverse_vandermonde() {
    static const std::vector<std::vector<double>> inv = [] {
        const auto rule = quad::gauss_legendre<ContourGrid::order>();
        const int n = ContourGrid::order;
        std::vector<std::vector<long double>> a(n, std::vector<long double>(2 * n, 0.0L));
        for (int i = 0; i < n; ++i) {
            long double x = rule.x[i], p = 1.0L;
            for (int j = 0; j < n; ++j) { a[i][j] = p; p *= x; }
            a[i][n + i] = 1.0L;
        }
        for (int c = 0; c < n; ++c) {
            int piv = c;
            for (int r = c + 1; r < n; ++r)
                if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
            std::swap(a[c], a[piv]);
            long double d = a[c][c];
            for (auto& v : a[c]) v /= d;
            for (int r = 0; r < n; ++r) {
                if (r == c) continue;
                long double f = a[r][c];
                if (f == 0.0L) continue;
                for (int k = 0; k < 2 * n; ++k) a[r][k] -= f * a[c][k];
            }
        }
        std::vector<std::vector<double>> out(n, std::vector<double>(n));
        // Row j of out maps node values to the coefficient of s^j.
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) out[j][i] = static_cast<double>(a[j][n + i]);
        return out;
    }();
    return inv;
}

/// Bernstein-ellipse parameter of a point relative to [-1, 1].
[[nodiscard]] inline double bernstein(cx w) {
    cx r = w + std::sqrt(w - 1.0) * std::sqrt(w + 1.0);
    return std::max(std::abs(r), 1.0 / std::abs(r));
}

/// int_{-1}^{1} p(s)/(s - w) ds for p interpolating `vals` at the Legendre
/// nodes. For real w in (-1, 1) the principal value is returned.
[[nodiscard]] inline cx panel_cauchy(const cx* vals, cx w) {
    const auto& inv = inverse_vandermonde();
    const int n = ContourGrid::order;
    cx p0;
    if (w.imag() == 0.0 && std::abs(w.real()) < 1.0) {
        p0 = std::log((1.0 - w.real()) / (1.0 + w.real()));
    } else {
        p0 = std::log((1.0 - w) / (-1.0 - w));
    }
    cx sum{}, pm = p0;
    for (int m = 0; m < n; ++m) {
        cx c{};
        for (int i = 0; i < n; ++i) c += inv[m][i] * vals[i];
        sum += c * pm;
        pm = w * pm + ((m % 2 == 0) ? 2.0 / (m + 1) : 0.0);
    }
    return sum;
}

/// Value at s in [-1, 1] of the interpolant of `vals`.
[[nodiscard]] inline cx panel_interp(const cx* vals, double s) {
    const auto& inv = inverse_vandermonde();
    const int n = ContourGrid::order;
    cx out{};
    double p = 1.0;
    for (int m = 0; m < n; ++m) {
        cx c{};
        for (int i = 0; i < n; ++i) c += inv[m][i] * vals[i];
        out += c * p;
        p *= s;
    }
    return out;
}

} // namespace detail

// -- functions sampled on a full line ---------------------------------------------

/// Samples of a function on L_{zeta_k} at t = -rho_j (descending j) and
/// t = +rho_j, i.e. ascending t. Node i < n is t = -rho_{n-1-i}.
struct LineFunction {
    int k = 1;
    const ContourGrid* grid = nullptr;
    std::vector<cx> v;
    // h(t) ~ sum_n c_n t^{-n} beyond the truncation radius, per side.
    std::array<cx, 3> tail_left{}, tail_right{};
    double tail_residual = 0.0;

    [[nodiscard]] std::size_t n() const { return grid->size(); }
    [[nodiscard]] double t(std::size_t i) const {
        std::size_t n0 = n();
        return i < n0 ? -grid->rho[n0 - 1 - i] : grid->rho[i - n0];
    }
    [[nodiscard]] double weight(std::size_t i) const {
        std::size_t n0 = n();
        return i < n0 ? grid->w[n0 - 1 - i] : grid->w[i - n0];
    }
    /// Panel p of the full line (0 .. 2M-1) and its interval.
    [[nodiscard]] std::size_t panels() const { return 2 * grid->panels(); }
    [[nodiscard]] std::pair<double, double> panel(std::size_t p) const {
        std::size_t M = grid->panels();
        if (p < M) return {-grid->breaks[M - p], -grid->breaks[M - p - 1]};
        return {grid->breaks[p - M], grid->breaks[p - M + 1]};
    }
    /// Values on panel p in increasing-t order (GL nodes are mirrored on the
    /// negative half, so reversal puts them back in rule order).
    [[nodiscard]] std::vector<cx> panel_values(std::size_t p) const {
        const int m = ContourGrid::order;
        std::vector<cx> out(v.begin() + p * m, v.begin() + (p + 1) * m);
        return out;
    }
    /// Value at t = 0 from the interpolants on both adjacent panels (averaged).
    [[nodiscard]] cx at_zero() const {
        std::size_t M = grid->panels();
        auto left = panel_values(M - 1), right = panel_values(M);
        return 0.5 * (detail::panel_interp(left.data(), 1.0) + detail::panel_interp(right.data(), -1.0));
    }

    /// Least-squares fit of the decay coefficients on the outermost panels.
    void fit_tails() {
        const int m = ContourGrid::order;
        tail_residual = 0.0;
        auto fit = [&](std::size_t first, std::array<cx, 3>& c) {
            double A[3][3] = {}, scale = std::abs(t(first + m / 2));
            cx rhs[3] = {};
            for (int j = 0; j < m; ++j) {
                double u = scale / t(first + j); // basis (scale/t)^n
                double b[3] = {u, u * u, u * u * u};
                for (int r = 0; r < 3; ++r) {
                    rhs[r] += b[r] * v[first + j];
                    for (int c2 = 0; c2 < 3; ++c2) A[r][c2] += b[r] * b[c2];
                }
            }
            // Gaussian elimination on the 3x3 normal equations.
            for (int col = 0; col < 3; ++col)
                for (int r = col + 1; r < 3; ++r) {
                    double f = A[r][col] / A[col][col];
                    for (int c2 = col; c2 < 3; ++c2) A[r][c2] -= f * A[col][c2];
                    rhs[r] -= f * rhs[col];
                }
            cx x[3];
            for (int r = 2; r >= 0; --r) {
                cx acc = rhs[r];
                for (int c2 = r + 1; c2 < 3; ++c2) acc -= A[r][c2] * x[c2];
                x[r] = acc / A[r][r];
            }
            for (int n1 = 0; n1 < 3; ++n1) c[n1] = x[n1] * std::pow(scale, n1 + 1);
            for (int j = 0; j < m; ++j) {
                double tt = t(first + j);
                cx model = c[0] / tt + c[1] / (tt * tt) + c[2] / (tt * tt * tt);
                tail_residual = std::max(tail_residual, std::abs(model - v[first + j]));
            }
        };
        fit(0, tail_left);
        fit(v.size() - m, tail_right);
    }
};

namespace detail {

/// J_n(w) = int_R^inf t^{-n}/(t - w) dt for n = 1..3.
[[nodiscard]] inline std::array<cx, 3> tail_moments(double R, cx w) {
    std::array<cx, 3> J{};
    if (std::abs(w) < 0.5 * R) {
        for (int n = 1; n <= 3; ++n) {
            cx s{}, wp = 1.0;
            for (int m = 0; m < 80; ++m) {
                cx term = wp * std::pow(R, -n - m) / double(n + m);
                s += term;
                if (std::abs(term) < 1e-18 * std::abs(s)) break;
                wp *= w;
            }
            J[n - 1] = s;
        }
    } else {
        J[0] = -std::log(1.0 - w / R) / w;
        for (int n = 2; n <= 3; ++n) J[n - 1] = (J[n - 2] - std::pow(R, 1 - n) / double(n - 1)) / w;
    }
    return J;
}

} // namespace detail

/// int_R h(t)/(t - w) dt over the sampled line (no 1/(2 pi i)). Real w inside
/// the line gives the principal value. Panels close to w use product
/// integration, the rest plain Gauss-Legendre.
[[nodiscard]] inline cx line_cauchy_raw(const LineFunction& h, cx w) {
    const int m = ContourGrid::order;
    cx sum{};
    for (std::size_t p = 0; p < h.panels(); ++p) {
        auto [a, b] = h.panel(p);
        double c = 0.5 * (a + b), hl = 0.5 * (b - a);
        cx wl = (w - c) / hl;
        const cx* vals = h.v.data() + p * m;
        if (detail::bernstein(wl) > 3.0) {
            for (int j = 0; j < m; ++j) {
                std::size_t i = p * m + j;
                sum += h.weight(i) * vals[j] / (h.t(i) - w);
            }
        } else {
            sum += detail::panel_cauchy(vals, wl);
        }
    }
    double R = h.grid->R();
    auto Jr = detail::tail_moments(R, w), Jl = detail::tail_moments(R, -w);
    for (int n = 0; n < 3; ++n) {
        sum += h.tail_right[n] * Jr[n];
        // t = -s on the left: h(-s) = sum c_n (-1)^n s^{-n}, 1/(t - w) = -1/(s + w).
        sum -= h.tail_left[n] * ((n % 2 == 0) ? -1.0 : 1.0) * Jl[n];
    }
    return sum;
}

/// (1/2 pi i) int_{L_{zeta_k}} h(l)/(l - z) dl for z off the line. With
/// l = t zeta_k this is (1/2 pi i) int h(t)/(t - z conj(zeta_k)) dt.
[[nodiscard]] inline cx cauchy_line_integral(const LineFunction& h, cx z, double guard = 1e-12) {
    cx w = z * std::conj(zeta(h.k));
    if (std::abs(w.imag()) <= guard * std::max(1.0, std::abs(w)))
        throw TooCloseToContour("cauchy_line_integral: point on the line; use boundary values");
    return line_cauchy_raw(h, w) / (2.0 * pi * I);
}

/// One-sided boundary values at node i: (1/2 pi i) PV int h/(t - t_i) +- h_i/2.
[[nodiscard]] inline std::pair<cx, cx> plemelj(const LineFunction& h, std::size_t i) {
    cx pv = line_cauchy_raw(h, cx(h.t(i), 0.0)) / (2.0 * pi * I);
    return {pv + 0.5 * h.v[i], pv - 0.5 * h.v[i]};
}

// -- rational modification ------------------------------------------------------

/// theta_k = theta_1 e^{i (k-1) pi/3}: one point on the bisector of each sector.
struct ThetaFrame {
    cx theta1{};
    explicit ThetaFrame(cx t1) : theta1(t1) {
        if (raygeom::sector_of(t1, 1e-12) == 0) throw ThetaOnContour("ThetaFrame: theta_1 lies on the contour");
        if (std::abs(std::arg(t1) - pi / 6) > 1e-9) throw ThetaOnContour("ThetaFrame: theta_1 must be on the S1 bisector");
    }
    static ThetaFrame standard(double a_prime) { return ThetaFrame(std::polar(0.5 * a_prime, pi / 6)); }
    [[nodiscard]] cx theta(int p) const { return theta1 * std::polar(1.0, (p - 1) * pi / 3); }
};

/// Sectors on the left and right of a ray, seen along the line direction.
[[nodiscard]] inline std::pair<int, int> ray_sectors(Ray ray) {
    auto [l, r] = direct::ray_pair(ray);
    return {direct::home_sector(l), direct::home_sector(r)};
}

/// The ray through a nonzero contour point.
[[nodiscard]] inline Ray ray_of(cx e) {
    for (int k = 1; k <= 3; ++k) {
        cx t = e * std::conj(zeta(k));
        if (std::abs(t.imag()) <= 1e-12 * std::abs(e)) return Ray{k, t.real() > 0};
    }
    throw DomainError("ray_of: point is not on the contour");
}

/// Per-sector rational factors R_p(l) = prod_{e on the boundary of S_p}
/// (l - theta_{q(e)}) / (l - e), where q(e) is the sector across e's ray.
/// Multiplying the sectional function by R_p removes boundary zeros at e while
/// keeping it holomorphic and zero-free in S_p and -> 1 at infinity. The jump
/// on a ray is multiplied by R_left / R_right.
struct Modification {
    ThetaFrame frame;
    std::vector<cx> zeros;

    [[nodiscard]] cx factor(int p, cx l) const {
        cx f = 1.0;
        for (cx e : zeros) {
            auto [L, R] = ray_sectors(ray_of(e));
            if (L == p) f *= (l - frame.theta(R)) / (l - e);
            else if (R == p) f *= (l - frame.theta(L)) / (l - e);
        }
        return f;
    }
    [[nodiscard]] cx jump_factor(Ray ray, cx l) const {
        auto [L, R] = ray_sectors(ray);
        // Zeros on this ray cancel analytically between the two factors.
        cx f = 1.0;
        for (cx e : zeros) {
            auto [eL, eR] = ray_sectors(ray_of(e));
            bool same = eL == L && eR == R;
            if (same) {
                f *= (l - frame.theta(R)) / (l - frame.theta(L));
                continue;
            }
            if (eL == L) f *= (l - frame.theta(eR)) / (l - e);
            else if (eR == L) f *= (l - frame.theta(eL)) / (l - e);
            if (eL == R) f /= (l - frame.theta(eR)) / (l - e);
            else if (eR == R) f /= (l - frame.theta(eL)) / (l - e);
        }
        return f;
    }
};

/// Builds the modification for the nonzero points of a bound-state set.
[[nodiscard]] inline Modification rational_modify(const direct::BoundStateSet& e, ThetaFrame frame) {
    Modification m{frame, {}};
    for (cx p : e.points())
        if (p != 0.0) m.zeros.push_back(p);
    for (cx z : m.zeros)
        for (int p = 1; p <= 6; ++p)
            if (std::abs(frame.theta(p) - z) < 1e-12) throw ThetaOnContour("rational_modify: theta hits a zero");
    return m;
}

// -- the boundary value problem ---------------------------------------------------

/// Jump data G(ray, rho) -> coefficient on that ray at radius rho.
using JumpFn = std::function<cx(Ray, double)>;

struct LineDiagnostics {
    double end_phase = 0.0;
    int winding = 0;
    double tail_bound = 0.0; // misfit of the asymptotic tail model on the last panels
};

/// Scalar Riemann problem Psi+ = G Psi- on the three lines, solved as
/// Psi = Phi_1 Phi_2 Phi_3 with Phi_k = exp(Cauchy integral of ln G_k).
class RHProblem {
public:
    ContourGrid grid;
    std::array<LineFunction, 3> G, logG;
    std::array<LineDiagnostics, 3> diag;
    std::optional<Modification> mod;

    RHProblem(ContourGrid g, const JumpFn& jump, std::optional<Modification> m = std::nullopt)
        : grid(std::move(g)), mod(std::move(m)) {
        for (int k = 1; k <= 3; ++k) {
            auto& Gk = G[k - 1];
            Gk.k = k;
            Gk.grid = &grid;
            Gk.v.resize(2 * grid.size());
        }
        std::size_t n = grid.size();
        parallel_for(6 * n, [&](std::size_t idx) {
            int k = static_cast<int>(idx / (2 * n)) + 1;
            std::size_t i = idx % (2 * n);
            auto& Gk = G[k - 1];
            double t = Gk.t(i);
            Ray ray{k, t > 0};
            cx val = jump(ray, std::abs(t));
            if (mod) val *= mod->jump_factor(ray, t * zeta(k));
            Gk.v[i] = val;
        });
        for (int k = 1; k <= 3; ++k) build_log(k);
    }

    /// Problem from coefficient samples already on the grid (a restored dump).
    /// Samples are the full-line values in ascending t, per line.
    RHProblem(ContourGrid g, const std::array<std::vector<cx>, 3>& samples) : grid(std::move(g)) {
        for (int k = 1; k <= 3; ++k) {
            if (samples[k - 1].size() != 2 * grid.size()) throw DomainError("RHProblem: sample count does not match grid");
            G[k - 1].k = k;
            G[k - 1].grid = &grid;
            G[k - 1].v = samples[k - 1];
        }
        for (int k = 1; k <= 3; ++k) build_log(k);
    }

    RHProblem(const RHProblem& o) : grid(o.grid), G(o.G), logG(o.logG), diag(o.diag), mod(o.mod) { rebind(); }
    RHProblem& operator=(const RHProblem& o) {
        grid = o.grid; G = o.G; logG = o.logG; diag = o.diag; mod = o.mod;
        rebind();
        return *this;
    }

    /// Sectional solution at z off the contour (undoing any modification).
    [[nodiscard]] cx solve(cx z) const {
        int p = raygeom::sector_of(z, 1e-13);
        if (p == 0) throw TooCloseToContour("solve: z lies on the contour");
        cx s{};
        for (int k = 1; k <= 3; ++k) s += cauchy_line_integral(logG[k - 1], z, 0.0);
        cx psi = std::exp(s);
        if (mod) psi /= mod->factor(p, z);
        return psi;
    }

    /// Individual factor Phi_k(z).
    [[nodiscard]] cx phi(int k, cx z) const { return std::exp(cauchy_line_integral(logG[k - 1], z)); }

    /// Boundary values of Psi at node i of line k from the left (+) and right (-).
    [[nodiscard]] std::pair<cx, cx> boundary(int k, std::size_t i) const {
        const auto& h = logG[k - 1];
        cx l = h.t(i) * zeta(k);
        auto [hp, hm] = plemelj(h, i);
        cx others{};
        for (int j = 1; j <= 3; ++j)
            if (j != k) others += cauchy_line_integral(logG[j - 1], l, 0.0);
        cx plus = std::exp(hp + others), minus = std::exp(hm + others);
        if (mod) {
            auto [L, R] = ray_sectors(Ray{k, h.t(i) > 0});
            plus /= mod->factor(L, l);
            minus /= mod->factor(R, l);
        }
        return {plus, minus};
    }

    /// Limit of Psi at 0 from inside sector p. The coefficient may jump at
    /// t = 0 (sector values at the corner need not match after modification);
    /// each half line then contributes a logarithm whose ln|z| parts cancel
    /// across the three lines when the data are consistent.
    [[nodiscard]] cx at_origin(int p) const {
        const std::size_t n = grid.size(), M = grid.panels();
        const double b1 = grid.breaks[1], R = grid.R();
        const cx dir = std::polar(1.0, (2 * p - 1) * pi / 6);
        cx s{}, log_coeff{};
        for (int k = 1; k <= 3; ++k) {
            const auto& h = logG[k - 1];
            auto left = h.panel_values(M - 1), right = h.panel_values(M);
            cx hp = detail::panel_interp(right.data(), -1.0), hm = detail::panel_interp(left.data(), 1.0);
            cx A{}, B{};
            for (std::size_t j = 0; j < n; ++j) {
                double r = grid.rho[j];
                bool inner = r < b1;
                A += grid.w[j] * (h.v[n + j] - (inner ? hp : 0.0)) / r;
                B += grid.w[j] * (h.v[n - 1 - j] - (inner ? hm : 0.0)) / r;
            }
            for (int m = 0; m < 3; ++m) {
                double Rn = std::pow(R, -(m + 1)) / double(m + 1);
                A += h.tail_right[m] * Rn;
                B += h.tail_left[m] * ((m % 2 == 0) ? -1.0 : 1.0) * Rn;
            }
            cx w = dir * std::conj(zeta(k)); // unit direction of approach in line coordinates
            cx line = A + hp * (std::log(b1) - std::log(-w)) - B - hm * (std::log(b1) - std::log(w));
            s += line / (2.0 * pi * I);
            log_coeff += hm - hp;
        }
        if (std::abs(log_coeff) > 1e-6)
            throw DomainError("at_origin: jumps at the corner are inconsistent, no finite limit");
        cx psi = std::exp(s);
        if (mod) psi /= mod->factor(p, 0.0);
        return psi;
    }

    [[nodiscard]] bool index_zero() const {
        for (const auto& d : diag)
            if (d.winding != 0) return false;
        return true;
    }

private:
    void rebind() {
        for (auto& f : G) f.grid = &grid;
        for (auto& f : logG) f.grid = &grid;
    }

    void build_log(int k) {
        const auto& Gk = G[k - 1];
        auto& h = logG[k - 1];
        h.k = k;
        h.grid = &grid;
        h.v.resize(Gk.v.size());
        double phase = std::arg(Gk.v[0]);
        for (std::size_t i = 0; i < Gk.v.size(); ++i) {
            if (Gk.v[i] == 0.0 || !std::isfinite(std::abs(Gk.v[i]))) {
                std::ostringstream os;
                os << "RHProblem: coefficient on line " << k << " is zero or non-finite at t = " << Gk.t(i);
                throw IndexNonZero(os.str());
            }
            if (i > 0) phase += std::arg(Gk.v[i] / Gk.v[i - 1]);
            h.v[i] = cx(std::log(std::abs(Gk.v[i])), phase);
        }
        auto& d = diag[k - 1];
        d.end_phase = phase;
        d.winding = static_cast<int>(std::lround(phase / (2 * pi)));
        h.fit_tails();
        d.tail_bound = h.tail_residual;
        if (std::abs(phase) > pi / 4 || std::abs(std::arg(Gk.v[0])) > pi / 4) {
            std::ostringstream os;
            os << "RHProblem: ln G on line " << k << " does not close (end phase " << phase
               << ", winding " << d.winding << ")";
            throw IndexNonZero(os.str());
        }
    }
};

/// Solution of a problem with known sectional function: the jump data of a
/// function given per sector, G = f_left / f_right on each ray.
[[nodiscard]] inline JumpFn jumps_from_sectional(std::function<cx(int, cx)> f) {
    return [f](Ray ray, double rho) {
        auto [L, R] = ray_sectors(ray);
        cx l = ray.point(rho);
        return f(L, l) / f(R, l);
    };
}

} // namespace cubic_scatter::rh
