#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "quad.hpp"
#include "trig3.hpp"

namespace cubic_scatter {

/// Parameters of the closed-form family q(x) = c x^n exp(-beta x).
struct ExpFamily {
    double c = 1.0;
    int n = 0;
    double beta = 1.0;

    /// Coefficient making |int x q dx| = 1.
    [[nodiscard]] static double normalizing_c(int n, double beta) {
        return std::pow(beta, n + 2) / std::tgamma(n + 2.0);
    }
};

/// Real potential on the half-axis together with everything the direct
/// problem needs from it: ray transforms q~_k, the autocorrelation g_q and
/// its transforms m_k. A closed-form family switches these to exact formulas;
/// otherwise they come from a composite Gauss-Legendre table built once at
/// construction (read-only afterwards, so concurrent use is safe).
class Potential {
public:
    std::function<double(double)> q;
    double decay_a = 0.0;
    double moment = 0.0;
    bool normalized = false;
    std::optional<ExpFamily> family;
    std::string name = "custom";

    Potential() = default;

    /// Potential from a function with known decay rate. `support` is the
    /// length beyond which q is treated as zero (defaults from the decay).
    Potential(std::function<double(double)> fn, double decay, double support = 0.0)
        : q(std::move(fn)), decay_a(decay) {
        if (!(decay > 0)) throw DomainError("Potential: decay rate must be positive");
        build(support);
    }

    static Potential exp_family(ExpFamily f, std::string nm = "family") {
        if (!(f.beta > 0) || f.n < 0) throw DomainError("exp_family: need beta > 0, n >= 0");
        auto fn = [f](double x) { return x < 0 ? 0.0 : f.c * std::pow(x, f.n) * std::exp(-f.beta * x); };
        // Any decay rate below beta satisfies the weighted L2 condition.
        Potential p;
        p.q = fn;
        p.decay_a = 0.9 * f.beta;
        p.family = f;
        p.name = std::move(nm);
        p.build((40.0 + 4.0 * f.n) / f.beta);
        return p;
    }

    /// Builtins: "exp" = e^{-x}, "xexp" = x e^{-x}/2 (both normalized).
    static Potential builtin(const std::string& nm) {
        if (nm == "exp") return exp_family({1.0, 0, 1.0}, nm);
        if (nm == "xexp") return exp_family({0.5, 1, 1.0}, nm);
        if (nm == "x2exp") return exp_family({ExpFamily::normalizing_c(2, 1.0), 2, 1.0}, nm);
        if (nm == "zero") {
            Potential p([](double) { return 0.0; }, 1.0, 1.0);
            p.name = nm;
            return p;
        }
        throw ConfigError("unknown builtin potential '" + nm + "'");
    }

    /// Same potential with closed forms disabled (quadrature cross-check).
    [[nodiscard]] Potential without_closed_forms() const {
        Potential p = *this;
        p.family.reset();
        p.build(support_);
        return p;
    }

    [[nodiscard]] bool closed() const { return family.has_value(); }
    [[nodiscard]] double support() const { return support_; }
    [[nodiscard]] const std::vector<double>& nodes() const { return xs_; }
    [[nodiscard]] const std::vector<double>& weights() const { return ws_; }

    // -- transforms --------------------------------------------------------

    /// q~_k(lambda) = int_0^inf exp(-i lambda zeta_k x) q(x) dx.
    [[nodiscard]] cx qt(int k, cx lambda) const {
        cx kap = I * lambda * zeta(k);
        if (family) return family->c * factorial(family->n) / std::pow(kap + family->beta, family->n + 1);
        cx s{};
        for (std::size_t i = 0; i < xs_.size(); ++i) s += ws_[i] * std::exp(-kap * xs_[i]) * qs_[i];
        return s;
    }
    [[nodiscard]] cx qt_star(int k, cx lambda) const { return std::conj(qt(k, std::conj(lambda))); }

    /// q~_{s_p}(lambda) = int_0^inf s_p(-i lambda x) q(x) dx.
    [[nodiscard]] cx qt_s(int p, cx lambda) const {
        cx s{};
        for (int k = 1; k <= 3; ++k) s += std::pow(zeta(k), -p) * qt(k, lambda);
        return s / 3.0;
    }

    /// Autocorrelation g_q(s) = int_0^inf q(x+s) q(x) dx.
    [[nodiscard]] double g(double s) const {
        if (family) {
            const auto& f = *family;
            double sum = 0.0;
            for (int j = 0; j <= f.n; ++j)
                sum += binom(f.n, j) * std::pow(s, f.n - j) * factorial(f.n + j) /
                       std::pow(2 * f.beta, f.n + j + 1);
            return f.c * f.c * std::exp(-f.beta * s) * sum;
        }
        return g_direct(s);
    }

    /// m_k(lambda) = int_0^inf exp(-i lambda zeta_k s) g_q(s) ds.
    [[nodiscard]] cx m(int k, cx lambda) const {
        cx kap = I * lambda * zeta(k);
        if (family) {
            const auto& f = *family;
            cx sum{};
            for (int j = 0; j <= f.n; ++j)
                sum += binom(f.n, j) * factorial(f.n + j) / std::pow(2 * f.beta, f.n + j + 1) *
                       factorial(f.n - j) / std::pow(kap + f.beta, f.n - j + 1);
            return f.c * f.c * sum;
        }
        cx s{};
        for (std::size_t i = 0; i < xs_.size(); ++i) s += ws_[i] * std::exp(-kap * xs_[i]) * gs_[i];
        return s;
    }
    [[nodiscard]] cx m_star(int k, cx lambda) const { return std::conj(m(k, std::conj(lambda))); }

    /// m_{s_p}(lambda) = int_0^inf s_p(-i lambda s)/(i lambda)^p g_q(s) ds,
    /// summed in the regular form so lambda = 0 needs no special case. For
    /// large |lambda| the three-exponential form in terms of m_k is used.
    [[nodiscard]] cx m_s(int p, cx lambda) const {
        double r = std::abs(lambda);
        if (family ? r > 0.05 : r > 0.5 * decay_a) {
            cx il = I * lambda, s{};
            for (int k = 1; k <= 3; ++k) s += std::pow(zeta(k), -p) * m(k, lambda);
            return s / (3.0 * std::pow(il, p));
        }
        cx s{};
        for (std::size_t i = 0; i < xs_.size(); ++i)
            s += ws_[i] * trig3::kernel(p, lambda, -xs_[i]) * gs_[i];
        return s;
    }

    /// int_0^inf s^j q(s) ds (moments, used for small-lambda expansions).
    [[nodiscard]] double raw_moment(int j) const {
        double s = 0.0;
        for (std::size_t i = 0; i < xs_.size(); ++i) s += ws_[i] * std::pow(xs_[i], j) * qs_[i];
        return s;
    }

    /// Weighted L2 check of the decay condition int e^{2 a x} q^2 < inf on the
    /// table: returns the integral up to the support end.
    [[nodiscard]] double weighted_norm2(double a) const {
        double s = 0.0;
        for (std::size_t i = 0; i < xs_.size(); ++i) s += ws_[i] * std::exp(2 * a * xs_[i]) * qs_[i] * qs_[i];
        return s;
    }

private:
    double support_ = 0.0;
    std::vector<double> xs_, ws_, qs_, gs_;

    static double factorial(int n) { return std::tgamma(n + 1.0); }
    static double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

    [[nodiscard]] double g_direct(double s) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < xs_.size(); ++i) sum += ws_[i] * q(xs_[i] + s) * qs_[i];
        return sum;
    }

    void build(double support) {
        support_ = support > 0 ? support : 40.0 / decay_a;
        const auto rule = quad::gauss_legendre<20>();
        double h = std::min(0.5, 0.5 / decay_a);
        int panels = static_cast<int>(std::ceil(support_ / h));
        h = support_ / panels;
        xs_.clear();
        ws_.clear();
        for (int p = 0; p < panels; ++p) {
            double a = p * h;
            for (std::size_t j = 0; j < rule.x.size(); ++j) {
                xs_.push_back(a + 0.5 * h * (rule.x[j] + 1.0));
                ws_.push_back(0.5 * h * rule.w[j]);
            }
        }
        qs_.resize(xs_.size());
        for (std::size_t i = 0; i < xs_.size(); ++i) qs_[i] = q(xs_[i]);
        gs_.resize(xs_.size());
        for (std::size_t i = 0; i < xs_.size(); ++i) gs_[i] = family ? g(xs_[i]) : g_direct(xs_[i]);
        moment = raw_moment(1);
        normalized = std::abs(std::abs(moment) - 1.0) < 1e-8;
    }
};

} // namespace cubic_scatter
