#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "direct.hpp"
#include "potential.hpp"
#include "rhsolver.hpp"

namespace cubic_scatter {

/// Scattering data: S2, S3 and C sampled on the three diameters of the disc
/// |lambda| < a', the rotation exponent r of C, the bound-state set, and the
/// jump coefficient on the six rays beyond the disc. Samples sit at the radial
/// nodes of the contour grid, so every rotation and conjugation of a sample
/// point is again a sample point.
struct ScatteringData {
    struct Sample {
        cx lambda{}, S2{}, S3{}, C{};
    };
    struct TailSample {
        int k = 1;
        bool outgoing = true;
        double rho = 0.0;
        cx G{};
    };

    double a_prime = 0.0;
    int r = 0;
    std::vector<double> breaks;               // contour grid breakpoints
    std::array<std::vector<Sample>, 3> lines; // line k-1, ascending t
    std::vector<TailSample> tail;
    direct::BoundStateSet Ealpha;
    std::vector<cx> Ealpha_points; // explicit point list, checked against zk/ws

    [[nodiscard]] rh::ContourGrid grid() const { return rh::ContourGrid::from_breaks(breaks); }

    /// Number of disc nodes on each half line.
    [[nodiscard]] std::size_t half() const { return lines[0].size() / 2; }

    /// Sample at lambda (must be a node); nullptr if none matches.
    [[nodiscard]] const Sample* find(cx lambda) const {
        double rho = std::abs(lambda);
        for (int k = 1; k <= 3; ++k) {
            cx t = lambda * std::conj(zeta(k));
            if (std::abs(t.imag()) > 1e-12 * std::max(rho, 1e-300)) continue;
            const auto& L = lines[k - 1];
            auto it = std::lower_bound(L.begin(), L.end(), t.real() - 1e-13 * std::max(rho, 1.0),
                                       [k](const Sample& s, double v) { return (s.lambda * std::conj(zeta(k))).real() < v; });
            if (it != L.end() && std::abs(it->lambda - lambda) <= 1e-12 * std::max(rho, 1.0)) return &*it;
        }
        return nullptr;
    }

    [[nodiscard]] const Sample& at(cx lambda) const {
        if (auto* s = find(lambda)) return *s;
        std::ostringstream os;
        os << "ScatteringData: no sample at lambda = " << lambda;
        throw DomainError(os.str());
    }

    /// Sampler reading S2, S3, C from the stored nodes.
    [[nodiscard]] direct::ScatSampler sampler() const {
        direct::ScatSampler s;
        const ScatteringData* self = this;
        s.S2 = [self](cx l) { return self->at(l).S2; };
        s.S3 = [self](cx l) { return self->at(l).S3; };
        s.C = [self](cx l) { return self->at(l).C; };
        s.r = r;
        return s;
    }

    /// Tail coefficient on a ray at a node radius beyond the disc.
    [[nodiscard]] cx tail_at(direct::Ray ray, double rho) const {
        for (const auto& t : tail)
            if (t.k == ray.k && t.outgoing == ray.outgoing && std::abs(t.rho - rho) <= 1e-12 * rho) return t.G;
        std::ostringstream os;
        os << "ScatteringData: no tail sample on ray (" << ray.k << ", " << (ray.outgoing ? "out" : "in")
           << ") at rho = " << rho;
        throw DomainError(os.str());
    }

    /// Jump coefficient on the full contour: T and u from the samples inside
    /// the disc, stored samples outside.
    [[nodiscard]] rh::JumpFn jump() const {
        auto s = sampler();
        const ScatteringData* self = this;
        return [self, s](direct::Ray ray, double rho) {
            if (rho < self->a_prime) return direct::jump_from_tu(s, ray, ray.point(rho));
            return self->tail_at(ray, rho);
        };
    }
};

/// Relative residuals of the two scattering relations on all samples:
/// T(l) T(l z2) T(l z3) = -1 and u(l) u*(l) = 1.
struct RelationResiduals {
    double t_product = 0.0, u_unitarity = 0.0;
};

[[nodiscard]] inline RelationResiduals relation_residuals(const ScatteringData& om) {
    auto s = om.sampler();
    RelationResiduals out;
    for (const auto& L : om.lines)
        for (const auto& smp : L) {
            cx l = smp.lambda;
            cx tp = s.T(l) * s.T(l * zeta(2)) * s.T(l * zeta(3));
            out.t_product = std::max(out.t_product, std::abs(tp + 1.0));
            cx uu = s.u(l) * std::conj(s.u(std::conj(l)));
            out.u_unitarity = std::max(out.u_unitarity, std::abs(uu - 1.0));
        }
    return out;
}

struct ExportOptions {
    double a_prime = 0.0;        // 0: use decay_a/3 minus a small margin
    double R = 2e3;              // contour truncation radius
    double tol = 1e-8;           // relation tolerance before export
    bool with_bound_states = true;
};

/// Forward export: samples S2, S3, C on the disc diameters, the jump beyond
/// the disc, attaches E_alpha and r, and validates the T-product and
/// u-unitarity relations.
[[nodiscard]] inline ScatteringData export_scattering(direct::Coupling c, const Potential& q,
                                                      const direct::CFunc& C, ExportOptions opt = {}) {
    double amax = q.decay_a / 3.0;
    double ap = opt.a_prime > 0 ? opt.a_prime : 0.95 * amax;
    if (ap > amax * (1 + 1e-12)) {
        std::ostringstream os;
        os << "export_scattering: a' = " << ap << " exceeds decay_a/3 = " << amax;
        throw ConfigError(os.str());
    }
    ScatteringData om;
    om.a_prime = ap;
    om.r = C.r;
    auto grid = rh::ContourGrid::graded(ap, opt.R);
    om.breaks = grid.breaks;

    std::vector<double> disc;
    for (double rho : grid.rho)
        if (rho < ap) disc.push_back(rho);
    const std::size_t n = disc.size();
    for (int k = 1; k <= 3; ++k) om.lines[k - 1].resize(2 * n);
    parallel_for(6 * n, [&](std::size_t idx) {
        int k = static_cast<int>(idx / (2 * n)) + 1;
        std::size_t i = idx % (2 * n);
        double t = i < n ? -disc[n - 1 - i] : disc[i - n];
        cx l = t * zeta(k);
        auto sc = direct::scattering_coeffs(c, q, C, l);
        om.lines[k - 1][i] = {l, sc.S2, sc.S3, C(l)};
    });

    std::vector<double> outer;
    for (double rho : grid.rho)
        if (rho >= ap) outer.push_back(rho);
    om.tail.resize(6 * outer.size());
    parallel_for(om.tail.size(), [&](std::size_t idx) {
        std::size_t ray = idx / outer.size(), j = idx % outer.size();
        direct::Ray R{static_cast<int>(ray / 2) + 1, ray % 2 == 0};
        om.tail[idx] = {R.k, R.outgoing, outer[j], direct::jump_forward(c, q, R, outer[j])};
    });

    if (opt.with_bound_states) om.Ealpha = direct::bound_states(c, q);
    om.Ealpha_points = om.Ealpha.points();

    auto res = relation_residuals(om);
    if (res.t_product > opt.tol || res.u_unitarity > opt.tol) {
        std::ostringstream os;
        os << "export_scattering: relations fail before export (T product " << res.t_product
           << ", u unitarity " << res.u_unitarity << ")";
        throw ValidationError(os.str());
    }
    return om;
}

} // namespace cubic_scatter
