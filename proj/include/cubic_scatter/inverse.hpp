#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "direct.hpp"
#include "potential.hpp"
#include "rhsolver.hpp"
#include "scattering_data.hpp"
#include "transforms.hpp"

namespace cubic_scatter::inverse {

// -- boundary values from the scattering data -------------------------------------

enum class ModifyPolicy {
    automatic, // modify only when the unmodified problem has nonzero index
    always,    // modify whenever E_alpha has nonzero points
    never
};

/// Sectional solution of the boundary value problem built from Omega, with
/// readers for the boundary values that the later steps need.
struct BoundaryValues {
    std::shared_ptr<const ScatteringData> omega;
    std::shared_ptr<rh::RHProblem> problem;
    bool modified = false;

    /// psi_1(l, 0) at an off-contour point of S2, or at 0 (limit from S2).
    [[nodiscard]] cx psi1(cx l) const {
        if (l == 0.0) return problem->at_origin(2);
        if (raygeom::sector_of(l, 1e-13) != 2) throw DomainError("BoundaryValues::psi1: point not inside S2");
        return problem->solve(l);
    }

    /// Sectional value at any off-contour point.
    [[nodiscard]] cx sectional(cx z) const { return problem->solve(z); }

    /// Real disc nodes t on L_{zeta_1} (ascending) and psi_1(t, 0) there. On the
    /// real line psi_1 is not a sectional value; it follows from the upper
    /// boundary value and the jump relations psi2* = u(l z2) psi1 (t > 0) and
    /// psi3* = -z2 T(l z2) u(l z2) psi1 (t < 0).
    struct RealTrace {
        std::vector<double> t;
        std::vector<cx> psi1, M;
    };

    [[nodiscard]] RealTrace real_trace() const {
        RealTrace out;
        auto s = omega->sampler();
        const auto& h = problem->logG[0];
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < h.v.size(); ++i)
            if (std::abs(h.t(i)) < omega->a_prime) idx.push_back(i);
        out.t.resize(idx.size());
        out.psi1.resize(idx.size());
        out.M.resize(idx.size());
        parallel_for(idx.size(), [&](std::size_t j) {
            std::size_t i = idx[j];
            double t = h.t(i);
            cx l = t;
            cx upper = problem->boundary(1, i).first;
            auto tu2 = s.tu(l * zeta(2));
            cx p1 = t > 0 ? upper / tu2.u : upper / (-zeta(2) * tu2.T * tu2.u);
            out.t[j] = t;
            out.psi1[j] = p1;
            out.M[j] = p1 * (1.0 + zeta(3) * tu2.u * (1.0 - tu2.T));
        });
        return out;
    }
};

[[nodiscard]] inline BoundaryValues recover_boundary(const ScatteringData& om,
                                                     ModifyPolicy policy = ModifyPolicy::automatic,
                                                     std::optional<rh::ThetaFrame> frame = std::nullopt) {
    BoundaryValues bv;
    bv.omega = std::make_shared<ScatteringData>(om);
    auto grid = bv.omega->grid();
    auto jump = bv.omega->jump();
    auto fr = frame ? *frame : rh::ThetaFrame::standard(om.a_prime);
    bool has_points = !om.Ealpha.trivial();
    auto modified = [&] {
        bv.modified = true;
        return std::make_shared<rh::RHProblem>(grid, jump, rh::rational_modify(bv.omega->Ealpha, fr));
    };
    if (policy == ModifyPolicy::always && has_points) {
        bv.problem = modified();
        return bv;
    }
    try {
        bv.problem = std::make_shared<rh::RHProblem>(grid, jump);
    } catch (const IndexNonZero&) {
        if (policy == ModifyPolicy::never || !has_points) throw;
        bv.problem = modified();
    }
    return bv;
}

// -- alpha and N --------------------------------------------------------------

struct AlphaN {
    double alpha = 0.0;
    cx psi1_0{}, M0{};
    std::vector<double> lambda; // real disc nodes
    std::vector<double> N;      // N(lambda) = -3 l^2 M / (alpha i), real part
    double N_imag = 0.0;        // max |Im N|, a consistency residual
    double N_even = 0.0;        // max |N(l) - N(-l)|
};

/// alpha = i M(0) with M(0) = psi1(0) - conj(psi1(0)), valid for |int x q| = 1.
[[nodiscard]] inline AlphaN recover_alpha_N(const BoundaryValues& bv, double tol = 1e-10) {
    AlphaN out;
    out.psi1_0 = bv.psi1(0.0);
    out.M0 = out.psi1_0 - std::conj(out.psi1_0);
    if (std::abs(out.M0) < tol)
        throw DegenerateM("recover_alpha_N: M(0) vanishes (alpha = 0 or q not normalized)");
    out.alpha = (I * out.M0).real();
    auto tr = bv.real_trace();
    out.lambda = tr.t;
    out.N.resize(tr.t.size());
    for (std::size_t j = 0; j < tr.t.size(); ++j) {
        cx Nj = -3.0 * tr.t[j] * tr.t[j] * tr.M[j] / (out.alpha * I);
        out.N[j] = Nj.real();
        out.N_imag = std::max(out.N_imag, std::abs(Nj.imag()));
    }
    std::size_t n = out.N.size();
    for (std::size_t j = 0; j < n / 2; ++j) out.N_even = std::max(out.N_even, std::abs(out.N[j] - out.N[n - 1 - j]));
    return out;
}

// -- Q and its continuation ------------------------------------------------------

enum class PhaseRule {
    asymptote, // Q real and odd, sign from Q ~ sqrt3 l int x q > 0 as l -> 0+
    imaginary  // Q = i sqrt(N) on l > 0, extended oddly
};

struct QProfile {
    std::vector<double> lambda;
    std::vector<double> N;
    std::vector<cx> Q;
    PhaseRule rule = PhaseRule::asymptote;
};

[[nodiscard]] inline QProfile reconstruct_Q(const std::vector<double>& lambda, const std::vector<double>& N,
                                            PhaseRule rule = PhaseRule::asymptote, double tol = 1e-8) {
    if (lambda.size() != N.size()) throw DomainError("reconstruct_Q: size mismatch");
    QProfile p{lambda, N, std::vector<cx>(N.size()), rule};
    cx phase = rule == PhaseRule::asymptote ? cx{1.0} : I;
    for (std::size_t j = 0; j < N.size(); ++j) {
        if (N[j] < -tol) {
            std::ostringstream os;
            os << "reconstruct_Q: N(" << lambda[j] << ") = " << N[j] << " is negative";
            throw NegativeN(os.str());
        }
        double m = std::sqrt(std::max(N[j], 0.0));
        p.Q[j] = (lambda[j] >= 0 ? 1.0 : -1.0) * m * phase;
    }
    return p;
}

/// F samples on a y-grid plus the continuation model valid beyond it (if any).
struct FTrace {
    std::vector<double> y, F;
    double trusted_upto = 0.0;        // y beyond this is extrapolation
    double fit_residual = 0.0;        // relative least-squares residual of the fit
    double imag_residual = 0.0;       // max |Im F| from the continuation
    std::function<double(double)> model;

    [[nodiscard]] double operator()(double yy) const {
        if (model) return model(yy);
        if (y.empty()) return 0.0;
        if (yy <= y.front()) return F.front() * yy / y.front();
        if (yy >= y.back()) return 0.0;
        auto it = std::lower_bound(y.begin(), y.end(), yy);
        std::size_t i = static_cast<std::size_t>(it - y.begin());
        double w = (yy - y[i - 1]) / (y[i] - y[i - 1]);
        return (1 - w) * F[i - 1] + w * F[i];
    }
};

namespace detail {

/// Complex least squares by modified Gram-Schmidt (applied twice).
[[nodiscard]] inline std::vector<cx> least_squares(std::vector<std::vector<cx>> A, std::vector<cx> b,
                                                   double* rel_residual = nullptr) {
    const std::size_t m = b.size(), n = A.size(); // A stored by columns
    std::vector<std::vector<cx>> R(n, std::vector<cx>(n));
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t i = 0; i < j; ++i) {
                cx d{};
                for (std::size_t r = 0; r < m; ++r) d += std::conj(A[i][r]) * A[j][r];
                R[i][j] += d;
                for (std::size_t r = 0; r < m; ++r) A[j][r] -= d * A[i][r];
            }
        double nr = 0;
        for (std::size_t r = 0; r < m; ++r) nr += std::norm(A[j][r]);
        nr = std::sqrt(nr);
        if (nr == 0.0) throw SingularSystem("least_squares: rank deficient basis");
        R[j][j] = nr;
        for (std::size_t r = 0; r < m; ++r) A[j][r] /= nr;
    }
    std::vector<cx> qb(n);
    std::vector<cx> res = b;
    for (std::size_t i = 0; i < n; ++i) {
        cx d{};
        for (std::size_t r = 0; r < m; ++r) d += std::conj(A[i][r]) * res[r];
        qb[i] = d;
        for (std::size_t r = 0; r < m; ++r) res[r] -= d * A[i][r];
    }
    std::vector<cx> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cx acc = qb[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= R[i][j] * x[j];
        x[i] = acc / R[i][i];
    }
    if (rel_residual) {
        double rn = 0, bn = 0;
        for (std::size_t r = 0; r < m; ++r) {
            rn += std::norm(res[r]);
            bn += std::norm(b[r]);
        }
        *rel_residual = bn > 0 ? std::sqrt(rn / bn) : 0.0;
    }
    return x;
}

} // namespace detail

struct ContinuationOptions {
    int degree = 9;
    bool odd_only = true; // fit only odd powers (the modelled symmetry of Q)
    double tol = 1e-8;
};

/// Fits Q on the real diameter by a polynomial in l/rho and evaluates
/// F(mu/2) = Q(i mu)/(2i) on the requested mu grid.
[[nodiscard]] inline FTrace continue_to_imaginary(const QProfile& qp, const std::vector<double>& mu,
                                                  ContinuationOptions opt = {}) {
    FTrace tr;
    if (qp.lambda.empty()) throw ContinuationUnstable("continue_to_imaginary: no samples");
    bool zero = std::all_of(qp.Q.begin(), qp.Q.end(), [](cx v) { return v == 0.0; });
    double rho = 0;
    for (double l : qp.lambda) rho = std::max(rho, std::abs(l));
    std::vector<int> powers;
    for (int p = 0; p <= opt.degree; ++p)
        if (!opt.odd_only || p % 2 == 1) powers.push_back(p);
    std::vector<cx> coef(powers.size());
    if (!zero) {
        std::vector<std::vector<cx>> A(powers.size(), std::vector<cx>(qp.lambda.size()));
        for (std::size_t c = 0; c < powers.size(); ++c)
            for (std::size_t r = 0; r < qp.lambda.size(); ++r) A[c][r] = std::pow(qp.lambda[r] / rho, powers[c]);
        coef = detail::least_squares(A, qp.Q, &tr.fit_residual);
        if (tr.fit_residual > opt.tol) {
            std::ostringstream os;
            os << "continue_to_imaginary: fit residual " << tr.fit_residual << " exceeds " << opt.tol;
            throw ContinuationUnstable(os.str());
        }
    }
    auto Qat = [powers, coef, rho](cx l) {
        cx s{};
        for (std::size_t c = 0; c < powers.size(); ++c) s += coef[c] * std::pow(l / rho, powers[c]);
        return s;
    };
    for (double m : mu) {
        cx Fv = Qat(I * m) / (2.0 * I);
        tr.y.push_back(0.5 * m);
        tr.F.push_back(Fv.real());
        tr.imag_residual = std::max(tr.imag_residual, std::abs(Fv.imag()));
    }
    tr.trusted_upto = 0.5 * rho;
    tr.model = [Qat](double y) { return (Qat(I * 2.0 * y) / (2.0 * I)).real(); };
    return tr;
}

// -- q from F --------------------------------------------------------------------

struct QFromFOptions {
    transforms::WeeksOptions weeks{};
    double x_max = 5.0;
    int samples = 101;
    double leak_tol = 1e-6;  // Weeks imaginary leakage gate
    double tail_tol = 1e-4;  // Weeks truncation gate relative to max |a_n|
};

struct QFromFResult {
    std::vector<double> x, q;
    transforms::WeeksExpansion expansion;
    std::map<std::string, double> stage_residuals;

    [[nodiscard]] double operator()(double t) const { return expansion(t); }
};

/// F -> Laplace transform in the wedge -> Weeks inversion -> q.
/// Stage 1 is the odd extension of F across the wedge bisector, stage 2 the
/// half-plane Schwarz integral after z -> z^{3/2}, stage 4 the inverse Laplace
/// transform; stage 5 samples q on [0, x_max].
[[nodiscard]] inline QFromFResult q_from_F(const std::function<double(double)>& F, QFromFOptions opt = {}) {
    QFromFResult out;
    auto Fo = transforms::odd_extension(F);
    auto Fpos = [Fo](double y) { return Fo(y); };
    auto nodes = transforms::weeks_nodes(opt.weeks);
    std::vector<cx> L(nodes.size());
    try {
        parallel_for(nodes.size(), [&](std::size_t i) { L[i] = transforms::laplace_from_F(Fpos, nodes[i]); });
    } catch (const std::exception& e) {
        throw StageError("WedgeSolveFail", e.what());
    }
    for (cx v : L)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw StageError("WedgeSolveFail", "non-finite transform value");
    out.expansion = transforms::weeks_from_values(L, opt.weeks);
    double amax = 0;
    for (double a : out.expansion.a) amax = std::max(amax, std::abs(a));
    out.stage_residuals["weeks_imag_leak"] = out.expansion.imag_leak;
    out.stage_residuals["weeks_tail"] = amax > 0 ? out.expansion.tail / amax : 0.0;
    out.stage_residuals["weeks_dropped"] = out.expansion.dropped;
    if (out.expansion.imag_leak > opt.leak_tol * std::max(amax, 1e-300) && amax > 0)
        throw StageError("LaplaceInversionUnstable", "imaginary leakage in the Laguerre coefficients");
    if (amax > 0 && out.expansion.tail > opt.tail_tol * amax)
        throw StageError("LaplaceInversionUnstable", "Laguerre coefficients do not decay");
    for (int i = 0; i < opt.samples; ++i) {
        double t = opt.x_max * i / (opt.samples - 1);
        out.x.push_back(t);
        out.q.push_back(out.expansion(t));
    }
    // The recovered q must be square integrable: the Laguerre energy is sum a_n^2 / (2b).
    double energy = 0;
    for (double a : out.expansion.a) energy += a * a;
    if (!std::isfinite(energy)) throw StageError("NegativeTailEnergy", "non-finite energy");
    out.stage_residuals["l2_norm2"] = energy / (2.0 * out.expansion.b);
    return out;
}

/// Exact F(y) for a potential: closed form for the exponential family,
/// quadrature otherwise.
[[nodiscard]] inline std::function<double(double)> oracle_F(const Potential& q) {
    if (q.family) {
        ExpFamily f = *q.family;
        double fact = std::tgamma(f.n + 1.0);
        return [f, fact](double y) {
            cx w = 2.0 * y * std::polar(1.0, -pi / 3);
            return (f.c * fact / std::pow(w + f.beta, f.n + 1)).imag();
        };
    }
    auto fn = q.q;
    double a = q.decay_a;
    return [fn, a](double y) { return transforms::hybrid_transform(fn, y, a); };
}

// -- scattering data validation ------------------------------------------------------

struct Check {
    std::string name;
    bool passed = true;
    double residual = 0.0, tol = 0.0;
    std::string where;
};

struct OmegaReport {
    std::vector<Check> checks;
    [[nodiscard]] bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
    [[nodiscard]] const Check* find(const std::string& n) const {
        for (const auto& c : checks)
            if (c.name == n) return &c;
        return nullptr;
    }
};

struct ValidateOptions {
    double holo_tol = 1e-7;
    int laurent_degree = 29;
    double rotation_tol = 1e-10;
    double relation_tol = 1e-8;
    double set_tol = 1e-10;
};

namespace detail {

/// Relative residual of fitting f on all samples by sum_{n=-1}^{d} c_n l^n
/// divided by the polynomial vanishing on the nonzero bound states (their
/// poles are allowed).
[[nodiscard]] inline double laurent_residual(const ScatteringData& om, const std::function<cx(const ScatteringData::Sample&)>& f,
                                             int degree, std::string* where) {
    std::vector<cx> pts, vals;
    for (const auto& L : om.lines)
        for (const auto& s : L) {
            cx w = f(s);
            for (cx e : om.Ealpha_points)
                if (e != 0.0) w *= (s.lambda - e) / om.a_prime;
            pts.push_back(s.lambda / om.a_prime);
            vals.push_back(w);
        }
    std::vector<std::vector<cx>> A;
    for (int n = -1; n <= degree; ++n) {
        std::vector<cx> col(pts.size());
        for (std::size_t r = 0; r < pts.size(); ++r) col[r] = std::pow(pts[r], n);
        A.push_back(std::move(col));
    }
    auto c = least_squares(A, vals);
    double worst = 0, scale = 0;
    std::size_t wi = 0;
    for (std::size_t r = 0; r < pts.size(); ++r) {
        cx model{};
        for (std::size_t k = 0; k < c.size(); ++k) model += c[k] * A[k][r];
        double e = std::abs(model - vals[r]);
        scale = std::max(scale, std::abs(vals[r]) * std::abs(pts[r]));
        if (e * std::abs(pts[r]) > worst) {
            worst = e * std::abs(pts[r]);
            wi = r;
        }
    }
    if (where) {
        std::ostringstream os;
        os << "lambda = " << pts[wi] * om.a_prime;
        *where = os.str();
    }
    return scale > 0 ? worst / scale : 0.0;
}

} // namespace detail

/// Checks (i) holomorphy of S2, S3, C on the disc (meromorphic with poles only
/// at E_alpha and 0), (ii) the rotation law of C and the T-product and
/// u-unitarity relations, (iii) the structure of E_alpha.
[[nodiscard]] inline OmegaReport validate_omega(const ScatteringData& om, ValidateOptions opt = {}) {
    OmegaReport rep;
    auto add = [&](std::string name, double res, double tol, std::string where = {}) {
        rep.checks.push_back({std::move(name), res <= tol && std::isfinite(res), res, tol, std::move(where)});
    };
    bool shape_ok = om.a_prime > 0 && !om.breaks.empty();
    for (const auto& L : om.lines) shape_ok = shape_ok && L.size() == om.lines[0].size() && !L.empty();
    if (!shape_ok) {
        rep.checks.push_back({"structure", false, 1.0, 0.0, "empty or inconsistent sample grids"});
        return rep;
    }

    // (i) holomorphy
    std::string w;
    double h2 = detail::laurent_residual(om, [](const auto& s) { return s.S2; }, opt.laurent_degree, &w);
    add("holomorphy.S2", h2, opt.holo_tol, w);
    double h3 = detail::laurent_residual(om, [](const auto& s) { return s.S3; }, opt.laurent_degree, &w);
    add("holomorphy.S3", h3, opt.holo_tol, w);
    double hc = detail::laurent_residual(om, [](const auto& s) { return s.C; }, opt.laurent_degree, &w);
    add("holomorphy.C", hc, opt.holo_tol, w);

    // (ii) rotation law, T product, u unitarity
    double rot = 0;
    std::string rw;
    cx zr = zeta2_pow(om.r);
    for (const auto& L : om.lines)
        for (const auto& s : L) {
            const auto* o = om.find(s.lambda * zeta(2));
            if (!o) {
                rot = std::numeric_limits<double>::infinity();
                rw = "rotated sample missing";
                break;
            }
            double e = std::abs(o->C - zr * s.C) / std::max(std::abs(s.C), 1e-300);
            if (e > rot) {
                rot = e;
                std::ostringstream os;
                os << "lambda = " << s.lambda;
                rw = os.str();
            }
        }
    add("rotation_law", rot, opt.rotation_tol, rw);
    RelationResiduals rr;
    try {
        rr = relation_residuals(om);
    } catch (const std::exception& e) {
        rr.t_product = rr.u_unitarity = std::numeric_limits<double>::infinity();
    }
    add("T_product", rr.t_product, opt.relation_tol);
    add("u_unitarity", rr.u_unitarity, opt.relation_tol);

    // (iii) E_alpha: generated by zk > 0, ws < 0 in the disc, contains 0, and
    // the explicit list equals the generated set (so it is z2- and conj-invariant).
    double es = 0;
    std::string ew;
    for (double z : om.Ealpha.zk)
        if (!(z > 0 && z < om.a_prime)) { es = 1; ew = "zk outside (0, a')"; }
    for (double z : om.Ealpha.ws)
        if (!(z < 0 && z > -om.a_prime)) { es = 1; ew = "ws outside (-a', 0)"; }
    auto gen = om.Ealpha.points();
    auto contains = [&](const std::vector<cx>& v, cx p) {
        return std::any_of(v.begin(), v.end(), [&](cx q) { return std::abs(q - p) <= opt.set_tol * std::max(1.0, std::abs(p)); });
    };
    if (!contains(om.Ealpha_points, 0.0)) { es = 1; ew = "0 missing"; }
    for (cx p : om.Ealpha_points) {
        if (!contains(om.Ealpha_points, p * zeta(2))) { es = 1; ew = "not invariant under rotation by zeta2"; }
        if (!contains(om.Ealpha_points, std::conj(p))) { es = 1; ew = "not invariant under conjugation"; }
        if (!contains(gen, p)) { es = 1; ew = "point not generated by zk/ws"; }
    }
    for (cx p : gen)
        if (!contains(om.Ealpha_points, p)) { es = 1; ew = "generated point missing from list"; }
    add("Ealpha_structure", es, 0.0, ew);
    return rep;
}

// -- full pipeline --------------------------------------------------------------------

struct PipelineResult {
    BoundaryValues bv;
    AlphaN an;
    std::optional<QProfile> Q;
    std::optional<FTrace> F;
    std::optional<QFromFResult> q;
    std::map<std::string, double> residuals;
    std::vector<std::string> warnings;
};

struct PipelineOptions {
    ModifyPolicy policy = ModifyPolicy::automatic;
    PhaseRule phase = PhaseRule::asymptote;
    ContinuationOptions continuation{};
    QFromFOptions qopt{};
    std::function<double(double)> oracle_F; // when set, stages 4-5 use it
    bool recover_q = true;
};

/// Steps after alpha and N: Q, F on the imaginary axis (or the oracle F), q.
/// Fills out.Q, out.F, out.q and their residuals; stage failures propagate.
inline void recover_q_stage(const ScatteringData& om, const PipelineOptions& opt, PipelineResult& out) {
    if (opt.oracle_F) {
        out.q = q_from_F(opt.oracle_F, opt.qopt);
    } else {
        out.Q = reconstruct_Q(out.an.lambda, out.an.N, opt.phase);
        std::vector<double> mu;
        double rho = om.a_prime;
        for (int i = 1; i <= 64; ++i) mu.push_back(rho * i / 64.0);
        out.F = continue_to_imaginary(*out.Q, mu, opt.continuation);
        out.residuals["continuation_fit"] = out.F->fit_residual;
        out.residuals["continuation_imag"] = out.F->imag_residual;
        out.warnings.push_back("F beyond y = " + std::to_string(out.F->trusted_upto) + " is extrapolated");
        FTrace ft = *out.F;
        out.q = q_from_F([ft](double y) { return ft(y); }, opt.qopt);
    }
    for (const auto& [k, v] : out.q->stage_residuals) out.residuals[k] = v;
}

/// Validation, boundary values, alpha and N; q as well when opt.recover_q.
[[nodiscard]] inline PipelineResult run_pipeline(const ScatteringData& om, PipelineOptions opt = {}) {
    auto rep = validate_omega(om);
    if (!rep.passed()) {
        std::ostringstream os;
        os << "scattering data fail validation:";
        for (const auto& c : rep.checks)
            if (!c.passed) os << " " << c.name << " (" << c.residual << ")";
        throw ValidationError(os.str());
    }
    PipelineResult out{recover_boundary(om, opt.policy), {}, {}, {}, {}, {}, {}};
    out.an = recover_alpha_N(out.bv);
    out.residuals["N_imag"] = out.an.N_imag;
    out.residuals["N_even"] = out.an.N_even;
    if (opt.recover_q) recover_q_stage(om, opt, out);
    return out;
}

} // namespace cubic_scatter::inverse
