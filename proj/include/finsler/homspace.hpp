#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "finsler/chart.hpp"
#include "finsler/lie_algebra.hpp"

namespace finsler {

/// A built-in homogeneous Finsler space: chart, origin, invariant metric,
/// the n Killing fields K_1..K_n whose values at the origin form the basis B,
/// the Lie algebra of the acting group, its reductive decomposition, and the
/// isometry action exp(tX) as a jet-evaluable chart diffeomorphism.
///
/// The zoo uses simply transitive actions (trivial isotropy), the origin is
/// the group identity, and the generator convention is the left action, so
/// [K_i, K_j] = -c^k_{ij} K_k and the invariant Minkowski norm on m in
/// B-coordinates is exactly `norm`.
struct HomogeneousSpaceSpec {
    std::string name;
    std::string metric_family;  // "riemannian" | "randers" | "custom"
    int dim = 0;
    FinslerChart chart;
    Vec origin;
    std::vector<VectorField> killing;
    MinkowskiNorm norm;  // invariant norm on m ≅ T_pM in B-coordinates
    LieAlgebraData algebra;
    ReductiveDecomposition split;
    std::function<std::vector<Jet>(const Vec&, double, std::span<const Jet>)> action;
    bool berwald = false;
    bool reversible = false;
};

/// Columns are K_1(p), ..., K_n(p): the basis B of T_pM.
inline Mat killing_frame(const HomogeneousSpaceSpec& spec) {
    Mat B(spec.dim, spec.dim);
    for (int i = 0; i < spec.dim; ++i) B.col(i) = spec.killing[i].value(spec.origin);
    return B;
}

/// The Killing field X* = x_1 K_1 + ... + x_n K_n.
inline VectorField killing_combination(const HomogeneousSpaceSpec& spec,
                                       const Vec& coords) {
    VectorField f;
    f.dim = spec.dim;
    auto fields = spec.killing;
    f.components = [fields, coords](std::span<const Jet> x) {
        std::vector<Jet> acc = fields[0].components(x);
        for (auto& a : acc) a *= coords[0];
        for (size_t i = 1; i < fields.size(); ++i) {
            std::vector<Jet> c = fields[i].components(x);
            for (size_t j = 0; j < acc.size(); ++j) acc[j] += coords[i] * c[j];
        }
        return acc;
    };
    return f;
}

/// exp(tX)(p) in chart coordinates.
inline Vec orbit_curve(const HomogeneousSpaceSpec& spec, const Vec& X, double t) {
    auto pj = detail::constant_jets(detail::as_span(spec.origin), 0, 0);
    std::vector<Jet> out = spec.action(X, t, pj);
    Vec q(spec.dim);
    for (int i = 0; i < spec.dim; ++i) q[i] = out[i].value();
    Vec probe = Vec::Unit(spec.dim, 0);
    if (!spec.chart.in_domain(detail::as_span(q), detail::as_span(probe)))
        throw ChartExitError("orbit_curve: orbit left the chart", t);
    return q;
}

/// The orbit as a Curve, jets in t, for derivative-along-curve queries.
/// Uses the one-parameter group property: position from the action, velocity
/// and acceleration from the Killing field X* evaluated along the orbit.
inline Curve orbit_as_curve(const HomogeneousSpaceSpec& spec, const Vec& X) {
    Curve c;
    const int dim = spec.dim;
    c.dim = dim;
    auto action = spec.action;
    Vec origin = spec.origin;
    VectorField xs = killing_combination(spec, X);
    Vec coords = X;
    c.components = [dim, action, origin, xs, coords](const Jet& t) {
        // γ' = X*(γ) and γ'' = (dX*)(X*): Taylor data at t from the flow
        const int ord = t.order();
        Vec pos(dim);
        {
            auto pj = detail::constant_jets(detail::as_span(origin), 0, 0);
            std::vector<Jet> out = action(coords, t.value(), pj);
            for (int i = 0; i < dim; ++i) pos[i] = out[i].value();
        }
        std::vector<Jet> result;
        result.reserve(dim);
        if (ord == 0) {
            for (int i = 0; i < dim; ++i)
                result.push_back(Jet::constant(pos[i], t.nvars(), 0));
            return result;
        }
        if (ord == 1) {
            Vec vel = xs.value(pos);
            for (int i = 0; i < dim; ++i) {
                Jet j = Jet::constant(pos[i], t.nvars(), 1);
                j += vel[i] * (t - t.value());
                result.push_back(j);
            }
            return result;
        }
        auto [vel, J] = xs.value_and_jacobian(pos);
        Vec acc = J * vel;
        for (int i = 0; i < dim; ++i) {
            Jet dt = t - t.value();
            Jet j = Jet::constant(pos[i], t.nvars(), ord);
            j += vel[i] * dt + 0.5 * acc[i] * (dt * dt);
            result.push_back(j);
        }
        return result;
    };
    return c;
}

/// d(exp(tX))|_p applied to V, via a first-order jet of the action.
inline Vec isometry_pushforward(const HomogeneousSpaceSpec& spec, const Vec& X,
                                double t, const Vec& V) {
    std::vector<Jet> vars = jet_variables(detail::as_span(spec.origin), 1);
    std::vector<Jet> out = spec.action(X, t, vars);
    Vec r = Vec::Zero(spec.dim);
    for (int i = 0; i < spec.dim; ++i)
        for (int k = 0; k < spec.dim; ++k) r[i] += out[i].d(k) * V[k];
    return r;
}

struct InvarianceReport {
    double norm_residual = 0.0;    // max |F(φ_t p, φ_t* V) − F(p, V)|
    double metric_residual = 0.0;  // max |g(φ_t*U, φ_t*V) − g(U, V)| at (γ, X*(γ))
};

/// Sampled check that exp(tX) acts by isometries: F- and g_{X*}-invariance.
inline InvarianceReport isometry_invariance(const HomogeneousSpaceSpec& spec,
                                            const Vec& X, int samples,
                                            double tmax = 2.0, uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> tdist(-tmax, tmax);
    std::normal_distribution<double> gauss(0.0, 1.0);
    InvarianceReport rep;
    VectorField xs = killing_combination(spec, X);
    Vec xs_p = xs.value(spec.origin);
    Mat g0;
    const bool have_direction = xs_p.norm() > 0.0;
    if (have_direction) g0 = chart_metric(spec.chart, spec.origin, xs_p);
    for (int s = 0; s < samples; ++s) {
        const double t = tdist(rng);
        Vec U(spec.dim), V(spec.dim);
        for (int i = 0; i < spec.dim; ++i) {
            U[i] = gauss(rng);
            V[i] = gauss(rng);
        }
        if (V.norm() < 1e-6) continue;
        Vec gamma_t = orbit_curve(spec, X, t);
        Vec phiV = isometry_pushforward(spec, X, t, V);
        Vec phiU = isometry_pushforward(spec, X, t, U);
        rep.norm_residual = std::max(
            rep.norm_residual, std::abs(chart_norm(spec.chart, gamma_t, phiV) -
                                        chart_norm(spec.chart, spec.origin, V)));
        if (have_direction) {
            Vec xs_gamma = xs.value(gamma_t);
            Mat g1 = chart_metric(spec.chart, gamma_t, xs_gamma);
            rep.metric_residual =
                std::max(rep.metric_residual,
                         std::abs(phiU.dot(g1 * phiV) - U.dot(g0 * V)));
        }
    }
    return rep;
}

/// max over sampled x and pairs (i,j) of |[K_i,K_j](x) + c^k_{ij} K_k(x)|;
/// the left-action fundamental fields anti-represent the bracket.
inline double bracket_closure_residual(const HomogeneousSpaceSpec& spec,
                                       int samples = 10, uint64_t seed = 2) {
    ChartSampler sampler(spec.chart, seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vec x = sampler.sample().first;
        for (int i = 0; i < spec.dim; ++i)
            for (int j = i + 1; j < spec.dim; ++j) {
                Vec br = lie_bracket(spec.killing[i], spec.killing[j], x);
                Vec expected = Vec::Zero(spec.dim);
                for (int k = 0; k < spec.dim; ++k) {
                    if (spec.algebra.c(k, i, j) == 0.0) continue;
                    expected -= spec.algebra.c(k, i, j) * spec.killing[k].value(x);
                }
                worst = std::max(worst, (br - expected).cwiseAbs().maxCoeff());
            }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// zoo builders
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Jet> cross_jet(const std::vector<Jet>& a,
                                  const std::vector<Jet>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

}  // namespace detail

/// Flat R^n with an arbitrary Minkowski norm; translations act.
inline HomogeneousSpaceSpec flat_space(MinkowskiNorm norm) {
    const int n = norm.dim();
    HomogeneousSpaceSpec s;
    s.name = "flat" + std::to_string(n);
    s.metric_family = norm.kind() == MinkowskiNorm::Kind::Riemannian ? "riemannian"
                      : norm.kind() == MinkowskiNorm::Kind::Randers  ? "randers"
                                                                     : "custom";
    s.dim = n;
    s.norm = norm;
    s.chart = flat_chart(norm);
    s.origin = Vec::Zero(n);
    for (int i = 0; i < n; ++i)
        s.killing.push_back(constant_field(Vec::Unit(n, i)));
    s.algebra = abelian_algebra(n);
    s.split = reductive_split(s.algebra, Mat(n, 0));
    s.action = [n](const Vec& X, double t, std::span<const Jet> q) {
        std::vector<Jet> out;
        out.reserve(n);
        for (int i = 0; i < n; ++i) out.push_back(q[i] + t * X[i]);
        return out;
    };
    s.berwald = true;  // locally Minkowski
    s.reversible = norm.reversible();
    return s;
}

/// Heisenberg group H3 in polynomial coordinates, left-invariant metric from
/// a Minkowski norm on the algebra; coframe u = (y1, y2, y3 - x1 y2).
inline HomogeneousSpaceSpec heisenberg_space(MinkowskiNorm norm3) {
    if (norm3.dim() != 3)
        throw DomainError("heisenberg_space: norm must be 3-dimensional");
    HomogeneousSpaceSpec s;
    s.name = "heisenberg";
    s.metric_family = norm3.kind() == MinkowskiNorm::Kind::Riemannian ? "riemannian"
                      : norm3.kind() == MinkowskiNorm::Kind::Randers ? "randers"
                                                                     : "custom";
    s.dim = 3;
    s.norm = norm3;
    auto coframe = [](std::span<const Jet> x) {
        const int nv = x[0].nvars();
        const int ord = x[0].order();
        const Jet one = Jet::constant(1.0, nv, ord);
        const Jet zero = Jet::constant(0.0, nv, ord);
        return std::vector<Jet>{one, zero, zero, zero, one, zero, zero, -x[0], one};
    };
    s.chart = chart_from_coframe(3, "heisenberg", coframe, norm3);
    s.origin = Vec::Zero(3);

    // fundamental fields of left translation: K1 = ∂1 + x2 ∂3, K2 = ∂2, K3 = ∂3
    for (int i = 0; i < 3; ++i) {
        VectorField f;
        f.dim = 3;
        f.components = [i](std::span<const Jet> x) {
            const int nv = x[0].nvars();
            const int ord = x[0].order();
            std::vector<Jet> out(3, Jet::constant(0.0, nv, ord));
            out[i] = Jet::constant(1.0, nv, ord);
            if (i == 0) out[2] = x[1];
            return out;
        };
        s.killing.push_back(std::move(f));
    }
    s.algebra = heisenberg_algebra();
    s.split = reductive_split(s.algebra, Mat(3, 0));
    s.action = [](const Vec& X, double t, std::span<const Jet> q) {
        // exp(tX) = (tα, tβ, tγ + t²αβ/2) composed with q in the group law
        const double a = t * X[0], b = t * X[1];
        const double c = t * X[2] + 0.5 * t * t * X[0] * X[1];
        std::vector<Jet> out;
        out.reserve(3);
        out.push_back(q[0] + a);
        out.push_back(q[1] + b);
        out.push_back(q[2] + c + a * q[1]);
        return out;
    };
    s.berwald = (s.metric_family == "riemannian");
    s.reversible = norm3.reversible();
    return s;
}

/// SU(2) ≅ S³ in the stereographic chart from the antipode of the identity,
/// left-invariant metric from a Minkowski norm on su(2) in the basis with
/// [e_i,e_j] = eps_{ijk} e_k (half-quaternions).
inline HomogeneousSpaceSpec su2_space(MinkowskiNorm norm3) {
    if (norm3.dim() != 3)
        throw DomainError("su2_space: norm must be 3-dimensional");
    HomogeneousSpaceSpec s;
    s.name = "su2";
    s.metric_family = norm3.kind() == MinkowskiNorm::Kind::Riemannian ? "riemannian"
                      : norm3.kind() == MinkowskiNorm::Kind::Randers ? "randers"
                                                                     : "custom";
    s.dim = 3;
    s.norm = norm3;

    // F(x,y) = F0(2 * vec(conj(q(x)) * dq(x)[y])) with q the inverse
    // stereographic map; the coframe is the left Maurer-Cartan form in the
    // half-quaternion basis.
    auto n = std::make_shared<MinkowskiNorm>(norm3);
    auto mc_coords = [](std::span<const Jet> x, std::span<const Jet> y) {
        const int nv = x[0].nvars();
        const int ord = x[0].order();
        Jet r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        Jet sden = r2 + 1.0;
        Jet uv = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        Jet s2 = sden * sden;
        Jet dq0 = -4.0 * (uv / s2);
        std::vector<Jet> q(3, Jet::constant(0.0, nv, ord)), dq(3);
        Jet q0 = (1.0 - r2) / sden;
        for (int i = 0; i < 3; ++i) {
            q[i] = 2.0 * (x[i] / sden);
            dq[i] = 2.0 * (y[i] / sden) - 4.0 * (x[i] * (uv / s2));
        }
        // vec(conj(q)·dq) = q0 dq - dq0 q - q x dq
        std::vector<Jet> cr = detail::cross_jet(q, dq);
        std::vector<Jet> m;
        m.reserve(3);
        for (int i = 0; i < 3; ++i)
            m.push_back(2.0 * (q0 * dq[i] - dq0 * q[i] - cr[i]));
        return m;
    };
    FinslerChart c;
    c.dim = 3;
    c.name = "su2";
    c.norm = [n, mc_coords](std::span<const Jet> x, std::span<const Jet> y) {
        std::vector<Jet> m = mc_coords(x, y);
        return n->norm_jet(m);
    };
    c.energy = [n, mc_coords](std::span<const Jet> x, std::span<const Jet> y) {
        std::vector<Jet> m = mc_coords(x, y);
        return n->energy_jet(m);
    };
    c.smooth_domain = [](std::span<const double> x, std::span<const double>) {
        // stereographic chart covers S³ minus one point; cap the coordinate
        // radius well before the antipode
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return r2 < 1e6;
    };
    c.sample_lo = Vec::Constant(3, -0.5);
    c.sample_hi = Vec::Constant(3, 0.5);
    c.declared_reversible = norm3.reversible();
    s.chart = std::move(c);
    s.origin = Vec::Zero(3);

    // K_X(u) = ¼(1−|u|²) x + ½ x×u + ½ (x·u) u for X with coordinates x
    for (int i = 0; i < 3; ++i) {
        VectorField f;
        f.dim = 3;
        f.components = [i](std::span<const Jet> u) {
            const int nv = u[0].nvars();
            const int ord = u[0].order();
            Jet r2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
            std::vector<Jet> e(3, Jet::constant(0.0, nv, ord));
            e[i] = Jet::constant(1.0, nv, ord);
            std::vector<Jet> cr = detail::cross_jet(e, {u.begin(), u.end()});
            std::vector<Jet> out;
            out.reserve(3);
            for (int j = 0; j < 3; ++j) {
                Jet v = 0.25 * ((1.0 - r2) * e[j]) + 0.5 * cr[j] + 0.5 * (u[i] * u[j]);
                out.push_back(std::move(v));
            }
            return out;
        };
        s.killing.push_back(std::move(f));
    }
    s.algebra = su2_algebra();
    s.split = reductive_split(s.algebra, Mat(3, 0));
    s.action = [](const Vec& X, double t, std::span<const Jet> q) {
        const int nv = q[0].nvars();
        const int ord = q[0].order();
        // exp(tX) as a unit quaternion; X has coords x in the half basis,
        // the corresponding pure quaternion is x/2
        const double half = 0.5 * t * X.norm();
        double a0 = std::cos(half);
        Vec av = Vec::Zero(3);
        if (X.norm() > 0.0) av = std::sin(half) * X.normalized();
        // unchart q
        Jet r2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
        Jet sden = r2 + 1.0;
        Jet q0 = (1.0 - r2) / sden;
        std::vector<Jet> qv;
        qv.reserve(3);
        for (int i = 0; i < 3; ++i) qv.push_back(2.0 * (q[i] / sden));
        // quaternion product (a0, av)(q0, qv)
        Jet r0 = a0 * q0 - (av[0] * qv[0] + av[1] * qv[1] + av[2] * qv[2]);
        std::vector<Jet> avj;
        avj.reserve(3);
        for (int i = 0; i < 3; ++i) avj.push_back(Jet::constant(av[i], nv, ord));
        std::vector<Jet> cr = detail::cross_jet(avj, qv);
        std::vector<Jet> rv;
        rv.reserve(3);
        for (int i = 0; i < 3; ++i) rv.push_back(a0 * qv[i] + q0 * avj[i] + cr[i]);
        // back to the chart: u = rv / (1 + r0)
        Jet den = r0 + 1.0;
        if (std::abs(den.value()) < 1e-12)
            throw ChartExitError("su2 action reached the chart antipode", t);
        std::vector<Jet> out;
        out.reserve(3);
        for (int i = 0; i < 3; ++i) out.push_back(rv[i] / den);
        return out;
    };
    s.berwald = (s.metric_family == "riemannian");
    s.reversible = norm3.reversible();
    return s;
}

/// Hyperbolic half-plane {x2 > 0} under the affine group z -> az + b, with
/// the invariant metric F = F0(y)/x2. F0 Euclidean gives curvature -1.
inline HomogeneousSpaceSpec half_plane_space(MinkowskiNorm norm2) {
    if (norm2.dim() != 2)
        throw DomainError("half_plane_space: norm must be 2-dimensional");
    HomogeneousSpaceSpec s;
    s.name = "hyperbolic";
    s.metric_family = norm2.kind() == MinkowskiNorm::Kind::Riemannian ? "riemannian"
                      : norm2.kind() == MinkowskiNorm::Kind::Randers ? "randers"
                                                                     : "custom";
    s.dim = 2;
    s.norm = norm2;
    auto coframe = [](std::span<const Jet> x) {
        const Jet inv = 1.0 / x[1];
        const Jet zero = Jet::constant(0.0, x[0].nvars(), x[0].order());
        return std::vector<Jet>{inv, zero, zero, inv};
    };
    s.chart = chart_from_coframe(
        2, "hyperbolic", coframe, norm2,
        [](std::span<const double> x) { return x[1] > 0.0; });
    s.chart.sample_lo << -1.0, 0.5;
    s.chart.sample_hi << 1.0, 2.0;
    s.origin = (Vec(2) << 0.0, 1.0).finished();

    // K1 = ∂1 (translation), K2 = x1 ∂1 + x2 ∂2 (dilation)
    {
        VectorField f;
        f.dim = 2;
        f.components = [](std::span<const Jet> x) {
            const int nv = x[0].nvars();
            const int ord = x[0].order();
            return std::vector<Jet>{Jet::constant(1.0, nv, ord),
                                    Jet::constant(0.0, nv, ord)};
        };
        s.killing.push_back(std::move(f));
    }
    {
        VectorField f;
        f.dim = 2;
        f.components = [](std::span<const Jet> x) {
            return std::vector<Jet>{x[0], x[1]};
        };
        s.killing.push_back(std::move(f));
    }
    s.algebra = affine_line_algebra();
    s.split = reductive_split(s.algebra, Mat(2, 0));
    s.action = [](const Vec& X, double t, std::span<const Jet> q) {
        const double alpha = X[0], beta = X[1];
        const double a = std::exp(beta * t);
        const double b = (beta == 0.0) ? alpha * t : alpha * std::expm1(beta * t) / beta;
        std::vector<Jet> out;
        out.reserve(2);
        out.push_back(a * q[0] + b);
        out.push_back(a * q[1]);
        return out;
    };
    s.berwald = (s.metric_family == "riemannian");
    s.reversible = norm2.reversible();
    return s;
}

}  // namespace finsler
