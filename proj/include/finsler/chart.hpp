#pragma once

#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finsler/core.hpp"
#include "finsler/jet.hpp"
#include "finsler/minkowski.hpp"

namespace finsler {

using JetChartFn =
    std::function<Jet(std::span<const Jet> x, std::span<const Jet> y)>;

/// A Finsler metric F(x,y) on a single coordinate chart, evaluable on jets in
/// the concatenated (x,y) variable block. `energy` is ½F², the function all
/// tensors differentiate; it defaults to ½·F·F but chart builders supply a
/// polynomial form where one exists (Riemannian families), which keeps the
/// flat and Riemannian tensor identities exact.
struct FinslerChart {
    int dim = 0;
    std::string name;
    JetChartFn norm;    // F(x,y)
    JetChartFn energy;  // ½F²(x,y)
    std::function<bool(std::span<const double>, std::span<const double>)>
        smooth_domain;
    Vec sample_lo, sample_hi;  // x-box used by sampled checks
    bool declared_reversible = false;
    bool declared_berwald = false;

    bool in_domain(std::span<const double> x, std::span<const double> y) const {
        double n2 = 0.0;
        for (double v : y) n2 += v * v;
        if (n2 == 0.0) return false;
        return smooth_domain ? smooth_domain(x, y) : true;
    }
};

namespace detail {

inline std::vector<Jet> constant_jets(std::span<const double> v, int nvars,
                                      int order) {
    std::vector<Jet> out;
    out.reserve(v.size());
    for (double c : v) out.push_back(Jet::constant(c, nvars, order));
    return out;
}

inline std::span<const double> as_span(const Vec& v) {
    return {v.data(), static_cast<size_t>(v.size())};
}

inline void require_chart_domain(const FinslerChart& chart, const Vec& x,
                                 const Vec& y, const char* op) {
    if (x.size() != chart.dim || y.size() != chart.dim)
        throw DomainError(std::string(op) + ": dimension mismatch");
    if (y.norm() == 0.0)
        throw DomainError(std::string(op) + ": y = 0 (F is not smooth at 0)");
    if (!chart.in_domain(as_span(x), as_span(y)))
        throw DomainError(std::string(op) + ": (x,y) outside the chart's smooth domain");
}

}  // namespace detail

inline double chart_norm(const FinslerChart& chart, const Vec& x, const Vec& y) {
    detail::require_chart_domain(chart, x, y, "chart_norm");
    auto xj = detail::constant_jets(detail::as_span(x), 0, 0);
    auto yj = detail::constant_jets(detail::as_span(y), 0, 0);
    return chart.norm(xj, yj).value();
}

/// Fundamental tensor g_ij(x,y): y-Hessian of ½F² at fixed x.
inline Mat chart_metric(const FinslerChart& chart, const Vec& x, const Vec& y) {
    detail::require_chart_domain(chart, x, y, "chart_metric");
    const int n = chart.dim;
    auto xj = detail::constant_jets(detail::as_span(x), n, 2);
    Jet e = jet_lift(
        [&](std::span<const Jet> yj) { return chart.energy(xj, yj); },
        detail::as_span(y), 2);
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = e.d(i, j);
    return g;
}

/// Cartan tensor C_ijk(x,y) at fixed x.
inline Tensor3 chart_cartan(const FinslerChart& chart, const Vec& x, const Vec& y) {
    detail::require_chart_domain(chart, x, y, "chart_cartan");
    const int n = chart.dim;
    auto xj = detail::constant_jets(detail::as_span(x), n, 3);
    Jet e = jet_lift(
        [&](std::span<const Jet> yj) { return chart.energy(xj, yj); },
        detail::as_span(y), 3);
    Tensor3 c(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) c(i, j, k) = 0.5 * e.d(i, j, k);
    return c;
}

/// Flat chart: F(x,y) = F0(y) for a Minkowski norm F0, any dimension.
inline FinslerChart flat_chart(MinkowskiNorm norm) {
    FinslerChart c;
    c.dim = norm.dim();
    c.name = "flat-" + std::to_string(norm.dim());
    c.declared_reversible = norm.reversible();
    c.declared_berwald = true;  // locally Minkowski: Chern coefficients vanish
    auto n = std::make_shared<MinkowskiNorm>(std::move(norm));
    c.norm = [n](std::span<const Jet>, std::span<const Jet> y) {
        return n->norm_jet(y);
    };
    c.energy = [n](std::span<const Jet>, std::span<const Jet> y) {
        return n->energy_jet(y);
    };
    c.smooth_domain = [n](std::span<const double>, std::span<const double> y) {
        return n->smooth_at(y);
    };
    c.sample_lo = Vec::Constant(c.dim, -1.0);
    c.sample_hi = Vec::Constant(c.dim, 1.0);
    return c;
}

/// Chart built from an x-dependent coframe: F(x,y) = F0(w(x)·y), where w(x)
/// is an invertible matrix of jet-evaluable entries (row-major). This is how
/// the invariant metrics of the homogeneous zoo are realized.
inline FinslerChart chart_from_coframe(
    int dim, std::string name,
    std::function<std::vector<Jet>(std::span<const Jet>)> coframe,
    MinkowskiNorm norm,
    std::function<bool(std::span<const double>)> x_domain = {}) {
    FinslerChart c;
    c.dim = dim;
    c.name = std::move(name);
    c.declared_reversible = norm.reversible();
    auto n = std::make_shared<MinkowskiNorm>(std::move(norm));
    auto apply = [dim, coframe](std::span<const Jet> x, std::span<const Jet> y) {
        std::vector<Jet> w = coframe(x);
        std::vector<Jet> u;
        u.reserve(dim);
        for (int i = 0; i < dim; ++i) {
            Jet s = w[static_cast<size_t>(i) * dim] * y[0];
            for (int j = 1; j < dim; ++j) s += w[static_cast<size_t>(i) * dim + j] * y[j];
            u.push_back(std::move(s));
        }
        return u;
    };
    c.norm = [n, apply](std::span<const Jet> x, std::span<const Jet> y) {
        std::vector<Jet> u = apply(x, y);
        return n->norm_jet(u);
    };
    c.energy = [n, apply](std::span<const Jet> x, std::span<const Jet> y) {
        std::vector<Jet> u = apply(x, y);
        return n->energy_jet(u);
    };
    c.smooth_domain = [n, x_domain](std::span<const double> x,
                                    std::span<const double> y) {
        if (x_domain && !x_domain(x)) return false;
        return true;  // coframe invertible on the domain: u = 0 iff y = 0
    };
    c.sample_lo = Vec::Constant(dim, -1.0);
    c.sample_hi = Vec::Constant(dim, 1.0);
    return c;
}

/// Connection data of the chart at one point (x,y) of the slit tangent bundle:
/// the fundamental and Cartan tensors, the formal Christoffel symbols
///   γ^i_jk = ½ g^{is} (∂g_sj/∂x^k − ∂g_jk/∂x^s + ∂g_ks/∂x^j),
/// the nonlinear connection N^i_j = γ^i_jk y^k − C^i_jk γ^k_rs y^r y^s and the
/// Chern coefficients
///   Γ^l_jk = γ^l_jk − g^{li} (C_ijs N^s_k − C_jks N^s_i + C_kis N^s_j).
struct ConnectionData {
    Vec x, y;
    Mat g;           // g_ij(x,y)
    Tensor3 cartan;  // C_ijk(x,y)
    Tensor3 dg_dx;   // (k,i,j) -> ∂g_ij/∂x^k
    Tensor3 gamma;   // γ^i_jk, symmetric in (j,k)
    Mat nonlinear;   // N^i_j
    Tensor3 chern;   // Γ^i_jk, symmetric in (j,k)
};

inline ConnectionData connection_data(const FinslerChart& chart, const Vec& x,
                                      const Vec& y) {
    detail::require_chart_domain(chart, x, y, "connection_data");
    const int n = chart.dim;

    // one order-3 lift of ½F² in the concatenated (x,y) block
    std::vector<Jet> vars;
    vars.reserve(2 * n);
    for (int i = 0; i < n; ++i) vars.push_back(Jet::variable(x[i], i, 2 * n, 3));
    for (int i = 0; i < n; ++i) vars.push_back(Jet::variable(y[i], n + i, 2 * n, 3));
    const Jet e = chart.energy(std::span<const Jet>(vars.data(), n),
                               std::span<const Jet>(vars.data() + n, n));

    ConnectionData c;
    c.x = x;
    c.y = y;
    c.g = Mat(n, n);
    c.cartan = Tensor3(n);
    c.dg_dx = Tensor3(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            c.g(i, j) = e.d(n + i, n + j);
            for (int k = 0; k < n; ++k) {
                c.cartan(i, j, k) = 0.5 * e.d(n + i, n + j, n + k);
                c.dg_dx(k, i, j) = e.d(k, n + i, n + j);
            }
        }

    Eigen::LLT<Mat> llt(c.g);
    if (llt.info() != Eigen::Success)
        throw MetricError("connection_data: fundamental tensor not positive definite at " +
                          chart.name);

    // γ^i_jk: lowered symbol solved through g (never an explicit inverse)
    c.gamma = Tensor3(n);
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            Vec rhs(n);
            for (int s = 0; s < n; ++s)
                rhs[s] = 0.5 * (c.dg_dx(k, s, j) - c.dg_dx(s, j, k) + c.dg_dx(j, k, s));
            Vec col = llt.solve(rhs);
            for (int i = 0; i < n; ++i) {
                c.gamma(i, j, k) = col[i];
                c.gamma(i, k, j) = col[i];
            }
        }

    // N^i_j = γ^i_jk y^k − C^i_jk γ^k_rs y^r y^s
    Vec gyy(n);  // γ^k_rs y^r y^s
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int r = 0; r < n; ++r)
            for (int t = 0; t < n; ++t) s += c.gamma(k, r, t) * y[r] * y[t];
        gyy[k] = s;
    }
    c.nonlinear = Mat(n, n);
    {
        Mat lowered(n, n);  // C_sjk γ^k_rs y^r y^s contracted: (s,j)
        for (int s = 0; s < n; ++s)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) acc += c.cartan(s, j, k) * gyy[k];
                lowered(s, j) = acc;
            }
        Mat raised = llt.solve(lowered);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double gy = 0.0;
                for (int k = 0; k < n; ++k) gy += c.gamma(i, j, k) * y[k];
                c.nonlinear(i, j) = gy - raised(i, j);
            }
    }

    // Chern coefficients with the three Cartan correction terms
    c.chern = Tensor3(n);
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            Vec rhs(n);
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int s = 0; s < n; ++s)
                    acc += c.cartan(i, j, s) * c.nonlinear(s, k) -
                           c.cartan(j, k, s) * c.nonlinear(s, i) +
                           c.cartan(k, i, s) * c.nonlinear(s, j);
                rhs[i] = acc;
            }
            Vec corr = llt.solve(rhs);
            for (int i = 0; i < n; ++i) {
                const double v = c.gamma(i, j, k) - corr[i];
                c.chern(i, j, k) = v;
                c.chern(i, k, j) = v;
            }
        }
    return c;
}

/// A vector field on the chart, evaluable on jets for derivative queries.
struct VectorField {
    int dim = 0;
    std::function<std::vector<Jet>(std::span<const Jet>)> components;

    Vec value(const Vec& x) const {
        auto xj = detail::constant_jets(detail::as_span(x), 0, 0);
        std::vector<Jet> c = components(xj);
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = c[i].value();
        return v;
    }

    /// value and Jacobian J(i,k) = ∂W^i/∂x^k in one first-order lift
    std::pair<Vec, Mat> value_and_jacobian(const Vec& x) const {
        std::vector<Jet> vars = jet_variables(detail::as_span(x), 1);
        std::vector<Jet> c = components(vars);
        Vec v(dim);
        Mat J(dim, dim);
        for (int i = 0; i < dim; ++i) {
            v[i] = c[i].value();
            for (int k = 0; k < dim; ++k) J(i, k) = c[i].d(k);
        }
        return {std::move(v), std::move(J)};
    }
};

inline VectorField constant_field(const Vec& w) {
    VectorField f;
    f.dim = static_cast<int>(w.size());
    f.components = [w](std::span<const Jet> x) {
        std::vector<Jet> out;
        out.reserve(w.size());
        for (int i = 0; i < w.size(); ++i)
            out.push_back(Jet::constant(w[i], x[0].nvars(), x[0].order()));
        return out;
    };
    return f;
}

/// Lie bracket [W1,W2]^i = W1^k ∂_k W2^i − W2^k ∂_k W1^i at x.
inline Vec lie_bracket(const VectorField& w1, const VectorField& w2, const Vec& x) {
    auto [v1, j1] = w1.value_and_jacobian(x);
    auto [v2, j2] = w2.value_and_jacobian(x);
    return j2 * v1 - j1 * v2;
}

/// ∇^V_{W1} W2 at x: [W1(W2^i) + W2^j W1^k Γ^i_jk(x, V(x))] ∂/∂x^i.
/// The direction field V pins the Chern coefficients; V(x) = 0 is an error
/// because the connection is undefined without a direction.
inline Vec covariant_derivative(const FinslerChart& chart, const VectorField& V,
                                const VectorField& W1, const VectorField& W2,
                                const Vec& x) {
    Vec v = V.value(x);
    if (v.norm() == 0.0)
        throw DomainError("covariant_derivative: direction field vanishes at x");
    ConnectionData conn = connection_data(chart, x, v);
    Vec w1 = W1.value(x);
    auto [w2, j2] = W2.value_and_jacobian(x);
    Vec out = j2 * w1;
    const int n = chart.dim;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) acc += w2[j] * w1[k] * conn.chern(i, j, k);
        out[i] += acc;
    }
    return out;
}

/// A parametrized curve with jet access in t; `components` returns the chart
/// coordinates of γ(t) as jets in the single variable t.
struct Curve {
    int dim = 0;
    std::function<std::vector<Jet>(const Jet& t)> components;

    Vec point(double t) const {
        std::vector<Jet> c = components(Jet::constant(t, 1, 0));
        Vec p(dim);
        for (int i = 0; i < dim; ++i) p[i] = c[i].value();
        return p;
    }
    Vec velocity(double t) const {
        std::vector<Jet> c = components(Jet::variable(t, 0, 1, 1));
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = c[i].d(0);
        return v;
    }
};

/// D_T T at t: the geodesic defect Ṫ^i + T^j T^k Γ^i_jk(γ(t), T(t)) of the
/// curve, from one second-order jet evaluation in t.
inline Vec derivative_along_curve(const FinslerChart& chart, const Curve& curve,
                                  double t) {
    const int n = chart.dim;
    std::vector<Jet> cj = curve.components(Jet::variable(t, 0, 1, 2));
    Vec pos(n), vel(n), acc(n);
    for (int i = 0; i < n; ++i) {
        pos[i] = cj[i].value();
        vel[i] = cj[i].d(0);
        acc[i] = cj[i].d(0, 0);
    }
    if (vel.norm() == 0.0)
        throw DomainError("derivative_along_curve: curve velocity vanishes at t");
    ConnectionData conn = connection_data(chart, pos, vel);
    Vec out = acc;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) s += vel[j] * vel[k] * conn.chern(i, j, k);
        out[i] += s;
    }
    return out;
}

/// Derivative along a curve: D_T W (t) = [Ẇ^i + W^j T^k Γ^i_jk(γ(t), T(t))] ∂_i,
/// computed intrinsically from the curve data (no ambient extension).
inline Vec derivative_along_curve(const FinslerChart& chart, const Curve& curve,
                                  const Curve& W, double t) {
    const int n = chart.dim;
    std::vector<Jet> cj = curve.components(Jet::variable(t, 0, 1, 1));
    std::vector<Jet> wj = W.components(Jet::variable(t, 0, 1, 1));
    Vec pos(n), vel(n), w(n), wdot(n);
    for (int i = 0; i < n; ++i) {
        pos[i] = cj[i].value();
        vel[i] = cj[i].d(0);
        w[i] = wj[i].value();
        wdot[i] = wj[i].d(0);
    }
    if (vel.norm() == 0.0)
        throw DomainError("derivative_along_curve: curve velocity vanishes at t");
    ConnectionData conn = connection_data(chart, pos, vel);
    Vec out = wdot;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) acc += w[j] * vel[k] * conn.chern(i, j, k);
        out[i] += acc;
    }
    return out;
}

/// Deterministic sampler of (x,y) pairs inside the chart's smooth domain.
struct ChartSampler {
    const FinslerChart& chart;
    std::mt19937_64 rng;
    ChartSampler(const FinslerChart& c, uint64_t seed) : chart(c), rng(seed) {}

    std::pair<Vec, Vec> sample() {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const int n = chart.dim;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Vec x(n), y(n);
            for (int i = 0; i < n; ++i)
                x[i] = chart.sample_lo[i] +
                       unif(rng) * (chart.sample_hi[i] - chart.sample_lo[i]);
            for (int i = 0; i < n; ++i) y[i] = gauss(rng);
            if (y.norm() < 1e-6) continue;
            y *= (0.5 + unif(rng)) / y.norm();
            if (chart.in_domain(detail::as_span(x), detail::as_span(y)) &&
                chart.in_domain(detail::as_span(x), detail::as_span(Vec(-y))))
                return {x, y};
        }
        throw DomainError("chart sampler: could not find points in the smooth domain");
    }
};

/// Parity table of the chart under y -> -y, sampled. For a reversible metric
/// g and γ and Γ are even while C and N are odd.
struct ReversibilityReport {
    double norm_asymmetry;    // max |F(x,y) − F(x,−y)|
    double g_even;            // max |g(x,y) − g(x,−y)|
    double cartan_odd;        // max |C(x,y) + C(x,−y)|
    double gamma_even;        // max |γ(x,y) − γ(x,−y)|
    double nonlinear_odd;     // max |N(x,y) + N(x,−y)|
    double chern_even;        // max |Γ(x,y) − Γ(x,−y)|

    bool reversible(double tol) const {
        return norm_asymmetry <= tol && g_even <= tol && cartan_odd <= tol &&
               gamma_even <= tol && nonlinear_odd <= tol && chern_even <= tol;
    }
};

inline ReversibilityReport reversibility_check(const FinslerChart& chart,
                                               int samples, uint64_t seed = 1) {
    ChartSampler sampler(chart, seed);
    ReversibilityReport r{0, 0, 0, 0, 0, 0};
    for (int s = 0; s < samples; ++s) {
        auto [x, y] = sampler.sample();
        r.norm_asymmetry = std::max(
            r.norm_asymmetry, std::abs(chart_norm(chart, x, y) - chart_norm(chart, x, -y)));
        ConnectionData cp = connection_data(chart, x, y);
        ConnectionData cm = connection_data(chart, x, -y);
        r.g_even = std::max(r.g_even, (cp.g - cm.g).cwiseAbs().maxCoeff());
        r.cartan_odd = std::max(r.cartan_odd, (cp.cartan + cm.cartan).max_abs());
        r.gamma_even = std::max(r.gamma_even, (cp.gamma - cm.gamma).max_abs());
        r.nonlinear_odd =
            std::max(r.nonlinear_odd,
                     (cp.nonlinear + cm.nonlinear).cwiseAbs().maxCoeff());
        r.chern_even = std::max(r.chern_even, (cp.chern - cm.chern).max_abs());
    }
    return r;
}

/// Spread of the Chern coefficients over directions: zero spread means the
/// coefficients depend on x alone, i.e. the metric is Berwald.
struct BerwaldReport {
    double max_spread;
    bool berwald(double tol) const { return max_spread <= tol; }
};

inline BerwaldReport berwald_check(const FinslerChart& chart, int samples,
                                   uint64_t seed = 1) {
    ChartSampler sampler(chart, seed);
    const int directions = 8;
    BerwaldReport r{0.0};
    for (int s = 0; s < samples; ++s) {
        auto [x, y0] = sampler.sample();
        ConnectionData ref = connection_data(chart, x, y0);
        ChartSampler dir(chart, seed ^ (0x9e3779b97f4a7c15ULL + s));
        for (int d = 0; d < directions; ++d) {
            auto [x2, y] = dir.sample();
            (void)x2;
            if (!chart.in_domain(detail::as_span(x), detail::as_span(y))) continue;
            ConnectionData alt = connection_data(chart, x, y);
            r.max_spread = std::max(r.max_spread, (alt.chern - ref.chern).max_abs());
        }
    }
    return r;
}

}  // namespace finsler
