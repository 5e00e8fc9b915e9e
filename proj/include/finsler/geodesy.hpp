#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "finsler/chart.hpp"
#include "finsler/homspace.hpp"
#include "finsler/tolerances.hpp"

namespace finsler {

/// A constant-speed geodesic solved as ẍ^i + Γ^i_jk(x,ẋ) ẋ^j ẋ^k = 0 with a
/// fixed-step classical RK4. F(γ,γ') is constant along the exact solution;
/// max_speed_drift records the numerical deviation.
struct GeodesicSolution {
    Vec x0, y0;
    double step = 0.0;
    int integrator_order = 4;
    std::vector<double> times;
    std::vector<Vec> positions;
    std::vector<Vec> velocities;
    double initial_speed = 0.0;
    double max_speed_drift = 0.0;
    bool chart_exit = false;
    double exit_time = 0.0;

    const Vec& endpoint() const { return positions.back(); }
    const Vec& end_velocity() const { return velocities.back(); }
    double end_time() const { return times.back(); }
};

namespace detail {

// geodesic spray: (x,y) -> (y, -Γ(x,y)(y,y))
inline std::pair<Vec, Vec> spray(const FinslerChart& chart, const Vec& x,
                                 const Vec& y) {
    ConnectionData conn = connection_data(chart, x, y);
    const int n = chart.dim;
    Vec acc = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) s += conn.chern(i, j, k) * y[j] * y[k];
        acc[i] = -s;
    }
    return {y, std::move(acc)};
}

}  // namespace detail

/// Integrate the constant-speed geodesic from (x0,y0) over [0,T].
/// Chart exit truncates the solution and sets the exit flag; a speed drift
/// beyond `drift_bound` raises NumericsError (the step is too large).
inline GeodesicSolution integrate_geodesic(const FinslerChart& chart, const Vec& x0,
                                           const Vec& y0, double T,
                                           double step = 1e-3,
                                           double drift_bound = 1e-7) {
    detail::require_chart_domain(chart, x0, y0, "integrate_geodesic");
    if (!(T > 0.0) || !(step > 0.0))
        throw DomainError("integrate_geodesic: window and step must be positive");

    GeodesicSolution sol;
    sol.x0 = x0;
    sol.y0 = y0;
    sol.step = step;
    sol.initial_speed = chart_norm(chart, x0, y0);

    const int nsteps = std::max(1, static_cast<int>(std::ceil(T / step - 1e-12)));
    const double h = T / nsteps;
    Vec x = x0, y = y0;
    sol.times.push_back(0.0);
    sol.positions.push_back(x);
    sol.velocities.push_back(y);

    auto in_domain = [&](const Vec& xx, const Vec& yy) {
        return chart.in_domain(detail::as_span(xx), detail::as_span(yy));
    };

    for (int s = 0; s < nsteps; ++s) {
        const double t = s * h;
        try {
            auto [k1x, k1y] = detail::spray(chart, x, y);
            Vec x2 = x + 0.5 * h * k1x, y2 = y + 0.5 * h * k1y;
            if (!in_domain(x2, y2)) throw ChartExitError("stage outside chart", t);
            auto [k2x, k2y] = detail::spray(chart, x2, y2);
            Vec x3 = x + 0.5 * h * k2x, y3 = y + 0.5 * h * k2y;
            if (!in_domain(x3, y3)) throw ChartExitError("stage outside chart", t);
            auto [k3x, k3y] = detail::spray(chart, x3, y3);
            Vec x4 = x + h * k3x, y4 = y + h * k3y;
            if (!in_domain(x4, y4)) throw ChartExitError("stage outside chart", t);
            auto [k4x, k4y] = detail::spray(chart, x4, y4);
            Vec xn = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            Vec yn = y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            if (!in_domain(xn, yn)) throw ChartExitError("step outside chart", t);
            x = std::move(xn);
            y = std::move(yn);
        } catch (const ChartExitError& e) {
            sol.chart_exit = true;
            sol.exit_time = e.escape_time;
            return sol;
        }
        sol.times.push_back((s + 1) * h);
        sol.positions.push_back(x);
        sol.velocities.push_back(y);
        sol.max_speed_drift =
            std::max(sol.max_speed_drift,
                     std::abs(chart_norm(chart, x, y) - sol.initial_speed));
    }
    if (sol.max_speed_drift > drift_bound)
        throw NumericsError(
            "integrate_geodesic: speed drift " + std::to_string(sol.max_speed_drift) +
            " exceeds the accuracy budget; use a smaller step");
    return sol;
}

/// Quantitative match between the isometry orbit exp(tX)(p) and the geodesic
/// started at (p, X*(p)). For a geodesic vector the curves coincide and the
/// fitted reparametrization constant k (from D_{X*}X* = k X* along the orbit,
/// least squares) is zero; Finsler isometry orbits have constant speed, so a
/// nonzero k only ever shows up as a diagnostic of failure.
struct ComparisonReport {
    double sup_distance = 0.0;      // max over the common window, chart coords
    double velocity_mismatch = 0.0; // at the end of the common window
    double reparam_constant = 0.0;  // fitted k
    double window = 0.0;            // common window actually compared
    bool truncated = false;         // chart exit on either curve
};

inline ComparisonReport compare_orbit_geodesic(const HomogeneousSpaceSpec& spec,
                                               const Vec& X, double T = 1.0,
                                               double step = 1e-3) {
    if (X.size() != spec.dim || X.norm() == 0.0)
        throw DomainError("compare_orbit_geodesic: X must be a nonzero algebra vector");
    VectorField xs = killing_combination(spec, X);
    Vec xs_p = xs.value(spec.origin);
    if (xs_p.norm() == 0.0)
        throw DomainError("compare_orbit_geodesic: X*(p) = 0, degenerate direction");

    GeodesicSolution geo =
        integrate_geodesic(spec.chart, spec.origin, xs_p, T, step,
                           /*drift_bound=*/1e300);
    ComparisonReport rep;
    rep.truncated = geo.chart_exit;

    // orbit samples on the same grid, truncating at chart exit
    std::vector<Vec> orbit;
    orbit.reserve(geo.times.size());
    for (double t : geo.times) {
        try {
            orbit.push_back(orbit_curve(spec, X, t));
        } catch (const ChartExitError&) {
            rep.truncated = true;
            break;
        }
    }
    const size_t m = std::min(orbit.size(), geo.positions.size());
    if (m == 0) throw DomainError("compare_orbit_geodesic: empty common window");
    rep.window = geo.times[m - 1];
    for (size_t i = 0; i < m; ++i)
        rep.sup_distance =
            std::max(rep.sup_distance, (orbit[i] - geo.positions[i]).norm());
    rep.velocity_mismatch =
        (xs.value(orbit[m - 1]) - geo.velocities[m - 1]).norm();

    // least-squares k from D_{X*}X* = k X* sampled along the orbit
    double num = 0.0, den = 0.0;
    const int fit_samples = 11;
    for (int i = 0; i < fit_samples; ++i) {
        const double t = rep.window * i / (fit_samples - 1);
        Vec q;
        try {
            q = orbit_curve(spec, X, t);
        } catch (const ChartExitError&) {
            break;
        }
        Vec z = xs.value(q);
        if (z.norm() == 0.0) continue;
        Vec v = covariant_derivative(spec.chart, xs, xs, xs, q);
        num += v.dot(z);
        den += z.dot(z);
    }
    rep.reparam_constant = (den > 0.0) ? num / den : 0.0;
    return rep;
}

}  // namespace finsler
