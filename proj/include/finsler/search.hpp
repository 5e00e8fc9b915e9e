#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finsler/geodesy.hpp"
#include "finsler/homspace.hpp"
#include "finsler/tolerances.hpp"

namespace finsler {

// ---------------------------------------------------------------------------
// sphere sampling
// ---------------------------------------------------------------------------

/// Quasi-uniform points on S^{n-1}: uniform angles for n=2, generalized
/// spiral for n=3, seeded unit gaussians for higher n. Deterministic for a
/// fixed (count, seed).
inline std::vector<Vec> sphere_points(int n, int count, uint64_t seed = 0) {
    std::vector<Vec> pts;
    pts.reserve(count);
    if (n < 1 || count < 1) return pts;
    if (n == 1) {
        for (int k = 0; k < count; ++k) pts.push_back(Vec::Constant(1, k % 2 ? -1.0 : 1.0));
        return pts;
    }
    if (n == 2) {
        for (int k = 0; k < count; ++k) {
            const double a = 2.0 * M_PI * k / count;
            pts.push_back((Vec(2) << std::cos(a), std::sin(a)).finished());
        }
        return pts;
    }
    if (n == 3) {
        // generalized spiral: latitudes uniform in z, longitude advanced by
        // ~3.6/sqrt(N (1-z²))
        double phi = 0.0;
        for (int k = 0; k < count; ++k) {
            const double z = (count == 1) ? 0.0 : -1.0 + 2.0 * k / (count - 1.0);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            if (k == 0 || k == count - 1)
                phi = 0.0;
            else
                phi += 3.6 / std::sqrt(count * std::max(r * r, 1e-12));
            pts.push_back((Vec(3) << r * std::cos(phi), r * std::sin(phi), z).finished());
        }
        return pts;
    }
    std::mt19937_64 rng(seed ^ 0x5bf0a8b1ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < count; ++k) {
        Vec v(n);
        do {
            for (int i = 0; i < n; ++i) v[i] = gauss(rng);
        } while (v.norm() < 1e-8);
        pts.push_back(v.normalized());
    }
    return pts;
}

// ---------------------------------------------------------------------------
// the sphere fields v(X) and t(X)
// ---------------------------------------------------------------------------

/// v(X) = ∇^{X*}_{X*}X* at the origin, in B-coordinates (the basis of Killing
/// field values at p, declared orthonormal for the auxiliary product).
inline Vec v_field(const HomogeneousSpaceSpec& spec, const Vec& X) {
    if (X.size() != spec.dim || X.norm() == 0.0)
        throw DomainError("v_field: X must be a nonzero vector");
    VectorField xs = killing_combination(spec, X);
    Vec xs_p = xs.value(spec.origin);
    if (xs_p.norm() == 0.0)
        throw DomainError("v_field: X*(p) = 0, degenerate direction");
    Vec v_chart = covariant_derivative(spec.chart, xs, xs, xs, spec.origin);
    return killing_frame(spec).partialPivLu().solve(v_chart);
}

/// t(X) = v(X) − ⟨v(X),X⟩X for unit X: the tangential part of v on S^{n-1}
/// with respect to the auxiliary Euclidean product.
inline Vec t_field(const HomogeneousSpaceSpec& spec, const Vec& X) {
    Vec Xu = X.normalized();
    Vec v = v_field(spec, Xu);
    return v - v.dot(Xu) * Xu;
}

struct SphereFieldSample {
    Vec X;  // unit
    Vec v;
    Vec t;
    double v_norm;
    double t_norm;
};

inline SphereFieldSample sphere_field_sample(const HomogeneousSpaceSpec& spec,
                                             const Vec& X) {
    SphereFieldSample s;
    s.X = X.normalized();
    s.v = v_field(spec, s.X);
    s.t = s.v - s.v.dot(s.X) * s.X;
    s.v_norm = s.v.norm();
    s.t_norm = s.t.norm();
    return s;
}

inline std::vector<SphereFieldSample> sphere_field(const HomogeneousSpaceSpec& spec,
                                                   int samples, uint64_t seed = 0) {
    std::vector<SphereFieldSample> out;
    out.reserve(samples);
    for (const Vec& X : sphere_points(spec.dim, samples, seed))
        out.push_back(sphere_field_sample(spec, X));
    return out;
}

/// |g_{(p,X)}(v(X), X*)|: v(X) is g-orthogonal to X (Cartan contraction along
/// the flag pole vanishes).
inline double g_orthogonality_residual(const HomogeneousSpaceSpec& spec,
                                       const Vec& X) {
    Vec Xu = X.normalized();
    VectorField xs = killing_combination(spec, Xu);
    Vec xs_p = xs.value(spec.origin);
    Vec v_chart = covariant_derivative(spec.chart, xs, xs, xs, spec.origin);
    Mat g = chart_metric(spec.chart, spec.origin, xs_p);
    return std::abs(v_chart.dot(g * xs_p));
}

// ---------------------------------------------------------------------------
// the algebraic criterion
// ---------------------------------------------------------------------------

/// max_Z |g_{X_m}([X,Z]_m, X_m)| over the m-basis: zero exactly for geodesic
/// vectors. The fundamental tensor is that of the invariant Minkowski norm on
/// m in B-coordinates.
inline double lemma2_residual(const HomogeneousSpaceSpec& spec, const Vec& X) {
    const ReductiveDecomposition& dec = spec.split;
    Vec xm = dec.m_coords(X);
    if (xm.norm() == 0.0)
        throw DomainError("lemma2_residual: X_m = 0, degenerate direction");
    Mat g = fundamental_tensor(spec.norm, xm).g;
    double worst = 0.0;
    for (int j = 0; j < dec.dim_m(); ++j) {
        Vec z = dec.m_basis.col(j);
        Vec br_m = dec.m_coords(spec.algebra.bracket(X, z));
        worst = std::max(worst, std::abs(br_m.dot(g * xm)));
    }
    return worst;
}

/// The same residual as a vector over the m-basis (for zero refinement).
inline Vec lemma2_residual_vector(const HomogeneousSpaceSpec& spec, const Vec& X) {
    const ReductiveDecomposition& dec = spec.split;
    Vec xm = dec.m_coords(X.normalized());
    Mat g = fundamental_tensor(spec.norm, xm).g;
    Vec r(dec.dim_m());
    for (int j = 0; j < dec.dim_m(); ++j) {
        Vec z = dec.m_basis.col(j);
        Vec br_m = dec.m_coords(spec.algebra.bracket(Vec(X.normalized()), z));
        r[j] = br_m.dot(g * xm);
    }
    return r;
}

// ---------------------------------------------------------------------------
// zero refinement on the sphere
// ---------------------------------------------------------------------------

using SphereResidualFn = std::function<Vec(const Vec&)>;

/// Damped Gauss-Newton on S^{n-1} with normalization retraction; the
/// Jacobian over a tangent basis comes from central differences.
inline Vec refine_sphere_zero(const SphereResidualFn& residual, Vec X,
                              double target, int max_iters,
                              double* achieved = nullptr) {
    X.normalize();
    const int n = static_cast<int>(X.size());
    Vec r = residual(X);
    double rn = r.norm();
    const double fd_step = 1e-6;
    for (int iter = 0; iter < max_iters && rn > target; ++iter) {
        // tangent basis: columns 2..n of the Householder Q of [X]
        Eigen::HouseholderQR<Mat> qr(X);
        Mat Q = qr.householderQ();
        Mat Tb = Q.rightCols(n - 1);
        Mat J(static_cast<int>(r.size()), n - 1);
        for (int a = 0; a < n - 1; ++a) {
            Vec xp = (X + fd_step * Tb.col(a)).normalized();
            Vec xm = (X - fd_step * Tb.col(a)).normalized();
            J.col(a) = (residual(xp) - residual(xm)) / (2.0 * fd_step);
        }
        Vec delta = J.colPivHouseholderQr().solve(-r);
        if (!delta.allFinite()) break;
        bool improved = false;
        for (double lam = 1.0; lam > 1e-4; lam *= 0.5) {
            Vec Xn = (X + Tb * (lam * delta)).normalized();
            Vec rnew = residual(Xn);
            if (rnew.norm() < rn) {
                X = Xn;
                r = rnew;
                rn = rnew.norm();
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (achieved) *achieved = rn;
    return X;
}

// ---------------------------------------------------------------------------
// candidates and reports
// ---------------------------------------------------------------------------

struct GeodesicVectorCandidate {
    enum class Provenance { SphereZero, Algebraic, CommutatorComplement };
    Vec X;  // unit, B-coordinates
    double t_residual = 0.0;
    double v_residual = 0.0;
    std::optional<double> lemma2;
    ComparisonReport comparison;
    Provenance provenance = Provenance::SphereZero;
    bool certified = false;
    bool uncorroborated = false;  // fewer than two independent checks ran
    bool both_signs = false;      // -X is (also) certified
};

struct SearchConfig {
    int samples = 2000;
    double refine_target = 1e-12;
    int max_newton_iters = 60;
    double dedup_angle = 1e-4;
    double seed_separation = 0.08;
    int max_seeds = 48;
    double compare_window = 1.0;
    double compare_step = 5e-3;
    uint64_t seed = 0;
    Tolerances tol;
};

struct SphereSearchReport {
    std::string space;
    int dim = 0;
    int samples = 0;
    uint64_t seed = 0;
    std::string branch;  // "odd-dim" | "berwald-reversible" | "rad-equals-m" | "none"
    bool guaranteed = false;
    std::vector<GeodesicVectorCandidate> candidates;
    bool all_directions_geodesic = false;
    bool guarantee_violated = false;
    double global_min_t = 0.0;
    Vec global_min_X;

    int certified_count() const {
        int c = 0;
        for (const auto& cand : candidates) c += cand.certified;
        return c;
    }
};

inline std::string theorem_branch(const HomogeneousSpaceSpec& spec) {
    if (spec.dim % 2 == 1) return "odd-dim";
    if (spec.berwald || spec.reversible) return "berwald-reversible";
    if (spec.split.branch == ReductiveDecomposition::Branch::RadicalEqualsM)
        return "rad-equals-m";
    return "none";
}

/// Full residual triple for one direction: tangent-field zero, algebraic
/// criterion, orbit-vs-geodesic comparison. Certification requires all the
/// checks that are available; with fewer than two it is flagged
/// uncorroborated.
inline GeodesicVectorCandidate certify_direction(
    const HomogeneousSpaceSpec& spec, const Vec& X,
    GeodesicVectorCandidate::Provenance prov, const SearchConfig& cfg) {
    GeodesicVectorCandidate cand;
    cand.provenance = prov;
    cand.X = X.normalized();
    SphereFieldSample s = sphere_field_sample(spec, cand.X);
    cand.t_residual = s.t_norm;
    cand.v_residual = s.v_norm;
    int checks = 1;
    bool ok = cand.v_residual <= cfg.tol.t_residual;
    try {
        cand.lemma2 = lemma2_residual(spec, cand.X);
        ok = ok && *cand.lemma2 <= cfg.tol.lemma2;
        ++checks;
    } catch (const DomainError&) {
        cand.lemma2.reset();
    }
    cand.comparison =
        compare_orbit_geodesic(spec, cand.X, cfg.compare_window, cfg.compare_step);
    ok = ok && cand.comparison.sup_distance <= cfg.tol.sup_distance;
    ++checks;
    cand.certified = ok;
    cand.uncorroborated = ok && checks < 2;
    return cand;
}

namespace detail {

inline double angular_distance(const Vec& a, const Vec& b) {
    const double c = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
    return std::acos(c);
}

inline bool lex_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - 1e-15) return true;
        if (a[i] > b[i] + 1e-15) return false;
    }
    return false;
}

}  // namespace detail

/// Locate the zeros of t(X) on the sphere: quasi-uniform scan, separated
/// basin seeds, damped Gauss-Newton refinement, deduplication, antipodal
/// pairing and triple certification. For a space whose class carries an
/// existence guarantee, an empty certified set is reported as a violation
/// with the global minimum of |t| as a diagnostic.
inline SphereSearchReport find_zeros(const HomogeneousSpaceSpec& spec,
                                     const SearchConfig& cfg = {}) {
    SphereSearchReport rep;
    rep.space = spec.name + "-" + spec.metric_family;
    rep.dim = spec.dim;
    rep.samples = cfg.samples;
    rep.seed = cfg.seed;
    rep.branch = theorem_branch(spec);
    rep.guaranteed = rep.branch != "none";

    std::vector<SphereFieldSample> field = sphere_field(spec, cfg.samples, cfg.seed);

    // global diagnostics
    double tmax = 0.0;
    rep.global_min_t = 1e300;
    for (const auto& s : field) {
        tmax = std::max(tmax, s.t_norm);
        if (s.t_norm < rep.global_min_t) {
            rep.global_min_t = s.t_norm;
            rep.global_min_X = s.X;
        }
    }
    rep.all_directions_geodesic = tmax <= cfg.tol.t_residual;

    // basin seeds: ascending |t|, greedily separated
    std::vector<int> order(field.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (field[a].t_norm != field[b].t_norm)
            return field[a].t_norm < field[b].t_norm;
        return detail::lex_less(field[a].X, field[b].X);
    });
    std::vector<Vec> seeds;
    for (int idx : order) {
        if (static_cast<int>(seeds.size()) >= cfg.max_seeds) break;
        bool separated = true;
        for (const Vec& s : seeds)
            if (detail::angular_distance(field[idx].X, s) < cfg.seed_separation) {
                separated = false;
                break;
            }
        if (separated) seeds.push_back(field[idx].X);
    }

    // refine and keep converged zeros
    auto residual = [&](const Vec& X) { return t_field(spec, X); };
    std::vector<std::pair<Vec, double>> zeros;
    for (const Vec& s : seeds) {
        double achieved = 0.0;
        Vec z = refine_sphere_zero(residual, s, cfg.refine_target,
                                   cfg.max_newton_iters, &achieved);
        if (achieved <= cfg.tol.t_residual) zeros.emplace_back(z, achieved);
    }

    // dedup by angular distance; lowest |t| wins, then lexicographic order
    std::stable_sort(zeros.begin(), zeros.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return detail::lex_less(a.first, b.first);
    });
    std::vector<Vec> unique;
    for (const auto& [z, res] : zeros) {
        bool fresh = true;
        for (const Vec& u : unique)
            if (detail::angular_distance(z, u) < cfg.dedup_angle) {
                fresh = false;
                break;
            }
        if (fresh) unique.push_back(z);
    }

    // antipodal pairing: ±X reported once. For Berwald or reversible metrics
    // v(X) = v(-X), so a certified X certifies its antipode; otherwise the
    // opposite sign is checked independently.
    const bool sign_symmetric = spec.berwald || spec.reversible;
    std::vector<bool> consumed(unique.size(), false);
    for (size_t i = 0; i < unique.size(); ++i) {
        if (consumed[i]) continue;
        consumed[i] = true;
        int partner = -1;
        for (size_t j = i + 1; j < unique.size(); ++j) {
            if (consumed[j]) continue;
            if (detail::angular_distance(unique[i], Vec(-unique[j])) < cfg.dedup_angle) {
                partner = static_cast<int>(j);
                consumed[j] = true;
                break;
            }
        }
        GeodesicVectorCandidate c = certify_direction(
            spec, unique[i], GeodesicVectorCandidate::Provenance::SphereZero, cfg);
        if (sign_symmetric) {
            c.both_signs = c.certified;
        } else {
            Vec anti = (partner >= 0) ? unique[partner] : Vec(-unique[i]);
            GeodesicVectorCandidate cm = certify_direction(
                spec, anti, GeodesicVectorCandidate::Provenance::SphereZero, cfg);
            if (!c.certified && cm.certified) c = cm;
            c.both_signs = c.certified && cm.certified;
        }
        rep.candidates.push_back(std::move(c));
    }

    if (rep.guaranteed && rep.certified_count() == 0) rep.guarantee_violated = true;
    return rep;
}

/// max over samples of |v(X) − v(−X)|: vanishes for Berwald or reversible
/// metrics, the engine of the even-dimensional existence theorem.
inline double antipodal_symmetry_residual(const HomogeneousSpaceSpec& spec,
                                          int samples, uint64_t seed = 0) {
    double worst = 0.0;
    for (const Vec& X : sphere_points(spec.dim, samples, seed))
        worst = std::max(worst,
                         (v_field(spec, X) - v_field(spec, Vec(-X))).norm());
    return worst;
}

// ---------------------------------------------------------------------------
// the alpha operator and the continuity probe
// ---------------------------------------------------------------------------

/// α^X on m defined by g_X(α^X U, V) = K(U,V); self-adjoint for g_X, so the
/// eigenvalues are real. Inapplicable (α = 0) when K vanishes on m.
struct AlphaOperator {
    Mat alpha;
    Vec eigenvalues;   // ascending
    Mat eigenvectors;  // columns, g_X-orthonormal
    double self_adjoint_residual = 0.0;
    bool branch_applicable = false;  // rad(K) proper subset of m
};

inline AlphaOperator alpha_operator(const HomogeneousSpaceSpec& spec, const Vec& X) {
    const ReductiveDecomposition& dec = spec.split;
    Vec xm = dec.m_coords(X.normalized());
    if (xm.norm() == 0.0) throw DomainError("alpha_operator: X_m = 0");
    Mat Km = dec.m_basis.transpose() * dec.killing * dec.m_basis;
    Mat g = fundamental_tensor(spec.norm, xm).g;
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
        throw MetricError("alpha_operator: fundamental tensor not positive definite");
    AlphaOperator out;
    out.alpha = llt.solve(Km);
    out.self_adjoint_residual =
        (g * out.alpha - out.alpha.transpose() * g).cwiseAbs().maxCoeff();
    out.branch_applicable =
        dec.branch == ReductiveDecomposition::Branch::RadicalProperSubset;
    // symmetrize through the Cholesky factor: S = L^{-1} Km L^{-T}
    Mat L = llt.matrixL();
    Mat S = L.triangularView<Eigen::Lower>().solve(Km);
    S = L.triangularView<Eigen::Lower>().solve(Mat(S.transpose()));
    Eigen::SelfAdjointEigenSolver<Mat> eig(S);
    out.eigenvalues = eig.eigenvalues();
    out.eigenvectors =
        L.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors());
    return out;
}

/// Empirical probe of the argmax-|λ| eigenvector selection along a great
/// circle on the sphere of directions: reports near-crossings of the two
/// largest |eigenvalues| and jumps of the selected eigenvector line between
/// consecutive samples. The probe records what it finds; it proves nothing.
struct AlphaProbeEvent {
    double s;  // arc parameter
    Vec X;
    double gap;              // | |λ|_max − |λ|_second |
    double selection_angle;  // line angle to the previous selection
};

struct AlphaProbeReport {
    int samples = 0;
    double min_gap = 1e300;
    std::vector<AlphaProbeEvent> near_crossings;
    std::vector<AlphaProbeEvent> selection_jumps;
    bool crossings_found = false;
    bool jumps_found = false;
};

inline AlphaProbeReport alpha_continuity_probe(const HomogeneousSpaceSpec& spec,
                                               const Vec& a, const Vec& b,
                                               int samples = 720,
                                               double gap_tol = 1e-3,
                                               double jump_tol = 0.5) {
    AlphaProbeReport rep;
    rep.samples = samples;
    Vec u = a.normalized();
    Vec w = (b - b.dot(u) * u);
    if (w.norm() < 1e-12)
        throw DomainError("alpha_continuity_probe: path endpoints are collinear");
    w.normalize();
    Vec prev_sel;
    for (int k = 0; k < samples; ++k) {
        const double s = 2.0 * M_PI * k / samples;
        Vec X = std::cos(s) * u + std::sin(s) * w;
        AlphaOperator op = alpha_operator(spec, X);
        // order by |λ| descending
        std::vector<int> idx(op.eigenvalues.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        std::sort(idx.begin(), idx.end(), [&](int p, int q) {
            return std::abs(op.eigenvalues[p]) > std::abs(op.eigenvalues[q]);
        });
        const double gap = idx.size() > 1
                               ? std::abs(std::abs(op.eigenvalues[idx[0]]) -
                                          std::abs(op.eigenvalues[idx[1]]))
                               : 1e300;
        Vec sel = op.eigenvectors.col(idx[0]).normalized();
        rep.min_gap = std::min(rep.min_gap, gap);
        double angle = 0.0;
        if (prev_sel.size()) {
            const double c = std::clamp(std::abs(prev_sel.dot(sel)), 0.0, 1.0);
            angle = std::acos(c);  // eigenvector lines, sign-free
        }
        if (gap < gap_tol) rep.near_crossings.push_back({s, X, gap, angle});
        if (prev_sel.size() && angle > jump_tol)
            rep.selection_jumps.push_back({s, X, gap, angle});
        prev_sel = sel;
    }
    rep.crossings_found = !rep.near_crossings.empty();
    rep.jumps_found = !rep.selection_jumps.empty();
    return rep;
}

/// The rad(K) = m branch of the existence proof: a vector orthogonal to
/// [g,g]_m is a geodesic vector; wrap it and certify through the other two
/// routes. Returns nothing when the branch does not apply or the commutator
/// projection fills m.
inline std::optional<GeodesicVectorCandidate> fixed_branch_candidate(
    const HomogeneousSpaceSpec& spec, const SearchConfig& cfg = {}) {
    if (spec.split.branch != ReductiveDecomposition::Branch::RadicalEqualsM)
        return std::nullopt;
    auto X = commutator_complement_vector(spec.split);
    if (!X) return std::nullopt;
    return certify_direction(spec, *X,
                             GeodesicVectorCandidate::Provenance::CommutatorComplement,
                             cfg);
}

}  // namespace finsler
