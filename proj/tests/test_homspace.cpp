#include "finsler/homspace.hpp"

#include <gtest/gtest.h>

#include <random>

#include "finsler/tolerances.hpp"

using namespace finsler;

namespace {

const Tolerances tols;

MinkowskiNorm randers3(double b3) {
    return MinkowskiNorm::randers(Mat::Identity(3, 3),
                                  (Vec(3) << 0.0, 0.0, b3).finished());
}

std::vector<HomogeneousSpaceSpec> zoo() {
    std::vector<HomogeneousSpaceSpec> spaces;
    spaces.push_back(flat_space(MinkowskiNorm::riemannian(Mat::Identity(2, 2))));
    spaces.push_back(flat_space(MinkowskiNorm::randers(
        Mat::Identity(3, 3), (Vec(3) << 0.2, 0.0, -0.1).finished())));
    spaces.push_back(heisenberg_space(MinkowskiNorm::riemannian(Mat::Identity(3, 3))));
    spaces.push_back(heisenberg_space(randers3(0.3)));
    spaces.push_back(su2_space(MinkowskiNorm::riemannian(Mat::Identity(3, 3))));
    spaces.push_back(su2_space(randers3(0.3)));
    spaces.push_back(half_plane_space(MinkowskiNorm::riemannian(Mat::Identity(2, 2))));
    return spaces;
}

// apply exp(tX) to an arbitrary chart point (scalar evaluation)
Vec apply_action(const HomogeneousSpaceSpec& s, const Vec& X, double t, const Vec& q) {
    auto qj = detail::constant_jets(detail::as_span(q), 0, 0);
    std::vector<Jet> out = s.action(X, t, qj);
    Vec r(s.dim);
    for (int i = 0; i < s.dim; ++i) r[i] = out[i].value();
    return r;
}

Vec random_unit(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss(0, 1);
    Vec v(n);
    do {
        for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    } while (v.norm() < 1e-6);
    return v.normalized();
}

}  // namespace

TEST(HomSpace, KillingFramesAreInvertibleAtOrigin) {
    for (const auto& s : zoo()) {
        Mat B = killing_frame(s);
        EXPECT_GT(std::abs(B.determinant()), 1e-6) << s.name;
    }
}

TEST(HomSpace, InvariantNormInBasisCoordinatesIsTheInputNorm) {
    std::mt19937_64 rng(7);
    for (const auto& s : zoo()) {
        Mat B = killing_frame(s);
        for (int k = 0; k < 10; ++k) {
            Vec x = random_unit(rng, s.dim);
            const double lhs = chart_norm(s.chart, s.origin, B * x);
            const double rhs = s.norm.value(detail::as_span(x));
            EXPECT_NEAR(lhs, rhs, 1e-12) << s.name;
        }
    }
}

TEST(HomSpace, BracketClosureAgainstStructureConstants) {
    for (const auto& s : zoo())
        EXPECT_LE(bracket_closure_residual(s, 8, 17), tols.structural) << s.name;
}

TEST(HomSpace, KillingFieldsMatchOrbitDerivatives) {
    // K_X(q) = d/dt exp(tX)(q) |_{t=0}, finite differences in t as oracle
    std::mt19937_64 rng(19);
    for (const auto& s : zoo()) {
        ChartSampler sampler(s.chart, 23);
        for (int k = 0; k < 6; ++k) {
            Vec q = sampler.sample().first;
            Vec X = random_unit(rng, s.dim);
            VectorField xs = killing_combination(s, X);
            const double h = 1e-5;
            Vec fd = (apply_action(s, X, h, q) - apply_action(s, X, -h, q)) / (2.0 * h);
            EXPECT_LE((xs.value(q) - fd).cwiseAbs().maxCoeff(), 1e-9) << s.name;
        }
    }
}

TEST(HomSpace, OrbitOfZeroIsConstant) {
    auto s = heisenberg_space(MinkowskiNorm::riemannian(Mat::Identity(3, 3)));
    for (double t : {-1.0, 0.0, 2.5})
        EXPECT_EQ((orbit_curve(s, Vec::Zero(3), t) - s.origin).norm(), 0.0);
}

TEST(HomSpace, FlatOrbitsAreLines) {
    auto s = flat_space(MinkowskiNorm::riemannian(Mat::Identity(3, 3)));
    Vec X(3);
    X << 0.5, -1.0, 2.0;
    for (double t : {-0.3, 0.7, 1.9})
        EXPECT_LE((orbit_curve(s, X, t) - t * X).norm(), 1e-15);
}

TEST(HomSpace, HeisenbergOrbitMatchesMatrixExponential) {
    auto s = heisenberg_space(MinkowskiNorm::riemannian(Mat::Identity(3, 3)));
    Vec X(3);
    X << 1.0, 1.0, 0.0;  // e1 + e2
    for (double t : {0.25, 1.0, 2.0}) {
        // exp of the strictly upper triangular matrix (nilpotent, exact):
        // exp(tM) = I + tM + t²M²/2 with M e12 = α, M e23 = β, M e13 = γ
        Mat M = Mat::Zero(3, 3);
        M(0, 1) = X[0];
        M(1, 2) = X[1];
        M(0, 2) = X[2];
        Mat E = Mat::Identity(3, 3) + t * M + 0.5 * t * t * (M * M);
        Vec expected(3);
        expected << E(0, 1), E(1, 2), E(0, 2);  // group coordinates (a, b, c)
        EXPECT_LE((orbit_curve(s, X, t) - expected).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(HomSpace, HalfPlaneOrbitClosedForm) {
    auto s = half_plane_space(MinkowskiNorm::riemannian(Mat::Identity(2, 2)));
    Vec X(2);
    X << 0.7, -0.4;
    for (double t : {0.5, 1.5}) {
        Vec q = orbit_curve(s, X, t);
        const double a = std::exp(X[1] * t);
        EXPECT_NEAR(q[0], X[0] / X[1] * (a - 1.0), 1e-13);
        EXPECT_NEAR(q[1], a, 1e-13);
    }
}

TEST(HomSpace, OrbitGroupLaw) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> tdist(-1.0, 1.0);
    for (const auto& s : zoo()) {
        for (int k = 0; k < 50; ++k) {
            Vec X = random_unit(rng, s.dim);
            const double t = tdist(rng), u = tdist(rng);
            Vec lhs = orbit_curve(s, X, t + u);
            Vec rhs = apply_action(s, X, t, orbit_curve(s, X, u));
            EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10) << s.name;
        }
    }
}

TEST(HomSpace, Su2RoundMetricClosedForm) {
    // bi-invariant metric in the stereographic chart: g = 16 I / (1+|u|²)²
    auto s = su2_space(MinkowskiNorm::riemannian(Mat::Identity(3, 3)));
    std::mt19937_64 rng(31);
    for (int k = 0; k < 8; ++k) {
        Vec u = 0.4 * random_unit(rng, 3);
        Vec y = random_unit(rng, 3);
        Mat g = chart_metric(s.chart, u, y);
        const double c = 16.0 / std::pow(1.0 + u.squaredNorm(), 2);
        EXPECT_LE((g - c * Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(HomSpace, Su2OrbitHitsChartAntipode) {
    auto s = su2_space(MinkowskiNorm::riemannian(Mat::Identity(3, 3)));
    Vec X = Vec::Unit(3, 0);
    EXPECT_NO_THROW(orbit_curve(s, X, 2.0));
    EXPECT_THROW(orbit_curve(s, X, 2.0 * M_PI), ChartExitError);
    try {
        orbit_curve(s, X, 2.0 * M_PI);
    } catch (const ChartExitError& e) {
        EXPECT_NEAR(e.escape_time, 2.0 * M_PI, 1e-12);
    }
}

TEST(HomSpace, IdentityIsometryHasZeroResidual) {
    auto s = heisenberg_space(randers3(0.3));
    Vec X = Vec::Unit(3, 2);
    InvarianceReport r = isometry_invariance(s, X, 10, 0.0, 3);
    EXPECT_EQ(r.norm_residual, 0.0);
    EXPECT_EQ(r.metric_residual, 0.0);
}

TEST(HomSpace, TranslationsPreserveFlatNorms) {
    auto s = flat_space(MinkowskiNorm::randers(
        Mat::Identity(3, 3), (Vec(3) << 0.2, 0.0, -0.1).finished()));
    std::mt19937_64 rng(37);
    for (int k = 0; k < 5; ++k) {
        InvarianceReport r = isometry_invariance(s, random_unit(rng, 3), 20, 2.0, 41 + k);
        EXPECT_LE(r.norm_residual, 1e-12);
        EXPECT_LE(r.metric_residual, 1e-12);
    }
}

TEST(HomSpace, ZooActionsAreIsometries) {
    std::mt19937_64 rng(43);
    for (const auto& s : zoo()) {
        for (int k = 0; k < 5; ++k) {
            Vec X = random_unit(rng, s.dim);
            InvarianceReport r = isometry_invariance(s, X, 20, 2.0, 47 + k);
            EXPECT_LE(r.norm_residual, tols.structural) << s.name;
            EXPECT_LE(r.metric_residual, tols.structural) << s.name;
        }
    }
}

TEST(HomSpace, HeisenbergPushforwardClosedForm) {
    auto s = heisenberg_space(MinkowskiNorm::riemannian(Mat::Identity(3, 3)));
    Vec X(3), V(3);
    X << 2.0, 0.0, 0.0;
    V << 0.3, 0.5, -0.2;
    const double t = 0.7;
    // dL_{exp(tX)}: (V1, V2, V3 + tα V2)
    Vec expected(3);
    expected << V[0], V[1], V[2] + t * X[0] * V[1];
    EXPECT_LE((isometry_pushforward(s, X, t, V) - expected).cwiseAbs().maxCoeff(),
              1e-13);
}
