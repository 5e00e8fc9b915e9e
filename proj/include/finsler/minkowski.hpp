#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>

#include "finsler/core.hpp"
#include "finsler/jet.hpp"

namespace finsler {

using JetNormFn = std::function<Jet(std::span<const Jet>)>;
using SmoothPredicate = std::function<bool(std::span<const double>)>;

/// A Minkowski norm on R^n: positive away from 0, positively 1-homogeneous,
/// with positive definite fundamental tensor. Riemannian and Randers kinds
/// carry their defining data (A, b); custom kinds carry an evaluator on jets
/// plus a smoothness-domain predicate.
class MinkowskiNorm {
public:
    enum class Kind { Riemannian, Randers, Custom };

    static MinkowskiNorm riemannian(Mat A) {
        check_spd(A, "riemannian norm matrix A");
        MinkowskiNorm n;
        n.kind_ = Kind::Riemannian;
        n.dim_ = static_cast<int>(A.rows());
        n.A_ = std::move(A);
        return n;
    }

    static MinkowskiNorm randers(Mat A, Vec b) {
        check_spd(A, "randers norm matrix A");
        if (b.size() != A.rows())
            throw DomainError("randers norm: b dimension mismatch");
        // strong convexity of F = sqrt(y'Ay) + b'y requires |b|_{A^{-1}} < 1
        const double bb = b.dot(A.ldlt().solve(b));
        if (!(bb < 1.0))
            throw MetricError("randers norm: b'A^{-1}b = " + std::to_string(bb) +
                              " >= 1, norm not strongly convex");
        MinkowskiNorm n;
        n.kind_ = Kind::Randers;
        n.dim_ = static_cast<int>(A.rows());
        n.A_ = std::move(A);
        n.b_ = std::move(b);
        return n;
    }

    static MinkowskiNorm custom(int dim, std::string label, JetNormFn norm,
                                SmoothPredicate smooth = {}) {
        MinkowskiNorm n;
        n.kind_ = Kind::Custom;
        n.dim_ = dim;
        n.label_ = std::move(label);
        n.custom_norm_ = std::move(norm);
        n.smooth_ = std::move(smooth);
        return n;
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Mat& matrix() const { return A_; }
    const Vec& drift() const { return b_; }
    const std::string& label() const { return label_; }
    bool reversible() const {
        return kind_ == Kind::Riemannian ||
               (kind_ == Kind::Randers && b_.norm() == 0.0) ||
               (kind_ == Kind::Custom && custom_reversible_);
    }
    void declare_reversible(bool r) { custom_reversible_ = r; }

    bool smooth_at(std::span<const double> y) const {
        double n2 = 0.0;
        for (double v : y) n2 += v * v;
        if (n2 == 0.0) return false;
        return smooth_ ? smooth_(y) : true;
    }

    /// F on jets. For Riemannian/Randers kinds the quadratic part is lifted
    /// as a polynomial, so Riemannian tensors come out exact.
    Jet norm_jet(std::span<const Jet> y) const {
        switch (kind_) {
            case Kind::Riemannian:
                return sqrt(quadratic_form(y));
            case Kind::Randers:
                return sqrt(quadratic_form(y)) + drift_form(y);
            case Kind::Custom:
                return custom_norm_(y);
        }
        throw std::logic_error("unreachable");
    }

    /// ½F² on jets; the object whose y-Hessian and third derivative give the
    /// fundamental and Cartan tensors. Riemannian: exactly ½ y'Ay.
    Jet energy_jet(std::span<const Jet> y) const {
        if (kind_ == Kind::Riemannian) return 0.5 * quadratic_form(y);
        Jet f = norm_jet(y);
        return 0.5 * f * f;
    }

    double value(std::span<const double> y) const {
        std::vector<Jet> c;
        c.reserve(y.size());
        for (double v : y) c.push_back(Jet::constant(v, 0, 0));
        return norm_jet(c).value();
    }

private:
    static void check_spd(const Mat& A, const std::string& what) {
        if (A.rows() != A.cols()) throw DomainError(what + ": not square");
        if (!A.isApprox(A.transpose(), 1e-12))
            throw MetricError(what + ": not symmetric");
        Eigen::LLT<Mat> llt(A);
        if (llt.info() != Eigen::Success)
            throw MetricError(what + ": not positive definite");
    }

    Jet quadratic_form(std::span<const Jet> y) const {
        Jet q = Jet::constant(0.0, y[0].nvars(), y[0].order());
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                if (A_(i, j) != 0.0) q += A_(i, j) * (y[i] * y[j]);
        return q;
    }

    Jet drift_form(std::span<const Jet> y) const {
        Jet s = Jet::constant(0.0, y[0].nvars(), y[0].order());
        for (int i = 0; i < dim_; ++i)
            if (b_[i] != 0.0) s += b_[i] * y[i];
        return s;
    }

    Kind kind_ = Kind::Riemannian;
    int dim_ = 0;
    Mat A_;
    Vec b_;
    std::string label_;
    JetNormFn custom_norm_;
    SmoothPredicate smooth_;
    bool custom_reversible_ = false;
};

/// Reversible, strongly convex, non-quadratic norm:
/// F(y)^2 = |y|^2 + eps * (sum_i y_i^4) / |y|^2, for moderate eps.
inline MinkowskiNorm perturbed_quartic_norm(int dim, double eps = 0.2) {
    auto f = [dim, eps](std::span<const Jet> y) {
        Jet r2 = Jet::constant(0.0, y[0].nvars(), y[0].order());
        Jet q4 = r2;
        for (int i = 0; i < dim; ++i) {
            Jet s = y[i] * y[i];
            r2 += s;
            q4 += s * s;
        }
        return sqrt(r2 + eps * (q4 / r2));
    };
    MinkowskiNorm n = MinkowskiNorm::custom(dim, "perturbed-quartic", f);
    n.declare_reversible(true);
    return n;
}

struct FundamentalTensor {
    Vec base_direction;
    Mat g;  // symmetric positive definite
};

struct CartanTensor {
    Vec base_direction;
    Tensor3 C;  // totally symmetric
};

struct EulerReport {
    double norm_value;                  // F(y)
    double metric_identity_residual;    // |g_y(y,y) - F(y)^2|
    double cartan_contraction_residual; // max_{j,k} |y^i C_{ijk}|
};

namespace detail {

inline void require_smooth_direction(const MinkowskiNorm& norm, const Vec& y,
                                     const char* op) {
    if (y.size() != norm.dim())
        throw DomainError(std::string(op) + ": dimension mismatch");
    if (y.norm() == 0.0)
        throw DomainError(std::string(op) +
                          ": y = 0 is outside the smooth domain of a Minkowski norm");
    if (!norm.smooth_at(std::span<const double>(y.data(), y.size())))
        throw DomainError(std::string(op) + ": y outside the declared smooth domain");
}

inline std::string vec_to_string(const Vec& y) {
    std::string s = "(";
    for (int i = 0; i < y.size(); ++i)
        s += (i ? ", " : "") + std::to_string(y[i]);
    return s + ")";
}

}  // namespace detail

/// g_{ij}(y), the y-Hessian of ½F² at y.
inline FundamentalTensor fundamental_tensor(const MinkowskiNorm& norm, const Vec& y) {
    detail::require_smooth_direction(norm, y, "fundamental_tensor");
    const int n = norm.dim();
    Jet e = jet_lift([&](std::span<const Jet> yj) { return norm.energy_jet(yj); },
                     std::span<const double>(y.data(), y.size()), 2);
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = e.d(i, j);
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
        throw MetricError("fundamental tensor not positive definite at y = " +
                          detail::vec_to_string(y));
    return {y, std::move(g)};
}

/// C_{ijk}(y) = (¼F²)_{y^i y^j y^k} = ½ (½F²)_{y^i y^j y^k}.
inline CartanTensor cartan_tensor(const MinkowskiNorm& norm, const Vec& y) {
    detail::require_smooth_direction(norm, y, "cartan_tensor");
    const int n = norm.dim();
    Jet e = jet_lift([&](std::span<const Jet> yj) { return norm.energy_jet(yj); },
                     std::span<const double>(y.data(), y.size()), 3);
    CartanTensor c{y, Tensor3(n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) c.C(i, j, k) = 0.5 * e.d(i, j, k);
    return c;
}

/// Euler homogeneity identities: g_y(y,y) = F(y)² and y^i C_{ijk} = 0.
inline EulerReport euler_check(const MinkowskiNorm& norm, const Vec& y) {
    FundamentalTensor g = fundamental_tensor(norm, y);
    CartanTensor c = cartan_tensor(norm, y);
    const double F = norm.value(std::span<const double>(y.data(), y.size()));
    const int n = norm.dim();
    double contraction = 0.0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += y[i] * c.C(i, j, k);
            contraction = std::max(contraction, std::abs(s));
        }
    return {F, std::abs(y.dot(g.g * y) - F * F), contraction};
}

struct NormValidityReport {
    double min_value_on_sphere;     // min F over sampled unit y (want > 0)
    double homogeneity_residual;    // max |F(lambda y) - lambda F(y)|
    double min_hessian_eigenvalue;  // over sampled y
};

/// Sampled check of the Minkowski norm axioms; used to vet custom norms.
inline NormValidityReport check_norm_validity(const MinkowskiNorm& norm,
                                              int samples = 50,
                                              uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> lam(0.1, 10.0);
    const int n = norm.dim();
    NormValidityReport r{1e300, 0.0, 1e300};
    for (int s = 0; s < samples; ++s) {
        Vec y(n);
        do {
            for (int i = 0; i < n; ++i) y[i] = gauss(rng);
        } while (y.norm() < 1e-8);
        y /= y.norm();
        if (!norm.smooth_at(std::span<const double>(y.data(), y.size()))) continue;
        const double f = norm.value(std::span<const double>(y.data(), y.size()));
        r.min_value_on_sphere = std::min(r.min_value_on_sphere, f);
        const double l = lam(rng);
        Vec ly = l * y;
        r.homogeneity_residual =
            std::max(r.homogeneity_residual,
                     std::abs(norm.value(std::span<const double>(ly.data(), ly.size())) -
                              l * f));
        Mat g = fundamental_tensor(norm, y).g;
        Eigen::SelfAdjointEigenSolver<Mat> eig(g);
        r.min_hessian_eigenvalue =
            std::min(r.min_hessian_eigenvalue, eig.eigenvalues().minCoeff());
    }
    return r;
}

}  // namespace finsler
