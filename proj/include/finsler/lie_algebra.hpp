#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finsler/core.hpp"

namespace finsler {

/// A finite-dimensional real Lie algebra given by structure constants,
/// [e_i, e_j] = c^k_{ij} e_k, stored as c(k,i,j). Antisymmetry and the
/// Jacobi identity are validated at construction.
struct LieAlgebraData {
    int dim = 0;
    Tensor3 c;
    std::vector<std::string> labels;

    Vec bracket(const Vec& u, const Vec& v) const {
        Vec out = Vec::Zero(dim);
        for (int k = 0; k < dim; ++k) {
            double s = 0.0;
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) s += c(k, i, j) * u[i] * v[j];
            out[k] = s;
        }
        return out;
    }

    /// ad(X) as a matrix: ad(X)_kj = c^k_{ij} X^i.
    Mat ad(const Vec& x) const {
        Mat m = Mat::Zero(dim, dim);
        for (int k = 0; k < dim; ++k)
            for (int j = 0; j < dim; ++j) {
                double s = 0.0;
                for (int i = 0; i < dim; ++i) s += c(k, i, j) * x[i];
                m(k, j) = s;
            }
        return m;
    }
};

inline double jacobi_residual(const Tensor3& c) {
    const int n = c.extent();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m)
                        s += c(m, i, j) * c(l, m, k) + c(m, j, k) * c(l, m, i) +
                             c(m, k, i) * c(l, m, j);
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

inline LieAlgebraData make_lie_algebra(Tensor3 c,
                                       std::vector<std::string> labels = {}) {
    const int n = c.extent();
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs(c(k, i, j) + c(k, j, i)) > 1e-12)
                    throw DomainError("structure constants not antisymmetric in (i,j)");
    if (jacobi_residual(c) > 1e-12)
        throw DomainError("structure constants violate the Jacobi identity");
    LieAlgebraData a;
    a.dim = n;
    a.c = std::move(c);
    if (labels.empty())
        for (int i = 0; i < n; ++i) a.labels.push_back("e" + std::to_string(i + 1));
    else
        a.labels = std::move(labels);
    return a;
}

inline LieAlgebraData abelian_algebra(int n) {
    return make_lie_algebra(Tensor3(n));
}

/// Heisenberg algebra h3: [e1,e2] = e3, center spanned by e3.
inline LieAlgebraData heisenberg_algebra() {
    Tensor3 c(3);
    c(2, 0, 1) = 1.0;
    c(2, 1, 0) = -1.0;
    return make_lie_algebra(std::move(c));
}

/// su(2) in the basis with [e_i, e_j] = eps_{ijk} e_k.
inline LieAlgebraData su2_algebra() {
    Tensor3 c(3);
    c(2, 0, 1) = 1.0;
    c(2, 1, 0) = -1.0;
    c(0, 1, 2) = 1.0;
    c(0, 2, 1) = -1.0;
    c(1, 2, 0) = 1.0;
    c(1, 0, 2) = -1.0;
    return make_lie_algebra(std::move(c));
}

/// Algebra of the affine group of the line (half-plane isometries):
/// [e1, e2] = -e1 with e1 the translation and e2 the dilation generator.
inline LieAlgebraData affine_line_algebra() {
    Tensor3 c(2);
    c(0, 0, 1) = -1.0;
    c(0, 1, 0) = 1.0;
    return make_lie_algebra(std::move(c));
}

/// Killing form K(e_i,e_j) = tr(ad e_i ∘ ad e_j) = c^m_{il} c^l_{jm}.
inline Mat killing_form(const LieAlgebraData& a) {
    const int n = a.dim;
    Mat K = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int m = 0; m < n; ++m)
                for (int l = 0; l < n; ++l) s += a.c(m, i, l) * a.c(l, j, m);
            K(i, j) = s;
        }
    return K;
}

/// g = h ⊕ m with m the K-orthogonal complement of h. Records the radical of
/// K and which branch of the two-case analysis applies: rad(K) = m or a
/// proper subset of m.
struct ReductiveDecomposition {
    LieAlgebraData algebra;
    Mat h_basis;    // dim x dim_h, columns
    Mat m_basis;    // dim x dim_m, columns
    Mat killing;    // on the full algebra
    Mat rad_basis;  // columns spanning rad(K)
    enum class Branch { RadicalEqualsM, RadicalProperSubset } branch;

    int dim_m() const { return static_cast<int>(m_basis.cols()); }
    int dim_h() const { return static_cast<int>(h_basis.cols()); }

    /// coordinates of X in the concatenated (m,h) basis; first dim_m entries
    /// are the m-coordinates
    Vec split_coords(const Vec& x) const {
        Mat full(algebra.dim, algebra.dim);
        full.leftCols(dim_m()) = m_basis;
        if (dim_h() > 0) full.rightCols(dim_h()) = h_basis;
        return full.fullPivLu().solve(x);
    }

    /// projection of X onto m along h, in algebra coordinates
    Vec project_m(const Vec& x) const {
        Vec c = split_coords(x);
        return m_basis * c.head(dim_m());
    }

    /// m-coordinates of the projection of X onto m
    Vec m_coords(const Vec& x) const { return split_coords(x).head(dim_m()); }
};

inline ReductiveDecomposition reductive_split(const LieAlgebraData& algebra,
                                              const Mat& h_basis) {
    const int n = algebra.dim;
    const int nh = static_cast<int>(h_basis.cols());
    if (nh > 0 && h_basis.rows() != n)
        throw DomainError("reductive_split: h basis dimension mismatch");
    Mat K = killing_form(algebra);

    if (nh > 0) {
        Mat Kh = h_basis.transpose() * K * h_basis;
        Eigen::JacobiSVD<Mat> svd(Kh);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        if (smax == 0.0 || smin < 1e-10 * smax)
            throw DecompositionError(
                "Killing form degenerate on h; no canonical complement, supply an "
                "explicit m basis");
    }

    // m = K-orthogonal complement of h = kernel of (h' K)
    Mat m_basis;
    if (nh == 0) {
        m_basis = Mat::Identity(n, n);
    } else {
        Mat A = h_basis.transpose() * K;  // nh x n
        Eigen::FullPivLU<Mat> lu(A);
        lu.setThreshold(1e-10);
        m_basis = lu.kernel();
    }
    const int nm = static_cast<int>(m_basis.cols());
    if (nm + nh != n)
        throw DecompositionError("reductive_split: h + m do not span the algebra");
    {
        Mat full(n, n);
        full.leftCols(nm) = m_basis;
        if (nh > 0) full.rightCols(nh) = h_basis;
        Eigen::FullPivLU<Mat> lu(full);
        lu.setThreshold(1e-10);
        if (lu.rank() != n)
            throw DecompositionError("reductive_split: h ∩ m nontrivial");
    }

    ReductiveDecomposition dec;
    dec.algebra = algebra;
    dec.h_basis = h_basis;
    dec.m_basis = m_basis;
    dec.killing = K;

    // infinitesimal Ad(H)-invariance: [h, m] ⊂ m (H connected)
    for (int a = 0; a < nh; ++a)
        for (int b = 0; b < nm; ++b) {
            Vec br = algebra.bracket(h_basis.col(a), m_basis.col(b));
            Vec coords = dec.split_coords(br);
            if (nh > 0 && coords.tail(nh).cwiseAbs().maxCoeff() > 1e-10)
                throw DecompositionError(
                    "reductive_split: [h,m] escapes m; decomposition not reductive");
        }

    // radical of K
    {
        Eigen::JacobiSVD<Mat> svd(K, Eigen::ComputeFullV);
        const double smax = svd.singularValues().size()
                                ? svd.singularValues().maxCoeff()
                                : 0.0;
        int rank = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()[i] > std::max(1e-12, 1e-10 * smax)) ++rank;
        dec.rad_basis = svd.matrixV().rightCols(n - rank);
    }
    const int nrad = static_cast<int>(dec.rad_basis.cols());
    dec.branch = (nrad == nm) ? ReductiveDecomposition::Branch::RadicalEqualsM
                              : ReductiveDecomposition::Branch::RadicalProperSubset;
    return dec;
}

/// For the rad(K) = m branch: a unit vector X in m orthogonal (in the given
/// auxiliary product on m-coordinates) to [g,g]_m; nullopt when the
/// commutator projection already fills m.
inline std::optional<Vec> commutator_complement_vector(
    const ReductiveDecomposition& dec, const Mat& inner = Mat()) {
    const int n = dec.algebra.dim;
    const int nm = dec.dim_m();
    Mat ip = inner.size() ? inner : Mat(Mat::Identity(nm, nm));

    std::vector<Vec> gens;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Vec br = dec.algebra.bracket(Vec(Vec::Unit(n, i)), Vec(Vec::Unit(n, j)));
            if (br.norm() > 0.0) gens.push_back(dec.m_coords(br));
        }
    Mat B(nm, static_cast<int>(gens.size()));
    for (size_t k = 0; k < gens.size(); ++k) B.col(static_cast<int>(k)) = gens[k];

    // X with B' ip X = 0, i.e. ip-orthogonal to the commutator span
    Mat A = gens.empty() ? Mat::Zero(1, nm) : Mat(B.transpose() * ip);
    Eigen::FullPivLU<Mat> lu(A);
    lu.setThreshold(1e-10);
    if (lu.dimensionOfKernel() == 0) return std::nullopt;
    Vec xm = lu.kernel().col(0);
    xm /= std::sqrt(xm.dot(ip * xm));
    for (int i = 0; i < nm; ++i) {
        if (std::abs(xm[i]) > 1e-8) {
            if (xm[i] < 0) xm = -xm;
            break;
        }
    }
    return Vec(dec.m_basis * xm);
}

}  // namespace finsler
