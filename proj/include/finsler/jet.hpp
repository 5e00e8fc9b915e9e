#pragma once

#include <cassert>
#include <cmath>
#include <span>
#include <vector>

#include "finsler/core.hpp"

namespace finsler {

/// Truncated multivariate Taylor expansion: value, gradient, symmetric
/// Hessian and symmetric third-order array, up to order 3 in `nvars`
/// variables. All arithmetic propagates the coefficients exactly, so a
/// Jet built from variables and pushed through a smooth expression holds
/// the exact derivatives of that expression at the base point.
class Jet {
public:
    Jet() : order_(0), nvars_(0), val_(0.0) {}

    static Jet constant(double v, int nvars, int order) {
        Jet j;
        j.alloc(nvars, order);
        j.val_ = v;
        return j;
    }

    static Jet variable(double v, int index, int nvars, int order) {
        assert(index >= 0 && index < nvars);
        Jet j = constant(v, nvars, order);
        if (order >= 1) j.grad_[index] = 1.0;
        return j;
    }

    int order() const { return order_; }
    int nvars() const { return nvars_; }
    double value() const { return val_; }

    double d(int i) const {
        assert(order_ >= 1);
        return grad_[i];
    }
    double d(int i, int j) const {
        assert(order_ >= 2);
        return hess_[static_cast<size_t>(i) * nvars_ + j];
    }
    double d(int i, int j, int k) const {
        assert(order_ >= 3);
        return third_[(static_cast<size_t>(i) * nvars_ + j) * nvars_ + k];
    }

    // ---- additive group ----

    Jet& operator+=(const Jet& o) {
        assert(same_shape(o));
        val_ += o.val_;
        for (size_t i = 0; i < grad_.size(); ++i) grad_[i] += o.grad_[i];
        for (size_t i = 0; i < hess_.size(); ++i) hess_[i] += o.hess_[i];
        for (size_t i = 0; i < third_.size(); ++i) third_[i] += o.third_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        assert(same_shape(o));
        val_ -= o.val_;
        for (size_t i = 0; i < grad_.size(); ++i) grad_[i] -= o.grad_[i];
        for (size_t i = 0; i < hess_.size(); ++i) hess_[i] -= o.hess_[i];
        for (size_t i = 0; i < third_.size(); ++i) third_[i] -= o.third_[i];
        return *this;
    }
    Jet& operator+=(double s) {
        val_ += s;
        return *this;
    }
    Jet& operator-=(double s) {
        val_ -= s;
        return *this;
    }
    Jet& operator*=(double s) {
        val_ *= s;
        for (double& v : grad_) v *= s;
        for (double& v : hess_) v *= s;
        for (double& v : third_) v *= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a -= s; }
    friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }

    friend Jet operator-(const Jet& a) {
        Jet r = a;
        r.val_ = -r.val_;
        for (double& v : r.grad_) v = -v;
        for (double& v : r.hess_) v = -v;
        for (double& v : r.third_) v = -v;
        return r;
    }

    // Leibniz rule through third order.
    friend Jet operator*(const Jet& a, const Jet& b) {
        assert(a.same_shape(b));
        const int n = a.nvars_;
        Jet r = constant(a.val_ * b.val_, n, a.order_);
        if (a.order_ >= 1) {
            for (int i = 0; i < n; ++i)
                r.grad_[i] = a.grad_[i] * b.val_ + a.val_ * b.grad_[i];
        }
        // Canonical i <= j <= k entries are mirrored to every permutation so
        // the symmetry of the coefficient arrays is exact, not roundoff-level.
        if (a.order_ >= 2) {
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    const double v = a.hess_[idx2(i, j, n)] * b.val_ +
                                     a.grad_[i] * b.grad_[j] +
                                     a.grad_[j] * b.grad_[i] +
                                     a.val_ * b.hess_[idx2(i, j, n)];
                    r.hess_[idx2(i, j, n)] = v;
                    r.hess_[idx2(j, i, n)] = v;
                }
        }
        if (a.order_ >= 3) {
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j)
                    for (int k = j; k < n; ++k) {
                        const double v =
                            a.third_[idx3(i, j, k, n)] * b.val_ +
                            a.hess_[idx2(i, j, n)] * b.grad_[k] +
                            a.hess_[idx2(i, k, n)] * b.grad_[j] +
                            a.hess_[idx2(j, k, n)] * b.grad_[i] +
                            a.grad_[i] * b.hess_[idx2(j, k, n)] +
                            a.grad_[j] * b.hess_[idx2(i, k, n)] +
                            a.grad_[k] * b.hess_[idx2(i, j, n)] +
                            a.val_ * b.third_[idx3(i, j, k, n)];
                        r.set_sym3(i, j, k, v);
                    }
        }
        return r;
    }

    /// Univariate chain rule (Faa di Bruno to order 3): returns f(u) given
    /// the derivatives f(u0), f'(u0), f''(u0), f'''(u0) at u0 = u.value().
    friend Jet compose(const Jet& u, double f0, double f1, double f2, double f3) {
        const int n = u.nvars_;
        Jet r = constant(f0, n, u.order_);
        if (u.order_ >= 1) {
            for (int i = 0; i < n; ++i) r.grad_[i] = f1 * u.grad_[i];
        }
        if (u.order_ >= 2) {
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    const double v =
                        f2 * u.grad_[i] * u.grad_[j] + f1 * u.hess_[idx2(i, j, n)];
                    r.hess_[idx2(i, j, n)] = v;
                    r.hess_[idx2(j, i, n)] = v;
                }
        }
        if (u.order_ >= 3) {
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j)
                    for (int k = j; k < n; ++k) {
                        const double v =
                            f3 * u.grad_[i] * u.grad_[j] * u.grad_[k] +
                            f2 * (u.hess_[idx2(i, j, n)] * u.grad_[k] +
                                  u.hess_[idx2(i, k, n)] * u.grad_[j] +
                                  u.hess_[idx2(j, k, n)] * u.grad_[i]) +
                            f1 * u.third_[idx3(i, j, k, n)];
                        r.set_sym3(i, j, k, v);
                    }
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        if (b.val_ == 0.0) throw DomainError("jet division by zero value");
        const double inv = 1.0 / b.val_;
        return a * compose(b, inv, -inv * inv, 2.0 * inv * inv * inv,
                           -6.0 * inv * inv * inv * inv);
    }
    friend Jet operator/(double s, const Jet& b) {
        if (b.val_ == 0.0) throw DomainError("jet division by zero value");
        const double inv = 1.0 / b.val_;
        return compose(b, s * inv, -s * inv * inv, 2.0 * s * inv * inv * inv,
                       -6.0 * s * inv * inv * inv * inv);
    }

    friend Jet sqrt(const Jet& u) {
        if (u.val_ <= 0.0)
            throw DomainError("jet sqrt at non-positive value (non-smooth point)");
        const double s = std::sqrt(u.val_);
        const double i1 = 0.5 / s;
        const double i2 = -0.25 / (s * u.val_);
        const double i3 = 0.375 / (s * u.val_ * u.val_);
        return compose(u, s, i1, i2, i3);
    }

    friend Jet exp(const Jet& u) {
        const double e = std::exp(u.val_);
        return compose(u, e, e, e, e);
    }

    friend Jet log(const Jet& u) {
        if (u.val_ <= 0.0) throw DomainError("jet log at non-positive value");
        const double inv = 1.0 / u.val_;
        return compose(u, std::log(u.val_), inv, -inv * inv, 2.0 * inv * inv * inv);
    }

    friend Jet pow(const Jet& u, double p) {
        if (u.val_ <= 0.0) throw DomainError("jet pow at non-positive base");
        const double v = std::pow(u.val_, p);
        return compose(u, v, p * v / u.val_, p * (p - 1.0) * v / (u.val_ * u.val_),
                       p * (p - 1.0) * (p - 2.0) * v / (u.val_ * u.val_ * u.val_));
    }

    friend Jet sin(const Jet& u) {
        const double s = std::sin(u.val_), c = std::cos(u.val_);
        return compose(u, s, c, -s, -c);
    }
    friend Jet cos(const Jet& u) {
        const double s = std::sin(u.val_), c = std::cos(u.val_);
        return compose(u, c, -s, -c, s);
    }

private:
    static size_t idx2(int i, int j, int n) { return static_cast<size_t>(i) * n + j; }
    static size_t idx3(int i, int j, int k, int n) {
        return (static_cast<size_t>(i) * n + j) * n + k;
    }

    void set_sym3(int i, int j, int k, double v) {
        const int n = nvars_;
        third_[idx3(i, j, k, n)] = v;
        third_[idx3(i, k, j, n)] = v;
        third_[idx3(j, i, k, n)] = v;
        third_[idx3(j, k, i, n)] = v;
        third_[idx3(k, i, j, n)] = v;
        third_[idx3(k, j, i, n)] = v;
    }

    void alloc(int nvars, int order) {
        assert(order >= 0 && order <= 3 && nvars >= 0);
        order_ = order;
        nvars_ = nvars;
        if (order >= 1) grad_.assign(nvars, 0.0);
        if (order >= 2) hess_.assign(static_cast<size_t>(nvars) * nvars, 0.0);
        if (order >= 3) third_.assign(static_cast<size_t>(nvars) * nvars * nvars, 0.0);
    }

    bool same_shape(const Jet& o) const {
        return order_ == o.order_ && nvars_ == o.nvars_;
    }

    int order_;
    int nvars_;
    double val_;
    std::vector<double> grad_;
    std::vector<double> hess_;   // row-major nvars x nvars, symmetric
    std::vector<double> third_;  // nvars^3, totally symmetric
};

/// Seed the coordinates of `point` as jet variables of the given order.
inline std::vector<Jet> jet_variables(std::span<const double> point, int order) {
    const int n = static_cast<int>(point.size());
    std::vector<Jet> v;
    v.reserve(n);
    for (int i = 0; i < n; ++i) v.push_back(Jet::variable(point[i], i, n, order));
    return v;
}

/// Taylor coefficients of f at `point` up to `order` in {1,2,3}.
/// f is any callable mapping a span of jets to a jet.
template <class F>
Jet jet_lift(F&& f, std::span<const double> point, int order) {
    if (order < 1 || order > 3)
        throw DomainError("jet_lift: order must be 1, 2 or 3");
    const std::vector<Jet> vars = jet_variables(point, order);
    return std::forward<F>(f)(std::span<const Jet>(vars));
}

namespace detail {

template <class F>
double fd_nested(F& f, std::vector<double>& x, std::span<const int> mi,
                 size_t from, double h) {
    if (from == mi.size()) return f(std::span<const double>(x));
    const int i = mi[from];
    x[i] += h;
    const double fp = fd_nested(f, x, mi, from + 1, h);
    x[i] -= 2.0 * h;
    const double fm = fd_nested(f, x, mi, from + 1, h);
    x[i] += h;
    return (fp - fm) / (2.0 * h);
}

}  // namespace detail

/// Central finite-difference estimate of the mixed partial derivative of f
/// named by `multi_index` (one entry per differentiation, total order <= 3),
/// with one level of Richardson extrapolation; truncation error O(step^4).
///
/// The default step suits first and second derivatives. Third derivatives
/// divide by step^3 and want a coarser step (~5e-3) to stay above the
/// double-precision roundoff floor.
template <class F>
double fd_derivative(F&& f, std::span<const double> point,
                     std::span<const int> multi_index, double step = 1e-4) {
    if (multi_index.empty() || multi_index.size() > 3)
        throw DomainError("fd_derivative: derivative order must be 1..3");
    if (!(step > 0.0)) throw NumericsError("fd_derivative: step must be positive");
    for (int i : multi_index) {
        if (i < 0 || i >= static_cast<int>(point.size()))
            throw DomainError("fd_derivative: variable index out of range");
        if (point[i] + 0.5 * step == point[i])
            throw NumericsError("fd_derivative: step underflow at the base point");
    }
    std::vector<double> x(point.begin(), point.end());
    const double coarse = detail::fd_nested(f, x, multi_index, 0, step);
    const double fine = detail::fd_nested(f, x, multi_index, 0, 0.5 * step);
    // Both estimates have error c*h^2 + O(h^4); eliminate the h^2 term.
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace finsler
