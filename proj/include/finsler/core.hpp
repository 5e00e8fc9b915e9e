#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace finsler {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Input outside the smooth domain of an operation (y = 0, isotropy direction, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A tensor that should be positive definite / nonsingular is not.
struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Floating-point breakdown: step underflow, accuracy budget exceeded.
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested reductive decomposition does not exist for the given data.
struct DecompositionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A curve left the coordinate chart; carries the escape time.
struct ChartExitError : std::runtime_error {
    double escape_time;
    ChartExitError(const std::string& what, double t)
        : std::runtime_error(what), escape_time(t) {}
};

/// Dense rank-3 array of fixed extent n in each slot.
class Tensor3 {
public:
    Tensor3() : n_(0) {}
    explicit Tensor3(int n) : n_(n), a_(static_cast<size_t>(n) * n * n, 0.0) {}

    int extent() const { return n_; }
    double& operator()(int i, int j, int k) { return a_[idx(i, j, k)]; }
    double operator()(int i, int j, int k) const { return a_[idx(i, j, k)]; }

    void set_zero() { std::fill(a_.begin(), a_.end(), 0.0); }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    Tensor3& operator+=(const Tensor3& o) {
        for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Tensor3& operator-=(const Tensor3& o) {
        for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Tensor3& operator*=(double s) {
        for (double& v : a_) v *= s;
        return *this;
    }
    friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
    friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }

private:
    size_t idx(int i, int j, int k) const {
        return (static_cast<size_t>(i) * n_ + j) * n_ + k;
    }
    int n_;
    std::vector<double> a_;
};

}  // namespace finsler
