#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "llrk/errors.hpp"

namespace llrk {

using Vector = std::vector<double>;

/// Dense real matrix, row-major storage.
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    DenseMatrix(std::size_t rows, std::size_t cols, std::initializer_list<double> entries)
        : rows_(rows), cols_(cols), data_(entries) {
        if (data_.size() != rows * cols)
            throw Error("DenseMatrix: initializer size does not match dimensions");
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix diagonal(std::span<const double> d) {
        DenseMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    bool finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// Infinity norm (max absolute row sum).
    double norm_inf() const {
        double best = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
            best = std::max(best, s);
        }
        return best;
    }

    double max_abs() const {
        double best = 0.0;
        for (double v : data_) best = std::max(best, std::abs(v));
        return best;
    }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }

    DenseMatrix& operator-=(const DenseMatrix& o) {
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }

    DenseMatrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
    friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
    friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        DenseMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Vector operator*(const DenseMatrix& a, const Vector& x) {
        Vector y(a.rows_, 0.0);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double norm_inf(std::span<const double> v) {
    double best = 0.0;
    for (double x : v) best = std::max(best, std::abs(x));
    return best;
}

inline bool finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// LU factorization with partial pivoting of a square matrix.
class LuFactor {
public:
    explicit LuFactor(DenseMatrix a, double pivot_tol_rel = 1e-14) : lu_(std::move(a)) {
        if (!lu_.square()) throw Error("LuFactor: matrix must be square");
        const std::size_t n = lu_.rows();
        piv_.resize(n);
        const double scale = lu_.norm_inf();
        const double tol = pivot_tol_rel * std::max(scale, 1e-300);
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
            piv_[k] = p;
            if (p != k)
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            const double pivot = lu_(k, k);
            if (std::abs(pivot) <= tol)
                throw SingularMatrix("LU pivot below tolerance at column " + std::to_string(k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const double f = lu_(i, k) / pivot;
                lu_(i, k) = f;
                if (f == 0.0) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    /// Cheap reciprocal-condition estimate from the U diagonal.
    double rcond_estimate() const {
        const std::size_t n = lu_.rows();
        double dmin = std::abs(lu_(0, 0)), dmax = dmin;
        for (std::size_t i = 1; i < n; ++i) {
            const double d = std::abs(lu_(i, i));
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        return dmax == 0.0 ? 0.0 : dmin / dmax;
    }

    void solve_in_place(Vector& b) const {
        const std::size_t n = lu_.rows();
        for (std::size_t k = 0; k < n; ++k) {
            std::swap(b[k], b[piv_[k]]);
            for (std::size_t i = k + 1; i < n; ++i) b[i] -= lu_(i, k) * b[k];
        }
        for (std::size_t k = n; k-- > 0;) {
            for (std::size_t j = k + 1; j < n; ++j) b[k] -= lu_(k, j) * b[j];
            b[k] /= lu_(k, k);
        }
    }

    Vector solve(Vector b) const {
        solve_in_place(b);
        return b;
    }

    DenseMatrix solve(const DenseMatrix& b) const {
        const std::size_t n = lu_.rows();
        DenseMatrix x = b;
        Vector col(n);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            for (std::size_t i = 0; i < n; ++i) col[i] = x(i, j);
            solve_in_place(col);
            for (std::size_t i = 0; i < n; ++i) x(i, j) = col[i];
        }
        return x;
    }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> piv_;
};

/// Solves a X = b for square a; throws SingularMatrix on a pivot
/// below tolerance.
inline DenseMatrix solve_linear(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.square()) throw Error("solve_linear: coefficient matrix must be square");
    if (a.rows() != b.rows()) throw Error("solve_linear: row count mismatch");
    return LuFactor(a).solve(b);
}

inline Vector solve_linear(const DenseMatrix& a, const Vector& b) {
    if (!a.square()) throw Error("solve_linear: coefficient matrix must be square");
    if (a.rows() != b.size()) throw Error("solve_linear: row count mismatch");
    return LuFactor(a).solve(b);
}

} // namespace llrk
