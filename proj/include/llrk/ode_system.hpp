#pragma once

#include <functional>
#include <string>
#include <utility>

#include "llrk/matrix.hpp"

namespace llrk {

/// An ODE x' = f(t,x) with optional analytic Jacobian and time derivative.
/// Evaluation callbacks must be pure and re-entrant.
struct OdeSystem {
    using Field = std::function<void(double, std::span<const double>, std::span<double>)>;
    using Jacobian = std::function<void(double, std::span<const double>, DenseMatrix&)>;

    std::size_t dim = 0;
    Field field;
    Jacobian jacobian;      // absent -> finite differences
    Field time_derivative;  // absent -> finite differences (zero if autonomous)
    bool autonomous = true;
    std::string label;

    Vector eval_field(double t, std::span<const double> x) const {
        Vector out(dim);
        field(t, x, out);
        if (!finite(out))
            throw NonFiniteField("non-finite field evaluation (" + label + ")");
        return out;
    }

    Vector eval_time_derivative(double t, std::span<const double> x) const {
        Vector out(dim, 0.0);
        if (autonomous) return out;
        if (time_derivative) {
            time_derivative(t, x, out);
            if (!finite(out))
                throw NonFiniteField("non-finite time derivative (" + label + ")");
            return out;
        }
        // central difference in t
        const double eps = std::max(1e-7, 1e-7 * std::abs(t));
        Vector hi(dim), lo(dim);
        field(t + eps, x, hi);
        field(t - eps, x, lo);
        for (std::size_t i = 0; i < dim; ++i) out[i] = (hi[i] - lo[i]) / (2.0 * eps);
        if (!finite(out))
            throw NonFiniteField("non-finite time derivative (" + label + ")");
        return out;
    }
};

/// Central-difference Jacobian with per-column step
/// eps_j = max(1e-7, 1e-7 |x_j|).
inline DenseMatrix jacobian_fd(const OdeSystem& sys, double t, std::span<const double> x) {
    const std::size_t d = sys.dim;
    DenseMatrix j(d, d);
    Vector xp(x.begin(), x.end()), xm(x.begin(), x.end());
    Vector fp(d), fm(d);
    for (std::size_t col = 0; col < d; ++col) {
        const double eps = std::max(1e-7, 1e-7 * std::abs(x[col]));
        xp[col] = x[col] + eps;
        xm[col] = x[col] - eps;
        sys.field(t, xp, fp);
        sys.field(t, xm, fm);
        if (!finite(fp) || !finite(fm))
            throw NonFiniteField("non-finite field evaluation in jacobian_fd");
        for (std::size_t row = 0; row < d; ++row)
            j(row, col) = (fp[row] - fm[row]) / (2.0 * eps);
        xp[col] = x[col];
        xm[col] = x[col];
    }
    return j;
}

inline DenseMatrix eval_jacobian(const OdeSystem& sys, double t, std::span<const double> x) {
    if (sys.jacobian) {
        DenseMatrix j(sys.dim, sys.dim);
        sys.jacobian(t, x, j);
        if (!j.finite())
            throw NonFiniteField("non-finite Jacobian evaluation (" + sys.label + ")");
        return j;
    }
    return jacobian_fd(sys, t, x);
}

/// Strictly increasing sequence of time nodes t_0 < t_1 < ... < t_N.
struct TimeGrid {
    Vector nodes;

    static TimeGrid uniform(double t0, double t1, std::size_t steps) {
        if (steps == 0 || !(t1 > t0)) throw Error("TimeGrid::uniform: need t1 > t0 and steps >= 1");
        TimeGrid g;
        g.nodes.resize(steps + 1);
        const double h = (t1 - t0) / double(steps);
        for (std::size_t i = 0; i <= steps; ++i) g.nodes[i] = t0 + double(i) * h;
        g.nodes.back() = t1;
        return g;
    }

    std::size_t steps() const { return nodes.empty() ? 0 : nodes.size() - 1; }

    void validate() const {
        if (nodes.empty()) throw Error("TimeGrid: empty");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1])) throw Error("TimeGrid: nodes must strictly increase");
    }
};

/// States on a time grid plus per-run metadata.
struct Trajectory {
    TimeGrid grid;
    std::vector<Vector> states;
    std::string scheme;
    int max_kappa = 0;
};

} // namespace llrk
