#pragma once

#include <optional>

#include "llrk/integrate.hpp"

namespace llrk {

enum class Stability { Stable, Unstable, Marginal };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        default: return "marginal";
    }
}

namespace detail {

/// Real parts of the eigenvalues of a d x d matrix, d <= 3, via the
/// characteristic polynomial.
inline Vector eigen_real_parts_small(const DenseMatrix& j) {
    const std::size_t d = j.rows();
    if (d == 1) return {j(0, 0)};
    if (d == 2) {
        const double tr = j(0, 0) + j(1, 1);
        const double det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
        const double disc = tr * tr - 4.0 * det;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            return {0.5 * (tr + s), 0.5 * (tr - s)};
        }
        return {0.5 * tr, 0.5 * tr};
    }
    if (d == 3) {
        // lambda^3 + a2 lambda^2 + a1 lambda + a0
        const double tr = j(0, 0) + j(1, 1) + j(2, 2);
        const double m01 = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
        const double m02 = j(0, 0) * j(2, 2) - j(0, 2) * j(2, 0);
        const double m12 = j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1);
        const double det = j(0, 0) * (j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1)) -
                           j(0, 1) * (j(1, 0) * j(2, 2) - j(1, 2) * j(2, 0)) +
                           j(0, 2) * (j(1, 0) * j(2, 1) - j(1, 1) * j(2, 0));
        const double a2 = -tr, a1 = m01 + m02 + m12, a0 = -det;
        // depressed cubic x^3 + p x + q with lambda = x - a2/3
        const double p = a1 - a2 * a2 / 3.0;
        const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
        const double shift = -a2 / 3.0;
        const double disc = 0.25 * q * q + p * p * p / 27.0;
        if (disc > 0.0) {
            const double s = std::sqrt(disc);
            const double u = std::cbrt(-0.5 * q + s);
            const double v = std::cbrt(-0.5 * q - s);
            const double x1 = u + v;
            return {x1 + shift, -0.5 * x1 + shift, -0.5 * x1 + shift};
        }
        const double r = 2.0 * std::sqrt(std::max(-p / 3.0, 0.0));
        const double arg = std::clamp(3.0 * q / (p * r == 0.0 ? 1.0 : p * r), -1.0, 1.0);
        const double theta = std::acos(arg);
        Vector out(3);
        for (int k = 0; k < 3; ++k)
            out[k] = r * std::cos((theta - 2.0 * std::numbers::pi * k) / 3.0) + shift;
        return out;
    }
    throw Error("eigen_real_parts_small: d must be <= 3");
}

/// Largest eigenvalue of the symmetric part (J + J^T)/2 by shifted power
/// iteration. Bounds max Re(lambda); exact when J is symmetric.
inline double symmetric_part_bound(const DenseMatrix& j) {
    const std::size_t d = j.rows();
    DenseMatrix s(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) s(i, k) = 0.5 * (j(i, k) + j(k, i));
    const double shift = s.norm_inf() + 1.0;
    for (std::size_t i = 0; i < d; ++i) s(i, i) += shift;

    Vector v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 / double(i + 1);
    double mu = 0.0;
    for (int it = 0; it < 500; ++it) {
        Vector w = s * v;
        const double n = norm_inf(w);
        if (n == 0.0) return -shift;
        for (double& x : w) x /= n;
        mu = n;
        v = std::move(w);
    }
    return mu - shift;
}

inline Stability classify_jacobian(const DenseMatrix& j) {
    double max_re;
    if (j.rows() <= 3) {
        const Vector re = eigen_real_parts_small(j);
        max_re = *std::max_element(re.begin(), re.end());
    } else {
        max_re = symmetric_part_bound(j);
    }
    if (std::abs(max_re) < 1e-10) return Stability::Marginal;
    return max_re < 0.0 ? Stability::Stable : Stability::Unstable;
}

} // namespace detail

/// Equilibria found by Newton iteration, with a stability flag from the
/// Jacobian eigenvalue real parts (characteristic polynomial for d <= 3,
/// symmetric-part power-iteration bound otherwise).
struct EquilibriumSet {
    std::vector<Vector> points;
    std::vector<Stability> stability;
    std::size_t failed_seeds = 0;

    std::size_t size() const { return points.size(); }
};

/// Newton iteration from each seed; converged roots are polished to
/// machine-level residual, deduplicated within 1e-8 and classified.
/// Seeds that do not converge are skipped and counted.
inline EquilibriumSet find_equilibria(const OdeSystem& sys, const std::vector<Vector>& seeds,
                                      double tol = 1e-12) {
    EquilibriumSet set;
    for (const Vector& seed : seeds) {
        if (!finite(seed)) throw Error("find_equilibria: non-finite seed");
        Vector x = seed;
        bool converged = false;
        double res = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 80; ++it) {
            Vector f;
            try {
                f = sys.eval_field(0.0, x);
            } catch (const NonFiniteField&) {
                break;
            }
            res = norm_inf(f);
            if (!std::isfinite(res)) break;
            if (res <= tol) {
                converged = true;
                // polish: keep iterating while the residual still drops
                for (int extra = 0; extra < 6; ++extra) {
                    try {
                        const DenseMatrix j = eval_jacobian(sys, 0.0, x);
                        const Vector dx = solve_linear(j, f);
                        Vector cand = x;
                        for (std::size_t i = 0; i < x.size(); ++i) cand[i] -= dx[i];
                        const Vector fc = sys.eval_field(0.0, cand);
                        if (norm_inf(fc) >= res) break;
                        x = std::move(cand);
                        f = fc;
                        res = norm_inf(f);
                    } catch (const Error&) {
                        break;
                    }
                }
                break;
            }
            try {
                const DenseMatrix j = eval_jacobian(sys, 0.0, x);
                const Vector dx = solve_linear(j, f);
                for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dx[i];
            } catch (const Error&) {
                break;
            }
        }
        if (!converged) {
            ++set.failed_seeds;
            continue;
        }
        bool duplicate = false;
        for (const Vector& p : set.points) {
            double dist = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i)
                dist = std::max(dist, std::abs(p[i] - x[i]));
            if (dist < 1e-8) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        set.stability.push_back(detail::classify_jacobian(eval_jacobian(sys, 0.0, x)));
        set.points.push_back(std::move(x));
    }
    return set;
}

/// Integrates from x0 with the given stepper and fixed h until the state is
/// within tol of an attractor (returns its index) or max_steps is exhausted
/// (returns nullopt, i.e. undecided).
inline std::optional<std::size_t> classify_basin(const OdeSystem& sys, const Stepper& stepper,
                                                 double h, Vector x0,
                                                 const EquilibriumSet& attractors,
                                                 double tol = 1e-6,
                                                 std::size_t max_steps = 100000) {
    if (attractors.size() == 0) throw Error("classify_basin: no attractors given");
    const auto near = [&](const Vector& x) -> std::optional<std::size_t> {
        for (std::size_t k = 0; k < attractors.size(); ++k) {
            double dist = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                dist = std::max(dist, std::abs(x[i] - attractors.points[k][i]));
            if (dist <= tol) return k;
        }
        return std::nullopt;
    };

    if (auto hit = near(x0)) return hit;
    double t = 0.0;
    for (std::size_t n = 0; n < max_steps; ++n) {
        try {
            StepResult r = stepper(sys, t, x0, h);
            x0 = std::move(r.y_next);
        } catch (const Error& e) {
            throw StepFailure("classify_basin: step " + std::to_string(n) + " failed: " + e.what(),
                              n);
        }
        t += h;
        if (auto hit = near(x0)) return hit;
    }
    return std::nullopt;
}

/// Intercept of the discrete stable manifold with the x2-axis, located by
/// bisection between two points that flow to different attractors.
struct BisectionResult {
    double xi_h = 0.0;
    std::size_t iterations = 0;
    double bracket_width = 0.0;
};

inline BisectionResult manifold_intercept(const OdeSystem& sys, const Stepper& stepper, double h,
                                          double lo, double hi, double tol,
                                          const EquilibriumSet& attractors, double basin_tol = 1e-6,
                                          std::size_t max_steps = 100000) {
    if (sys.dim != 2) throw Error("manifold_intercept: system must be 2-dimensional");
    if (!(hi > lo)) throw Error("manifold_intercept: need hi > lo");
    const auto classify = [&](double xi) {
        return classify_basin(sys, stepper, h, Vector{0.0, xi}, attractors, basin_tol, max_steps);
    };

    const auto cls_lo = classify(lo);
    const auto cls_hi = classify(hi);
    if (!cls_lo || !cls_hi)
        throw UndecidedTrajectory("manifold_intercept: bracket endpoint did not classify");
    if (*cls_lo == *cls_hi)
        throw SameBasin("manifold_intercept: bracket endpoints flow to the same attractor");

    BisectionResult out;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // bracket at floating-point resolution
        const auto cls_mid = classify(mid);
        if (!cls_mid)
            throw UndecidedTrajectory("manifold_intercept: midpoint did not classify");
        if (*cls_mid == *cls_lo)
            lo = mid;
        else
            hi = mid;
        ++out.iterations;
    }
    out.xi_h = 0.5 * (lo + hi);
    out.bracket_width = hi - lo;
    return out;
}

/// Estimated order r_h = log2((xi_h - xi_{h/2}) / (xi_{h/2} - xi_{h/4})),
/// on absolute differences.
inline double order_estimate(double xi_h, double xi_h2, double xi_h4) {
    const double num = std::abs(xi_h - xi_h2);
    const double den = std::abs(xi_h2 - xi_h4);
    if (den < 1e-15 || num < 1e-15)
        throw DegenerateDifferences("order_estimate: successive differences below 1e-15");
    return std::log2(num / den);
}

/// Max componentwise relative deviation over the shared grid; components of
/// the reference below 1e-12 in magnitude are skipped.
inline double relative_error(const Trajectory& reference, const Trajectory& approx) {
    if (reference.grid.nodes != approx.grid.nodes)
        throw GridMismatch("relative_error: time grids differ");
    if (reference.states.size() != approx.states.size())
        throw GridMismatch("relative_error: state counts differ");
    double worst = 0.0;
    for (std::size_t n = 0; n < reference.states.size(); ++n) {
        const Vector& z = reference.states[n];
        const Vector& y = approx.states[n];
        if (z.size() != y.size()) throw GridMismatch("relative_error: dimensions differ");
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (std::abs(z[i]) < 1e-12) continue;
            worst = std::max(worst, std::abs(z[i] - y[i]) / std::abs(z[i]));
        }
    }
    return worst;
}

/// For each eps, || step(xi + eps v) - xi - e^{h f_x(xi)} (eps v) || / eps^2.
/// Bounded ratios certify the linearization-preserving property.
inline Vector linearization_probe(const OdeSystem& sys, const Stepper& stepper, const Vector& xi,
                                  double h, const Vector& v, const Vector& eps_list,
                                  PadeOrder order = {}) {
    if (norm_inf(sys.eval_field(0.0, xi)) > 1e-12)
        throw Error("linearization_probe: xi is not an equilibrium");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw Error("linearization_probe: eps must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw Error("linearization_probe: eps must be decreasing");
    }
    const DenseMatrix flow = expm_pade(eval_jacobian(sys, 0.0, xi) * h, order);

    Vector ratios;
    ratios.reserve(eps_list.size());
    for (double eps : eps_list) {
        Vector x0 = xi;
        for (std::size_t i = 0; i < x0.size(); ++i) x0[i] += eps * v[i];
        const StepResult r = stepper(sys, 0.0, x0, h);
        Vector dv(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) dv[i] = eps * v[i];
        const Vector lin = flow * dv;
        double err = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            err = std::max(err, std::abs(r.y_next[i] - xi[i] - lin[i]));
        ratios.push_back(err / (eps * eps));
    }
    return ratios;
}

} // namespace llrk
