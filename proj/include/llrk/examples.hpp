#pragma once

#include <map>
#include <memory>
#include <numbers>

#include "llrk/ode_system.hpp"

namespace llrk {

/// Hilbert matrix H_ij = 1/(i+j-1), 1-based.
inline DenseMatrix hilbert(std::size_t n) {
    if (n < 1) throw Error("hilbert: need n >= 1");
    DenseMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = 1.0 / double(i + j + 1);
    return h;
}

namespace detail {
inline double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    double b = 1.0;
    for (std::size_t i = 1; i <= k; ++i) b = b * double(n - k + i) / double(i);
    return b;
}
} // namespace detail

/// Exact (integer-valued) inverse of the Hilbert matrix via binomials.
inline DenseMatrix hilbert_inverse(std::size_t n) {
    if (n < 1) throw Error("hilbert_inverse: need n >= 1");
    DenseMatrix inv(n, n);
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= n; ++j) {
            const double s = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            const double b = detail::binomial(i + j - 2, i - 1);
            inv(i - 1, j - 1) = s * double(i + j - 1) *
                                detail::binomial(n + i - 1, n - j) *
                                detail::binomial(n + j - 1, n - i) * b * b;
        }
    return inv;
}

/// Infinity-norm condition estimate of the Hilbert matrix, using the
/// exact inverse rather than a fragile LU of the near-singular H.
inline double hilbert_condition_inf(std::size_t n) {
    return hilbert(n).norm_inf() * hilbert_inverse(n).norm_inf();
}

/// Selection of one of the seven benchmark systems: id, parameter
/// overrides, initial state and time horizon.
struct ExampleSpec {
    int id = 1;
    std::map<std::string, double> parameters;
    Vector initial_state;
    double t0 = 0.0;
    double t_end = 0.0;
};

/// Defaults per example. Complex systems (ids 2, 3) are realified: each
/// complex coordinate splits into (Re, Im), doubling the dimension, so
/// state layout is (Re x1, Im x1, Re x2, Im x2).
inline ExampleSpec example_defaults(int id) {
    constexpr double four_pi = 4.0 * std::numbers::pi;
    switch (id) {
        case 1:
            // No initial value or horizon is intrinsic to this system; the
            // dynamics probes pick starting points and run to classification.
            return {1, {{"mu", 15.0}, {"lambda", 57.0}}, {0.0, 0.0}, 0.0, 10.0};
        case 2:
            return {2, {}, {-2.5, 0.0, -1.5, 0.0}, 0.0, four_pi};
        case 3:
            return {3, {}, {1.0, 0.0, 1.0, 0.0}, 0.0, four_pi};
        case 4:
            return {4, {}, Vector(12, 1.0), 0.0, 1.0};
        case 5:
            return {5, {}, Vector(12, -0.5), 0.0, 1.0};
        case 6:
            return {6, {}, {1.5, 3.0}, 0.0, 20.0};
        case 7:
            return {7, {{"epsilon", 1e3}, {"standard_vdp", 0.0}}, {2.0, 0.0}, 0.0, 2.0};
        default:
            throw UnknownExample("example id must be in 1..7, got " + std::to_string(id));
    }
}

namespace detail {

inline double param(const ExampleSpec& spec, const std::string& name) {
    const ExampleSpec defaults = example_defaults(spec.id);
    for (const auto& [key, value] : spec.parameters)
        if (!defaults.parameters.count(key))
            throw Error("example " + std::to_string(spec.id) + ": unknown parameter '" + key + "'");
    auto it = spec.parameters.find(name);
    if (it != spec.parameters.end()) return it->second;
    return defaults.parameters.at(name);
}

} // namespace detail

/// Builds the benchmark system for a spec, with analytic Jacobian.
/// All seven systems are autonomous.
inline OdeSystem make_example(const ExampleSpec& spec) {
    OdeSystem sys;
    sys.autonomous = true;
    switch (spec.id) {
        case 1: {
            const double mu = detail::param(spec, "mu");
            const double lam = detail::param(spec, "lambda");
            sys.dim = 2;
            sys.label = "example1";
            sys.field = [mu, lam](double, std::span<const double> x, std::span<double> f) {
                const auto g = [lam](double u) { return u / (1.0 + u + lam * u * u); };
                f[0] = -2.0 * x[0] + x[1] + 1.0 - mu * g(x[0]);
                f[1] = x[0] - 2.0 * x[1] + 1.0 - mu * g(x[1]);
            };
            sys.jacobian = [mu, lam](double, std::span<const double> x, DenseMatrix& j) {
                const auto dg = [lam](double u) {
                    const double w = 1.0 + u + lam * u * u;
                    return (1.0 - lam * u * u) / (w * w);
                };
                j(0, 0) = -2.0 - mu * dg(x[0]);
                j(0, 1) = 1.0;
                j(1, 0) = 1.0;
                j(1, 1) = -2.0 - mu * dg(x[1]);
            };
            break;
        }
        case 2: {
            // dx1/dt = i(x1+2), dx2/dt = -i(x2+2), realified.
            sys.dim = 4;
            sys.label = "example2";
            sys.field = [](double, std::span<const double> x, std::span<double> f) {
                f[0] = -x[1];
                f[1] = x[0] + 2.0;
                f[2] = x[3];
                f[3] = -(x[2] + 2.0);
            };
            sys.jacobian = [](double, std::span<const double>, DenseMatrix& j) {
                j = DenseMatrix(4, 4);
                j(0, 1) = -1.0;
                j(1, 0) = 1.0;
                j(2, 3) = 1.0;
                j(3, 2) = -1.0;
            };
            break;
        }
        case 3: {
            // dx_k/dt = (+-i)(x_k+2) + 0.1 x_k^2 with componentwise complex square.
            sys.dim = 4;
            sys.label = "example3";
            sys.field = [](double, std::span<const double> x, std::span<double> f) {
                f[0] = -x[1] + 0.1 * (x[0] * x[0] - x[1] * x[1]);
                f[1] = (x[0] + 2.0) + 0.2 * x[0] * x[1];
                f[2] = x[3] + 0.1 * (x[2] * x[2] - x[3] * x[3]);
                f[3] = -(x[2] + 2.0) + 0.2 * x[2] * x[3];
            };
            sys.jacobian = [](double, std::span<const double> x, DenseMatrix& j) {
                j = DenseMatrix(4, 4);
                j(0, 0) = 0.2 * x[0];
                j(0, 1) = -1.0 - 0.2 * x[1];
                j(1, 0) = 1.0 + 0.2 * x[1];
                j(1, 1) = 0.2 * x[0];
                j(2, 2) = 0.2 * x[2];
                j(2, 3) = 1.0 - 0.2 * x[3];
                j(3, 2) = -1.0 + 0.2 * x[3];
                j(3, 3) = 0.2 * x[2];
            };
            break;
        }
        case 4: {
            // x' = -100 H (x + 1)
            auto h = std::make_shared<DenseMatrix>(hilbert(12));
            sys.dim = 12;
            sys.label = "example4";
            sys.field = [h](double, std::span<const double> x, std::span<double> f) {
                for (std::size_t i = 0; i < 12; ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < 12; ++j) s += (*h)(i, j) * (x[j] + 1.0);
                    f[i] = -100.0 * s;
                }
            };
            sys.jacobian = [h](double, std::span<const double>, DenseMatrix& j) {
                j = *h;
                j *= -100.0;
            };
            break;
        }
        case 5: {
            // x' = 100 H (x-1) + 100 (x-1)^2 - 60 (x^3 - 1), powers componentwise
            auto h = std::make_shared<DenseMatrix>(hilbert(12));
            sys.dim = 12;
            sys.label = "example5";
            sys.field = [h](double, std::span<const double> x, std::span<double> f) {
                for (std::size_t i = 0; i < 12; ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < 12; ++j) s += (*h)(i, j) * (x[j] - 1.0);
                    const double d = x[i] - 1.0;
                    f[i] = 100.0 * s + 100.0 * d * d - 60.0 * (x[i] * x[i] * x[i] - 1.0);
                }
            };
            sys.jacobian = [h](double, std::span<const double> x, DenseMatrix& j) {
                j = *h;
                j *= 100.0;
                for (std::size_t i = 0; i < 12; ++i)
                    j(i, i) += 200.0 * (x[i] - 1.0) - 180.0 * x[i] * x[i];
            };
            break;
        }
        case 6: {
            // Brusselator
            sys.dim = 2;
            sys.label = "example6";
            sys.field = [](double, std::span<const double> x, std::span<double> f) {
                f[0] = 1.0 + x[0] * x[0] * x[1] - 4.0 * x[0];
                f[1] = 3.0 * x[0] - x[0] * x[0] * x[1];
            };
            sys.jacobian = [](double, std::span<const double> x, DenseMatrix& j) {
                j(0, 0) = 2.0 * x[0] * x[1] - 4.0;
                j(0, 1) = x[0] * x[0];
                j(1, 0) = 3.0 - 2.0 * x[0] * x[1];
                j(1, 1) = -x[0] * x[0];
            };
            break;
        }
        case 7: {
            // Van der Pol type oscillator, implemented verbatim as
            //   x2' = eps ((1 - x2^2) x1 + x2);
            // standard_vdp != 0 switches to the classical
            //   x2' = eps ((1 - x1^2) x2 - x1).
            const double eps = detail::param(spec, "epsilon");
            const bool standard = detail::param(spec, "standard_vdp") != 0.0;
            sys.dim = 2;
            sys.label = "example7";
            if (standard) {
                sys.field = [eps](double, std::span<const double> x, std::span<double> f) {
                    f[0] = x[1];
                    f[1] = eps * ((1.0 - x[0] * x[0]) * x[1] - x[0]);
                };
                sys.jacobian = [eps](double, std::span<const double> x, DenseMatrix& j) {
                    j(0, 0) = 0.0;
                    j(0, 1) = 1.0;
                    j(1, 0) = eps * (-2.0 * x[0] * x[1] - 1.0);
                    j(1, 1) = eps * (1.0 - x[0] * x[0]);
                };
            } else {
                sys.field = [eps](double, std::span<const double> x, std::span<double> f) {
                    f[0] = x[1];
                    f[1] = eps * ((1.0 - x[1] * x[1]) * x[0] + x[1]);
                };
                sys.jacobian = [eps](double, std::span<const double> x, DenseMatrix& j) {
                    j(0, 0) = 0.0;
                    j(0, 1) = 1.0;
                    j(1, 0) = eps * (1.0 - x[1] * x[1]);
                    j(1, 1) = eps * (1.0 - 2.0 * x[1] * x[0]);
                };
            }
            break;
        }
        default:
            throw UnknownExample("example id must be in 1..7, got " + std::to_string(spec.id));
    }
    return sys;
}

inline OdeSystem make_example(int id) { return make_example(example_defaults(id)); }

/// Equilibria exactly representable in floating point, per example (with
/// default parameters). Example 1's points are not algebraic; example 3's
/// are complex-irrational. Both are found by Newton instead.
inline std::vector<Vector> exact_equilibria(int id) {
    switch (id) {
        case 2: return {{-2.0, 0.0, -2.0, 0.0}};
        case 4: return {Vector(12, -1.0)};
        case 5: return {Vector(12, 1.0)};
        case 6: return {{1.0, 3.0}};
        case 7: return {{0.0, 0.0}};
        default: return {};
    }
}

} // namespace llrk
