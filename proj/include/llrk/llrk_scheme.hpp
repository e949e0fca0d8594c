#pragma once

#include <utility>

#include "llrk/phi.hpp"
#include "llrk/tableau.hpp"

namespace llrk {

namespace detail {

/// f, f_x, f_t frozen at the step base point (t_n, y_n).
struct FrozenLinearization {
    double t_n = 0.0;
    Vector y_n;
    Vector f0;
    DenseMatrix j0;
    Vector ft0;

    static FrozenLinearization at(const OdeSystem& sys, double t, std::span<const double> y) {
        FrozenLinearization fr;
        fr.t_n = t;
        fr.y_n.assign(y.begin(), y.end());
        fr.f0 = sys.eval_field(t, y);
        fr.j0 = eval_jacobian(sys, t, y);
        fr.ft0 = sys.eval_time_derivative(t, y);
        return fr;
    }

    /// q(t_n,y_n; s, xi) = f(s, y_n + phi + xi) - f_x phi - f_t (s - t_n) - f,
    /// everything but the leading evaluation frozen at (t_n, y_n).
    Vector aux_field(const OdeSystem& sys, double s, std::span<const double> xi,
                     std::span<const double> phi_at) const {
        const std::size_t d = y_n.size();
        Vector arg(d);
        for (std::size_t i = 0; i < d; ++i) arg[i] = y_n[i] + phi_at[i] + xi[i];
        Vector q = sys.eval_field(s, arg);
        const Vector jphi = j0 * Vector(phi_at.begin(), phi_at.end());
        const double ds = s - t_n;
        for (std::size_t i = 0; i < d; ++i) q[i] -= jphi[i] + ft0[i] * ds + f0[i];
        return q;
    }
};

} // namespace detail

/// Vector field of the auxiliary remainder ODE, with f, f_x, f_t frozen at
/// (t_n, y_n). phi_at must be phi(t_n,y_n; s - t_n), supplied by the caller.
inline Vector aux_field(const OdeSystem& sys, double t_n, std::span<const double> y_n, double s,
                        std::span<const double> xi, std::span<const double> phi_at) {
    if (s < t_n) throw Error("aux_field: need s >= t_n");
    return detail::FrozenLinearization::at(sys, t_n, y_n).aux_field(sys, s, xi, phi_at);
}

/// Everything one LLRK step produced: the new state, the RK stages of the
/// auxiliary equation, the largest scaling exponent used, and the LL
/// increments keyed by node offset.
struct LlrkStepReport {
    Vector next_state;
    std::vector<Vector> stages;
    int kappa_used = 0;
    std::vector<std::pair<double, Vector>> phi_values;
};

/// Generic LLRK step for an explicit tableau:
///   next = y + phi(h) + h sum_j b_j k_j,
///   k_i  = q(t + c_i h, h sum_{j<i} a_ij k_j),
/// with one phi evaluation per distinct node offset c_i h.
inline LlrkStepReport llrk_step(const OdeSystem& sys, const ButcherTableau& tab, double t,
                                std::span<const double> y, double h, PadeOrder order = {}) {
    if (!(h > 0.0)) throw Error("llrk_step: need h > 0");
    if (!tab.is_explicit()) throw Error("llrk_step: tableau must be explicit");
    const std::size_t d = sys.dim;
    const std::size_t s = tab.stages;

    const auto frozen = detail::FrozenLinearization::at(sys, t, y);
    const AugmentedMatrix aug = build_augmented(sys, t, y);

    LlrkStepReport rep;
    rep.phi_values.reserve(s + 1); // keeps cache references stable
    const auto phi_cached = [&](double offset) -> const Vector& {
        for (const auto& [key, value] : rep.phi_values)
            if (key == offset) return value;
        auto eval = detail::phi_from_augmented(aug, offset, order);
        rep.kappa_used = std::max(rep.kappa_used, eval.kappa);
        rep.phi_values.emplace_back(offset, std::move(eval.value));
        return rep.phi_values.back().second;
    };

    rep.stages.assign(s, Vector(d, 0.0));
    Vector xi(d);
    for (std::size_t i = 0; i < s; ++i) {
        const double offset = tab.c[i] * h;
        std::fill(xi.begin(), xi.end(), 0.0);
        for (std::size_t j = 0; j < i; ++j) {
            if (tab.a(i, j) == 0.0) continue;
            for (std::size_t m = 0; m < d; ++m) xi[m] += h * tab.a(i, j) * rep.stages[j][m];
        }
        rep.stages[i] = frozen.aux_field(sys, t + offset, xi, phi_cached(offset));
    }

    const Vector& phi_full = phi_cached(h);
    rep.next_state.assign(y.begin(), y.end());
    for (std::size_t m = 0; m < d; ++m) rep.next_state[m] += phi_full[m];
    for (std::size_t j = 0; j < s; ++j) {
        if (tab.b[j] == 0.0) continue;
        for (std::size_t m = 0; m < d; ++m) rep.next_state[m] += h * tab.b[j] * rep.stages[j][m];
    }
    return rep;
}

/// The order-4 scheme specialized to the classical RK4 nodes c = [0, 1/2, 1/2, 1]:
/// exactly two LL increments from one exponential (phi_pair), stage chaining
///   k_i = q(t + c_i h, phi(c_i h), c_i h k_{i-1}),   k_1 = 0,
/// and rho = (h/6)(2 k_2 + 2 k_3 + k_4).
inline LlrkStepReport llrk4_step(const OdeSystem& sys, double t, std::span<const double> y,
                                 double h, PadeOrder order = {}) {
    if (!(h > 0.0)) throw Error("llrk4_step: need h > 0");
    const std::size_t d = sys.dim;

    const auto frozen = detail::FrozenLinearization::at(sys, t, y);
    PhiCache cache = phi_pair(sys, t, y, h, order);

    LlrkStepReport rep;
    rep.kappa_used = cache.kappa;
    rep.stages.assign(4, Vector(d, 0.0)); // stage 1 is identically zero

    Vector xi(d, 0.0);
    rep.stages[1] = frozen.aux_field(sys, t + 0.5 * h, xi, cache.half_step);
    for (std::size_t m = 0; m < d; ++m) xi[m] = 0.5 * h * rep.stages[1][m];
    rep.stages[2] = frozen.aux_field(sys, t + 0.5 * h, xi, cache.half_step);
    for (std::size_t m = 0; m < d; ++m) xi[m] = h * rep.stages[2][m];
    rep.stages[3] = frozen.aux_field(sys, t + h, xi, cache.full_step);

    rep.next_state.assign(y.begin(), y.end());
    const double w = h / 6.0;
    for (std::size_t m = 0; m < d; ++m)
        rep.next_state[m] += cache.full_step[m] +
                             w * (2.0 * rep.stages[1][m] + 2.0 * rep.stages[2][m] + rep.stages[3][m]);

    rep.phi_values.emplace_back(0.5 * h, std::move(cache.half_step));
    rep.phi_values.emplace_back(h, std::move(cache.full_step));
    return rep;
}

} // namespace llrk
