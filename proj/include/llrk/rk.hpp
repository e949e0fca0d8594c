#pragma once

#include "llrk/ode_system.hpp"
#include "llrk/tableau.hpp"

namespace llrk {

/// One explicit Runge-Kutta step: y + h sum_j b_j f(t + c_j h, stage_j).
inline Vector rk_step(const OdeSystem& sys, const ButcherTableau& tab, double t,
                      std::span<const double> y, double h) {
    if (!(h > 0.0)) throw Error("rk_step: need h > 0");
    if (!tab.is_explicit()) throw Error("rk_step: tableau must be explicit");
    const std::size_t d = sys.dim;
    const std::size_t s = tab.stages;

    std::vector<Vector> k(s, Vector(d));
    Vector stage(d);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t m = 0; m < d; ++m) {
            double acc = y[m];
            for (std::size_t j = 0; j < i; ++j)
                if (tab.a(i, j) != 0.0) acc += h * tab.a(i, j) * k[j][m];
            stage[m] = acc;
        }
        sys.field(t + tab.c[i] * h, stage, k[i]);
        if (!finite(k[i])) throw NonFiniteField("non-finite field evaluation in rk_step");
    }

    Vector next(y.begin(), y.end());
    for (std::size_t j = 0; j < s; ++j) {
        if (tab.b[j] == 0.0) continue;
        for (std::size_t m = 0; m < d; ++m) next[m] += h * tab.b[j] * k[j][m];
    }
    return next;
}

} // namespace llrk
