#pragma once

#include <functional>

#include "llrk/llrk_scheme.hpp"
#include "llrk/rk.hpp"

namespace llrk {

struct StepResult {
    Vector y_next;
    int kappa = 0;
};

/// One-step map: (sys, t, y, h) -> next state. Pure.
using Stepper = std::function<StepResult(const OdeSystem&, double, std::span<const double>, double)>;

/// Builds a stepper from a scheme string: "ll2", "llrk4", "llrk:<tableau>",
/// "rk4", "dp5". Pade order applies to the LL-based schemes.
inline Stepper make_stepper(const std::string& scheme, PadeOrder order = {}) {
    if (scheme == "ll2") {
        return [order](const OdeSystem& sys, double t, std::span<const double> y, double h) {
            const AugmentedMatrix aug = build_augmented(sys, t, y);
            auto eval = detail::phi_from_augmented(aug, h, order);
            StepResult r{Vector(y.begin(), y.end()), eval.kappa};
            for (std::size_t i = 0; i < r.y_next.size(); ++i) r.y_next[i] += eval.value[i];
            return r;
        };
    }
    if (scheme == "llrk4") {
        return [order](const OdeSystem& sys, double t, std::span<const double> y, double h) {
            LlrkStepReport rep = llrk4_step(sys, t, y, h, order);
            return StepResult{std::move(rep.next_state), rep.kappa_used};
        };
    }
    if (scheme.rfind("llrk:", 0) == 0) {
        const ButcherTableau tab = tableau_registry(scheme.substr(5)).tableau;
        return [tab, order](const OdeSystem& sys, double t, std::span<const double> y, double h) {
            LlrkStepReport rep = llrk_step(sys, tab, t, y, h, order);
            return StepResult{std::move(rep.next_state), rep.kappa_used};
        };
    }
    if (scheme == "rk4" || scheme == "dp5") {
        const ButcherTableau tab = tableau_registry(scheme).tableau;
        return [tab](const OdeSystem& sys, double t, std::span<const double> y, double h) {
            return StepResult{rk_step(sys, tab, t, y, h), 0};
        };
    }
    throw Error("unknown scheme '" + scheme +
                "' (known: ll2, llrk4, llrk:<tableau>, rk4, dp5)");
}

/// Folds the one-step map over the grid. The state at t_0 is y0 bitwise;
/// stepper errors are wrapped in StepFailure with the failing index.
inline Trajectory integrate(const OdeSystem& sys, const Stepper& stepper, const TimeGrid& grid,
                            Vector y0) {
    grid.validate();
    if (y0.size() != sys.dim) throw Error("integrate: initial state has wrong dimension");

    Trajectory traj;
    traj.grid = grid;
    traj.states.reserve(grid.nodes.size());
    traj.states.push_back(std::move(y0));
    for (std::size_t n = 0; n + 1 < grid.nodes.size(); ++n) {
        const double h = grid.nodes[n + 1] - grid.nodes[n];
        try {
            StepResult r = stepper(sys, grid.nodes[n], traj.states.back(), h);
            traj.max_kappa = std::max(traj.max_kappa, r.kappa);
            traj.states.push_back(std::move(r.y_next));
        } catch (const Error& e) {
            throw StepFailure("step " + std::to_string(n) + " failed: " + e.what(), n);
        }
    }
    return traj;
}

} // namespace llrk
