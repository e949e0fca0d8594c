#include "doctest.h"

#include <random>

#include "llrk/examples.hpp"
#include "llrk/integrate.hpp"
#include "oracles.hpp"

using namespace llrk;

namespace {

OdeSystem affine_system(const DenseMatrix& a, const Vector& b) {
    OdeSystem sys;
    sys.dim = b.size();
    sys.label = "affine";
    sys.field = [a, b](double, std::span<const double> x, std::span<double> f) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            double s = b[i];
            for (std::size_t k = 0; k < f.size(); ++k) s += a(i, k) * x[k];
            f[i] = s;
        }
    };
    sys.jacobian = [a](double, std::span<const double>, DenseMatrix& j) { j = a; };
    return sys;
}

OdeSystem logistic() {
    OdeSystem sys;
    sys.dim = 1;
    sys.label = "logistic";
    sys.field = [](double, std::span<const double> x, std::span<double> f) {
        f[0] = x[0] * (1.0 - x[0]);
    };
    sys.jacobian = [](double, std::span<const double> x, DenseMatrix& j) {
        j(0, 0) = 1.0 - 2.0 * x[0];
    };
    return sys;
}

} // namespace

TEST_CASE("aux_field: vanishes at xi = 0, s = t_n") {
    const OdeSystem sys = make_example(6);
    const Vector q = aux_field(sys, 0.0, Vector{1.5, 3.0}, 0.0, Vector{0.0, 0.0},
                               Vector{0.0, 0.0});
    CHECK(norm_inf(q) == 0.0);
}

TEST_CASE("aux_field: affine parts cancel, leaving q = A xi") {
    const DenseMatrix a(2, 2, {-1.0, 0.5, 2.0, -3.0});
    const OdeSystem sys = affine_system(a, Vector{0.7, -0.2});
    const Vector y{0.4, -1.1};
    const double s = 0.35;
    const Vector phi_at = phi(sys, 0.0, y, s);
    for (const Vector xi : {Vector{0.0, 0.0}, Vector{0.1, -0.3}, Vector{-2.0, 1.0}}) {
        const Vector q = aux_field(sys, 0.0, y, s, xi, phi_at);
        const Vector expect = a * xi;
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(std::abs(q[i] - expect[i]) <= 1e-13 * (1.0 + std::abs(expect[i])));
    }
}

TEST_CASE("aux_field: Brusselator against a duplicate-formula oracle") {
    const OdeSystem sys = make_example(6);
    const Vector y{1.5, 3.0};
    const double s = 0.1;
    const Vector xi{0.01, -0.02};
    const Vector phi_at = phi(sys, 0.0, y, s);
    const Vector q = aux_field(sys, 0.0, y, s, xi, phi_at);

    // direct transcription, all pieces recomputed here
    const auto field = [](const Vector& x) {
        return Vector{1.0 + x[0] * x[0] * x[1] - 4.0 * x[0], 3.0 * x[0] - x[0] * x[0] * x[1]};
    };
    const Vector f0 = field(y);
    const double j00 = 2.0 * y[0] * y[1] - 4.0, j01 = y[0] * y[0];
    const double j10 = 3.0 - 2.0 * y[0] * y[1], j11 = -y[0] * y[0];
    const Vector shifted = field({y[0] + phi_at[0] + xi[0], y[1] + phi_at[1] + xi[1]});
    const Vector expect{shifted[0] - (j00 * phi_at[0] + j01 * phi_at[1]) - f0[0],
                        shifted[1] - (j10 * phi_at[0] + j11 * phi_at[1]) - f0[1]};
    CHECK(std::abs(q[0] - expect[0]) <= 1e-13);
    CHECK(std::abs(q[1] - expect[1]) <= 1e-13);
}

TEST_CASE("aux_field rejects s < t_n") {
    const OdeSystem sys = make_example(6);
    CHECK_THROWS_AS(
        aux_field(sys, 1.0, Vector{1.5, 3.0}, 0.5, Vector{0.0, 0.0}, Vector{0.0, 0.0}), Error);
}

TEST_CASE("llrk_step: linear systems collapse onto the LL2 step") {
    const DenseMatrix a(3, 3, {-1.0, 0.3, 0.0, 0.2, -2.0, 0.4, 0.0, 1.0, -0.5});
    const OdeSystem sys = affine_system(a, Vector{1.0, 0.0, -1.0});
    const Vector y{0.5, -0.5, 1.0};
    const ButcherTableau rk4 = tableau_registry("rk4").tableau;
    for (double h : {0.1, 1.0}) {
        const LlrkStepReport rep = llrk_step(sys, rk4, 0.0, y, h);
        const Vector ll2 = ll2_step(sys, 0.0, y, h);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::abs(rep.next_state[i] - ll2[i]) <= 1e-13 * (1.0 + std::abs(ll2[i])));
        for (const Vector& k : rep.stages) CHECK(norm_inf(k) <= 1e-13);
    }
}

TEST_CASE("llrk_step: equilibria are fixed points for any tableau and h") {
    const OdeSystem brus = make_example(6);
    const OdeSystem ex5 = make_example(5);
    const Vector eq6{1.0, 3.0};
    const Vector eq5(12, 1.0);
    for (const char* name : {"rk4", "dp5"}) {
        const ButcherTableau tab = tableau_registry(name).tableau;
        for (double h : {0.1, 1.0, 10.0}) {
            CHECK(llrk_step(brus, tab, 0.0, eq6, h).next_state == eq6);
            CHECK(llrk_step(ex5, tab, 0.0, eq5, h).next_state == eq5);
        }
    }
}

TEST_CASE("llrk_step: Brusselator step against a fine DP5 reference") {
    const OdeSystem sys = make_example(6);
    const Vector y{1.5, 3.0};
    const double h = 0.01;
    const LlrkStepReport rep = llrk_step(sys, tableau_registry("rk4").tableau, 0.0, y, h);

    const TimeGrid fine = TimeGrid::uniform(0.0, h, 1000);
    const Trajectory ref = integrate(sys, make_stepper("dp5"), fine, y);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(rep.next_state[i] - ref.states.back()[i]) <= 5e-9);
}

TEST_CASE("llrk_step: phi evaluated once per distinct node offset") {
    const OdeSystem sys = make_example(6);
    const LlrkStepReport rep =
        llrk_step(sys, tableau_registry("rk4").tableau, 0.0, Vector{1.5, 3.0}, 0.2);
    // rk4 offsets {0, h/2, h}: the zero offset is exact and free
    CHECK(rep.phi_values.size() == 3);
}

TEST_CASE("llrk4_step: stage one is identically zero") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const OdeSystem sys = oracles::random_nonlinear(rng);
        Vector y(sys.dim);
        for (double& v : y) v = oracles::uniform(rng, -1.0, 1.0);
        const LlrkStepReport rep = llrk4_step(sys, 0.1, y, 0.05);
        CHECK(norm_inf(rep.stages[0]) == 0.0);
    }
}

TEST_CASE("llrk4_step: linear systems give the LL2 step") {
    const DenseMatrix a(2, 2, {-2.0, 1.0, 1.0, -2.0});
    const OdeSystem sys = affine_system(a, Vector{0.5, 0.5});
    const Vector y{1.0, -1.0};
    const LlrkStepReport rep = llrk4_step(sys, 0.0, y, 0.5);
    const Vector ll2 = ll2_step(sys, 0.0, y, 0.5);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(rep.next_state[i] - ll2[i]) <= 1e-13 * (1.0 + std::abs(ll2[i])));
}

TEST_CASE("llrk4_step: Brusselator equilibrium under a huge step") {
    const OdeSystem sys = make_example(6);
    const LlrkStepReport rep = llrk4_step(sys, 0.0, Vector{1.0, 3.0}, 10.0);
    CHECK(rep.next_state == Vector{1.0, 3.0});
}

TEST_CASE("llrk4_step: logistic agrees with the generic path and the closed form") {
    const OdeSystem sys = logistic();
    const double h = 0.1;
    const LlrkStepReport fast = llrk4_step(sys, 0.0, Vector{0.5}, h);
    const LlrkStepReport generic =
        llrk_step(sys, tableau_registry("rk4").tableau, 0.0, Vector{0.5}, h);
    CHECK(std::abs(fast.next_state[0] - generic.next_state[0]) <= 1e-12);
    const double exact = 1.0 / (1.0 + std::exp(-h));
    CHECK(std::abs(fast.next_state[0] - exact) <= 1e-8); // O(h^5) local error
}

TEST_CASE("llrk4_step == llrk_step(rk4) on random triples") {
    std::mt19937_64 rng(90210);
    const ButcherTableau rk4 = tableau_registry("rk4").tableau;
    for (int trial = 0; trial < 100; ++trial) {
        const OdeSystem sys = oracles::random_nonlinear(rng);
        Vector y(sys.dim);
        for (double& v : y) v = oracles::uniform(rng, -1.0, 1.0);
        const double t = oracles::uniform(rng, 0.0, 2.0);
        const double h = oracles::uniform(rng, 1e-3, 0.5);
        const LlrkStepReport fast = llrk4_step(sys, t, y, h);
        const LlrkStepReport generic = llrk_step(sys, rk4, t, y, h);
        for (std::size_t i = 0; i < sys.dim; ++i)
            CHECK(std::abs(fast.next_state[i] - generic.next_state[i]) <= 1e-12);
    }
}

TEST_CASE("integrate: single-node grid returns the initial state") {
    const OdeSystem sys = make_example(6);
    TimeGrid grid;
    grid.nodes = {1.5};
    const Trajectory traj = integrate(sys, make_stepper("llrk4"), grid, Vector{0.25, 0.5});
    CHECK(traj.states.size() == 1);
    CHECK(traj.states[0] == Vector{0.25, 0.5});
}

TEST_CASE("integrate: scalar linear decay over [0,1]") {
    OdeSystem sys;
    sys.dim = 1;
    sys.field = [](double, std::span<const double> x, std::span<double> f) { f[0] = -x[0]; };
    sys.jacobian = [](double, std::span<const double>, DenseMatrix& j) { j(0, 0) = -1.0; };
    const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 10);
    const Trajectory traj = integrate(sys, make_stepper("llrk4"), grid, Vector{1.0});
    CHECK(std::abs(traj.states.back()[0] - std::exp(-1.0)) <= 1e-12);
}

TEST_CASE("LL family is exact on example 4 for arbitrary grids") {
    // closed form x(t) = -1 + e^{-100 H t} (x0 + 1), exponential by the
    // independent Taylor oracle
    const ExampleSpec spec = example_defaults(4);
    const OdeSystem sys = make_example(spec);
    const DenseMatrix gen = hilbert(12) * (-100.0);
    for (std::size_t steps : {7, 66}) {
        const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, steps);
        for (const char* scheme : {"ll2", "llrk4"}) {
            const Trajectory traj =
                integrate(sys, make_stepper(scheme), grid, spec.initial_state);
            const DenseMatrix flow = oracles::taylor_expm(gen); // t = 1
            const Vector moved = flow * Vector(12, 2.0);
            double worst = 0.0;
            for (std::size_t i = 0; i < 12; ++i) {
                const double exact = moved[i] - 1.0;
                worst = std::max(worst,
                                 std::abs(traj.states.back()[i] - exact) / (1.0 + std::abs(exact)));
            }
            CHECK(worst <= 1e-10);
        }
    }
}

TEST_CASE("integrate: two half-steps equal one full step on a linear system") {
    const ExampleSpec spec = example_defaults(2);
    const OdeSystem sys = make_example(spec);
    const TimeGrid one = TimeGrid::uniform(0.0, 0.5, 1);
    const TimeGrid two = TimeGrid::uniform(0.0, 0.5, 2);
    for (const char* scheme : {"ll2", "llrk4"}) {
        const Trajectory a = integrate(sys, make_stepper(scheme), one, spec.initial_state);
        const Trajectory b = integrate(sys, make_stepper(scheme), two, spec.initial_state);
        for (std::size_t i = 0; i < sys.dim; ++i)
            CHECK(std::abs(a.states.back()[i] - b.states.back()[i]) <=
                  1e-10 * (1.0 + std::abs(a.states.back()[i])));
    }
}

TEST_CASE("integrate: non-autonomous ramp is exact for the LL family") {
    // x' = t has an exact local linear model, so LL2 and LLRK4 reproduce
    // x(T) = x0 + T^2/2 up to roundoff
    OdeSystem sys;
    sys.dim = 1;
    sys.autonomous = false;
    sys.field = [](double t, std::span<const double>, std::span<double> f) { f[0] = t; };
    sys.jacobian = [](double, std::span<const double>, DenseMatrix& j) { j(0, 0) = 0.0; };
    sys.time_derivative = [](double, std::span<const double>, std::span<double> f) { f[0] = 1.0; };
    const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 7);
    for (const char* scheme : {"ll2", "llrk4"}) {
        const Trajectory traj = integrate(sys, make_stepper(scheme), grid, Vector{0.25});
        CHECK(std::abs(traj.states.back()[0] - 0.75) <= 1e-13);
    }
}

TEST_CASE("integrate: stepper failures carry the failing index") {
    OdeSystem sys;
    sys.dim = 1;
    sys.field = [](double t, std::span<const double>, std::span<double> f) {
        f[0] = t < 0.25 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
    };
    sys.autonomous = false;
    sys.time_derivative = [](double, std::span<const double>, std::span<double> f) { f[0] = 0.0; };
    sys.jacobian = [](double, std::span<const double>, DenseMatrix& j) { j(0, 0) = 0.0; };
    const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 10);
    try {
        integrate(sys, make_stepper("ll2"), grid, Vector{0.0});
        FAIL("expected StepFailure");
    } catch (const StepFailure& e) {
        CHECK(e.step_index >= 2);
        CHECK(e.step_index <= 3);
    }
}

TEST_CASE("make_stepper: scheme strings") {
    CHECK_NOTHROW(make_stepper("ll2"));
    CHECK_NOTHROW(make_stepper("llrk4"));
    CHECK_NOTHROW(make_stepper("llrk:rk4"));
    CHECK_NOTHROW(make_stepper("llrk:dp5"));
    CHECK_NOTHROW(make_stepper("rk4"));
    CHECK_NOTHROW(make_stepper("dp5"));
    CHECK_THROWS_AS(make_stepper("euler"), Error);
    CHECK_THROWS_AS(make_stepper("llrk:euler"), UnknownTableau);
}

TEST_CASE("llrk:dp5 stepper runs and beats ll2 on the logistic problem") {
    const OdeSystem sys = logistic();
    const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 20);
    const Trajectory hi = integrate(sys, make_stepper("llrk:dp5"), grid, Vector{0.5});
    const Trajectory lo = integrate(sys, make_stepper("ll2"), grid, Vector{0.5});
    const double exact = 1.0 / (1.0 + std::exp(-1.0));
    CHECK(std::abs(hi.states.back()[0] - exact) < std::abs(lo.states.back()[0] - exact));
    CHECK(std::abs(hi.states.back()[0] - exact) <= 1e-10);
}
