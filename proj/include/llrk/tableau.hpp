#pragma once

#include <string>

#include "llrk/matrix.hpp"

namespace llrk {

/// Coefficients of an explicit s-stage Runge-Kutta scheme.
struct ButcherTableau {
    std::size_t stages = 0;
    Vector c;      // nodes, length s
    DenseMatrix a; // s x s, strictly lower triangular
    Vector b;      // weights, length s
    int order = 0; // claimed convergence order

    bool is_explicit() const {
        for (std::size_t i = 0; i < stages; ++i)
            for (std::size_t j = i; j < stages; ++j)
                if (a(i, j) != 0.0) return false;
        return true;
    }
};

struct NamedTableau {
    std::string name;
    ButcherTableau tableau;
};

/// Checks row sums and the order conditions through min(order, 4) to the
/// given tolerance; transcribed constants are never trusted unchecked.
inline void check_order_conditions(const ButcherTableau& t, double tol = 1e-14) {
    if (!t.is_explicit()) throw Error("tableau is not explicit");
    const std::size_t s = t.stages;
    const auto fail = [&](const std::string& what) {
        throw Error("tableau order-condition failure: " + what);
    };

    for (std::size_t i = 0; i < s; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < s; ++j) row += t.a(i, j);
        if (std::abs(row - t.c[i]) > tol) fail("row sum != c at stage " + std::to_string(i));
    }

    double sb = 0.0, sbc = 0.0, sbc2 = 0.0, sbac = 0.0;
    double sbc3 = 0.0, sbcac = 0.0, sbac2 = 0.0, sbaac = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        sb += t.b[i];
        sbc += t.b[i] * t.c[i];
        sbc2 += t.b[i] * t.c[i] * t.c[i];
        sbc3 += t.b[i] * t.c[i] * t.c[i] * t.c[i];
        double ac = 0.0, ac2 = 0.0, aac = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            ac += t.a(i, j) * t.c[j];
            ac2 += t.a(i, j) * t.c[j] * t.c[j];
            double inner = 0.0;
            for (std::size_t k = 0; k < s; ++k) inner += t.a(j, k) * t.c[k];
            aac += t.a(i, j) * inner;
        }
        sbac += t.b[i] * ac;
        sbcac += t.b[i] * t.c[i] * ac;
        sbac2 += t.b[i] * ac2;
        sbaac += t.b[i] * aac;
    }

    if (std::abs(sb - 1.0) > tol) fail("sum b != 1");
    if (t.order >= 2 && std::abs(sbc - 0.5) > tol) fail("sum b c != 1/2");
    if (t.order >= 3) {
        if (std::abs(sbc2 - 1.0 / 3.0) > tol) fail("sum b c^2 != 1/3");
        if (std::abs(sbac - 1.0 / 6.0) > tol) fail("sum b a c != 1/6");
    }
    if (t.order >= 4) {
        if (std::abs(sbc3 - 0.25) > tol) fail("sum b c^3 != 1/4");
        if (std::abs(sbcac - 0.125) > tol) fail("sum b c a c != 1/8");
        if (std::abs(sbac2 - 1.0 / 12.0) > tol) fail("sum b a c^2 != 1/12");
        if (std::abs(sbaac - 1.0 / 24.0) > tol) fail("sum b a a c != 1/24");
    }
}

namespace detail {

inline NamedTableau make_rk4() {
    ButcherTableau t;
    t.stages = 4;
    t.c = {0.0, 0.5, 0.5, 1.0};
    t.b = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
    t.a = DenseMatrix(4, 4);
    t.a(1, 0) = 0.5;
    t.a(2, 1) = 0.5;
    t.a(3, 2) = 1.0;
    t.order = 4;
    return {"rk4", t};
}

inline NamedTableau make_dp5() {
    ButcherTableau t;
    t.stages = 7;
    t.c = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
    t.a = DenseMatrix(7, 7);
    t.a(1, 0) = 1.0 / 5.0;
    t.a(2, 0) = 3.0 / 40.0;
    t.a(2, 1) = 9.0 / 40.0;
    t.a(3, 0) = 44.0 / 45.0;
    t.a(3, 1) = -56.0 / 15.0;
    t.a(3, 2) = 32.0 / 9.0;
    t.a(4, 0) = 19372.0 / 6561.0;
    t.a(4, 1) = -25360.0 / 2187.0;
    t.a(4, 2) = 64448.0 / 6561.0;
    t.a(4, 3) = -212.0 / 729.0;
    t.a(5, 0) = 9017.0 / 3168.0;
    t.a(5, 1) = -355.0 / 33.0;
    t.a(5, 2) = 46732.0 / 5247.0;
    t.a(5, 3) = 49.0 / 176.0;
    t.a(5, 4) = -5103.0 / 18656.0;
    // FSAL row: stage 7 coefficients equal the propagating weights
    t.a(6, 0) = 35.0 / 384.0;
    t.a(6, 2) = 500.0 / 1113.0;
    t.a(6, 3) = 125.0 / 192.0;
    t.a(6, 4) = -2187.0 / 6784.0;
    t.a(6, 5) = 11.0 / 84.0;
    t.b = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0};
    t.order = 5;
    return {"dp5", t};
}

} // namespace detail

/// Returns the named tableau ("rk4" or "dp5"), order conditions verified.
inline NamedTableau tableau_registry(const std::string& name) {
    NamedTableau nt;
    if (name == "rk4")
        nt = detail::make_rk4();
    else if (name == "dp5")
        nt = detail::make_dp5();
    else
        throw UnknownTableau("unknown tableau '" + name + "' (known: rk4, dp5)");
    check_order_conditions(nt.tableau);
    return nt;
}

} // namespace llrk
