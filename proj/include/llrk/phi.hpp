#pragma once

#include "llrk/expm.hpp"
#include "llrk/ode_system.hpp"

namespace llrk {

/// Block matrix packing the frozen Jacobian, time derivative and field so
/// that the LL increment is a block of its exponential:
///   autonomous      [[f_x, f], [0, 0]]                  (d+1)x(d+1)
///   non-autonomous  [[f_x, f_t, f], [0,0,1], [0,0,0]]   (d+2)x(d+2)
struct AugmentedMatrix {
    DenseMatrix matrix;
    std::size_t d = 0;
    bool autonomous = true;

    std::size_t size() const { return matrix.rows(); }
};

inline AugmentedMatrix build_augmented(const OdeSystem& sys, double t, std::span<const double> y) {
    if (!finite(y)) throw Error("build_augmented: non-finite state");
    const std::size_t d = sys.dim;
    const Vector f = sys.eval_field(t, y);
    const DenseMatrix j = eval_jacobian(sys, t, y);

    AugmentedMatrix aug;
    aug.d = d;
    aug.autonomous = sys.autonomous;
    if (sys.autonomous) {
        aug.matrix = DenseMatrix(d + 1, d + 1);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) aug.matrix(r, c) = j(r, c);
            aug.matrix(r, d) = f[r];
        }
    } else {
        const Vector ft = sys.eval_time_derivative(t, y);
        aug.matrix = DenseMatrix(d + 2, d + 2);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) aug.matrix(r, c) = j(r, c);
            aug.matrix(r, d) = ft[r];
            aug.matrix(r, d + 1) = f[r];
        }
        aug.matrix(d, d + 1) = 1.0; // couples f_t into f
    }
    return aug;
}

/// Half- and full-step LL increments sharing one matrix exponential:
/// with A ~ e^{D (h/2)}, the half step is L A r and the full step L A^2 r.
struct PhiCache {
    Vector half_step;
    Vector full_step;
    DenseMatrix exp_half;
    int kappa = 0;
};

namespace detail {

/// Top d entries of the last column: L e^{D delta} r.
inline Vector extract_phi(const DenseMatrix& expd, std::size_t d) {
    Vector out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = expd(i, expd.cols() - 1);
    return out;
}

struct PhiEval {
    Vector value;
    int kappa = 0;
};

inline PhiEval phi_from_augmented(const AugmentedMatrix& aug, double delta, PadeOrder order) {
    if (delta < 0.0) throw Error("phi: need delta >= 0");
    if (delta == 0.0) return {Vector(aug.d, 0.0), 0};
    const ExpmResult e = expm_pade_scaled(aug.matrix * delta, order);
    return {extract_phi(e.value, aug.d), e.scaling.kappa};
}

} // namespace detail

/// LL increment phi(t,y;delta) = integral_0^delta e^{f_x (delta-u)} (f + f_t u) du,
/// computed through the augmented matrix exponential. phi(.;0) = 0 exactly.
inline Vector phi(const OdeSystem& sys, double t, std::span<const double> y, double delta,
                  PadeOrder order = {}) {
    if (delta < 0.0) throw Error("phi: need delta >= 0");
    if (delta == 0.0) return Vector(sys.dim, 0.0);
    return detail::phi_from_augmented(build_augmented(sys, t, y), delta, order).value;
}

/// Same contract as phi, through the theta-function representation
///   phi = delta theta1(delta f_x) f + delta^2 theta2(delta f_x) f_t,
/// with theta1(z) = (e^z - 1)/z and theta2(z) = (e^z - 1 - z)/z^2. The theta
/// terms come from augmented exponentials of sizes (d+1) and (d+2); for
/// delta ||f_x|| < 1e-8 a four-term series avoids cancellation.
inline Vector phi_theta(const OdeSystem& sys, double t, std::span<const double> y, double delta,
                        PadeOrder order = {}) {
    if (delta < 0.0) throw Error("phi_theta: need delta >= 0");
    const std::size_t d = sys.dim;
    if (delta == 0.0) return Vector(d, 0.0);

    const Vector f = sys.eval_field(t, y);
    const DenseMatrix j = eval_jacobian(sys, t, y);
    const Vector ft = sys.eval_time_derivative(t, y);

    if (delta * j.norm_inf() < 1e-8) {
        DenseMatrix z = j * delta;
        DenseMatrix z2 = z * z;
        DenseMatrix z3 = z2 * z;
        DenseMatrix th1 = DenseMatrix::identity(d) + z * 0.5 + z2 * (1.0 / 6.0) + z3 * (1.0 / 24.0);
        DenseMatrix th2 = DenseMatrix::identity(d) * 0.5 + z * (1.0 / 6.0) + z2 * (1.0 / 24.0) +
                          z3 * (1.0 / 120.0);
        Vector out = th1 * f;
        const Vector tail = th2 * ft;
        for (std::size_t i = 0; i < d; ++i) out[i] = delta * out[i] + delta * delta * tail[i];
        return out;
    }

    // delta theta1(delta j) f from the (d+1) block [[j, f], [0, 0]]
    DenseMatrix a1(d + 1, d + 1);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) a1(r, c) = j(r, c);
        a1(r, d) = f[r];
    }
    Vector out = detail::extract_phi(expm_pade(a1 * delta, order), d);

    if (!sys.autonomous) {
        // delta^2 theta2(delta j) f_t from the (d+2) block
        // [[j, f_t, 0], [0,0,1], [0,0,0]]
        DenseMatrix a2(d + 2, d + 2);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) a2(r, c) = j(r, c);
            a2(r, d) = ft[r];
        }
        a2(d, d + 1) = 1.0;
        const Vector tail = detail::extract_phi(expm_pade(a2 * delta, order), d);
        for (std::size_t i = 0; i < d; ++i) out[i] += tail[i];
    }
    return out;
}

/// One step of the order-2 LL scheme: y + phi(t,y;h).
inline Vector ll2_step(const OdeSystem& sys, double t, std::span<const double> y, double h,
                       PadeOrder order = {}) {
    if (!(h > 0.0)) throw Error("ll2_step: need h > 0");
    Vector next(y.begin(), y.end());
    const Vector inc = phi(sys, t, y, h, order);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += inc[i];
    return next;
}

/// Computes phi at h/2 and h from a single exponential A ~ e^{D h/2}:
/// half = L A r, full = L A^2 r.
inline PhiCache phi_pair(const OdeSystem& sys, double t, std::span<const double> y, double h,
                         PadeOrder order = {}) {
    if (!(h > 0.0)) throw Error("phi_pair: need h > 0");
    const AugmentedMatrix aug = build_augmented(sys, t, y);
    const ExpmResult e = expm_pade_scaled(aug.matrix * (0.5 * h), order);
    PhiCache cache;
    cache.exp_half = e.value;
    cache.kappa = e.scaling.kappa;
    cache.half_step = detail::extract_phi(cache.exp_half, aug.d);
    cache.full_step = detail::extract_phi(cache.exp_half * cache.exp_half, aug.d);
    return cache;
}

} // namespace llrk
