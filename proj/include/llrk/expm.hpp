#pragma once

#include <complex>
#include <cstdlib>
#include <utility>

#include "llrk/matrix.hpp"

namespace llrk {

/// Order pair (p,q) of a rational Pade approximant to e^z.
struct PadeOrder {
    int p = 6;
    int q = 6;

    bool valid() const { return p >= 0 && q >= 0 && p + q >= 1; }

    /// The scheme built on this pair is A-stable iff p <= q <= p+2.
    bool a_stable() const { return p <= q && q <= p + 2; }

    /// L-stable iff q = p+1 or q = p+2.
    bool l_stable() const { return q == p + 1 || q == p + 2; }
};

/// Outcome of the scaling rule: the smallest kappa >= 0 such that the
/// halved argument has infinity norm at most 1/2.
struct ScalingDecision {
    int kappa = 0;
    double scaled_norm = 0.0;
};

struct PadeCoeffs {
    Vector num; // degree p, num[0] = 1
    Vector den; // degree q, den[0] = 1
};

/// Coefficients of the (p,q) Pade approximant of e^z:
///   N(z) = sum_k  p!/(p-k)! * (p+q-k)!/(p+q)! * z^k / k!,   D(z) = N_{q,p}(-z).
inline PadeCoeffs pade_coeffs(PadeOrder order) {
    if (!order.valid()) throw Error("pade_coeffs: need p,q >= 0 and p+q >= 1");
    const auto poly = [](int p, int q) {
        Vector c(static_cast<std::size_t>(p) + 1);
        c[0] = 1.0;
        for (int k = 1; k <= p; ++k)
            c[k] = c[k - 1] * double(p - k + 1) / (double(p + q - k + 1) * double(k));
        return c;
    };
    PadeCoeffs out;
    out.num = poly(order.p, order.q);
    out.den = poly(order.q, order.p);
    for (std::size_t k = 1; k < out.den.size(); k += 2) out.den[k] = -out.den[k];
    return out;
}

/// Smallest kappa >= 0 with ||m * step||_inf / 2^kappa <= 1/2.
inline ScalingDecision scaling_exponent(const DenseMatrix& m, double step) {
    if (!m.finite()) throw Error("scaling_exponent: matrix has non-finite entries");
    if (!(step >= 0.0)) throw Error("scaling_exponent: need step >= 0");
    double norm = m.norm_inf() * step;
    if (!std::isfinite(norm)) throw Error("scaling_exponent: scaled norm overflows");
    ScalingDecision d;
    while (norm > 0.5) {
        norm *= 0.5;
        ++d.kappa;
    }
    d.scaled_norm = norm;
    return d;
}

/// Scalar variant used by the stability function.
inline ScalingDecision scaling_exponent(double magnitude) {
    ScalingDecision d;
    double norm = std::abs(magnitude);
    while (norm > 0.5) {
        norm *= 0.5;
        ++d.kappa;
    }
    d.scaled_norm = norm;
    return d;
}

namespace detail {

/// Horner evaluation of a real-coefficient polynomial in a matrix argument.
inline DenseMatrix poly_eval(const Vector& coeffs, const DenseMatrix& m) {
    const std::size_t n = m.rows();
    DenseMatrix acc(n, n);
    for (std::size_t i = 0; i < n; ++i) acc(i, i) = coeffs.back();
    for (std::size_t k = coeffs.size() - 1; k-- > 0;) {
        acc = acc * m;
        for (std::size_t i = 0; i < n; ++i) acc(i, i) += coeffs[k];
    }
    return acc;
}

inline std::complex<double> poly_eval(const Vector& coeffs, std::complex<double> z) {
    std::complex<double> acc = coeffs.back();
    for (std::size_t k = coeffs.size() - 1; k-- > 0;) acc = acc * z + coeffs[k];
    return acc;
}

/// One rational step N(m)/D(m) on an already scaled scalar argument.
/// Kept separate so the singular-denominator guard can be exercised
/// with unscaled arguments.
inline std::complex<double> rational_stability_base(std::complex<double> m, PadeOrder order) {
    const PadeCoeffs c = pade_coeffs(order);
    const std::complex<double> num = poly_eval(c.num, m);
    const std::complex<double> den = poly_eval(c.den, m);
    if (std::abs(den) < 1e-300)
        throw SingularDenominator("stability function denominator vanishes");
    return num / den;
}

} // namespace detail

struct ExpmResult {
    DenseMatrix value;
    ScalingDecision scaling;
};

/// Matrix exponential by (p,q)-Pade approximation with scaling and squaring:
/// e^m ~ (N(m/2^kappa) / D(m/2^kappa))^(2^kappa), the rational part evaluated
/// as one linear solve D X = N.
inline ExpmResult expm_pade_scaled(const DenseMatrix& m, PadeOrder order = {}) {
    if (!m.square()) throw Error("expm_pade: matrix must be square");
    if (!m.finite()) throw Error("expm_pade: matrix has non-finite entries");
    if (!order.valid()) throw Error("expm_pade: need p,q >= 0 and p+q >= 1");

    ExpmResult out;
    out.scaling = scaling_exponent(m, 1.0);
    DenseMatrix scaled = m;
    if (out.scaling.kappa > 0) scaled *= std::ldexp(1.0, -out.scaling.kappa);

    const PadeCoeffs c = pade_coeffs(order);
    const DenseMatrix num = detail::poly_eval(c.num, scaled);
    const DenseMatrix den = detail::poly_eval(c.den, scaled);

    LuFactor lu = [&] {
        try {
            return LuFactor(den);
        } catch (const SingularMatrix& e) {
            throw SingularDenominator(e.what());
        }
    }();
    if (lu.rcond_estimate() < 1e-14)
        throw SingularDenominator("Pade denominator numerically singular");
    DenseMatrix x = lu.solve(num);

    for (int k = 0; k < out.scaling.kappa; ++k) x = x * x;
    out.value = std::move(x);
    return out;
}

inline DenseMatrix expm_pade(const DenseMatrix& m, PadeOrder order = {}) {
    return expm_pade_scaled(m, order).value;
}

/// Linear stability function R(z) of the scheme, mirroring the scaling
/// and repeated squaring performed by expm_pade on the scalar problem.
inline std::complex<double> stability_value(std::complex<double> z, PadeOrder order = {}) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error("stability_value: non-finite argument");
    const ScalingDecision s = scaling_exponent(std::abs(z));
    std::complex<double> r =
        detail::rational_stability_base(z * std::ldexp(1.0, -s.kappa), order);
    for (int k = 0; k < s.kappa; ++k) r = r * r;
    return r;
}

/// |R(z)| computed by squaring the real modulus ratio |N|/|D|. On the
/// imaginary axis with a diagonal pair the two moduli are bitwise equal,
/// so the result is exactly 1 instead of drifting by 2^kappa * eps.
inline double stability_magnitude(std::complex<double> z, PadeOrder order = {}) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error("stability_magnitude: non-finite argument");
    const ScalingDecision s = scaling_exponent(std::abs(z));
    const std::complex<double> m = z * std::ldexp(1.0, -s.kappa);
    const PadeCoeffs c = pade_coeffs(order);
    const double nmag = std::abs(detail::poly_eval(c.num, m));
    const double dmag = std::abs(detail::poly_eval(c.den, m));
    if (dmag < 1e-300)
        throw SingularDenominator("stability function denominator vanishes");
    double r = nmag / dmag;
    for (int k = 0; k < s.kappa; ++k) r = r * r;
    return r;
}

} // namespace llrk
