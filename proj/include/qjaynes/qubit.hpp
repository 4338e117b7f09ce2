// Exact 2x2 Hermitian / density-matrix algebra in Bloch representation:
// construction, analytic spectral decomposition, entropy, expectation values
// and Uhlmann fidelity. Everything here is closed-form; no iterative solvers.
#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "qjaynes/errors.hpp"

namespace qjaynes {

using complexd = std::complex<double>;
using Bloch3 = std::array<double, 3>;

// |r|^2 may exceed 1 by at most this much; such states are clipped to the ball.
inline constexpr double kTolPsd = 1e-12;
// Trace-one tolerance for matrix-form inputs.
inline constexpr double kTolTrace = 1e-9;
// A state counts as pure when |r| >= 1 - kTolPurity.
inline constexpr double kTolPurity = 1e-9;

namespace detail {

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(complexd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace detail

/// Hermitian 2x2 matrix; h21 is implied as conj(h12) and never stored.
struct Hermitian2 {
    double h11 = 0.0;
    double h22 = 0.0;
    complexd h12{0.0, 0.0};

    double trace() const { return h11 + h22; }
    /// Coefficient of I in the Pauli expansion t*I + n.sigma.
    double trace_part() const { return 0.5 * (h11 + h22); }
    /// Bloch vector n of the traceless part.
    Bloch3 traceless_part() const { return {h12.real(), -h12.imag(), 0.5 * (h11 - h22)}; }
};

inline Hermitian2 pauli_x() { return {0.0, 0.0, {1.0, 0.0}}; }
inline Hermitian2 pauli_y() { return {0.0, 0.0, {0.0, -1.0}}; }
inline Hermitian2 pauli_z() { return {1.0, -1.0, {0.0, 0.0}}; }
inline Hermitian2 identity2() { return {1.0, 1.0, {0.0, 0.0}}; }

/// Qubit density matrix (I + r.sigma)/2 stored as the Bloch vector r.
/// Invariant: |r| <= 1 (trace one and hermiticity are structural).
struct QubitState {
    double rx = 0.0;
    double ry = 0.0;
    double rz = 0.0;

    double norm2() const { return rx * rx + ry * ry + rz * rz; }
    double norm() const { return std::sqrt(norm2()); }
    bool is_pure(double tol = kTolPurity) const { return norm() >= 1.0 - tol; }

    double rho11() const { return 0.5 * (1.0 + rz); }
    double rho22() const { return 0.5 * (1.0 - rz); }
    complexd rho12() const { return {0.5 * rx, -0.5 * ry}; }
    complexd rho21() const { return {0.5 * rx, 0.5 * ry}; }

    Hermitian2 matrix() const { return {rho11(), rho22(), rho12()}; }

    double det() const { return 0.25 * (1.0 - norm2()); }

    Bloch3 bloch() const { return {rx, ry, rz}; }
};

/// Validates |r|^2 <= 1 + kTolPsd and radially clips into the Bloch ball.
inline QubitState state_from_bloch(double rx, double ry, double rz) {
    if (!detail::finite(rx) || !detail::finite(ry) || !detail::finite(rz))
        fail(errc::not_density_matrix, "non-finite Bloch components");
    const double n2 = rx * rx + ry * ry + rz * rz;
    if (!(n2 <= 1.0 + kTolPsd))
        fail(errc::not_density_matrix, "Bloch vector outside the unit ball");
    if (n2 > 1.0) {
        const double s = 1.0 / std::sqrt(n2);
        rx *= s;
        ry *= s;
        rz *= s;
    }
    return {rx, ry, rz};
}

inline QubitState state_from_bloch(const Bloch3& r) { return state_from_bloch(r[0], r[1], r[2]); }

/// Builds a state from matrix entries; requires unit trace and positivity
/// within tolerance.
inline QubitState state_from_matrix(double h11, double h22, complexd h12) {
    if (!detail::finite(h11) || !detail::finite(h22) || !detail::finite(h12))
        fail(errc::not_density_matrix, "non-finite matrix entries");
    if (std::abs(h11 + h22 - 1.0) > kTolTrace)
        fail(errc::not_density_matrix, "trace differs from one");
    return state_from_bloch(2.0 * h12.real(), -2.0 * h12.imag(), h11 - h22);
}

inline QubitState state_from_matrix(const Hermitian2& m) {
    return state_from_matrix(m.h11, m.h22, m.h12);
}

/// Spectral frame of a Hermitian 2x2 matrix: ordered eigenvalues plus an
/// orthonormal eigenbasis with a fixed phase convention (first nonzero
/// component of each eigenvector real and positive).
struct EigenFrame2 {
    double lambda_hi = 0.0;
    double lambda_lo = 0.0;
    std::array<complexd, 2> e_hi{complexd{1.0, 0.0}, complexd{0.0, 0.0}};
    std::array<complexd, 2> e_lo{complexd{0.0, 0.0}, complexd{1.0, 0.0}};
};

namespace detail {

inline void fix_phase(std::array<complexd, 2>& v) {
    const int lead = (std::abs(v[0]) != 0.0) ? 0 : 1;
    const double mag = std::abs(v[lead]);
    if (mag == 0.0) return;
    const complexd ph = std::conj(v[lead]) / mag;
    v[0] *= ph;
    v[1] *= ph;
    // The lead component is real by construction; scrub its rounding dust.
    v[lead] = complexd{v[lead].real(), 0.0};
}

}  // namespace detail

/// Closed-form eigendecomposition. The exactly degenerate case returns the
/// canonical basis so downstream projectors are reproducible.
inline EigenFrame2 eig2(const Hermitian2& m) {
    if (!detail::finite(m.h11) || !detail::finite(m.h22) || !detail::finite(m.h12))
        fail(errc::invalid_argument, "non-finite matrix entries in eig2");
    const double mean = 0.5 * (m.h11 + m.h22);
    const double half = 0.5 * (m.h11 - m.h22);
    const double off2 = std::norm(m.h12);
    const double s = std::sqrt(half * half + off2);

    EigenFrame2 f;
    f.lambda_hi = mean + s;
    f.lambda_lo = mean - s;
    if (s == 0.0) return f;  // canonical basis already set

    // Two algebraically equivalent eigenvector candidates; the larger-norm one
    // is immune to cancellation.
    std::array<complexd, 2> hi;
    if (half >= 0.0)
        hi = {complexd{s + half, 0.0}, std::conj(m.h12)};
    else
        hi = {m.h12, complexd{s - half, 0.0}};
    const double n = std::sqrt(std::norm(hi[0]) + std::norm(hi[1]));
    hi[0] /= n;
    hi[1] /= n;

    std::array<complexd, 2> lo{-std::conj(hi[1]), std::conj(hi[0])};
    detail::fix_phase(hi);
    detail::fix_phase(lo);
    f.e_hi = hi;
    f.e_lo = lo;
    return f;
}

inline double binary_entropy_bits(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Von Neumann entropy in bits; depends on |r| only.
inline double entropy_bits(const QubitState& s) {
    const double r = s.norm();
    if (r >= 1.0) return 0.0;
    return binary_entropy_bits(0.5 * (1.0 + r));
}

/// Tr(rho A) for Hermitian A; always real.
inline double expectation(const QubitState& s, const Hermitian2& a) {
    return 0.5 * (a.h11 * (1.0 + s.rz) + a.h22 * (1.0 - s.rz)) + s.rx * a.h12.real() -
           s.ry * a.h12.imag();
}

/// Uhlmann fidelity, qubit closed form: Tr(rho sigma) + 2 sqrt(det rho det sigma).
inline double fidelity(const QubitState& rho, const QubitState& sigma) {
    const double dot = rho.rx * sigma.rx + rho.ry * sigma.ry + rho.rz * sigma.rz;
    const double dr = std::max(0.0, 1.0 - rho.norm2());
    const double ds = std::max(0.0, 1.0 - sigma.norm2());
    return detail::clamp01(0.5 * (1.0 + dot + std::sqrt(dr * ds)));
}

namespace detail {

/// Pure state |e><e| as a QubitState for a unit 2-vector e.
inline QubitState pure_state_from_vector(const std::array<complexd, 2>& e) {
    const complexd r01 = e[0] * std::conj(e[1]);
    return state_from_bloch(2.0 * r01.real(), -2.0 * r01.imag(),
                            std::norm(e[0]) - std::norm(e[1]));
}

/// <e| M |e> for Hermitian M (real up to rounding).
inline double quadratic_form(const std::array<complexd, 2>& e, const Hermitian2& m) {
    const complexd h21 = std::conj(m.h12);
    const complexd me0 = m.h11 * e[0] + m.h12 * e[1];
    const complexd me1 = h21 * e[0] + m.h22 * e[1];
    return (std::conj(e[0]) * me0 + std::conj(e[1]) * me1).real();
}

/// Reassembles lam_hi |hi><hi| + lam_lo |lo><lo| into matrix form.
inline Hermitian2 matrix_from_frame(double lam_hi, double lam_lo, const std::array<complexd, 2>& hi,
                                    const std::array<complexd, 2>& lo) {
    const double h11 = lam_hi * std::norm(hi[0]) + lam_lo * std::norm(lo[0]);
    const double h22 = lam_hi * std::norm(hi[1]) + lam_lo * std::norm(lo[1]);
    const complexd h12 = lam_hi * hi[0] * std::conj(hi[1]) + lam_lo * lo[0] * std::conj(lo[1]);
    return {h11, h22, h12};
}

/// Bloch axis of |v><w| + |w><v| (imaginary = false) or i|v><w| - i|w><v|
/// (imaginary = true) for orthonormal v, w. Both operators are traceless
/// Hermitian with eigenvalues +-1, so the axis comes out unit length.
inline Bloch3 offdiag_axis(const std::array<complexd, 2>& v, const std::array<complexd, 2>& w,
                           bool imaginary) {
    complexd m00 = v[0] * std::conj(w[0]);
    complexd m01 = v[0] * std::conj(w[1]);
    complexd m10 = v[1] * std::conj(w[0]);
    if (!imaginary) {
        const double d00 = 2.0 * m00.real();
        const complexd off = m01 + std::conj(m10);
        return {off.real(), -off.imag(), d00};
    }
    const complexd i{0.0, 1.0};
    const double d00 = (i * m00 - i * std::conj(m00)).real();
    const complexd off = i * m01 - i * std::conj(m10);
    return {off.real(), -off.imag(), d00};
}

}  // namespace detail

}  // namespace qjaynes
