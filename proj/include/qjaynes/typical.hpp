// Typical subspace of rho_J^tensor-N represented as a Hamming-weight window
// over the eigen-product basis, plus the trace/overlap evaluations the
// compression protocol needs. Nothing here materializes a 2^N object: sizes
// and traces reduce to binomial sums in log space, and product-state
// overlaps reduce to a Poisson-binomial weight distribution.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "qjaynes/errors.hpp"
#include "qjaynes/jaynes.hpp"
#include "qjaynes/qubit.hpp"

namespace qjaynes {

/// Projector onto the delta-typical subspace of rho_J^tensor-N. A product
/// basis string with k copies of the lower eigenvector is typical iff its
/// per-copy surprisal -(1/N) log2(p_hi^(N-k) (1-p_hi)^k) is within delta of
/// the entropy, which maps affinely to k in [k_lo, k_hi].
struct TypicalProjector {
    int n_copies = 1;
    double delta = 0.0;
    EigenFrame2 frame;
    double p_hi = 1.0;
    int k_lo = 0;
    int k_hi = 0;
};

/// Nonnegative scalar kept as log2; -infinity encodes exact zero. Used for
/// binomial sums and rank capacities whose linear values overflow doubles.
struct LogWeight {
    double log2_value = -std::numeric_limits<double>::infinity();

    static LogWeight zero() { return {}; }
    static LogWeight from_log2(double l) { return {l}; }

    bool is_zero() const { return log2_value == -std::numeric_limits<double>::infinity(); }
    double linear() const { return std::exp2(log2_value); }

    /// this += other, stable log-sum-exp.
    LogWeight& add(LogWeight other) {
        if (other.is_zero()) return *this;
        if (is_zero()) {
            log2_value = other.log2_value;
            return *this;
        }
        const double hi = std::max(log2_value, other.log2_value);
        const double lo = std::min(log2_value, other.log2_value);
        log2_value = hi + std::log2(1.0 + std::exp2(lo - hi));
        return *this;
    }

    /// this -= other; requires other <= this.
    LogWeight& subtract(LogWeight other) {
        if (other.is_zero()) return *this;
        if (other.log2_value >= log2_value) {
            log2_value = -std::numeric_limits<double>::infinity();
            return *this;
        }
        constexpr double ln2 = 0.69314718055994530941723212145818;
        log2_value += std::log2(-std::expm1((other.log2_value - log2_value) * ln2));
        return *this;
    }
};

inline TypicalProjector build_projector(const JaynesSolution& sol, int n, double delta) {
    if (!(delta > 0.0)) fail(errc::invalid_delta, "delta must be positive");
    if (n < 1) fail(errc::invalid_argument, "need at least one copy");

    TypicalProjector p;
    p.n_copies = n;
    p.delta = delta;
    p.frame = sol.frame;
    p.p_hi = std::min(std::max(sol.frame.lambda_hi, 0.5), 1.0);

    if (p.p_hi == 1.0) {
        p.k_lo = p.k_hi = 0;  // deterministic source, single string
        return p;
    }
    if (p.p_hi == 0.5) {
        p.k_lo = 0;  // flat spectrum, every string is typical
        p.k_hi = n;
        return p;
    }
    const double q = 1.0 - p.p_hi;
    const double dl = std::log2(p.p_hi / q);
    const double x = delta / dl;
    p.k_lo = std::max(0, static_cast<int>(std::ceil(n * (q - x))));
    p.k_hi = std::min(n, static_cast<int>(std::floor(n * (q + x))));
    if (p.k_lo > p.k_hi) {
        // Narrow windows at tiny N can miss every integer; keep the projector
        // nonzero by falling back to the most probable weight.
        const int k = std::clamp(static_cast<int>(std::llround(n * q)), 0, n);
        p.k_lo = p.k_hi = k;
    }
    return p;
}

namespace detail {

inline constexpr double kLn2 = 0.69314718055994530941723212145818;

inline double log_binom(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double log2_binom(int n, int k) { return log_binom(n, k) / kLn2; }

/// Sum of C(n,k) d_hi^(n-k) d_lo^k over k in [lo, hi], accumulated in log
/// space. Zero diagonals reduce to at most one surviving term.
inline double weight_window_mass(int n, double d_hi, double d_lo, int lo, int hi) {
    lo = std::max(lo, 0);
    hi = std::min(hi, n);
    if (lo > hi) return 0.0;
    if (d_lo <= 0.0) return lo == 0 ? std::pow(d_hi, n) : 0.0;
    if (d_hi <= 0.0) return hi == n ? std::pow(d_lo, n) : 0.0;
    const double lh = std::log2(d_hi);
    const double ll = std::log2(d_lo);
    LogWeight sum = LogWeight::zero();
    for (int k = lo; k <= hi; ++k)
        sum.add(LogWeight::from_log2(log2_binom(n, k) + (n - k) * lh + k * ll));
    return sum.linear();
}

inline void require_matching_length(const TypicalProjector& p, std::size_t got) {
    if (got != static_cast<std::size_t>(p.n_copies))
        fail(errc::invalid_argument, "state list length differs from n_copies");
}

/// Probabilities q_i = <e_lo| psi_i |e_lo> of landing on the lower basis
/// vector; inputs must be pure.
inline std::vector<double> lower_probabilities(const TypicalProjector& p,
                                               std::span<const QubitState> qs) {
    require_matching_length(p, qs.size());
    std::vector<double> q(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (!qs[i].is_pure()) fail(errc::not_pure, "overlap inputs must be pure states");
        q[i] = clamp01(quadratic_form(p.frame.e_lo, qs[i].matrix()));
    }
    return q;
}

}  // namespace detail

/// log2 of the typical-subspace dimension, Sum_k C(N,k) over the window.
inline double log2_dimension(const TypicalProjector& p) {
    const int n = p.n_copies;
    if (p.k_lo == 0 && p.k_hi == n) return static_cast<double>(n);
    LogWeight dim = LogWeight::zero();
    for (int k = p.k_lo; k <= p.k_hi; ++k)
        dim.add(LogWeight::from_log2(detail::log2_binom(n, k)));
    return dim.log2_value;
}

/// Tr(s^tensor-N P): only the diagonal of s in the projector frame matters,
/// which is exactly why the error probability is the same for every state
/// consistent with the data.
inline double trace_against_product(const TypicalProjector& p, const QubitState& s) {
    if (p.k_lo <= 0 && p.k_hi >= p.n_copies) return 1.0;  // P is the identity
    const double d_hi = detail::clamp01(detail::quadratic_form(p.frame.e_hi, s.matrix()));
    const double d_lo = detail::clamp01(detail::quadratic_form(p.frame.e_lo, s.matrix()));
    return detail::clamp01(
        detail::weight_window_mass(p.n_copies, d_hi, d_lo, p.k_lo, p.k_hi));
}

/// Tr(s^tensor-N (I - P)), accumulated directly over the complement window so
/// small error probabilities keep full precision.
inline double window_complement_mass(const TypicalProjector& p, const QubitState& s) {
    if (p.k_lo <= 0 && p.k_hi >= p.n_copies) return 0.0;
    const double d_hi = detail::clamp01(detail::quadratic_form(p.frame.e_hi, s.matrix()));
    const double d_lo = detail::clamp01(detail::quadratic_form(p.frame.e_lo, s.matrix()));
    const int n = p.n_copies;
    const double below = detail::weight_window_mass(n, d_hi, d_lo, 0, p.k_lo - 1);
    const double above = detail::weight_window_mass(n, d_hi, d_lo, p.k_hi + 1, n);
    return detail::clamp01(below + above);
}

/// Poisson-binomial pmf of Sum_i Bernoulli(q_i) by O(N^2) dynamic
/// programming; every update is a convex combination so the pmf stays a
/// probability vector to machine precision.
inline std::vector<double> poisson_binomial_pmf(std::span<const double> qs) {
    const int n = static_cast<int>(qs.size());
    std::vector<double> f(n + 1, 0.0);
    f[0] = 1.0;
    for (int i = 0; i < n; ++i) {
        const double q = qs[i];
        for (int k = i + 1; k >= 1; --k) f[k] = f[k] * (1.0 - q) + f[k - 1] * q;
        f[0] *= (1.0 - q);
    }
    return f;
}

/// <Psi| P |Psi> for a pure product state: the probability that the weight of
/// the measured string lands in the window.
inline double overlap_product_pure(const TypicalProjector& p, std::span<const QubitState> qs) {
    const std::vector<double> q = detail::lower_probabilities(p, qs);
    const std::vector<double> pmf = poisson_binomial_pmf(q);
    double sum = 0.0;
    for (int k = std::max(0, p.k_lo); k <= std::min(p.k_hi, p.n_copies); ++k) sum += pmf[k];
    return detail::clamp01(sum);
}

/// |<Psi|flag>|^2 against the canonical flag string: weight k_lo with the
/// lower-eigenvector slots at the smallest indices.
inline double flag_string_overlap(const TypicalProjector& p, std::span<const QubitState> qs) {
    const std::vector<double> q = detail::lower_probabilities(p, qs);
    double prod = 1.0;
    for (int i = 0; i < p.n_copies; ++i) prod *= (i < p.k_lo) ? q[i] : (1.0 - q[i]);
    return detail::clamp01(prod);
}

}  // namespace qjaynes
