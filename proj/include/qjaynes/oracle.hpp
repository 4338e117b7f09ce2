// Dense brute-force reference on full 2^N-dimensional operators (N <= 10).
// Everything the fast binomial/Poisson-binomial paths compute is re-derived
// here by explicit Kronecker products and matrix algebra, so any discrepancy
// points at the fast path. Performance is a non-goal; the cap keeps a full
// comparison run under a second per N.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qjaynes/errors.hpp"
#include "qjaynes/jaynes.hpp"
#include "qjaynes/qubit.hpp"
#include "qjaynes/rng.hpp"
#include "qjaynes/typical.hpp"

namespace qjaynes::oracle {

inline constexpr int kMaxCopies = 10;

using DenseOperator = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

namespace detail {

inline void require_small(int n) {
    if (n > kMaxCopies) fail(errc::too_large, "dense oracle is capped at 10 copies");
    if (n < 1) fail(errc::invalid_argument, "need at least one copy");
}

inline Eigen::Matrix2cd matrix2(const Hermitian2& m) {
    Eigen::Matrix2cd out;
    out << m.h11, m.h12, std::conj(m.h12), m.h22;
    return out;
}

inline DenseOperator kron(const DenseOperator& a, const DenseOperator& b) {
    DenseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace detail

/// Exact Kronecker power s^tensor-n.
inline DenseOperator dense_tensor_power(const QubitState& s, int n) {
    detail::require_small(n);
    const DenseOperator base = detail::matrix2(s.matrix());
    DenseOperator out = base;
    for (int i = 1; i < n; ++i) out = detail::kron(out, base);
    return out;
}

/// Product vector psi_0 tensor ... tensor psi_{N-1} for pure inputs, built
/// from Bloch angles (independent of the library's eigensolver).
inline DenseVector dense_product_state(std::span<const QubitState> qs) {
    detail::require_small(static_cast<int>(qs.size()));
    DenseVector out = DenseVector::Ones(1);
    for (const QubitState& s : qs) {
        if (!s.is_pure()) fail(errc::not_pure, "product-state inputs must be pure");
        const double theta = std::acos(std::clamp(s.rz / std::max(s.norm(), 1e-300), -1.0, 1.0));
        const double phi = std::atan2(s.ry, s.rx);
        Eigen::Vector2cd psi;
        psi << complexd{std::cos(0.5 * theta), 0.0},
            std::polar(std::sin(0.5 * theta), phi);
        DenseVector next(out.size() * 2);
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            next(2 * i) = out(i) * psi(0);
            next(2 * i + 1) = out(i) * psi(1);
        }
        out = next;
    }
    return out;
}

/// Product basis vector for a bit string (bit j of x set = lower eigenvector
/// in slot j), matching the slot convention of dense_product_state.
inline DenseVector dense_basis_string(const EigenFrame2& frame, int n, std::uint32_t x) {
    DenseVector out = DenseVector::Ones(1);
    for (int j = 0; j < n; ++j) {
        const auto& e = ((x >> j) & 1u) ? frame.e_lo : frame.e_hi;
        DenseVector next(out.size() * 2);
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            next(2 * i) = out(i) * e[0];
            next(2 * i + 1) = out(i) * e[1];
        }
        out = next;
    }
    return out;
}

/// Explicit sum of |x><x| over all weight-window strings.
inline DenseOperator dense_projector(const TypicalProjector& p) {
    detail::require_small(p.n_copies);
    const int n = p.n_copies;
    const std::uint32_t dim = 1u << n;
    std::vector<std::uint32_t> strings;
    for (std::uint32_t x = 0; x < dim; ++x) {
        const int w = std::popcount(x);
        if (w >= p.k_lo && w <= p.k_hi) strings.push_back(x);
    }
    DenseOperator cols(dim, static_cast<Eigen::Index>(strings.size()));
    for (std::size_t c = 0; c < strings.size(); ++c)
        cols.col(static_cast<Eigen::Index>(c)) = dense_basis_string(p.frame, n, strings[c]);
    return cols * cols.adjoint();
}

/// Tr(A B) in O(dim^2).
inline double dense_trace_product(const DenseOperator& a, const DenseOperator& b) {
    return a.cwiseProduct(b.transpose()).sum().real();
}

/// Maximal deviations between the fast evaluations and the dense reference
/// over random family members and random pure product states.
struct CompareReport {
    double max_trace_dev = 0.0;
    double max_overlap_dev = 0.0;
    double max_flag_dev = 0.0;
    double max_eq_identity_dev = 0.0;

    double max_deviation() const {
        return std::max({max_trace_dev, max_overlap_dev, max_flag_dev, max_eq_identity_dev});
    }
    bool pass(double tol = 1e-10) const { return max_deviation() <= tol; }
};

namespace detail {

inline QubitState random_family_member(const ConsistentFamily& fam, std::mt19937_64& eng) {
    const int d = fam.dims();
    if (d == 0) return fam.anchor;
    std::array<double, 3> p{0.0, 0.0, 0.0};
    // Rejection sampling keeps the draw uniform over the allowed parameter set.
    for (;;) {
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            p[i] = rng::uniform(eng, -fam.extent, fam.extent);
            n2 += p[i] * p[i];
        }
        if (d == 1 || n2 <= fam.extent * fam.extent) break;
    }
    return fam.state(std::span<const double>(p.data(), static_cast<std::size_t>(d)));
}

inline QubitState random_pure_state(std::mt19937_64& eng) {
    double x = rng::normal(eng), y = rng::normal(eng), z = rng::normal(eng);
    double n = std::sqrt(x * x + y * y + z * z);
    while (n < 1e-12) {
        x = rng::normal(eng);
        y = rng::normal(eng);
        z = rng::normal(eng);
        n = std::sqrt(x * x + y * y + z * z);
    }
    return state_from_bloch(x / n, y / n, z / n);
}

}  // namespace detail

/// Comparison core; `fast` and `dense_source` are normally the same
/// projector. Passing a shifted window as `fast` is the negative-control
/// hook used by the CLI.
inline CompareReport oracle_compare(const JaynesSolution& sol, const TypicalProjector& fast,
                                    const TypicalProjector& dense_source, int trials,
                                    std::uint64_t seed) {
    detail::require_small(dense_source.n_copies);
    const int n = dense_source.n_copies;
    const DenseOperator pd = dense_projector(dense_source);
    std::mt19937_64 eng(rng::splitmix64(seed ^ 0xa54ff53a5f1d36f1ULL));

    CompareReport rep;
    const double tj_dense = dense_trace_product(dense_tensor_power(sol.rho_j, n), pd);
    std::vector<QubitState> qs(n);
    for (int t = 0; t < trials; ++t) {
        const QubitState member = detail::random_family_member(sol.family, eng);
        const double fast_tr = trace_against_product(fast, member);
        const double dense_tr = dense_trace_product(dense_tensor_power(member, n), pd);
        rep.max_trace_dev = std::max(rep.max_trace_dev, std::abs(fast_tr - dense_tr));
        rep.max_eq_identity_dev =
            std::max(rep.max_eq_identity_dev, std::abs(dense_tr - tj_dense));

        for (int i = 0; i < n; ++i) qs[i] = detail::random_pure_state(eng);
        const DenseVector psi = dense_product_state(qs);
        const double fast_ov = overlap_product_pure(fast, qs);
        const double dense_ov = (psi.adjoint() * pd * psi)(0).real();
        rep.max_overlap_dev = std::max(rep.max_overlap_dev, std::abs(fast_ov - dense_ov));

        std::uint32_t flag_bits = 0;
        for (int i = 0; i < fast.k_lo; ++i) flag_bits |= (1u << i);
        const DenseVector flag = dense_basis_string(fast.frame, n, flag_bits);
        const double fast_fl = flag_string_overlap(fast, qs);
        const double dense_fl = std::norm((flag.adjoint() * psi)(0));
        rep.max_flag_dev = std::max(rep.max_flag_dev, std::abs(fast_fl - dense_fl));
    }
    return rep;
}

inline CompareReport oracle_compare(const JaynesSolution& sol, int n, double delta, int trials,
                                    std::uint64_t seed) {
    detail::require_small(n);
    const TypicalProjector p = build_projector(sol, n, delta);
    return oracle_compare(sol, p, p, trials, seed);
}

}  // namespace qjaynes::oracle
