// Maximum-entropy (Jaynes) state reconstruction from the means of one to
// three observables, together with the complete family of density matrices
// consistent with the same data.
//
// Two independent routes are provided on purpose. infer_one/infer_two follow
// the explicit eigenbasis formulas: with A = a1|v><v| + a2|w><w| the diagonal
// of every consistent state in the (v, w) basis is fixed at
//
//   rho11 = (mean - a2) / (a1 - a2),   rho22 = 1 - rho11,
//
// and a second observable B (off-diagonal element made real by a phase
// choice) pins the real part d of the off-diagonal, leaving the imaginary
// part gamma free inside gamma^2 <= rho11 rho22 - d^2. infer_general instead
// works in Bloch space: each constraint is an affine plane n.r = m, entropy
// is strictly decreasing in |r|, so the Jaynes state is the minimum-norm
// point of the affine intersection and the family is the intersection with
// the unit ball. The two routes are cross-checked in the test suite.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "qjaynes/errors.hpp"
#include "qjaynes/qubit.hpp"

namespace qjaynes {

// Relative singular-value cutoff for rank decisions on stacked constraints.
inline constexpr double kRankThreshold = 1e-10;
// Default |Tr(rho A) - mean| tolerance.
inline constexpr double kDefaultTolConsistency = 1e-9;

/// One measured pair (observable, mean value).
struct Constraint {
    Hermitian2 observable;
    double mean = 0.0;
};

/// Ordered list of one to three constraints.
struct ConstraintSet {
    std::vector<Constraint> constraints;
    double tol_consistency = kDefaultTolConsistency;
};

enum class FamilyKind { point, segment, disk, ball };

inline const char* family_kind_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::point: return "point";
        case FamilyKind::segment: return "segment";
        case FamilyKind::disk: return "disk";
        case FamilyKind::ball: return "ball";
    }
    return "unknown";
}

/// All density matrices consistent with a constraint set, parametrized around
/// the Jaynes state. Parameters are in off-diagonal units (the gamma of the
/// segment case): a parameter p displaces the Bloch vector by 2*p along a
/// unit axis, and the anchor is reproduced exactly at p = 0.
///
/// point: no parameters. segment: one, |p| <= extent. disk: two,
/// p1^2+p2^2 <= extent^2. ball: three (only for data of rank zero, where any
/// state is consistent), |p| <= extent = 1/2.
struct ConsistentFamily {
    FamilyKind kind = FamilyKind::point;
    QubitState anchor;
    std::array<Bloch3, 3> axes{};
    double extent = 0.0;

    int dims() const {
        switch (kind) {
            case FamilyKind::point: return 0;
            case FamilyKind::segment: return 1;
            case FamilyKind::disk: return 2;
            case FamilyKind::ball: return 3;
        }
        return 0;
    }

    QubitState state(std::span<const double> params) const {
        const int d = dims();
        if (static_cast<int>(params.size()) > d)
            fail(errc::out_of_family_range, "more parameters than family dimensions");
        std::array<double, 3> p{0.0, 0.0, 0.0};
        double n2 = 0.0;
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (!detail::finite(params[i]))
                fail(errc::out_of_family_range, "non-finite family parameter");
            p[i] = params[i];
            n2 += p[i] * p[i];
        }
        const double n = std::sqrt(n2);
        if (n > extent + 1e-12)
            fail(errc::out_of_family_range, "parameters outside the family range");
        if (n > extent && n > 0.0) {
            const double s = extent / n;
            for (auto& x : p) x *= s;
        }
        double rx = anchor.rx, ry = anchor.ry, rz = anchor.rz;
        for (int i = 0; i < d; ++i) {
            rx += 2.0 * p[i] * axes[i][0];
            ry += 2.0 * p[i] * axes[i][1];
            rz += 2.0 * p[i] * axes[i][2];
        }
        return state_from_bloch(rx, ry, rz);
    }
};

/// Result of a max-entropy inference: the Jaynes state, its entropy and
/// eigenframe, the consistent family, and the rank of the data (number of
/// linearly independent traceless constraint directions).
struct JaynesSolution {
    QubitState rho_j;
    double entropy_bits = 0.0;
    EigenFrame2 frame;
    ConsistentFamily family;
    int data_rank = 0;
    ConstraintSet constraints;
};

inline bool check_consistency(const QubitState& s, const ConstraintSet& cs) {
    for (const auto& c : cs.constraints)
        if (std::abs(expectation(s, c.observable) - c.mean) > cs.tol_consistency) return false;
    return true;
}

inline QubitState family_state(const JaynesSolution& sol, std::span<const double> params) {
    return sol.family.state(params);
}

namespace detail {

inline JaynesSolution finish_solution(const QubitState& rho, ConsistentFamily family, int rank,
                                      ConstraintSet cs) {
    JaynesSolution sol;
    sol.rho_j = rho;
    sol.entropy_bits = entropy_bits(rho);
    sol.frame = eig2(rho.matrix());
    sol.family = std::move(family);
    sol.data_rank = rank;
    sol.constraints = std::move(cs);
    return sol;
}

inline double observable_scale(const Hermitian2& a) {
    return std::max({std::abs(a.h11), std::abs(a.h22), std::abs(a.h12), 1.0});
}

}  // namespace detail

inline JaynesSolution infer_general(const ConstraintSet& cs);

/// Jaynes state for a single nondegenerate observable. The family is the
/// full complex disk of off-diagonal elements in the eigenbasis of A.
inline JaynesSolution infer_one(const Hermitian2& a, double mean,
                                double tol = kDefaultTolConsistency) {
    if (!detail::finite(mean)) fail(errc::invalid_argument, "non-finite mean");
    const EigenFrame2 fa = eig2(a);
    const double a1 = fa.lambda_hi, a2 = fa.lambda_lo;
    if (a1 - a2 <= kRankThreshold * detail::observable_scale(a)) {
        // A is a multiple of the identity: the data fix nothing.
        if (std::abs(mean - a1) > tol)
            fail(errc::inconsistent_data, "mean incompatible with a degenerate observable");
        return infer_general(ConstraintSet{{{a, mean}}, tol});
    }
    if (mean < a2 - tol || mean > a1 + tol)
        fail(errc::inconsistent_data, "mean outside the observable spectrum");
    const double m = std::clamp(mean, a2, a1);
    const double r11 = (m - a2) / (a1 - a2);
    const double r22 = 1.0 - r11;

    const QubitState rho =
        state_from_matrix(detail::matrix_from_frame(r11, r22, fa.e_hi, fa.e_lo));
    ConsistentFamily family;
    family.kind = FamilyKind::disk;
    family.anchor = rho;
    family.axes[0] = detail::offdiag_axis(fa.e_hi, fa.e_lo, false);
    family.axes[1] = detail::offdiag_axis(fa.e_hi, fa.e_lo, true);
    family.extent = std::sqrt(r11 * r22);
    return detail::finish_solution(rho, family, 1, ConstraintSet{{{a, mean}}, tol});
}

/// Jaynes state for two observables. Works in the eigenbasis of A with the
/// relative phase chosen so that B's off-diagonal element c is real and
/// nonnegative; the family is the gamma segment of imaginary off-diagonals.
inline JaynesSolution infer_two(const Hermitian2& a, double mean_a, const Hermitian2& b,
                                double mean_b, double tol = kDefaultTolConsistency) {
    if (!detail::finite(mean_a) || !detail::finite(mean_b))
        fail(errc::invalid_argument, "non-finite mean");
    const EigenFrame2 fa = eig2(a);
    const double a1 = fa.lambda_hi, a2 = fa.lambda_lo;
    if (a1 - a2 <= kRankThreshold * detail::observable_scale(a))
        fail(errc::degenerate_observable, "infer_two requires a nondegenerate first observable");

    const double b1 = detail::quadratic_form(fa.e_hi, b);
    const double b2 = detail::quadratic_form(fa.e_lo, b);
    const complexd b21 = std::conj(b.h12);
    const complexd c_raw = std::conj(fa.e_hi[0]) * (b.h11 * fa.e_lo[0] + b.h12 * fa.e_lo[1]) +
                           std::conj(fa.e_hi[1]) * (b21 * fa.e_lo[0] + b.h22 * fa.e_lo[1]);
    const double c = std::abs(c_raw);
    if (c <= kRankThreshold * detail::observable_scale(b)) {
        // B is diagonal in A's basis, hence a combination of I and A; the
        // general path handles the dependent pair.
        return infer_general(ConstraintSet{{{a, mean_a}, {b, mean_b}}, tol});
    }
    // Absorb the phase into the lower eigenvector: <v|B|w'> = |c| >= 0.
    const complexd ph = std::conj(c_raw) / c;
    const std::array<complexd, 2> w{fa.e_lo[0] * ph, fa.e_lo[1] * ph};

    if (mean_a < a2 - tol || mean_a > a1 + tol)
        fail(errc::inconsistent_data, "first mean outside the observable spectrum");
    const double ma = std::clamp(mean_a, a2, a1);
    const double r11 = (ma - a2) / (a1 - a2);
    const double r22 = 1.0 - r11;
    double d = (mean_b - b1 * r11 - b2 * r22) / (2.0 * c);
    if (d * d > r11 * r22 + tol)
        fail(errc::inconsistent_data, "no positive state matches both means");
    const double dmax = std::sqrt(r11 * r22);
    d = std::clamp(d, -dmax, dmax);
    const double g = std::sqrt(std::max(0.0, r11 * r22 - d * d));

    // rho_J = r11 |v><v| + r22 |w'><w'| + d (|v><w'| + |w'><v|)
    Hermitian2 mrho = detail::matrix_from_frame(r11, r22, fa.e_hi, w);
    const Bloch3 real_axis = detail::offdiag_axis(fa.e_hi, w, false);
    mrho.h11 += d * real_axis[2];
    mrho.h22 -= d * real_axis[2];
    mrho.h12 += d * complexd{real_axis[0], -real_axis[1]};
    const QubitState rho = state_from_matrix(mrho);

    ConsistentFamily family;
    family.kind = FamilyKind::segment;
    family.anchor = rho;
    family.axes[0] = detail::offdiag_axis(fa.e_hi, w, true);
    family.extent = g;
    return detail::finish_solution(rho, family, 2,
                                   ConstraintSet{{{a, mean_a}, {b, mean_b}}, tol});
}

/// General max-entropy solver for 1-3 constraints via minimum-norm Bloch
/// projection. Handles dependent and identity-like constraints uniformly;
/// the family is the affine solution set intersected with the unit ball.
inline JaynesSolution infer_general(const ConstraintSet& cs) {
    const int k = static_cast<int>(cs.constraints.size());
    if (k == 0) fail(errc::empty_constraint_set, "no constraints given");
    if (k > 3) fail(errc::invalid_argument, "more than three constraints");
    for (const auto& c : cs.constraints) {
        if (!detail::finite(c.mean) || !detail::finite(c.observable.h11) ||
            !detail::finite(c.observable.h22) || !detail::finite(c.observable.h12))
            fail(errc::invalid_argument, "non-finite constraint data");
    }

    Eigen::MatrixXd n_mat(k, 3);
    Eigen::VectorXd m_vec(k);
    for (int j = 0; j < k; ++j) {
        const Bloch3 n = cs.constraints[j].observable.traceless_part();
        n_mat(j, 0) = n[0];
        n_mat(j, 1) = n[1];
        n_mat(j, 2) = n[2];
        m_vec(j) = cs.constraints[j].mean - cs.constraints[j].observable.trace_part();
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(n_mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double sv_max = sv.size() > 0 ? sv(0) : 0.0;
    const double cutoff = kRankThreshold * std::max(sv_max, 1e-300);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;

    // Minimum-norm point of the affine solution set.
    Eigen::Vector3d r = Eigen::Vector3d::Zero();
    for (int i = 0; i < rank; ++i)
        r += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(m_vec) / sv(i));

    // Dependent or identity-like constraints must still agree with the data.
    const Eigen::VectorXd resid = n_mat * r - m_vec;
    for (int j = 0; j < k; ++j)
        if (std::abs(resid(j)) > cs.tol_consistency)
            fail(errc::inconsistent_data, "constraints admit no common state");

    double nr = r.norm();
    if (nr > 1.0 + kDefaultTolConsistency)
        fail(errc::inconsistent_data, "constraints reach outside the Bloch ball");
    if (nr > 1.0) r /= nr;
    const QubitState rho = state_from_bloch(r(0), r(1), r(2));

    ConsistentFamily family;
    family.anchor = rho;
    family.extent = 0.5 * std::sqrt(std::max(0.0, 1.0 - rho.norm2()));
    const int free_dims = 3 - rank;
    if (free_dims == 0 || family.extent <= 1e-12) {
        family.kind = FamilyKind::point;
        family.extent = 0.0;
    } else {
        family.kind = free_dims == 1 ? FamilyKind::segment
                                     : (free_dims == 2 ? FamilyKind::disk : FamilyKind::ball);
        for (int i = 0; i < free_dims; ++i) {
            const Eigen::Vector3d u = svd.matrixV().col(rank + i);
            family.axes[i] = {u(0), u(1), u(2)};
        }
    }
    return detail::finish_solution(rho, family, rank, cs);
}

/// Grid scan of the family's entropy; the maximum must sit at the anchor.
struct EntropyScan {
    double max_entropy_found = 0.0;
    std::vector<double> argmax_params;
};

inline EntropyScan entropy_scan(const JaynesSolution& sol, int grid_points) {
    if (grid_points < 3) fail(errc::invalid_argument, "entropy_scan needs at least 3 grid points");
    const int d = sol.family.dims();
    EntropyScan out;
    out.argmax_params.assign(d, 0.0);
    if (d == 0) {
        out.max_entropy_found = entropy_bits(sol.family.anchor);
        return out;
    }
    const double ext = sol.family.extent;
    std::vector<double> ticks(grid_points);
    for (int i = 0; i < grid_points; ++i)
        ticks[i] = -ext + (2.0 * ext) * static_cast<double>(i) / (grid_points - 1);

    double best = -1.0;
    std::array<double, 3> p{0.0, 0.0, 0.0};
    std::array<int, 3> idx{0, 0, 0};
    const long total = static_cast<long>(std::pow(grid_points, d));
    for (long t = 0; t < total; ++t) {
        long rem = t;
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            idx[i] = static_cast<int>(rem % grid_points);
            rem /= grid_points;
            p[i] = ticks[idx[i]];
            n2 += p[i] * p[i];
        }
        if (d > 1 && n2 > ext * ext * (1.0 + 1e-12)) continue;
        const double h = entropy_bits(sol.family.state(std::span<const double>(p.data(), d)));
        if (h > best) {
            best = h;
            out.argmax_params.assign(p.begin(), p.begin() + d);
        }
    }
    out.max_entropy_found = best;
    return out;
}

}  // namespace qjaynes
