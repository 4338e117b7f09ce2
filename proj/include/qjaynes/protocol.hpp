// End-to-end simulation of typical-subspace compression for ensembles
// consistent with the measured data, and the rank-budget converse check.
//
// Per transmitted sequence the protocol measures {P, I-P}; on the error
// branch the state is replaced by a fixed flag vector inside the subspace.
// The resulting per-sequence fidelity
//
//   F = <Psi|P|Psi>^2 + <Psi|(I-P)|Psi> |<Psi|flag>|^2
//
// is computed exactly, so the Monte Carlo average carries statistical error
// only. Sampling is reproducible bit-for-bit across thread counts: every
// sample owns a substream seeded from (seed, N, sample index) and the
// reduction runs in index order.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <thread>
#include <vector>

#include "qjaynes/errors.hpp"
#include "qjaynes/jaynes.hpp"
#include "qjaynes/qubit.hpp"
#include "qjaynes/rng.hpp"
#include "qjaynes/typical.hpp"

namespace qjaynes {

/// Probability-weighted list of pure states.
struct PureEnsemble {
    struct Member {
        double probability = 0.0;
        QubitState state;
    };
    std::vector<Member> members;

    QubitState average() const {
        double rx = 0.0, ry = 0.0, rz = 0.0;
        for (const auto& m : members) {
            rx += m.probability * m.state.rx;
            ry += m.probability * m.state.ry;
            rz += m.probability * m.state.rz;
        }
        return state_from_bloch(rx, ry, rz);
    }

    void validate(double tol_prob = 1e-12, double tol_pure = kTolPurity) const {
        if (members.empty()) fail(errc::invalid_argument, "empty ensemble");
        double sum = 0.0;
        for (const auto& m : members) {
            if (!(m.probability >= 0.0)) fail(errc::invalid_argument, "negative probability");
            if (!m.state.is_pure(tol_pure)) fail(errc::not_pure, "ensemble member is not pure");
            sum += m.probability;
        }
        if (std::abs(sum - 1.0) > tol_prob)
            fail(errc::invalid_argument, "probabilities do not sum to one");
    }
};

enum class DecomposeMethod { eigen, random_mix };

/// Writes a state as a pure-state ensemble averaging back to it: either the
/// two-member spectral decomposition, or m members obtained by mixing the
/// spectral vectors through a seeded random isometry (any column-orthonormal
/// m x 2 matrix U yields phi_i = sum_j U_ij sqrt(lambda_j) |e_j>).
inline PureEnsemble decompose_ensemble(const QubitState& s, DecomposeMethod method, int m = 0,
                                       std::uint64_t seed = 0) {
    PureEnsemble ens;
    if (s.is_pure()) {
        ens.members.push_back({1.0, s});
        return ens;
    }
    const EigenFrame2 f = eig2(s.matrix());
    if (method == DecomposeMethod::eigen) {
        ens.members.push_back({f.lambda_hi, detail::pure_state_from_vector(f.e_hi)});
        ens.members.push_back({f.lambda_lo, detail::pure_state_from_vector(f.e_lo)});
        return ens;
    }
    if (method != DecomposeMethod::random_mix) fail(errc::invalid_method, "unknown method");
    if (m < 2) fail(errc::invalid_method, "random_mix needs at least 2 members");

    std::mt19937_64 eng(rng::splitmix64(seed ^ 0x6a09e667f3bcc908ULL));
    // Random m x 2 complex Gaussian, orthonormalized columns.
    std::vector<complexd> u0(m), u1(m);
    for (int i = 0; i < m; ++i) u0[i] = {rng::normal(eng), rng::normal(eng)};
    for (int i = 0; i < m; ++i) u1[i] = {rng::normal(eng), rng::normal(eng)};
    double n0 = 0.0;
    for (int i = 0; i < m; ++i) n0 += std::norm(u0[i]);
    n0 = std::sqrt(n0);
    for (int i = 0; i < m; ++i) u0[i] /= n0;
    complexd proj{0.0, 0.0};
    for (int i = 0; i < m; ++i) proj += std::conj(u0[i]) * u1[i];
    for (int i = 0; i < m; ++i) u1[i] -= proj * u0[i];
    double n1 = 0.0;
    for (int i = 0; i < m; ++i) n1 += std::norm(u1[i]);
    n1 = std::sqrt(n1);
    for (int i = 0; i < m; ++i) u1[i] /= n1;

    const double sh = std::sqrt(std::max(0.0, f.lambda_hi));
    const double sl = std::sqrt(std::max(0.0, f.lambda_lo));
    for (int i = 0; i < m; ++i) {
        const std::array<complexd, 2> phi{sh * u0[i] * f.e_hi[0] + sl * u1[i] * f.e_lo[0],
                                          sh * u0[i] * f.e_hi[1] + sl * u1[i] * f.e_lo[1]};
        const double p = std::norm(phi[0]) + std::norm(phi[1]);
        if (p <= 1e-14) continue;  // negligible weight, below reconstruction tolerance
        const double inv = 1.0 / std::sqrt(p);
        ens.members.push_back(
            {p, detail::pure_state_from_vector({phi[0] * inv, phi[1] * inv})});
    }
    return ens;
}

struct SimulationRecord {
    int n_copies = 0;
    double rate_bits = 0.0;
    double p_error_exact = 0.0;
    double fidelity_mc_mean = 0.0;
    double fidelity_mc_stderr = 0.0;
    double fidelity_lower_bound = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
};

struct SimulationReport {
    std::vector<SimulationRecord> records;
};

namespace detail {

/// Exact fidelity of one drawn message sequence under the projective scheme.
inline double sequence_fidelity(const TypicalProjector& proj, std::span<const double> qseq,
                                std::vector<double>& pmf_buf) {
    const int n = proj.n_copies;
    std::fill(pmf_buf.begin(), pmf_buf.end(), 0.0);
    pmf_buf[0] = 1.0;
    for (int i = 0; i < n; ++i) {
        const double q = qseq[i];
        for (int k = i + 1; k >= 1; --k) pmf_buf[k] = pmf_buf[k] * (1.0 - q) + pmf_buf[k - 1] * q;
        pmf_buf[0] *= (1.0 - q);
    }
    double w = 0.0;
    for (int k = proj.k_lo; k <= proj.k_hi; ++k) w += pmf_buf[k];
    w = clamp01(w);
    double flag = 1.0;
    for (int i = 0; i < n; ++i) flag *= (i < proj.k_lo) ? qseq[i] : (1.0 - qseq[i]);
    return clamp01(w * w + (1.0 - w) * clamp01(flag));
}

}  // namespace detail

/// Runs the compression protocol for each N in n_list. The exact error
/// probability comes from the ensemble average; the average fidelity is a
/// Monte Carlo mean of exact per-sequence values.
inline SimulationReport simulate(const JaynesSolution& sol, const PureEnsemble& ens,
                                 std::span<const int> n_list, double delta, int samples,
                                 std::uint64_t seed, int threads = 1) {
    ens.validate();
    if (samples < 1) fail(errc::invalid_argument, "need at least one sample");
    const QubitState avg = ens.average();
    if (!check_consistency(avg, sol.constraints))
        fail(errc::inconsistent_ensemble, "ensemble average violates the constraints");

    const int nmembers = static_cast<int>(ens.members.size());
    std::vector<double> cum(nmembers);
    double acc = 0.0;
    for (int i = 0; i < nmembers; ++i) {
        acc += ens.members[i].probability;
        cum[i] = acc;
    }
    cum[nmembers - 1] = 1.0;

    int nthreads = threads;
    if (nthreads <= 0) nthreads = static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, samples));

    SimulationReport report;
    for (const int n : n_list) {
        const TypicalProjector proj = build_projector(sol, n, delta);
        SimulationRecord rec;
        rec.n_copies = n;
        rec.samples = samples;
        rec.seed = seed;
        rec.rate_bits = log2_dimension(proj) / n;
        rec.p_error_exact = window_complement_mass(proj, avg);
        rec.fidelity_lower_bound = 1.0 - 2.0 * rec.p_error_exact;

        std::vector<double> member_q(nmembers);
        for (int i = 0; i < nmembers; ++i)
            member_q[i] = detail::clamp01(
                detail::quadratic_form(proj.frame.e_lo, ens.members[i].state.matrix()));

        std::vector<double> fid(samples);
        auto run_chunk = [&](int begin, int end) {
            std::vector<double> qseq(n);
            std::vector<double> pmf(n + 1);
            for (int j = begin; j < end; ++j) {
                std::mt19937_64 eng(
                    rng::substream_seed(seed, static_cast<std::uint64_t>(n), j));
                for (int i = 0; i < n; ++i) {
                    const double u = rng::uniform01(eng);
                    const int idx = static_cast<int>(
                        std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
                    qseq[i] = member_q[std::min(idx, nmembers - 1)];
                }
                fid[j] = detail::sequence_fidelity(proj, qseq, pmf);
            }
        };
        if (nthreads == 1) {
            run_chunk(0, samples);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(nthreads);
            for (int t = 0; t < nthreads; ++t) {
                const int begin = static_cast<int>(static_cast<long>(samples) * t / nthreads);
                const int end = static_cast<int>(static_cast<long>(samples) * (t + 1) / nthreads);
                pool.emplace_back(run_chunk, begin, end);
            }
            for (auto& th : pool) th.join();
        }

        double mean = 0.0;
        for (int j = 0; j < samples; ++j) mean += fid[j];
        mean /= samples;
        double var = 0.0;
        if (samples > 1) {
            for (int j = 0; j < samples; ++j) var += (fid[j] - mean) * (fid[j] - mean);
            var /= (samples - 1);
        }
        rec.fidelity_mc_mean = mean;
        rec.fidelity_mc_stderr = std::sqrt(var / samples);
        report.records.push_back(rec);
    }
    return report;
}

struct ConverseRecord {
    int n_copies = 0;
    double rank_budget_log2 = 0.0;
    double best_retained_trace = 0.0;
};

struct ConverseReport {
    std::vector<ConverseRecord> records;
};

/// Ky Fan optimum of Tr(rho_J^tensor-N Q) over projectors Q with rank at most
/// 2^floor(N b): eigenvalues of the tensor power are constant on weight
/// classes and decrease with weight, so the best projector greedily fills
/// whole classes and splits the last one. Exact in O(N) per N.
inline ConverseReport converse_check(const JaynesSolution& sol, std::span<const int> n_list,
                                     double rate_budget_bits) {
    if (!(rate_budget_bits > 0.0) || !(rate_budget_bits <= 1.0))
        fail(errc::invalid_budget, "rate budget must lie in (0, 1]");
    const double p = std::min(std::max(sol.frame.lambda_hi, 0.5), 1.0);
    const double q = 1.0 - p;

    ConverseReport report;
    for (const int n : n_list) {
        if (n < 1) fail(errc::invalid_argument, "need at least one copy");
        ConverseRecord rec;
        rec.n_copies = n;
        rec.rank_budget_log2 = std::floor(n * rate_budget_bits);
        if (rec.rank_budget_log2 >= n) {
            rec.best_retained_trace = 1.0;  // the whole space is affordable
            report.records.push_back(rec);
            continue;
        }

        const double lp = std::log2(p);
        const double lq = q > 0.0 ? std::log2(q) : 0.0;
        LogWeight cap_left = LogWeight::from_log2(rec.rank_budget_log2);  // remaining rank
        double retained = 0.0;
        for (int k = 0; k <= n; ++k) {
            if (q <= 0.0 && k > 0) break;
            const double lcount = detail::log2_binom(n, k);
            const double mass = std::exp2(lcount + (n - k) * lp + k * lq);
            if (lcount <= cap_left.log2_value) {
                retained += mass;
                cap_left.subtract(LogWeight::from_log2(lcount));
                if (cap_left.is_zero()) break;
            } else {
                // split the last weight class: (rank left / class size) of its mass
                retained += std::exp2(cap_left.log2_value - lcount) * mass;
                break;
            }
        }
        rec.best_retained_trace = detail::clamp01(retained);
        report.records.push_back(rec);
    }
    return report;
}

}  // namespace qjaynes
