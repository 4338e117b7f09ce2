#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "qjaynes/oracle.hpp"
#include "testutil.hpp"

using namespace qjaynes;
using oracle::DenseOperator;

namespace {

std::vector<unsigned long long> pascal_row(int n) {
    std::vector<unsigned long long> row(n + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int k = i; k >= 1; --k) row[k] += row[k - 1];
    return row;
}

}  // namespace

TEST_CASE("dense_tensor_power basics") {
    const DenseOperator mixed3 = oracle::dense_tensor_power(state_from_bloch(0, 0, 0), 3);
    REQUIRE(mixed3.rows() == 8);
    CHECK((mixed3 - 0.125 * DenseOperator::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-15);

    const DenseOperator pure2 = oracle::dense_tensor_power(state_from_bloch(0.6, 0, 0.8), 2);
    CHECK(std::abs(pure2.trace().real() - 1.0) < 1e-10);
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(pure2, Eigen::EigenvaluesOnly);
    // rank one: a single unit eigenvalue
    CHECK(std::abs(es.eigenvalues().maxCoeff() - 1.0) < 1e-12);
    CHECK(es.eigenvalues().cwiseAbs().sum() < 1.0 + 1e-10);

    CHECK_THROWS_AS(oracle::dense_tensor_power(state_from_bloch(0, 0, 0), 12), Error);
}

TEST_CASE("dense_tensor_power eigenvalues are binomial products of the qubit pair") {
    std::mt19937_64 eng(51);
    const QubitState s = testutil::random_state_in_ball(eng);
    const int n = 5;
    const DenseOperator big = oracle::dense_tensor_power(s, n);
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(big, Eigen::EigenvaluesOnly);
    std::vector<double> got(es.eigenvalues().data(), es.eigenvalues().data() + (1 << n));

    const EigenFrame2 f = eig2(s.matrix());
    std::vector<double> expected;
    const auto row = pascal_row(n);
    for (int k = 0; k <= n; ++k) {
        const double v = std::pow(f.lambda_hi, n - k) * std::pow(f.lambda_lo, k);
        for (unsigned long long c = 0; c < row[k]; ++c) expected.push_back(v);
    }
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < got.size(); ++i)
        REQUIRE(std::abs(got[i] - expected[i]) < 1e-12);
}

TEST_CASE("dense_projector is an orthogonal projector with the right trace") {
    const JaynesSolution sol = infer_two(pauli_z(), 0.6, pauli_x(), 0.4);
    const TypicalProjector p = build_projector(sol, 8, 0.25);
    const DenseOperator pd = oracle::dense_projector(p);

    CHECK((pd * pd - pd).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pd - pd.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    const auto row = pascal_row(8);
    unsigned long long count = 0;
    for (int k = p.k_lo; k <= p.k_hi; ++k) count += row[k];
    CHECK(std::abs(pd.trace().real() - static_cast<double>(count)) < 1e-10);

    TypicalProjector full = p;
    full.k_lo = 0;
    full.k_hi = 8;
    const DenseOperator identity = oracle::dense_projector(full);
    CHECK((identity - DenseOperator::Identity(256, 256)).cwiseAbs().maxCoeff() < 1e-12);

    TypicalProjector one = p;
    one.k_lo = 0;
    one.k_hi = 0;
    const DenseOperator rank1 = oracle::dense_projector(one);
    CHECK(std::abs(rank1.trace().real() - 1.0) < 1e-12);

    TypicalProjector too_big = p;
    too_big.n_copies = 12;
    CHECK_THROWS_AS(oracle::dense_projector(too_big), Error);
}

TEST_CASE("oracle_compare stays within tolerance on honest projectors") {
    const JaynesSolution two = infer_two(pauli_z(), 0.6, pauli_x(), 0.4);
    const oracle::CompareReport rep = oracle::oracle_compare(two, 8, 0.2, 200, 7);
    CHECK(rep.max_trace_dev <= 1e-10);
    CHECK(rep.max_overlap_dev <= 1e-10);
    CHECK(rep.max_flag_dev <= 1e-10);
    CHECK(rep.max_eq_identity_dev <= 1e-10);
    CHECK(rep.pass());

    CHECK_THROWS_AS(oracle::oracle_compare(two, 12, 0.2, 10, 7), Error);
}

TEST_CASE("oracle_compare on a point family has exactly zero identity deviation") {
    const JaynesSolution point =
        infer_general(ConstraintSet{{{pauli_x(), 0.3}, {pauli_y(), 0.0}, {pauli_z(), 0.4}}});
    const oracle::CompareReport rep = oracle::oracle_compare(point, 6, 0.2, 50, 9);
    CHECK(rep.max_eq_identity_dev == 0.0);
    CHECK(rep.pass());
}

TEST_CASE("oracle_compare with a full window sees unit traces") {
    const JaynesSolution sol = infer_one(pauli_z(), 0.5);
    // delta large enough that every weight is typical
    const TypicalProjector p = build_projector(sol, 5, 10.0);
    REQUIRE(p.k_lo == 0);
    REQUIRE(p.k_hi == 5);
    const oracle::CompareReport rep = oracle::oracle_compare(sol, p, p, 40, 3);
    CHECK(rep.max_trace_dev <= 1e-10);
    CHECK(rep.max_eq_identity_dev <= 1e-12);
}

TEST_CASE("a corrupted window is caught by the comparison") {
    const JaynesSolution sol = infer_one(pauli_z(), 0.5);
    const TypicalProjector good = build_projector(sol, 8, 0.2);
    TypicalProjector bad = good;
    bad.k_lo = std::min(good.k_lo + 1, 8);
    bad.k_hi = std::min(good.k_hi + 1, 8);
    const oracle::CompareReport rep = oracle::oracle_compare(sol, bad, good, 50, 5);
    CHECK_FALSE(rep.pass());
    CHECK(rep.max_trace_dev > 1e-6);
}
