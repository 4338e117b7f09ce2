#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "qjaynes/qubit.hpp"
#include "testutil.hpp"

using namespace qjaynes;

TEST_CASE("state_from_matrix maps matrix entries to the Bloch vector") {
    const QubitState up = state_from_matrix(1.0, 0.0, {0.0, 0.0});
    CHECK(up.rx == 0.0);
    CHECK(up.ry == 0.0);
    CHECK(up.rz == 1.0);

    const QubitState mixed = state_from_matrix(0.5, 0.5, {0.0, 0.0});
    CHECK(mixed.norm() == 0.0);

    const QubitState s = state_from_matrix(0.75, 0.25, {0.1, 0.2});
    CHECK(std::abs(s.rx - 0.2) < 1e-15);
    CHECK(std::abs(s.ry + 0.4) < 1e-15);
    CHECK(std::abs(s.rz - 0.5) < 1e-15);
    // reconstruct the matrix from the Bloch form
    const Hermitian2 m = s.matrix();
    CHECK(std::abs(m.h11 - 0.75) < 1e-15);
    CHECK(std::abs(m.h22 - 0.25) < 1e-15);
    CHECK(std::abs(m.h12 - complexd{0.1, 0.2}) < 1e-15);
}

TEST_CASE("state_from_matrix rejects invalid density matrices") {
    CHECK_THROWS_AS(state_from_matrix(0.8, 0.3, {0.0, 0.0}), Error);  // trace 1.1
    CHECK_THROWS_AS(state_from_matrix(1.2, -0.2, {0.0, 0.0}), Error);  // negative eigenvalue
    CHECK_THROWS_AS(state_from_matrix(0.5, 0.5, {0.51, 0.0}), Error);  // |r| > 1
    try {
        state_from_matrix(1.2, -0.2, {0.0, 0.0});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::not_density_matrix);
    }
}

TEST_CASE("state_from_bloch clips within tolerance and rejects beyond") {
    const QubitState s = state_from_bloch(0.0, 0.0, std::sqrt(1.0 + 0.5e-12));
    CHECK(s.norm() <= 1.0);
    CHECK(s.norm() > 1.0 - 1e-12);
    CHECK_THROWS_AS(state_from_bloch(0.0, 0.0, 1.0 + 1e-5), Error);
}

TEST_CASE("eig2 matches hand-solved spectra") {
    const EigenFrame2 fz = eig2(pauli_z());
    CHECK(fz.lambda_hi == 1.0);
    CHECK(fz.lambda_lo == -1.0);
    CHECK(fz.e_hi[0] == complexd{1.0, 0.0});
    CHECK(fz.e_lo[1] == complexd{1.0, 0.0});

    const EigenFrame2 fx = eig2(pauli_x());
    const double is2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(fx.lambda_hi - 1.0) < 1e-15);
    CHECK(std::abs(fx.lambda_lo + 1.0) < 1e-15);
    CHECK(std::abs(fx.e_hi[0] - complexd{is2, 0.0}) < 1e-15);
    CHECK(std::abs(fx.e_hi[1] - complexd{is2, 0.0}) < 1e-15);
    CHECK(std::abs(fx.e_lo[0] - complexd{is2, 0.0}) < 1e-15);
    CHECK(std::abs(fx.e_lo[1] + complexd{is2, 0.0}) < 1e-15);

    // characteristic polynomial: lambda = 1/2 +- sqrt(((h11-h22)/2)^2 + |h12|^2)
    const EigenFrame2 f = eig2({0.8, 0.2, {0.2, 0.0}});
    CHECK(std::abs(f.lambda_hi - (0.5 + std::sqrt(0.13))) < 1e-15);
    CHECK(std::abs(f.lambda_lo - (0.5 - std::sqrt(0.13))) < 1e-15);
}

TEST_CASE("eig2 degenerate input returns the canonical basis") {
    const EigenFrame2 f = eig2({0.5, 0.5, {0.0, 0.0}});
    CHECK(f.lambda_hi == f.lambda_lo);
    CHECK(f.e_hi[0] == complexd{1.0, 0.0});
    CHECK(f.e_hi[1] == complexd{0.0, 0.0});
    CHECK(f.e_lo[1] == complexd{1.0, 0.0});
}

TEST_CASE("eig2 reconstruction, ordering, orthonormality and phase on random input") {
    std::mt19937_64 eng(11);
    double worst = 0.0;
    for (int t = 0; t < 100000; ++t) {
        const Hermitian2 m = testutil::random_hermitian(eng, 10.0);
        const EigenFrame2 f = eig2(m);
        REQUIRE(f.lambda_hi >= f.lambda_lo);

        const auto& v = f.e_hi;
        const auto& w = f.e_lo;
        const complexd ip = std::conj(v[0]) * w[0] + std::conj(v[1]) * w[1];
        REQUIRE(std::abs(ip) < 1e-12);
        REQUIRE(std::abs(std::norm(v[0]) + std::norm(v[1]) - 1.0) < 1e-12);
        REQUIRE(std::abs(std::norm(w[0]) + std::norm(w[1]) - 1.0) < 1e-12);

        // phase convention: first nonzero component real and positive
        for (const auto& e : {v, w}) {
            const complexd lead = std::abs(e[0]) != 0.0 ? e[0] : e[1];
            REQUIRE(lead.imag() == 0.0);
            REQUIRE(lead.real() > 0.0);
        }

        // reconstruction residual in max-entry norm
        const Hermitian2 r = detail::matrix_from_frame(f.lambda_hi, f.lambda_lo, v, w);
        const double res = std::max({std::abs(r.h11 - m.h11), std::abs(r.h22 - m.h22),
                                     std::abs(r.h12 - m.h12)});
        worst = std::max(worst, res);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("entropy_bits on known values") {
    CHECK(entropy_bits(state_from_bloch(0, 0, 0)) == 1.0);
    CHECK(entropy_bits(state_from_bloch(0, 0, 1)) == 0.0);
    // binary entropy of lambda = 0.75, frozen from an independent
    // high-precision evaluation
    const QubitState s = state_from_bloch(0, 0, 0.5);
    CHECK(std::abs(entropy_bits(s) - 0.81127812445913286) < 1e-15);
}

TEST_CASE("entropy_bits is rotation invariant") {
    std::mt19937_64 eng(12);
    for (int t = 0; t < 2000; ++t) {
        const double r = rng::uniform01(eng);
        const QubitState a = state_from_bloch(0, 0, r);
        QubitState b = testutil::random_pure_state(eng);
        b = state_from_bloch(r * b.rx, r * b.ry, r * b.rz);
        REQUIRE(std::abs(entropy_bits(a) - entropy_bits(b)) < 1e-12);
    }
}

TEST_CASE("expectation on known values and against matrix multiplication") {
    CHECK(expectation(state_from_bloch(0, 0, 0), pauli_z()) == 0.0);
    CHECK(expectation(state_from_bloch(0, 0, 1), pauli_z()) == 1.0);
    CHECK(std::abs(expectation(state_from_bloch(0.4, 0, 0.6), pauli_x()) - 0.4) < 1e-15);

    std::mt19937_64 eng(13);
    for (int t = 0; t < 5000; ++t) {
        const QubitState s = testutil::random_state_in_ball(eng);
        const Hermitian2 a = testutil::random_hermitian(eng, 5.0);
        const auto prod = testutil::mat_mul(testutil::to_mat2(s.matrix()), testutil::to_mat2(a));
        const complexd tr = testutil::mat_trace(prod);
        REQUIRE(std::abs(tr.imag()) < 1e-12);
        REQUIRE(std::abs(expectation(s, a) - tr.real()) < 1e-12);
    }
}

TEST_CASE("fidelity on known values") {
    const QubitState up = state_from_bloch(0, 0, 1);
    const QubitState down = state_from_bloch(0, 0, -1);
    const QubitState mixed = state_from_bloch(0, 0, 0);
    CHECK(fidelity(up, up) == 1.0);
    CHECK(fidelity(up, down) == 0.0);
    CHECK(fidelity(up, mixed) == 0.5);
}

namespace {

// Uhlmann fidelity via eigendecomposition, the general route:
// [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2, evaluated with Eigen.
double fidelity_eigen_route(const QubitState& a, const QubitState& b) {
    Eigen::Matrix2cd ra, rb;
    ra << a.rho11(), a.rho12(), a.rho21(), a.rho22();
    rb << b.rho11(), b.rho12(), b.rho21(), b.rho22();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(ra);
    Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
    const Eigen::Matrix2cd sqrt_ra =
        es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    const Eigen::Matrix2cd inner = sqrt_ra * rb * sqrt_ra;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es2(inner);
    Eigen::Vector2d ev2 = es2.eigenvalues().cwiseMax(0.0);
    const double tr = ev2.cwiseSqrt().sum();
    return tr * tr;
}

}  // namespace

TEST_CASE("fidelity properties and agreement with the eigendecomposition route") {
    std::mt19937_64 eng(14);
    for (int t = 0; t < 10000; ++t) {
        const QubitState a = testutil::random_state_in_ball(eng);
        const QubitState b = testutil::random_state_in_ball(eng);
        const double fab = fidelity(a, b);
        REQUIRE(fab >= 0.0);
        REQUIRE(fab <= 1.0);
        REQUIRE(std::abs(fab - fidelity(b, a)) < 1e-12);
        REQUIRE(std::abs(fab - fidelity_eigen_route(a, b)) < 1e-10);
    }
}

TEST_CASE("fidelity equals one iff the Bloch vectors coincide") {
    std::mt19937_64 eng(15);
    for (int t = 0; t < 2000; ++t) {
        QubitState a = testutil::random_state_in_ball(eng);
        a = state_from_bloch(0.9 * a.rx, 0.9 * a.ry, 0.9 * a.rz);
        REQUIRE(fidelity(a, a) > 1.0 - 1e-12);
        const QubitState c = state_from_bloch(a.rx + (a.rx > 0 ? -0.01 : 0.01), a.ry, a.rz);
        REQUIRE(fidelity(a, c) < 1.0 - 1e-9);
    }
}

TEST_CASE("Bloch round trip is the identity") {
    std::mt19937_64 eng(16);
    for (int t = 0; t < 5000; ++t) {
        const QubitState s = testutil::random_state_in_ball(eng);
        const Hermitian2 m = s.matrix();
        const QubitState back = state_from_matrix(m.h11, m.h22, m.h12);
        REQUIRE(std::abs(back.rx - s.rx) < 1e-12);
        REQUIRE(std::abs(back.ry - s.ry) < 1e-12);
        REQUIRE(std::abs(back.rz - s.rz) < 1e-12);
    }
}
