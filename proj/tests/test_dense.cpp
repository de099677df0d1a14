#include "doctest.h"

#include <Eigen/Dense>

#include <complex>
#include <random>

#include "eer/dense.hpp"

using namespace eer;
using cd = std::complex<double>;

namespace {

ComplexMatrix<double> random_complex(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix<double> m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = cd(g(rng), g(rng));
    return m;
}

Operator random_hermitian(Index n, std::mt19937_64& rng) {
    ComplexMatrix<double> m = random_complex(n, rng);
    return Operator(((m + m.adjoint()) / 2.0).eval(), true);
}

DensityMatrix random_density(Index n, std::mt19937_64& rng) {
    ComplexMatrix<double> a = random_complex(n, rng);
    ComplexMatrix<double> rho = a * a.adjoint();
    rho /= rho.trace();
    return DensityMatrix(rho);
}

// Haar-ish unitary via QR of a complex Gaussian matrix
ComplexMatrix<double> random_unitary(Index n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<ComplexMatrix<double>> qr(random_complex(n, rng));
    return qr.householderQ() * ComplexMatrix<double>::Identity(n, n);
}

// minimal local sigma_x so this file does not depend on models
Eigen::MatrixXcd pauli_like() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

}  // namespace

TEST_CASE("operator type checks its contracts") {
    Eigen::MatrixXcd rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(Operator{rect}, dimension_error);

    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 0, 0;  // not Hermitian
    CHECK_NOTHROW(Operator{m});
    CHECK_THROWS_AS(Operator(m, true), hermiticity_error);

    // hint accepts matrices Hermitian to rounding
    Operator h(Eigen::MatrixXcd(pauli_like()), true);
    CHECK(h.dim() == 2);
}

TEST_CASE("pure state and density matrix validation") {
    Eigen::VectorXcd v(2);
    v << 1.0, 1.0;
    CHECK_THROWS_AS(PureState{v}, state_error);
    v /= v.norm();
    CHECK_NOTHROW(PureState{v});

    Eigen::MatrixXcd half = Eigen::MatrixXcd::Identity(2, 2) * 0.7;
    CHECK_THROWS_AS(DensityMatrix{half}, state_error);

    Eigen::MatrixXcd neg(2, 2);
    neg << 1.5, 0, 0, -0.5;  // trace 1 but indefinite
    CHECK_THROWS_AS(DensityMatrix{neg}, state_error);

    const PureState psi(v);
    const DensityMatrix rho = projector(psi);
    CHECK(std::abs(rho.mat().trace() - cd(1, 0)) < 1e-14);
}

TEST_CASE("kron identities") {
    const Eigen::MatrixXcd I2 = Eigen::MatrixXcd::Identity(2, 2);

    CHECK(max_abs(kron_dense(I2, I2) - Eigen::MatrixXcd::Identity(4, 4)) == 0.0);

    Eigen::MatrixXcd d(2, 2);
    d << 1, 0, 0, 2;
    Eigen::VectorXcd diag_expect(4);
    diag_expect << 1, 1, 2, 2;
    CHECK(max_abs(Eigen::MatrixXcd(kron_dense(d, I2)).diagonal() - diag_expect) ==
          0.0);

    // sigma_x on both factors flips |00> to |11>
    Eigen::MatrixXcd sx = pauli_like();
    Eigen::VectorXcd e00 = Eigen::VectorXcd::Zero(4), e11 = Eigen::VectorXcd::Zero(4);
    e00(0) = 1;
    e11(3) = 1;
    CHECK(max_abs(kron_dense(sx, sx) * e00 - e11) == 0.0);

    const Operator a(d, true), b(I2, true);
    CHECK(kron(a, b).hermitian_hint);
}

TEST_CASE("partial trace recovers product factors") {
    std::mt19937_64 rng(11);
    const DensityMatrix rA = random_density(3, rng);
    const DensityMatrix rB = random_density(4, rng);
    const DensityMatrix rho(kron_dense(rA.mat(), rB.mat()));
    const BipartitePartition part{3, 4};

    CHECK(max_abs(partial_trace(rho, part, Keep::A).mat() - rA.mat()) < 1e-14);
    CHECK(max_abs(partial_trace(rho, part, Keep::B).mat() - rB.mat()) < 1e-14);
}

TEST_CASE("partial trace of a Bell pair is maximally mixed") {
    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const DensityMatrix rho = projector(PureState(bell));
    const DensityMatrix rA = partial_trace(rho, {2, 2}, Keep::A);
    CHECK(max_abs(rA.mat() - Eigen::MatrixXcd::Identity(2, 2) / 2.0) < 1e-15);
}

TEST_CASE("partial trace of (1/d) sum |i i><j j| is I/d") {
    const Index d = 3;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) m(i * d + i, j * d + j) = 1.0 / double(d);
    const DensityMatrix rho(m);
    const DensityMatrix rA = partial_trace(rho, {d, d}, Keep::A);
    CHECK(max_abs(rA.mat() - Eigen::MatrixXcd::Identity(d, d) / double(d)) < 1e-15);
}

TEST_CASE("partial trace preserves trace and positivity") {
    std::mt19937_64 rng(17);
    for (Index dA = 2; dA <= 6; ++dA) {
        for (Index dB = 2; dB <= 6; dB += 2) {
            const DensityMatrix rho = random_density(dA * dB, rng);
            const BipartitePartition part{dA, dB};
            for (Keep keep : {Keep::A, Keep::B}) {
                // the DensityMatrix constructor re-validates trace and spectrum
                const DensityMatrix red = partial_trace(rho, part, keep);
                CHECK(red.dim() == (keep == Keep::A ? dA : dB));
            }
        }
    }
    CHECK_THROWS_AS(partial_trace(random_density(8, rng), {3, 3}, Keep::A),
                    partition_error);
}

TEST_CASE("commutator basics") {
    std::mt19937_64 rng(3);
    const Operator A = random_hermitian(4, rng);
    CHECK(max_abs(commutator(A, A).mat) < 1e-14);

    Eigen::MatrixXcd sx = pauli_like();
    Eigen::MatrixXcd sy(2, 2), sz(2, 2);
    sy << 0, cd(0, -1), cd(0, 1), 0;
    sz << 1, 0, 0, -1;
    CHECK(max_abs(commutator(Operator(sx), Operator(sy)).mat - cd(0, 2) * sz) <
          1e-15);

    Eigen::MatrixXcd da = Eigen::VectorXcd::LinSpaced(3, 1.0, 3.0).asDiagonal();
    Eigen::MatrixXcd db = Eigen::VectorXcd::LinSpaced(3, -1.0, 5.0).asDiagonal();
    CHECK(max_abs(commutator(Operator(da), Operator(db)).mat) == 0.0);

    CHECK_THROWS_AS(commutator(A, Operator(sx)), dimension_error);
}

TEST_CASE("hermitian_eig pins simple spectra and reconstructs") {
    const Operator I2(Eigen::MatrixXcd::Identity(2, 2), true);
    auto ei = hermitian_eig(I2);
    CHECK(ei.values(0) == doctest::Approx(1.0));
    CHECK(ei.values(1) == doctest::Approx(1.0));

    const Operator sx(pauli_like(), true);
    auto ex = hermitian_eig(sx);
    CHECK(ex.values(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ex.values(1) == doctest::Approx(1.0).epsilon(1e-14));
    // Hadamard columns up to phase
    for (Index c = 0; c < 2; ++c) {
        CHECK(std::abs(ex.vectors(0, c)) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(std::abs(ex.vectors(1, c)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    }

    std::mt19937_64 rng(23);
    const Operator H = random_hermitian(50, rng);
    auto eh = hermitian_eig(H);
    const ComplexMatrix<double> rec =
        eh.vectors * eh.values.cast<cd>().asDiagonal() * eh.vectors.adjoint();
    CHECK(max_abs(rec - H.mat) < 1e-10 * max_abs(H.mat));
    CHECK(max_abs(eh.vectors * eh.vectors.adjoint() -
                  ComplexMatrix<double>::Identity(50, 50)) < 1e-12);

    CHECK_THROWS_AS(hermitian_eig(Operator(pauli_like(), false)),
                    hermiticity_error);
}

TEST_CASE("spectral functions: exp, log, power") {
    const Operator zero(Eigen::MatrixXcd::Zero(3, 3), true);
    CHECK(max_abs(matrix_func_hermitian(zero, MatrixFunc::exp).op.mat -
                  Eigen::MatrixXcd::Identity(3, 3)) < 1e-15);

    Eigen::MatrixXcd half = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
    const auto lg = matrix_func_hermitian(Operator(half, true), MatrixFunc::log);
    CHECK(max_abs(lg.op.mat + std::log(2.0) * Eigen::MatrixXcd::Identity(2, 2)) <
          1e-15);
    CHECK(lg.floored_count == 0);

    std::mt19937_64 rng(5);
    const DensityMatrix rho = random_density(5, rng);

    SUBCASE("exp(log(rho)) round trip on full rank") {
        const auto l = matrix_func_hermitian(rho.op, MatrixFunc::log);
        const auto e = matrix_func_hermitian(l.op, MatrixFunc::exp);
        CHECK(max_abs(e.op.mat - rho.mat()) < 1e-10);
    }

    SUBCASE("exp(H) exp(-H) = I") {
        const Operator H = random_hermitian(6, rng);
        const Operator mH(ComplexMatrix<double>(-H.mat), true);
        const auto e1 = matrix_func_hermitian(H, MatrixFunc::exp);
        const auto e2 = matrix_func_hermitian(mH, MatrixFunc::exp);
        CHECK(max_abs(e1.op.mat * e2.op.mat -
                      ComplexMatrix<double>::Identity(6, 6)) < 1e-10);
    }

    SUBCASE("sqrt round trip") {
        const auto s = matrix_func_hermitian(rho.op, MatrixFunc::power, 1e-14, 0.5);
        CHECK(max_abs(s.op.mat * s.op.mat - rho.mat()) < 1e-12);
    }

    SUBCASE("rank-deficient log floors or throws") {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(3);
        v(0) = 1.0;
        const DensityMatrix pure = projector(PureState(v));
        const auto floored = matrix_func_hermitian(pure.op, MatrixFunc::log);
        CHECK(floored.floored_count == 2);
        CHECK_THROWS_AS(matrix_func_hermitian(pure.op, MatrixFunc::log, 0.0),
                        singular_spectrum_error);
    }
}

TEST_CASE("trace_product equals trace of the product") {
    std::mt19937_64 rng(7);
    const ComplexMatrix<double> A = random_complex(5, rng);
    const ComplexMatrix<double> B = random_complex(5, rng);
    CHECK(std::abs(trace_product(A, B) - (A * B).trace()) < 1e-12);
}

TEST_CASE("expectation values") {
    Eigen::VectorXcd e0(2);
    e0 << 1, 0;
    const DensityMatrix ground = projector(PureState(e0));
    const DensityMatrix mixed(Eigen::MatrixXcd::Identity(2, 2) / 2.0);
    const Operator I2(Eigen::MatrixXcd::Identity(2, 2), true);
    Eigen::MatrixXcd sz(2, 2);
    sz << 1, 0, 0, -1;

    CHECK(expectation(I2, mixed).real() == doctest::Approx(1.0));
    CHECK(expectation(Operator(sz, true), ground).real() == doctest::Approx(1.0));
    CHECK(std::abs(expectation(Operator(pauli_like(), true), mixed)) < 1e-15);
    CHECK_THROWS_AS(expectation(Operator(Eigen::MatrixXcd::Identity(3, 3), true),
                                mixed),
                    dimension_error);
}

TEST_CASE("hollow and diagonal predicates") {
    Eigen::MatrixXcd sz(2, 2);
    sz << 1, 0, 0, -1;
    CHECK(is_hollow(Operator(pauli_like()), 1e-12));
    CHECK(is_diagonal(Operator(sz), 1e-12));
    CHECK_FALSE(is_hollow(Operator(sz), 1e-12));
    CHECK(is_hollow(Operator(Eigen::MatrixXcd::Zero(2, 2)), 1e-12));
}

TEST_CASE("entropy-style basis invariance of the spectrum") {
    std::mt19937_64 rng(29);
    const DensityMatrix rho = random_density(6, rng);
    const ComplexMatrix<double> U = random_unitary(6, rng);
    const DensityMatrix rot(U * rho.mat() * U.adjoint());
    auto a = hermitian_eig(rho.op).values;
    auto b = hermitian_eig(rot.op).values;
    CHECK(max_abs(a - b) < 1e-12);
}
