#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "eer/dynamics.hpp"
#include "eer/models.hpp"

using namespace eer;
using cd = std::complex<double>;

namespace {

Operator random_hermitian(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix<double> m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = cd(g(rng), g(rng));
    return Operator(((m + m.adjoint()) / 2.0).eval(), true);
}

}  // namespace

TEST_CASE("xx chain matrix elements") {
    SUBCASE("two-site open chain is the hopping matrix") {
        const Operator H = xx_chain_single_excitation({2, 0.0, 1.0, Boundary::open});
        ComplexMatrix<double> expect(2, 2);
        expect << 0, 1, 1, 0;
        CHECK(max_abs(H.mat - expect) == 0.0);
    }

    SUBCASE("field term shifts the diagonal by lambda(2-L)/2") {
        const Operator h2 = xx_chain_single_excitation({3, 2.0, 1.0, Boundary::open});
        const Operator h0 = xx_chain_single_excitation({3, 0.0, 1.0, Boundary::open});
        CHECK(max_abs(h2.mat - h0.mat +
                      ComplexMatrix<double>::Identity(3, 3)) == 0.0);
    }

    SUBCASE("periodic L=4 spectrum is 2J cos(2 pi k / L)") {
        const Operator H =
            xx_chain_single_excitation({4, 0.0, 1.0, Boundary::periodic});
        auto ev = hermitian_eig(H).values;
        CHECK(ev(0) == doctest::Approx(-2.0).epsilon(1e-12));
        CHECK(std::abs(ev(1)) < 1e-12);
        CHECK(std::abs(ev(2)) < 1e-12);
        CHECK(ev(3) == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("open L=5 spectrum is 2J cos(pi k/(L+1))") {
        const Operator H =
            xx_chain_single_excitation({5, 0.0, 1.0, Boundary::open});
        auto ev = hermitian_eig(H).values;
        std::vector<double> expect;
        for (int k = 1; k <= 5; ++k)
            expect.push_back(2.0 * std::cos(std::numbers::pi * k / 6.0));
        std::sort(expect.begin(), expect.end());
        for (Index i = 0; i < 5; ++i)
            CHECK(ev(i) == doctest::Approx(expect[size_t(i)]).epsilon(1e-12));
    }

    SUBCASE("rejects invalid chain specs") {
        CHECK_THROWS_AS(xx_chain_single_excitation({1, 0.0, 1.0, Boundary::open}),
                        config_error);
        CHECK_THROWS_AS(xx_chain_single_excitation({4, 0.0, 0.0, Boundary::open}),
                        config_error);
    }
}

TEST_CASE("spin wave states") {
    SUBCASE("k = L is the uniform superposition") {
        const PureState psi = spin_wave_state(4, 4);
        // phases e^{2 pi i j} collapse to 1
        for (Index j = 0; j < 4; ++j)
            CHECK(std::abs(psi.amplitudes(j) - cd(0.5, 0.0)) < 1e-13);
    }

    SUBCASE("eigenvector of the periodic chain with the plane-wave energy") {
        const Index L = 100;
        const double lambda = 0.7, J = 2.0;
        const Operator H =
            xx_chain_single_excitation({L, lambda, J, Boundary::periodic});
        const PureState psi = spin_wave_state(L, 1);
        const double Ek = lambda * double(2 - L) / 2.0 +
                          2.0 * J * std::cos(2.0 * std::numbers::pi / double(L));
        CHECK((H.mat * psi.amplitudes - Ek * psi.amplitudes).norm() < 1e-10);
    }

    SUBCASE("wave index is 1-based and bounded") {
        CHECK_THROWS_AS(spin_wave_state(4, 0), config_error);
        CHECK_THROWS_AS(spin_wave_state(4, 5), config_error);
        CHECK_NOTHROW(spin_wave_state(4, 1));
    }
}

TEST_CASE("site perturbation in the single-excitation sector") {
    const Operator P = site_perturbation(3, 1);
    ComplexMatrix<double> expect = -0.5 * ComplexMatrix<double>::Identity(3, 3);
    expect(0, 0) = 0.5;
    CHECK(max_abs(P.mat - expect) == 0.0);
    CHECK(P.mat.trace().real() == doctest::Approx(1.0 - 3.0 / 2.0));

    // both diagonal, so the field part of the chain commutes with it
    const Operator chain = xx_chain_single_excitation({3, 5.0, 1.0, Boundary::open});
    const ComplexMatrix<double> field_part =
        ComplexMatrix<double>(chain.mat.diagonal().asDiagonal());
    CHECK(max_abs(field_part * P.mat - P.mat * field_part) == 0.0);

    CHECK_THROWS_AS(site_perturbation(3, 0), config_error);
    CHECK_THROWS_AS(site_perturbation(3, 4), config_error);
}

TEST_CASE("bipartite model composition") {
    const Operator sz = pauli_z();

    SUBCASE("sigma_z pair gives diag(2,0,0,-2)") {
        const BipartiteModel m = bipartite_model(sz, sz);
        ComplexMatrix<double> expect = ComplexMatrix<double>::Zero(4, 4);
        expect(0, 0) = 2;
        expect(3, 3) = -2;
        CHECK(max_abs(m.H0.mat - expect) == 0.0);

        auto mult = eigenvalue_multiplicities(hermitian_eig(m.H0).values, 1e-9);
        REQUIRE(mult.size() == 3);
        CHECK(std::abs(mult[1].first) < 1e-12);
        CHECK(mult[1].second == 2);
        CHECK_FALSE(is_nondegenerate(hermitian_eig(m.H0).values, 1e-9));
    }

    SUBCASE("zero H_B reduces to H_A x I") {
        const Operator zero(ComplexMatrix<double>::Zero(3, 3), true);
        const BipartiteModel m = bipartite_model(sz, zero);
        CHECK(max_abs(m.H0.mat -
                      kron_dense(sz.mat, ComplexMatrix<double>::Identity(3, 3))) ==
              0.0);
    }

    SUBCASE("spectrum is the multiset of pairwise sums") {
        std::mt19937_64 rng(41);
        const Operator HA = random_hermitian(3, rng);
        const Operator HB = random_hermitian(2, rng);
        const BipartiteModel m = bipartite_model(HA, HB);
        auto ea = hermitian_eig(HA).values;
        auto eb = hermitian_eig(HB).values;
        std::vector<double> sums;
        for (Index i = 0; i < 3; ++i)
            for (Index j = 0; j < 2; ++j) sums.push_back(ea(i) + eb(j));
        std::sort(sums.begin(), sums.end());
        auto e0 = hermitian_eig(m.H0).values;
        for (Index i = 0; i < 6; ++i)
            CHECK(e0(i) == doctest::Approx(sums[size_t(i)]).epsilon(1e-12));
    }
}

TEST_CASE("product eigenstates") {
    const BipartiteModel m = bipartite_model(pauli_z(), pauli_z());
    const DensityMatrix rho = product_eigenstate(m, 0, 0);

    // both ground states are |1>, so the composite is |11><11|
    ComplexMatrix<double> expect = ComplexMatrix<double>::Zero(4, 4);
    expect(3, 3) = 1;
    CHECK(max_abs(rho.mat() - expect) < 1e-14);

    const DensityMatrix rA = partial_trace(rho, m.part(), Keep::A);
    CHECK(std::abs((rA.mat() * rA.mat()).trace() - cd(1, 0)) < 1e-14);  // pure
    CHECK(max_abs(commutator(m.H0, rho.op).mat) < 1e-14);

    CHECK_THROWS_AS(product_eigenstate(m, 2, 0), dimension_error);
}

TEST_CASE("maximally entangled state") {
    SUBCASE("d=2 is the Bell projector") {
        const DensityMatrix rho = maximally_entangled_state(2);
        ComplexMatrix<double> expect = ComplexMatrix<double>::Zero(4, 4);
        expect(0, 0) = expect(0, 3) = expect(3, 0) = expect(3, 3) = 0.5;
        CHECK(max_abs(rho.mat() - expect) < 1e-15);
        CHECK(std::abs((rho.mat() * rho.mat()).trace() - cd(1, 0)) < 1e-14);
    }

    SUBCASE("reduction is maximally mixed") {
        const Index d = 3;
        const DensityMatrix rA =
            partial_trace(maximally_entangled_state(d), {d, d}, Keep::A);
        CHECK(max_abs(rA.mat() -
                      ComplexMatrix<double>::Identity(d, d) / double(d)) < 1e-14);
    }

    CHECK_THROWS_AS(maximally_entangled_state(1), config_error);
}

TEST_CASE("gibbs states") {
    const Operator sz = pauli_z();

    SUBCASE("beta 0 is maximally mixed") {
        CHECK(max_abs(gibbs_state(sz, 0.0).mat() -
                      ComplexMatrix<double>::Identity(2, 2) / 2.0) < 1e-14);
    }

    SUBCASE("low temperature projects on the ground state") {
        const DensityMatrix rho = gibbs_state(sz, 50.0);
        ComplexMatrix<double> expect = ComplexMatrix<double>::Zero(2, 2);
        expect(1, 1) = 1;
        CHECK(max_abs(rho.mat() - expect) < 1e-10);
    }

    SUBCASE("thermal states are stationary") {
        std::mt19937_64 rng(43);
        const Operator H = random_hermitian(5, rng);
        const DensityMatrix rho = gibbs_state(H, 0.8);
        CHECK(std::abs(rho.mat().trace() - cd(1, 0)) < 1e-13);
        CHECK_NOTHROW(require_stationary(rho, H));
    }

    CHECK_THROWS_AS(gibbs_state(sz, -1.0), state_error);
    CHECK_THROWS_AS(gibbs_state(Operator(pauli_x().mat, false), 1.0),
                    hermiticity_error);
}

TEST_CASE("thermofield double purifies the Gibbs state") {
    std::mt19937_64 rng(47);
    const Operator HA = random_hermitian(3, rng);
    const double beta = 0.8;
    const PureState psi = thermofield_double_vector(HA, beta);

    const DensityMatrix rA = partial_trace(projector(psi), {3, 3}, Keep::A);
    CHECK(max_abs(rA.mat() - gibbs_state(HA, beta).mat()) < 1e-12);

    // stationary under H_A x I - I x H_A
    const Operator HB(ComplexMatrix<double>(-HA.mat), true);
    const BipartiteModel m = bipartite_model(HA, HB);
    CHECK_NOTHROW(require_stationary(projector(psi), m.H0));

    CHECK_THROWS_AS(thermofield_double_vector(HA, -2.0), state_error);
}

TEST_CASE("pauli matrices and degeneracy report") {
    CHECK(max_abs(commutator(pauli_x(), pauli_y()).mat -
                  cd(0, 2) * pauli_z().mat) < 1e-15);
    CHECK(max_abs(identity_op(3).mat - ComplexMatrix<double>::Identity(3, 3)) ==
          0.0);

    RealVector<double> vals(4);
    vals << -1.0, -1.0 + 1e-12, 0.5, 2.0;
    CHECK_FALSE(is_nondegenerate(vals, 1e-9));
    auto mult = eigenvalue_multiplicities(vals, 1e-9);
    REQUIRE(mult.size() == 3);
    CHECK(mult[0].second == 2);
}
