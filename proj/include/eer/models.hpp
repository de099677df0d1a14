#pragma once

// Model builders: XX chain in the single-excitation sector, site-local
// perturbation, non-interacting bipartite Hamiltonians, Gibbs and
// entangled reference states.

#include <vector>

#include "eer/dense.hpp"

namespace eer {

enum class Boundary { open, periodic };

struct XXChainSpec {
    Index L = 2;
    double lambda = 0.0;
    double J = 1.0;
    Boundary boundary = Boundary::periodic;

    void check() const {
        if (L < 2) throw config_error("XX chain needs L >= 2");
        if (!(J != 0.0) || !std::isfinite(J))
            throw config_error("XX chain coupling J must be finite and nonzero");
        if (!std::isfinite(lambda))
            throw config_error("XX chain field lambda must be finite");
    }
};

// Site-excitation basis: diagonal lambda*(2-L)/2 (one up-spin out of L),
// hopping J between neighbors, wrap-around J when periodic.
Operator xx_chain_single_excitation(const XXChainSpec& spec);

// Plane wave a_j = e^{i(2pi/L)kj}/sqrt(L), sites j = 1..L, wave index 1 <= k <= L.
PureState spin_wave_state(Index L, Index k);

// sigma^z_site/2 restricted to the single-excitation sector: +1/2 if the
// excitation sits on `site` (1-indexed), -1/2 otherwise.
Operator site_perturbation(Index L, Index site);

struct BipartiteModel {
    Operator H_A;
    Operator H_B;
    Operator H0;  // H_A x I + I x H_B

    BipartitePartition part() const { return {H_A.dim(), H_B.dim()}; }
};

BipartiteModel bipartite_model(const Operator& H_A, const Operator& H_B);

// |f_i><f_i| x |g_j><g_j| from the ascending spectra of H_A, H_B; i, j 0-based.
DensityMatrix product_eigenstate(const BipartiteModel& model, Index i, Index j);
PureState product_eigenstate_vector(const BipartiteModel& model, Index i, Index j);

// (1/sqrt(d)) sum_i |i_A i_B>, as a projector of dim d^2.
DensityMatrix maximally_entangled_state(Index d);
PureState maximally_entangled_vector(Index d);

// sum_i sqrt(e^{-beta E_i}/Z) |f_i> x |f_i| for H_A f_i = E_i f_i: a pure
// global state whose A-reduction is exactly gibbs_state(H_A, beta) and
// which is stationary under H_A x I - I x H_A (partner H_B = -H_A).
PureState thermofield_double_vector(const Operator& H_A, double beta);

// e^{-beta H}/Z, computed on the shifted spectrum for overflow safety.
DensityMatrix gibbs_state(const Operator& H, double beta);

Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator identity_op(Index d);

// Eigenvalue multiset grouped to clusters wider than tol apart.
std::vector<std::pair<double, int>> eigenvalue_multiplicities(
    const RealVector<double>& values, double tol);
bool is_nondegenerate(const RealVector<double>& values, double tol);

}  // namespace eer
