#include "eer/models.hpp"

#include <cmath>
#include <numbers>

namespace eer {

Operator xx_chain_single_excitation(const XXChainSpec& spec) {
    spec.check();
    const Index L = spec.L;
    ComplexMatrix<double> H = ComplexMatrix<double>::Zero(L, L);
    H.diagonal().setConstant(spec.lambda * double(2 - L) / 2.0);
    for (Index j = 0; j + 1 < L; ++j) {
        H(j, j + 1) += spec.J;
        H(j + 1, j) += spec.J;
    }
    if (spec.boundary == Boundary::periodic && L > 2) {
        H(0, L - 1) += spec.J;
        H(L - 1, 0) += spec.J;
    }
    return Operator(H, /*hint=*/true);
}

PureState spin_wave_state(Index L, Index k) {
    if (k < 1 || k > L)
        throw config_error("spin wave index k = " + std::to_string(k) +
                           " outside 1.." + std::to_string(L));
    ComplexVector<double> a(L);
    const double norm = 1.0 / std::sqrt(double(L));
    for (Index j = 1; j <= L; ++j)
        a(j - 1) = std::polar(norm, 2.0 * std::numbers::pi * double(k) * double(j) /
                                        double(L));
    return PureState(a);
}

Operator site_perturbation(Index L, Index site) {
    if (site < 1 || site > L)
        throw config_error("perturbation site " + std::to_string(site) +
                           " outside 1.." + std::to_string(L));
    ComplexMatrix<double> H = ComplexMatrix<double>::Zero(L, L);
    H.diagonal().setConstant(-0.5);
    H(site - 1, site - 1) = 0.5;
    return Operator(H, /*hint=*/true);
}

BipartiteModel bipartite_model(const Operator& H_A, const Operator& H_B) {
    if (!H_A.hermitian_hint || !H_B.hermitian_hint)
        throw hermiticity_error("bipartite_model requires Hermitian H_A, H_B");
    const Operator IA = identity_op(H_A.dim());
    const Operator IB = identity_op(H_B.dim());
    Operator H0(kron_dense(H_A.mat, IB.mat) + kron_dense(IA.mat, H_B.mat),
                /*hint=*/true);
    return {H_A, H_B, H0};
}

PureState product_eigenstate_vector(const BipartiteModel& model, Index i, Index j) {
    auto eigA = hermitian_eig(model.H_A);
    auto eigB = hermitian_eig(model.H_B);
    if (i < 0 || i >= eigA.values.size() || j < 0 || j >= eigB.values.size())
        throw dimension_error("eigenindex (" + std::to_string(i) + "," +
                              std::to_string(j) + ") out of range");
    ComplexVector<double> f = eigA.vectors.col(i);
    ComplexVector<double> g = eigB.vectors.col(j);
    ComplexVector<double> psi(f.size() * g.size());
    for (Index a = 0; a < f.size(); ++a)
        psi.segment(a * g.size(), g.size()) = f(a) * g;
    return PureState(psi);
}

DensityMatrix product_eigenstate(const BipartiteModel& model, Index i, Index j) {
    return projector(product_eigenstate_vector(model, i, j));
}

PureState maximally_entangled_vector(Index d) {
    if (d < 2) throw config_error("maximally entangled state needs d >= 2");
    ComplexVector<double> psi = ComplexVector<double>::Zero(d * d);
    const double a = 1.0 / std::sqrt(double(d));
    for (Index i = 0; i < d; ++i) psi(i * d + i) = a;
    return PureState(psi);
}

DensityMatrix maximally_entangled_state(Index d) {
    return projector(maximally_entangled_vector(d));
}

DensityMatrix gibbs_state(const Operator& H, double beta) {
    if (!H.hermitian_hint)
        throw hermiticity_error("gibbs_state requires Hermitian H");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw state_error("gibbs_state requires finite beta >= 0");
    auto eig = hermitian_eig(H);
    RealVector<double> w = (-beta * (eig.values.array() - eig.values.minCoeff()))
                               .exp()
                               .matrix();
    w /= w.sum();
    ComplexMatrix<double> rho =
        eig.vectors * w.cast<std::complex<double>>().asDiagonal() *
        eig.vectors.adjoint();
    return DensityMatrix(rho);
}

PureState thermofield_double_vector(const Operator& H_A, double beta) {
    if (!H_A.hermitian_hint)
        throw hermiticity_error("thermofield_double_vector requires Hermitian H_A");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw state_error("thermofield_double_vector requires finite beta >= 0");
    auto eig = hermitian_eig(H_A);
    const Index d = H_A.dim();
    RealVector<double> w = (-beta * (eig.values.array() - eig.values.minCoeff()))
                               .exp()
                               .matrix();
    w /= w.sum();
    ComplexVector<double> psi = ComplexVector<double>::Zero(d * d);
    for (Index i = 0; i < d; ++i) {
        const auto f = eig.vectors.col(i);
        const double a = std::sqrt(w(i));
        for (Index r = 0; r < d; ++r) psi.segment(r * d, d) += a * f(r) * f;
    }
    psi /= psi.norm();
    return PureState(psi);
}

Operator pauli_x() {
    ComplexMatrix<double> m(2, 2);
    m << 0, 1, 1, 0;
    return Operator(m, true);
}

Operator pauli_y() {
    const std::complex<double> im(0, 1);
    ComplexMatrix<double> m(2, 2);
    m << 0, -im, im, 0;
    return Operator(m, true);
}

Operator pauli_z() {
    ComplexMatrix<double> m(2, 2);
    m << 1, 0, 0, -1;
    return Operator(m, true);
}

Operator identity_op(Index d) {
    return Operator(ComplexMatrix<double>::Identity(d, d), true);
}

std::vector<std::pair<double, int>> eigenvalue_multiplicities(
    const RealVector<double>& values, double tol) {
    std::vector<std::pair<double, int>> out;
    for (Index i = 0; i < values.size(); ++i) {
        if (!out.empty() && values(i) - out.back().first <= tol)
            ++out.back().second;
        else
            out.push_back({values(i), 1});
    }
    return out;
}

bool is_nondegenerate(const RealVector<double>& values, double tol) {
    for (Index i = 0; i + 1 < values.size(); ++i)
        if (values(i + 1) - values(i) <= tol) return false;
    return true;
}

}  // namespace eer
