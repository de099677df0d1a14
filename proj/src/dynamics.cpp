#include "eer/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

namespace eer {

void DriveSignal::check() const {
    if (!std::isfinite(alpha)) throw config_error("drive alpha must be finite");
    if (form == DriveForm::gaussian_cosine) {
        if (!(T > 0.0) || !std::isfinite(T))
            throw config_error("gaussian_cosine drive needs period T > 0");
        return;
    }
    if (samples.size() < 2)
        throw config_error("tabulated drive needs at least 2 samples");
    for (size_t i = 0; i + 1 < samples.size(); ++i)
        if (!(samples[i].first < samples[i + 1].first))
            throw config_error("tabulated drive times must be strictly increasing");
}

double DriveSignal::value(double t) const {
    if (form == DriveForm::gaussian_cosine)
        return alpha * std::cos(2.0 * std::numbers::pi * t / T) *
               std::exp(-t * t / 2.0);
    if (t < samples.front().first || t > samples.back().first) return 0.0;
    auto hi = std::upper_bound(samples.begin(), samples.end(), t,
                               [](double x, const auto& s) { return x < s.first; });
    if (hi == samples.begin()) return alpha * samples.front().second;
    if (hi == samples.end()) return alpha * samples.back().second;
    auto lo = hi - 1;
    const double u = (t - lo->first) / (hi->first - lo->first);
    return alpha * ((1.0 - u) * lo->second + u * hi->second);
}

double DriveSignal::max_abs() const {
    if (form == DriveForm::gaussian_cosine) return std::abs(alpha);
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, std::abs(s.second));
    return std::abs(alpha) * m;
}

void TimeGrid::check() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw grid_error("dt must be > 0");
    if (!(t_max > t0)) throw grid_error("t_max must exceed t0");
    const double ratio = (t_max - t0) / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw grid_error("(t_max - t0)/dt = " + std::to_string(ratio) +
                         " is not integral");
    if (ratio < 0.5) throw grid_error("grid has no steps");
}

Index TimeGrid::steps() const {
    check();
    return Index(std::llround((t_max - t0) / dt));
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> ts(static_cast<size_t>(size()));
    for (Index i = 0; i < size(); ++i) ts[size_t(i)] = time(i);
    return ts;
}

InteractionPicture::InteractionPicture(const Operator& H1, const Operator& H0)
    : eig_(hermitian_eig(H0)) {
    if (H1.dim() != H0.dim())
        throw dimension_error("interaction picture dims " +
                              std::to_string(H1.dim()) + " vs " +
                              std::to_string(H0.dim()));
    if (!H1.hermitian_hint)
        throw hermiticity_error("interaction picture requires Hermitian H1");
    h1_tilde_ = eig_.vectors.adjoint() * H1.mat * eig_.vectors;
}

ComplexMatrix<double> InteractionPicture::mat_at(double t) const {
    const Index d = eig_.values.size();
    ComplexVector<double> u(d);
    for (Index n = 0; n < d; ++n) u(n) = std::polar(1.0, eig_.values(n) * t);
    // e^{iH0 t} H1 e^{-iH0 t} = V diag(u) (V^H H1 V) diag(u)^* V^H
    ComplexMatrix<double> core =
        u.asDiagonal() * h1_tilde_ * u.conjugate().asDiagonal();
    return eig_.vectors * core * eig_.vectors.adjoint();
}

Operator InteractionPicture::op_at(double t) const {
    return Operator(mat_at(t), /*hint=*/true);
}

Operator interaction_picture_op(const Operator& H1, const Operator& H0, double t) {
    return InteractionPicture(H1, H0).op_at(t);
}

double spectral_norm(const Operator& H) {
    if (!H.hermitian_hint)
        throw hermiticity_error("spectral_norm expects a Hermitian operator");
    if (H.dim() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> es(H.mat,
                                                            Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Trajectory evolve_exact(const Operator& H0, const Operator& H1,
                        const DriveSignal& drive, const PureState& psi0,
                        const TimeGrid& grid) {
    if (H0.dim() != H1.dim() || H0.dim() != psi0.dim())
        throw dimension_error("evolve_exact dimension mismatch");
    drive.check();
    const double h_norm = spectral_norm(H0) + drive.max_abs() * spectral_norm(H1);
    if (grid.dt * h_norm > 1.0)
        throw integration_error("dt*||H|| = " + std::to_string(grid.dt * h_norm) +
                                " > 1; refusing to integrate");
    if (grid.dt * h_norm > 0.1)
        std::cerr << "warning: dt*||H|| = " << grid.dt * h_norm
                  << " > 0.1, accuracy contract at risk\n";

    const Index n = grid.steps();
    const Index d = psi0.dim();
    const double dt = grid.dt;
    const std::complex<double> mi(0, -1);

    Trajectory traj;
    traj.grid = grid;
    traj.states.resize(d, n + 1);
    traj.states.col(0) = psi0.amplitudes;

    ComplexVector<double> psi = psi0.amplitudes;
    ComplexVector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
    auto rhs = [&](double t, const ComplexVector<double>& v, ComplexVector<double>& out) {
        out.noalias() = H0.mat * v;
        const double F = drive.value(t);
        if (F != 0.0) out.noalias() += F * (H1.mat * v);
        out *= mi;
    };

    double drift = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double t = grid.time(i);
        rhs(t, psi, k1);
        tmp = psi + (dt / 2.0) * k1;
        rhs(t + dt / 2.0, tmp, k2);
        tmp = psi + (dt / 2.0) * k2;
        rhs(t + dt / 2.0, tmp, k3);
        tmp = psi + dt * k3;
        rhs(t + dt, tmp, k4);
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        traj.states.col(i + 1) = psi;
        drift = std::max(drift, std::abs(psi.norm() - 1.0));
    }
    traj.norm_drift = drift;
    if (drift > 1e-8)
        throw integration_error("norm drift " + std::to_string(drift) +
                                " exceeds 1e-8; reduce dt");
    return traj;
}

void require_stationary(const DensityMatrix& rho0, const Operator& H0) {
    const double dev = (rho0.mat() * H0.mat - H0.mat * rho0.mat()).norm();
    if (dev > 1e-10 * H0.mat.norm())
        throw stationarity_error("[rho0, H0] norm " + std::to_string(dev) +
                                 " exceeds 1e-10*||H0||");
}

namespace {

struct EigenFrame {
    HermitianEig<double> eig;
    ComplexMatrix<double> B;  // V^H [H1, rho0] V
    Eigen::MatrixXd omega;    // omega_nm = E_n - E_m

    EigenFrame(const DensityMatrix& rho0, const Operator& H0, const Operator& H1)
        : eig(hermitian_eig(H0)) {
        if (H1.dim() != H0.dim() || rho0.dim() != H0.dim())
            throw dimension_error("delta_rho_linear dimension mismatch");
        if (!H1.hermitian_hint)
            throw hermiticity_error("delta_rho_linear requires Hermitian H1");
        require_stationary(rho0, H0);
        const ComplexMatrix<double> C = H1.mat * rho0.mat() - rho0.mat() * H1.mat;
        B = eig.vectors.adjoint() * C * eig.vectors;
        const Index d = eig.values.size();
        omega = eig.values.replicate(1, d) - eig.values.transpose().replicate(d, 1);
    }

    ComplexMatrix<double> phases(double t) const {
        const Index d = omega.rows();
        ComplexMatrix<double> E(d, d);
        for (Index m = 0; m < d; ++m)
            for (Index n = 0; n < d; ++n) E(n, m) = std::polar(1.0, omega(n, m) * t);
        return E;
    }

    // delta rho(t) = -i V (B .* e^{-i omega t} .* G) V^H with G the
    // trapezoid sum of F(tau) e^{i omega tau}; stationarity of rho0 makes
    // the elementwise phase factorization exact within degenerate blocks.
    ComplexMatrix<double> assemble(const ComplexMatrix<double>& G, double t) const {
        ComplexMatrix<double> core = std::complex<double>(0, -1) *
                                     B.cwiseProduct(phases(-t)).cwiseProduct(G);
        return eig.vectors * core * eig.vectors.adjoint();
    }
};

}  // namespace

Operator delta_rho_linear(const DensityMatrix& rho0, const Operator& H0,
                          const Operator& H1, const DriveSignal& drive, double t,
                          const TimeGrid& grid) {
    drive.check();
    EigenFrame fr(rho0, H0, H1);
    const Index d = H0.dim();
    if (t <= grid.t0)
        return Operator(ComplexMatrix<double>::Zero(d, d), true);
    if (t > grid.t_max + 1e-9)
        throw grid_error("delta_rho_linear time beyond grid end");

    const Index n = grid.steps();
    Index k = Index(std::floor((t - grid.t0) / grid.dt + 1e-9));
    k = std::min(k, n);
    ComplexMatrix<double> G = ComplexMatrix<double>::Zero(d, d);
    double f_prev = drive.value(grid.time(0));
    ComplexMatrix<double> E_prev = fr.phases(grid.time(0));
    for (Index i = 1; i <= k; ++i) {
        const double f_i = drive.value(grid.time(i));
        ComplexMatrix<double> E_i = fr.phases(grid.time(i));
        G += (grid.dt / 2.0) * (f_prev * E_prev + f_i * E_i);
        f_prev = f_i;
        E_prev.swap(E_i);
    }
    const double rem = t - grid.time(k);
    if (rem > 1e-9) {
        const double f_t = drive.value(t);
        G += (rem / 2.0) * (f_prev * E_prev + f_t * fr.phases(t));
    }
    // Hermitian by algebra; rounding skew on a near-zero result would
    // otherwise fail the relative hint check
    const ComplexMatrix<double> m = fr.assemble(G, t);
    return Operator(((m + m.adjoint()) / 2.0).eval(), true);
}

std::vector<ComplexMatrix<double>> delta_rho_linear_series(
    const DensityMatrix& rho0, const Operator& H0, const Operator& H1,
    const DriveSignal& drive, const TimeGrid& grid) {
    drive.check();
    EigenFrame fr(rho0, H0, H1);
    const Index d = H0.dim();
    const Index n = grid.steps();

    std::vector<ComplexMatrix<double>> out;
    out.reserve(size_t(n + 1));
    out.push_back(ComplexMatrix<double>::Zero(d, d));

    ComplexMatrix<double> G = ComplexMatrix<double>::Zero(d, d);
    double f_prev = drive.value(grid.time(0));
    ComplexMatrix<double> E_prev = fr.phases(grid.time(0));
    for (Index i = 1; i <= n; ++i) {
        const double f_i = drive.value(grid.time(i));
        ComplexMatrix<double> E_i = fr.phases(grid.time(i));
        G += (grid.dt / 2.0) * (f_prev * E_prev + f_i * E_i);
        out.push_back(fr.assemble(G, grid.time(i)));
        f_prev = f_i;
        E_prev.swap(E_i);
    }
    return out;
}

}  // namespace eer
