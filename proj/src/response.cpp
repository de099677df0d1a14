#include "eer/response.hpp"

#include <algorithm>
#include <cmath>

#include "eer/parallel.hpp"

namespace eer {

Eigen::VectorXd ResponseSeries::real_values(double tol) const {
    const double scale = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
    const double stray = values.size() ? values.imag().cwiseAbs().maxCoeff() : 0.0;
    if (stray > tol * std::max(1.0, scale))
        throw contract_error("series declared real carries imaginary part " +
                             std::to_string(stray));
    return values.real();
}

namespace {

ComplexMatrix<double> reduce_raw(const ComplexVector<double>& v,
                                 const ReductionSpec& spec) {
    if (spec.kind == ReductionSpec::Kind::single_excitation) {
        if (spec.site < 1 || spec.site > v.size())
            throw partition_error("single-excitation site " +
                                  std::to_string(spec.site) + " outside 1.." +
                                  std::to_string(v.size()));
        const double p = std::norm(v(spec.site - 1));
        ComplexMatrix<double> rho = ComplexMatrix<double>::Zero(2, 2);
        rho(0, 0) = 1.0 - p;
        rho(1, 1) = p;
        return rho;
    }
    spec.part.check(v.size());
    using RowMajorMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                      Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajorMat> M(v.data(), spec.part.d_A, spec.part.d_B);
    if (spec.keep == Keep::A) return M * M.adjoint();
    return M.transpose() * M.conjugate();
}

double binary_entropy_term(double p) {
    return p > 0.0 ? -p * std::log(p) : 0.0;
}

}  // namespace

DensityMatrix reduced_density(const PureState& psi, const BipartitePartition& part,
                              Keep keep) {
    ReductionSpec spec;
    spec.kind = ReductionSpec::Kind::partition;
    spec.part = part;
    spec.keep = keep;
    return DensityMatrix(reduce_raw(psi.amplitudes, spec));
}

DensityMatrix reduced_density(const DensityMatrix& rho,
                              const BipartitePartition& part, Keep keep) {
    return partial_trace(rho, part, keep);
}

DensityMatrix reduced_density(const PureState& psi, Index site) {
    ReductionSpec spec;
    spec.kind = ReductionSpec::Kind::single_excitation;
    spec.site = site;
    return DensityMatrix(reduce_raw(psi.amplitudes, spec));
}

DensityMatrix reduce(const PureState& psi, const ReductionSpec& spec) {
    return DensityMatrix(reduce_raw(psi.amplitudes, spec));
}

DensityMatrix reduce_normalized(const ComplexVector<double>& v,
                                const ReductionSpec& spec) {
    const double n = v.norm();
    if (!(n > 0.0)) throw state_error("cannot reduce a zero state vector");
    ComplexVector<double> u = v / n;
    return DensityMatrix(reduce_raw(u, spec));
}

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> es(rho.mat(),
                                                            Eigen::EigenvaluesOnly);
    double S = 0.0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam < -1e-10)
            throw state_error("entropy of a state with eigenvalue " +
                              std::to_string(lam));
        S += binary_entropy_term(lam);
    }
    return S;
}

EntropyObservable entropy_observable(const DensityMatrix& rhoA0,
                                     double spectral_floor) {
    auto log_rho = matrix_func_hermitian(rhoA0.op, MatrixFunc::log, spectral_floor);
    EntropyObservable out;
    out.s_A = Operator(-log_rho.op.mat, /*hint=*/true);
    out.floored_rank_deficit = log_rho.floored_count;
    return out;
}

Operator embed_sA(const Operator& sA, Index total_dim, const ReductionSpec& spec) {
    if (spec.kind == ReductionSpec::Kind::single_excitation) {
        if (sA.dim() != 2)
            throw dimension_error("single-excitation s_A must be 2x2");
        if (!is_diagonal(sA, 1e-12))
            throw contract_error("single-excitation s_A must be diagonal in the "
                                 "occupation basis");
        if (spec.site < 1 || spec.site > total_dim)
            throw partition_error("embedding site out of range");
        const double s_empty = sA.mat(0, 0).real();
        const double s_occ = sA.mat(1, 1).real();
        ComplexMatrix<double> E =
            s_empty * ComplexMatrix<double>::Identity(total_dim, total_dim);
        E(spec.site - 1, spec.site - 1) = s_occ;
        return Operator(E, /*hint=*/true);
    }
    spec.part.check(total_dim);
    if (spec.keep == Keep::A) {
        if (sA.dim() != spec.part.d_A)
            throw dimension_error("s_A dim does not match partition d_A");
        return kron(sA, identity_op(spec.part.d_B));
    }
    if (sA.dim() != spec.part.d_B)
        throw dimension_error("s_B dim does not match partition d_B");
    return kron(identity_op(spec.part.d_A), sA);
}

KuboKernel::KuboKernel(const Operator& O, const Operator& H1, const Operator& H0,
                       const DensityMatrix& rho0) {
    if (O.dim() != H0.dim() || H1.dim() != H0.dim() || rho0.dim() != H0.dim())
        throw dimension_error("Kubo kernel dimension mismatch");
    if (!O.hermitian_hint || !H1.hermitian_hint)
        throw hermiticity_error("Kubo kernel requires Hermitian O and H1");
    require_stationary(rho0, H0);
    auto eig = hermitian_eig(H0);
    const Index d = H0.dim();
    ComplexMatrix<double> Ot = eig.vectors.adjoint() * O.mat * eig.vectors;
    ComplexMatrix<double> H1t = eig.vectors.adjoint() * H1.mat * eig.vectors;
    ComplexMatrix<double> rt = eig.vectors.adjoint() * rho0.mat() * eig.vectors;
    ComplexMatrix<double> K = rt * Ot - Ot * rt;
    W_ = K.cwiseProduct(H1t.transpose());
    omega_ = eig.values.replicate(1, d) - eig.values.transpose().replicate(d, 1);
}

std::complex<double> KuboKernel::sum_at(double t) const {
    std::complex<double> s(0, 0);
    const Index d = W_.rows();
    for (Index m = 0; m < d; ++m)
        for (Index n = 0; n < d; ++n)
            s += W_(n, m) * std::polar(1.0, omega_(n, m) * t);
    return s;
}

double KuboKernel::at(double t) const {
    if (t < 0.0) return 0.0;
    const std::complex<double> s = sum_at(t);
    // R = -i * s is real for Hermitian O, H1; the real part of s is rounding
    const double r = s.imag();
    if (std::abs(s.real()) > 1e-12 * std::max(1.0, std::abs(r)))
        throw contract_error("Kubo kernel value has stray imaginary part " +
                             std::to_string(s.real()));
    return r;
}

ResponseSeries KuboKernel::series(const TimeGrid& grid, SeriesKind kind) const {
    const Index n = grid.steps();
    const double duration = grid.t_max - grid.t0;
    ResponseSeries out;
    out.grid = TimeGrid{0.0, duration, grid.dt};
    out.kind = kind;
    out.values.resize(n + 1);
    parallel_for(n + 1, [&](Index lo, Index hi) {
        for (Index i = lo; i < hi; ++i)
            out.values(i) = at(double(i) * grid.dt);
    });
    return out;
}

double kubo_observable(const Operator& O, const Operator& H1, const Operator& H0,
                       const DensityMatrix& rho0, double t) {
    return KuboKernel(O, H1, H0, rho0).at(t);
}

ResponseSeries kubo_series(const Operator& O, const Operator& H1,
                           const Operator& H0, const DensityMatrix& rho0,
                           const TimeGrid& grid, SeriesKind kind) {
    return KuboKernel(O, H1, H0, rho0).series(grid, kind);
}

namespace {

Operator ee_observable_embedded(const DensityMatrix& rhoA0, Index total_dim,
                                const ReductionSpec& spec, double spectral_floor) {
    auto sA = entropy_observable(rhoA0, spectral_floor);
    return embed_sA(sA.s_A, total_dim, spec);
}

}  // namespace

double kubo_ee(const DensityMatrix& rhoA0, const Operator& H1, const Operator& H0,
               const DensityMatrix& rho0, double t, const ReductionSpec& spec,
               double spectral_floor) {
    const Operator O = ee_observable_embedded(rhoA0, H0.dim(), spec, spectral_floor);
    return KuboKernel(O, H1, H0, rho0).at(t);
}

ResponseSeries kubo_ee_series(const DensityMatrix& rhoA0, const Operator& H1,
                              const Operator& H0, const DensityMatrix& rho0,
                              const TimeGrid& grid, const ReductionSpec& spec,
                              double spectral_floor) {
    const Operator O = ee_observable_embedded(rhoA0, H0.dim(), spec, spectral_floor);
    return KuboKernel(O, H1, H0, rho0).series(grid, SeriesKind::kubo_ee);
}

ResponseSeries delta_S_linear(const ResponseSeries& R_E, const DriveSignal& drive,
                              const TimeGrid& grid) {
    drive.check();
    if (std::abs(R_E.grid.dt - grid.dt) > 1e-12 * grid.dt)
        throw grid_error("kernel and output grids disagree in dt");
    const Index n = grid.steps();
    if (R_E.values.size() < n + 1)
        throw grid_error("kernel series shorter than the output grid");
    const Eigen::VectorXd R = R_E.real_values();
    Eigen::VectorXd F(n + 1);
    for (Index j = 0; j <= n; ++j) F(j) = drive.value(grid.time(j));

    ResponseSeries out;
    out.grid = grid;
    out.kind = SeriesKind::delta_S_linear;
    out.values.setZero(n + 1);
    parallel_for(n + 1, [&](Index lo, Index hi) {
        for (Index i = std::max<Index>(lo, 1); i < hi; ++i) {
            double acc = 0.5 * (R(i) * F(0) + R(0) * F(i));
            for (Index j = 1; j < i; ++j) acc += R(i - j) * F(j);
            out.values(i) = grid.dt * acc;
        }
    });
    return out;
}

ResponseSeries delta_S_exact(const Trajectory& traj, const ReductionSpec& spec) {
    const Index n = traj.grid.size();
    ResponseSeries out;
    out.grid = traj.grid;
    out.kind = SeriesKind::delta_S_exact;
    out.values.resize(n);
    Eigen::VectorXd S(n);
    parallel_for(n, [&](Index lo, Index hi) {
        for (Index i = lo; i < hi; ++i)
            S(i) = von_neumann_entropy(reduce_normalized(traj.states.col(i), spec));
    });
    for (Index i = 0; i < n; ++i) out.values(i) = S(i) - S(0);
    return out;
}

ResponseSeries delta_expectation_sA(const Trajectory& traj,
                                    const EntropyObservable& sA,
                                    const ReductionSpec& spec) {
    if (sA.s_A.dim() != spec.reduced_dim())
        throw dimension_error("s_A dim does not match the reduction");
    const Index n = traj.grid.size();
    Eigen::VectorXd e(n);
    parallel_for(n, [&](Index lo, Index hi) {
        for (Index i = lo; i < hi; ++i) {
            const DensityMatrix rhoA = reduce_normalized(traj.states.col(i), spec);
            e(i) = trace_product(rhoA.mat(), sA.s_A.mat).real();
        }
    });
    ResponseSeries out;
    out.grid = traj.grid;
    out.kind = SeriesKind::delta_S_exact;
    out.values.resize(n);
    for (Index i = 0; i < n; ++i) out.values(i) = e(i) - e(0);
    return out;
}

std::complex<double> correlation_function(const Operator& O, const Operator& H1,
                                          const Operator& H0,
                                          const DensityMatrix& rho0, double t) {
    if (O.dim() != H0.dim() || H1.dim() != H0.dim() || rho0.dim() != H0.dim())
        throw dimension_error("correlation function dimension mismatch");
    if (!O.hermitian_hint || !H1.hermitian_hint)
        throw hermiticity_error("correlation function requires Hermitian O, H1");
    require_stationary(rho0, H0);
    auto eig = hermitian_eig(H0);
    ComplexMatrix<double> Ot = eig.vectors.adjoint() * O.mat * eig.vectors;
    ComplexMatrix<double> H1t = eig.vectors.adjoint() * H1.mat * eig.vectors;
    ComplexMatrix<double> rt = eig.vectors.adjoint() * rho0.mat() * eig.vectors;
    ComplexMatrix<double> P = (rt * Ot).cwiseProduct(H1t.transpose());
    std::complex<double> c(0, 0);
    const Index d = P.rows();
    for (Index m = 0; m < d; ++m)
        for (Index n = 0; n < d; ++n)
            c += P(n, m) * std::polar(1.0, (eig.values(n) - eig.values(m)) * t);
    return c;
}

HeatResponse heat_response(const Operator& H_A, double beta, const Operator& H1,
                           const Operator& H0, const DensityMatrix& rho0,
                           const DriveSignal& drive, const TimeGrid& grid) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw state_error("heat response needs beta > 0; the beta = 0 Gibbs "
                          "limit has no entropy kernel");
    if (H0.dim() % H_A.dim() != 0)
        throw partition_error("H_A dim does not divide the composite dim");
    ReductionSpec spec;
    spec.kind = ReductionSpec::Kind::partition;
    spec.part = {H_A.dim(), H0.dim() / H_A.dim()};
    spec.keep = Keep::A;

    const DensityMatrix rhoA = partial_trace(rho0, spec.part, Keep::A);
    const DensityMatrix thermal = gibbs_state(H_A, beta);
    if (max_abs(rhoA.mat() - thermal.mat()) > 1e-8)
        throw state_error("rho_A(t0) is not the Gibbs state of (H_A, beta)");

    ResponseSeries R_E =
        kubo_ee_series(rhoA, H1, H0, rho0, grid, spec, /*spectral_floor=*/0.0);
    const ResponseSeries R_HA =
        kubo_series(embed_sA(H_A, H0.dim(), spec), H1, H0, rho0, grid);

    const Eigen::VectorXd re = R_E.real_values();
    const Eigen::VectorXd rh = R_HA.real_values();
    const double residual = (re / beta - rh).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, rh.cwiseAbs().maxCoeff());
    if (residual > 1e-10 * scale)
        throw contract_error("(1/beta) R_E differs from the H_A Kubo kernel by " +
                             std::to_string(residual));

    HeatResponse out;
    out.delta_S_linear = delta_S_linear(R_E, drive, grid);
    out.delta_Q = out.delta_S_linear;
    out.delta_Q.values *= std::complex<double>(-1.0 / beta, 0.0);
    out.kernel_residual = residual;
    return out;
}

double power_law_exponent(const std::vector<double>& x,
                          const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw contract_error("power-law fit needs matched samples, >= 2 points");
    const auto n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw contract_error("power-law fit needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw contract_error("power-law fit is degenerate");
    return (n * sxy - sx * sy) / denom;
}

Theorem1Report theorem1_check(const BipartiteModel& model,
                              const Theorem1State& state, const Operator& H1,
                              const DriveSignal& drive,
                              const std::vector<double>& alphas,
                              const TimeGrid& grid) {
    if (alphas.size() < 4)
        throw config_error("theorem1_check needs at least 4 amplitudes for the fit");
    if (H1.dim() != model.H0.dim())
        throw dimension_error("H1 dim does not match the bipartite model");
    drive.check();
    const BipartitePartition part = model.part();
    ReductionSpec spec;
    spec.kind = ReductionSpec::Kind::partition;
    spec.part = part;
    spec.keep = Keep::A;

    PureState psi0;
    ComplexMatrix<double> basis_A;  // columns: basis where ln rho_A is diagonal
    bool ln_diag = false;

    if (state.branch == Theorem1State::Branch::product_eigenstate) {
        auto eig0 = hermitian_eig(model.H0);
        const double span =
            std::max(1.0, eig0.values.maxCoeff() - eig0.values.minCoeff());
        if (!is_nondegenerate(eig0.values, 1e-8 * span))
            throw theorem_precondition_error(
                "product-state branch requires non-degenerate H0");
        psi0 = product_eigenstate_vector(model, state.i, state.j);
        basis_A = hermitian_eig(model.H_A).vectors;
    } else {
        if (part.d_A != part.d_B)
            throw partition_error("maximally entangled state needs d_A = d_B");
        psi0 = maximally_entangled_vector(part.d_A);
        const ComplexVector<double> hv = model.H0.mat * psi0.amplitudes;
        const std::complex<double> e0 = psi0.amplitudes.dot(hv);
        const double res = (hv - e0 * psi0.amplitudes).norm();
        if (res > 1e-10 * std::max(1.0, spectral_norm(model.H0)))
            throw theorem_precondition_error(
                "maximally entangled state is not an eigenstate of H0");
        basis_A = ComplexMatrix<double>::Identity(part.d_A, part.d_A);
    }

    const DensityMatrix rho0 = projector(psi0);
    const DensityMatrix rhoA0 = reduced_density(psi0, part, Keep::A);
    const EntropyObservable sA = entropy_observable(rhoA0, 1e-14);

    const ComplexMatrix<double> sA_rot =
        basis_A.adjoint() * sA.s_A.mat * basis_A;
    if (state.branch == Theorem1State::Branch::product_eigenstate) {
        ln_diag = is_diagonal(Operator(sA_rot), 1e-10);
    } else {
        const std::complex<double> mean = sA_rot.trace() / double(part.d_A);
        const ComplexMatrix<double> dev =
            sA_rot - mean * ComplexMatrix<double>::Identity(part.d_A, part.d_A);
        ln_diag = max_abs(dev) <= 1e-10 * std::max(1.0, max_abs(sA_rot));
    }

    DriveSignal ref_drive = drive;
    ref_drive.alpha = *std::max_element(alphas.begin(), alphas.end());
    const auto drho = delta_rho_linear_series(rho0, model.H0, H1, ref_drive, grid);

    double max_diag = 0.0, max_scale = 0.0, max_dS = 0.0;
    for (const auto& m : drho) {
        const ComplexMatrix<double> mA = partial_trace_dense(m, part, Keep::A);
        const ComplexMatrix<double> mA_rot = basis_A.adjoint() * mA * basis_A;
        max_diag = std::max(max_diag, double(mA_rot.diagonal().cwiseAbs().maxCoeff()));
        max_scale = std::max(max_scale, max_abs(mA_rot));
        max_dS = std::max(max_dS, std::abs(trace_product(mA, sA.s_A.mat).real()));
    }

    Theorem1Report report;
    report.ln_rhoA_diagonal = ln_diag;
    report.delta_rhoA_hollow_maxdiag = max_scale > 0.0 ? max_diag / max_scale : 0.0;
    report.max_abs_delta_S_linear = max_dS;
    report.alphas = alphas;
    std::sort(report.alphas.begin(), report.alphas.end());

    for (const double a : report.alphas) {
        DriveSignal da = drive;
        da.alpha = a;
        const Trajectory traj = evolve_exact(model.H0, H1, da, psi0, grid);
        const ResponseSeries dS = delta_S_exact(traj, spec);
        report.max_abs_delta_S_exact.push_back(
            dS.real_values().cwiseAbs().maxCoeff());
    }
    report.alpha_scaling_exponent =
        power_law_exponent(report.alphas, report.max_abs_delta_S_exact);
    return report;
}

}  // namespace eer
