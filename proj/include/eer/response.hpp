#pragma once

// Entanglement-entropy response: reduced states, the entropy observable
// s_A = -ln rho_A(t0), conventional and EE Kubo kernels, exact vs linear
// entropy change, canonical heat response, and the zero-response checker.

#include <optional>
#include <vector>

#include "eer/dense.hpp"
#include "eer/dynamics.hpp"
#include "eer/models.hpp"

namespace eer {

enum class SeriesKind { kubo_ee, kubo_obs, delta_S_exact, delta_S_linear, correlation };

struct ResponseSeries {
    TimeGrid grid;
    Eigen::VectorXcd values;
    SeriesKind kind = SeriesKind::kubo_obs;

    // real parts, guarded against stray imaginary content
    Eigen::VectorXd real_values(double tol = 1e-10) const;
};

// How a composite state is reduced to subsystem A, and dually how a
// d_A-dimensional observable is embedded back into the composite space.
struct ReductionSpec {
    enum class Kind { partition, single_excitation } kind = Kind::partition;
    BipartitePartition part;  // partition kind
    Keep keep = Keep::A;
    Index site = 1;  // single_excitation kind, 1-indexed

    Index reduced_dim() const {
        if (kind == Kind::single_excitation) return 2;
        return keep == Keep::A ? part.d_A : part.d_B;
    }
};

DensityMatrix reduced_density(const PureState& psi, const BipartitePartition& part,
                              Keep keep = Keep::A);
DensityMatrix reduced_density(const DensityMatrix& rho,
                              const BipartitePartition& part, Keep keep = Keep::A);
// Single-excitation shortcut: site occupied vs not, diag(1-p, p), p = |a_site|^2.
DensityMatrix reduced_density(const PureState& psi, Index site);

DensityMatrix reduce(const PureState& psi, const ReductionSpec& spec);
// Raw-vector path tolerant of integrator norm drift: renormalizes a copy.
DensityMatrix reduce_normalized(const ComplexVector<double>& v,
                                const ReductionSpec& spec);

double von_neumann_entropy(const DensityMatrix& rho);

struct EntropyObservable {
    Operator s_A;
    int floored_rank_deficit = 0;
};

EntropyObservable entropy_observable(const DensityMatrix& rhoA0,
                                     double spectral_floor = 1e-14);

// s_A placed in the composite space: s_A x I_B (or I_A x s_B), or mapped
// onto the L-dim site basis for the single-excitation sector.
Operator embed_sA(const Operator& sA, Index total_dim, const ReductionSpec& spec);

// R(t) = -i theta(t) tr(rho0 [O, H_{1,I}(-t)]); evaluated by exact
// spectral sums, valid for any stationary rho0.
class KuboKernel {
  public:
    KuboKernel(const Operator& O, const Operator& H1, const Operator& H0,
               const DensityMatrix& rho0);

    double at(double t) const;
    // R on {0, dt, ..., steps*dt}
    ResponseSeries series(const TimeGrid& grid, SeriesKind kind) const;

  private:
    Eigen::MatrixXd omega_;
    ComplexMatrix<double> W_;  // [rho0, O]_nm * (H1)_mn in the H0 eigenbasis
    std::complex<double> sum_at(double t) const;
};

double kubo_observable(const Operator& O, const Operator& H1, const Operator& H0,
                       const DensityMatrix& rho0, double t);

double kubo_ee(const DensityMatrix& rhoA0, const Operator& H1, const Operator& H0,
               const DensityMatrix& rho0, double t, const ReductionSpec& spec,
               double spectral_floor = 0.0);

ResponseSeries kubo_series(const Operator& O, const Operator& H1,
                           const Operator& H0, const DensityMatrix& rho0,
                           const TimeGrid& grid,
                           SeriesKind kind = SeriesKind::kubo_obs);

ResponseSeries kubo_ee_series(const DensityMatrix& rhoA0, const Operator& H1,
                              const Operator& H0, const DensityMatrix& rho0,
                              const TimeGrid& grid, const ReductionSpec& spec,
                              double spectral_floor = 0.0);

// Causal trapezoid convolution of the kernel with F on the grid.
ResponseSeries delta_S_linear(const ResponseSeries& R_E, const DriveSignal& drive,
                              const TimeGrid& grid);

ResponseSeries delta_S_exact(const Trajectory& traj, const ReductionSpec& spec);

ResponseSeries delta_expectation_sA(const Trajectory& traj,
                                    const EntropyObservable& sA,
                                    const ReductionSpec& spec);

std::complex<double> correlation_function(const Operator& O, const Operator& H1,
                                          const Operator& H0,
                                          const DensityMatrix& rho0, double t);

struct HeatResponse {
    ResponseSeries delta_Q;         // -(1/beta) * delta_S_linear
    ResponseSeries delta_S_linear;  // EE linear response on the same grid
    double kernel_residual = 0.0;   // max |(1/beta) R_E - R_{H_A x I}|
};

HeatResponse heat_response(const Operator& H_A, double beta, const Operator& H1,
                           const Operator& H0, const DensityMatrix& rho0,
                           const DriveSignal& drive, const TimeGrid& grid);

struct Theorem1Report {
    bool ln_rhoA_diagonal = false;
    double delta_rhoA_hollow_maxdiag = 0.0;  // max diag / max |delta rho_A|
    double max_abs_delta_S_linear = 0.0;
    double alpha_scaling_exponent = 0.0;
    std::vector<double> alphas;
    std::vector<double> max_abs_delta_S_exact;  // one per alpha
};

struct Theorem1State {
    enum class Branch { product_eigenstate, maximally_entangled } branch =
        Branch::product_eigenstate;
    Index i = 0;  // eigenindices, product branch
    Index j = 0;
};

Theorem1Report theorem1_check(const BipartiteModel& model,
                              const Theorem1State& state, const Operator& H1,
                              const DriveSignal& drive,
                              const std::vector<double>& alphas,
                              const TimeGrid& grid);

// log-log least-squares slope of y vs x
double power_law_exponent(const std::vector<double>& x,
                          const std::vector<double>& y);

}  // namespace eer
