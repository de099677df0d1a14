#pragma once

// Driven dynamics: drive signals, time grids, exact RK4 propagation of
// pure states under H0 + F(t) H1, interaction-picture operators, and the
// first-order perturbative state change delta rho.

#include <vector>

#include "eer/dense.hpp"

namespace eer {

enum class DriveForm { gaussian_cosine, tabulated };

struct DriveSignal {
    double alpha = 0.0;
    double T = 1.0;
    DriveForm form = DriveForm::gaussian_cosine;
    std::vector<std::pair<double, double>> samples;  // tabulated only

    void check() const;

    // gaussian_cosine: alpha*cos(2*pi*t/T)*exp(-t^2/2).
    // tabulated: alpha * linear interpolation, zero outside the sample support.
    double value(double t) const;

    // upper bound on |F| over all t
    double max_abs() const;
};

struct TimeGrid {
    double t0 = 0.0;
    double t_max = 1.0;
    double dt = 0.1;

    void check() const;
    Index steps() const;                  // (t_max - t0)/dt, integral within 1e-9
    Index size() const { return steps() + 1; }
    double time(Index i) const { return t0 + double(i) * dt; }
    std::vector<double> times() const;
};

struct Trajectory {
    TimeGrid grid;
    ComplexMatrix<double> states;  // one normalized column per grid time
    double norm_drift = 0.0;       // max |norm - 1| over the run, not corrected

    ComplexVector<double> state(Index i) const { return states.col(i); }
};

// e^{i H0 t} H1 e^{-i H0 t}; t is elapsed time relative to t0.
Operator interaction_picture_op(const Operator& H1, const Operator& H0, double t);

// One eigendecomposition of H0 shared across many interaction-picture times.
class InteractionPicture {
  public:
    InteractionPicture(const Operator& H1, const Operator& H0);

    Operator op_at(double t) const;
    ComplexMatrix<double> mat_at(double t) const;

    const HermitianEig<double>& eig() const { return eig_; }
    const ComplexMatrix<double>& h1_tilde() const { return h1_tilde_; }

  private:
    HermitianEig<double> eig_;
    ComplexMatrix<double> h1_tilde_;  // V^H H1 V
};

// Fixed-step RK4 for i d/dt psi = (H0 + F(t) H1) psi. Norm drift beyond
// 1e-8 is an integration error; dt*||H|| > 1 is rejected before stepping,
// > 0.1 earns a stderr warning.
Trajectory evolve_exact(const Operator& H0, const Operator& H1,
                        const DriveSignal& drive, const PureState& psi0,
                        const TimeGrid& grid);

// -i * integral_{t0}^{t} [H_{1,I}(tau - t), rho0] F(tau) dtau by trapezoid
// on the grid; requires stationary rho0.
Operator delta_rho_linear(const DensityMatrix& rho0, const Operator& H0,
                          const Operator& H1, const DriveSignal& drive, double t,
                          const TimeGrid& grid);

// delta rho at every grid time via a running-trapezoid phase accumulator;
// algebraically identical to calling delta_rho_linear per time.
std::vector<ComplexMatrix<double>> delta_rho_linear_series(
    const DensityMatrix& rho0, const Operator& H0, const Operator& H1,
    const DriveSignal& drive, const TimeGrid& grid);

double spectral_norm(const Operator& H);

void require_stationary(const DensityMatrix& rho0, const Operator& H0);

}  // namespace eer
