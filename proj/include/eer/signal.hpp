#pragma once

// Spectral machinery: continuum-normalized DFTs with the e^{+i omega t}
// convention, susceptibility, Kramers-Kronig reconstruction, dissipative
// part, and the fluctuation-dissipation check.

#include <vector>

#include "eer/dense.hpp"
#include "eer/response.hpp"

namespace eer {

struct Spectrum {
    Eigen::VectorXd omegas;   // uniform, symmetric about 0 when built here
    Eigen::VectorXcd values;  // X(w) = dt * sum_n x(t_n) e^{+i w t_n}

    double domega() const;
};

// Frequency grid of odd size M = next odd >= size*pad, resolution
// 2*pi/(M*dt). cosine_taper applies a Hann window before transforming.
Spectrum fourier(const ResponseSeries& series, Index zero_pad_factor = 1,
                 bool cosine_taper = false);

ResponseSeries inverse_fourier(const Spectrum& spec, const TimeGrid& grid,
                               SeriesKind kind);

// chi_E(w) = fourier(R_E); the Eq.-of-motion product check against
// fourier(delta S) lives in ee_product_identity_residual.
Spectrum susceptibility_ee(const ResponseSeries& R_E, Index zero_pad_factor = 1);

// Relative L2 residual of fourier(dS_linear) vs chi_E * fourier(F), all on
// one frequency grid wide enough to hold the full linear convolution.
double ee_product_identity_residual(const ResponseSeries& R_E,
                                    const DriveSignal& drive,
                                    const TimeGrid& grid);

enum class KKDirection { im_from_re, re_from_im };

// Discrete principal-value Hilbert transform: pole-subtracted midpoint sum,
// interpolated singular bin, boundary log, and 1/omega tail continuation.
// The reconstructed component comes back in the real part of the output
// for either direction.
Spectrum kramers_kronig(const Spectrum& spec, KKDirection direction,
                        bool check_causality = true);

// Negative-time mass fraction of the inverse transform on the spectrum's
// own conjugate grid; the causality gate trips above 0.02.
double causality_negative_mass(const Spectrum& spec);

// chi''(w) = (1/2i) integral e^{iwt} [R(t) - R(-t)] dt; real and odd for
// real R, equal to Im fourier(R) when R is causal.
Spectrum dissipative_part(const ResponseSeries& R, Index zero_pad_factor = 1);

Spectrum crop_band(const Spectrum& spec, double omega_abs_max);

struct FdtReport {
    double max_residual = 0.0;
    std::vector<Index> excluded_bins;  // n_B pole bins (omega = 0)
    Index bins_checked = 0;
};

// Exact spectral-sum check of C~(w) = -2 [n_B(w) + 1] chi''(w) for the
// thermal state of H0 at inverse temperature beta; dims <= 16.
FdtReport fdt_check(const Operator& O, const Operator& H1, const Operator& H0,
                    double beta, const Eigen::VectorXd& omegas);

}  // namespace eer
