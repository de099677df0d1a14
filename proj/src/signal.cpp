#include "eer/signal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "eer/models.hpp"
#include "eer/parallel.hpp"

namespace eer {

namespace {

std::atomic<Index> g_max_threads{0};

Index default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return std::min<Index>(hw ? Index(hw) : 4, 8);
}

constexpr double pi = std::numbers::pi;

}  // namespace

Index max_threads() {
    const Index n = g_max_threads.load();
    return n > 0 ? n : default_threads();
}

void set_max_threads(Index n) { g_max_threads.store(n > 0 ? n : 0); }

void parallel_for(Index n, const std::function<void(Index, Index)>& fn) {
    if (n <= 0) return;
    const Index workers = std::min(max_threads(), n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    const Index chunk = (n + workers - 1) / workers;
    for (Index w = 0; w < workers; ++w) {
        const Index lo = w * chunk;
        const Index hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

namespace {

// per frequency f: sum_n x_n e^{i f (start + n step)}
Eigen::VectorXcd dft_sums(const Eigen::VectorXcd& x, double step, double start,
                          const Eigen::VectorXd& freqs) {
    Eigen::VectorXcd out(freqs.size());
    parallel_for(freqs.size(), [&](Index lo, Index hi) {
        for (Index k = lo; k < hi; ++k) {
            const double f = freqs(k);
            const std::complex<double> z = std::polar(1.0, f * step);
            std::complex<double> p(1.0, 0.0), acc(0.0, 0.0);
            for (Index n = 0; n < x.size(); ++n) {
                acc += x(n) * p;
                p *= z;
            }
            out(k) = acc * std::polar(1.0, f * start);
        }
    });
    return out;
}

Eigen::VectorXd symmetric_grid(Index M, double dw) {
    Eigen::VectorXd w(M);
    const Index half = (M - 1) / 2;
    for (Index k = 0; k < M; ++k) w(k) = double(k - half) * dw;
    return w;
}

Spectrum fourier_samples(const Eigen::VectorXcd& x, double dt, double t0,
                         Index pad) {
    if (pad < 1) throw config_error("zero-pad factor must be >= 1");
    Index M = x.size() * pad;
    if (M % 2 == 0) ++M;
    const double dw = 2.0 * pi / (double(M) * dt);
    Spectrum spec;
    spec.omegas = symmetric_grid(M, dw);
    spec.values = dt * dft_sums(x, dt, t0, spec.omegas);
    return spec;
}

}  // namespace

double Spectrum::domega() const {
    if (omegas.size() < 2) throw grid_error("spectrum needs >= 2 bins");
    const double dw = omegas(1) - omegas(0);
    for (Index k = 1; k + 1 < omegas.size(); ++k)
        if (std::abs(omegas(k + 1) - omegas(k) - dw) > 1e-9 * std::abs(dw))
            throw grid_error("spectrum frequency grid is not uniform");
    if (!(dw > 0.0)) throw grid_error("spectrum frequencies must ascend");
    return dw;
}

Spectrum fourier(const ResponseSeries& series, Index zero_pad_factor,
                 bool cosine_taper) {
    series.grid.check();
    if (series.values.size() != series.grid.size())
        throw grid_error("series length does not match its grid");
    Eigen::VectorXcd x = series.values;
    if (cosine_taper) {
        const Index N = x.size();
        for (Index n = 0; n < N; ++n)
            x(n) *= 0.5 * (1.0 - std::cos(2.0 * pi * double(n) / double(N - 1)));
    }
    return fourier_samples(x, series.grid.dt, series.grid.t0, zero_pad_factor);
}

ResponseSeries inverse_fourier(const Spectrum& spec, const TimeGrid& grid,
                               SeriesKind kind) {
    const double dw = spec.domega();
    if (spec.values.size() != spec.omegas.size())
        throw grid_error("spectrum length does not match its grid");
    Eigen::VectorXd neg_times(grid.size());
    for (Index i = 0; i < grid.size(); ++i) neg_times(i) = -grid.time(i);
    ResponseSeries out;
    out.grid = grid;
    out.kind = kind;
    out.values =
        (dw / (2.0 * pi)) * dft_sums(spec.values, dw, spec.omegas(0), neg_times);
    return out;
}

Spectrum susceptibility_ee(const ResponseSeries& R_E, Index zero_pad_factor) {
    if (R_E.grid.t0 < -1e-12) {
        for (Index i = 0; i < R_E.values.size(); ++i)
            if (R_E.grid.time(i) < -1e-12 && std::abs(R_E.values(i)) > 1e-12)
                throw causality_error("susceptibility input has support at t < 0");
    }
    return fourier(R_E, zero_pad_factor);
}

double ee_product_identity_residual(const ResponseSeries& R_E,
                                    const DriveSignal& drive,
                                    const TimeGrid& grid) {
    drive.check();
    const Eigen::VectorXd R = R_E.real_values();
    const Index n = grid.steps();
    if (R.size() < n + 1) throw grid_error("kernel shorter than the drive grid");
    const double dt = grid.dt;

    // extend to the full linear-convolution support [t0, t0 + 2*duration]
    const Index n_ext = 2 * n + 1;
    Eigen::VectorXcd dS = Eigen::VectorXcd::Zero(n_ext);
    Eigen::VectorXcd F_ext(n_ext);
    for (Index j = 0; j < n_ext; ++j)
        F_ext(j) = drive.value(grid.t0 + double(j) * dt);
    // plain Riemann sum: the transform turns exactly this convolution into a
    // product; R(0) = 0 and F(t0) ~ 0 make it match the trapezoid rule used
    // for delta_S_linear on the physical window
    parallel_for(n_ext, [&](Index lo, Index hi) {
        for (Index i = std::max<Index>(lo, 1); i < hi; ++i) {
            const Index jmax = std::min<Index>(i, n);
            const Index jmin = i - jmax;  // kernel index stays within [0, n]
            double acc = 0.0;
            for (Index j = jmin; j <= jmax; ++j)
                acc += R(i - j) * F_ext(j).real();
            dS(i) = dt * acc;
        }
    });

    Index M = n_ext;
    if (M % 2 == 0) ++M;
    const double dw = 2.0 * pi / (double(M) * dt);
    const Eigen::VectorXd omegas = symmetric_grid(M, dw);
    Eigen::VectorXcd R_c = R.head(n + 1).cast<std::complex<double>>();
    const Eigen::VectorXcd chi = dt * dft_sums(R_c, dt, 0.0, omegas);
    const Eigen::VectorXcd F_hat = dt * dft_sums(F_ext, dt, grid.t0, omegas);
    const Eigen::VectorXcd S_hat = dt * dft_sums(dS, dt, grid.t0, omegas);

    const double denom = S_hat.norm();
    if (denom == 0.0) return 0.0;
    return (S_hat - chi.cwiseProduct(F_hat)).norm() / denom;
}

double causality_negative_mass(const Spectrum& spec) {
    const double dw = spec.domega();
    const Index M = spec.omegas.size();
    const double dt = 2.0 * pi / (double(M) * dw);
    Eigen::VectorXd neg_times(M);
    const Index half = (M - 1) / 2;
    for (Index j = 0; j < M; ++j) neg_times(j) = -double(j - half) * dt;
    const Eigen::VectorXcd x =
        (dw / (2.0 * pi)) * dft_sums(spec.values, dw, spec.omegas(0), neg_times);
    double peak = 0.0, neg = 0.0;
    for (Index j = 0; j < M; ++j) {
        const double t = double(j - half) * dt;
        const double a = std::abs(x(j));
        peak = std::max(peak, a);
        if (t <= -5.0 * dt) neg = std::max(neg, a);
    }
    return peak > 0.0 ? neg / peak : 0.0;
}

Spectrum kramers_kronig(const Spectrum& spec, KKDirection direction,
                        bool check_causality) {
    const double dw = spec.domega();
    const Index n = spec.omegas.size();
    if (n < 5) throw grid_error("Kramers-Kronig needs at least 5 bins");
    if (check_causality) {
        const double mass = causality_negative_mass(spec);
        if (mass > 0.02)
            throw causality_error("spectrum is not that of a causal kernel "
                                  "(negative-time mass fraction " +
                                  std::to_string(mass) + ")");
    }

    const Eigen::VectorXd src = direction == KKDirection::im_from_re
                                    ? Eigen::VectorXd(spec.values.real())
                                    : Eigen::VectorXd(spec.values.imag());
    const double sign = direction == KKDirection::re_from_im ? 1.0 : -1.0;
    const double lo_edge = spec.omegas(0) - dw / 2.0;
    const double hi_edge = spec.omegas(n - 1) + dw / 2.0;

    // asymptotic c/omega tails fitted from the band edges
    const bool tails = lo_edge < 0.0 && hi_edge > 0.0 && n >= 5;
    double cR = 0.0, cL = 0.0;
    if (tails) {
        for (Index k = 0; k < 5; ++k) {
            cR += spec.omegas(n - 1 - k) * src(n - 1 - k) / 5.0;
            cL += spec.omegas(k) * src(k) / 5.0;
        }
    }
    const double A = std::abs(lo_edge);

    Spectrum out;
    out.omegas = spec.omegas;
    out.values.resize(n);
    parallel_for(n, [&](Index lo, Index hi) {
        for (Index i = lo; i < hi; ++i) {
            const double wi = spec.omegas(i);
            double s = 0.0;
            for (Index k = 0; k < n; ++k) {
                if (k == i) continue;
                s += (src(k) - src(i)) / (spec.omegas(k) - wi) * dw;
            }
            // removable singular bin: odd-interpolant integral
            if (i >= 2 && i + 2 < n) {
                const double g1 = src(i + 1) - src(i - 1);
                const double g2 = src(i + 2) - src(i - 2);
                s += (94.0 * g1 - 11.0 * g2) / 144.0;
            } else if (i >= 1 && i + 1 < n) {
                s += (src(i + 1) - src(i - 1)) / 2.0;
            } else if (i == 0) {
                s += src(1) - src(0);
            } else {
                s += src(n - 1) - src(n - 2);
            }
            s += src(i) * std::log((hi_edge - wi) / (wi - lo_edge));
            if (tails) {
                if (std::abs(wi) <= 1e-12 * dw) {
                    s += cR / hi_edge + cL / A;
                } else {
                    s += cR / wi * std::log(hi_edge / (hi_edge - wi));
                    s += cL / wi * std::log((A + wi) / A);
                }
            }
            out.values(i) = sign / pi * s;
        }
    });
    return out;
}

Spectrum dissipative_part(const ResponseSeries& R, Index zero_pad_factor) {
    const Spectrum X = fourier(R, zero_pad_factor);
    const Index M = X.omegas.size();
    Spectrum out;
    out.omegas = X.omegas;
    out.values.resize(M);
    for (Index k = 0; k < M; ++k)
        out.values(k) = (X.values(k) - X.values(M - 1 - k)) / std::complex<double>(0, 2);
    return out;
}

Spectrum crop_band(const Spectrum& spec, double omega_abs_max) {
    std::vector<Index> keep;
    for (Index k = 0; k < spec.omegas.size(); ++k)
        if (std::abs(spec.omegas(k)) <= omega_abs_max + 1e-12) keep.push_back(k);
    if (keep.size() < 5) throw grid_error("cropped band keeps fewer than 5 bins");
    Spectrum out;
    out.omegas.resize(Index(keep.size()));
    out.values.resize(Index(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) {
        out.omegas(Index(j)) = spec.omegas(keep[j]);
        out.values(Index(j)) = spec.values(keep[j]);
    }
    return out;
}

FdtReport fdt_check(const Operator& O, const Operator& H1, const Operator& H0,
                    double beta, const Eigen::VectorXd& omegas) {
    if (H0.dim() > 16)
        throw dimension_error("fdt_check is an exact spectral sum, dim <= 16");
    if (O.dim() != H0.dim() || H1.dim() != H0.dim())
        throw dimension_error("fdt_check dimension mismatch");
    if (!O.hermitian_hint || !H1.hermitian_hint)
        throw hermiticity_error("fdt_check requires Hermitian O, H1");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw state_error("fdt_check requires finite beta >= 0");
    if (omegas.size() < 2) throw grid_error("fdt_check needs >= 2 bins");
    const double dw = omegas(1) - omegas(0);
    for (Index k = 1; k + 1 < omegas.size(); ++k)
        if (std::abs(omegas(k + 1) - omegas(k) - dw) > 1e-9 * dw)
            throw grid_error("fdt_check frequency grid is not uniform");

    FdtReport report;
    for (Index k = 0; k < omegas.size(); ++k)
        if (std::abs(omegas(k)) <= dw / 2.0 * (1.0 + 1e-9))
            report.excluded_bins.push_back(k);
    // at infinite temperature chi'' vanishes identically and the identity
    // survives only as the beta -> 0+ limit: no line left to check
    if (beta == 0.0) return report;

    auto eig = hermitian_eig(H0);
    const Index d = H0.dim();
    RealVector<double> p =
        (-beta * (eig.values.array() - eig.values.minCoeff())).exp().matrix();
    p /= p.sum();
    const ComplexMatrix<double> Ot = eig.vectors.adjoint() * O.mat * eig.vectors;
    const ComplexMatrix<double> H1t = eig.vectors.adjoint() * H1.mat * eig.vectors;

    Eigen::VectorXcd lhs = Eigen::VectorXcd::Zero(omegas.size());
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(omegas.size());
    for (Index nn = 0; nn < d; ++nn) {
        for (Index mm = 0; mm < d; ++mm) {
            const std::complex<double> Mel = Ot(nn, mm) * H1t(mm, nn);
            if (Mel == std::complex<double>(0, 0)) continue;
            const double nu = eig.values(mm) - eig.values(nn);
            const Index k = Index(std::llround((nu - omegas(0)) / dw));
            if (k < 0 || k >= omegas.size()) continue;
            if (std::abs(nu - omegas(k)) > dw / 2.0 * (1.0 + 1e-9)) continue;
            lhs(k) += 2.0 * pi * p(nn) * Mel;
            const double dp = p(nn) - p(mm);
            // per-line Bose factor keeps the identity exact before binning
            if (dp != 0.0)
                rhs(k) += 2.0 * pi * (1.0 / -std::expm1(-beta * nu)) * dp * Mel;
        }
    }

    for (Index k = 0; k < omegas.size(); ++k) {
        if (std::find(report.excluded_bins.begin(), report.excluded_bins.end(),
                      k) != report.excluded_bins.end())
            continue;
        const double a = std::abs(lhs(k)), b = std::abs(rhs(k));
        const double scale = std::max(a, b);
        if (scale <= 1e-8) continue;
        ++report.bins_checked;
        report.max_residual =
            std::max(report.max_residual, std::abs(lhs(k) - rhs(k)) / scale);
    }
    return report;
}

}  // namespace eer
