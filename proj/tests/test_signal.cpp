#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "eer/models.hpp"
#include "eer/signal.hpp"

using namespace eer;
using cd = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

ResponseSeries series_from(const TimeGrid& grid, SeriesKind kind,
                           double (*f)(double)) {
    ResponseSeries s;
    s.grid = grid;
    s.kind = kind;
    s.values.resize(grid.size());
    for (Index i = 0; i < grid.size(); ++i) s.values(i) = f(grid.time(i));
    return s;
}

double gauss_env(double t) { return std::exp(-t * t / 2.0); }

Spectrum lorentzian(double w0, double eta, double wmax, double dw) {
    const Index half = Index(std::llround(wmax / dw));
    Spectrum s;
    s.omegas.resize(2 * half + 1);
    s.values.resize(2 * half + 1);
    for (Index k = 0; k < s.omegas.size(); ++k) {
        const double w = double(k - half) * dw;
        s.omegas(k) = w;
        s.values(k) = 1.0 / cd(w0 - w, -eta);
    }
    return s;
}

}  // namespace

TEST_CASE("fourier transform conventions") {
    const TimeGrid grid{-8.0, 8.0, 0.05};

    SUBCASE("real even series transforms to a real spectrum") {
        const ResponseSeries s =
            series_from(grid, SeriesKind::correlation, gauss_env);
        const Spectrum X = fourier(s);
        CHECK(X.values.imag().cwiseAbs().maxCoeff() <
              1e-10 * X.values.real().cwiseAbs().maxCoeff());
    }

    SUBCASE("gaussian cosine drive matches the analytic transform") {
        DriveSignal d;
        d.alpha = 0.3;
        d.T = 0.5 * pi;  // carrier at 4 rad per unit time
        ResponseSeries s;
        s.grid = grid;
        s.kind = SeriesKind::correlation;
        s.values.resize(grid.size());
        for (Index i = 0; i < grid.size(); ++i) s.values(i) = d.value(grid.time(i));

        const Spectrum X = fourier(s, 4);
        const double wd = 2.0 * pi / d.T;
        const double amp = d.alpha * std::sqrt(2.0 * pi) / 2.0;
        for (Index k = 0; k < X.omegas.size(); ++k) {
            const double w = X.omegas(k);
            if (std::abs(w) > 10.0) continue;
            const double expect = amp * (std::exp(-(w - wd) * (w - wd) / 2.0) +
                                         std::exp(-(w + wd) * (w + wd) / 2.0));
            CHECK(std::abs(X.values(k).real() - expect) < 1e-10);
            CHECK(std::abs(X.values(k).imag()) < 1e-10);
        }
    }

    SUBCASE("Parseval and Hermitian symmetry") {
        std::mt19937_64 rng(101);
        std::normal_distribution<double> g(0.0, 1.0);
        ResponseSeries s;
        s.grid = TimeGrid{-2.0, 2.0, 0.02};
        s.kind = SeriesKind::correlation;
        s.values.resize(s.grid.size());
        for (Index i = 0; i < s.grid.size(); ++i) s.values(i) = g(rng);

        const Spectrum X = fourier(s, 2);
        const double time_mass = s.values.squaredNorm() * s.grid.dt;
        const double freq_mass = X.values.squaredNorm() * X.domega() / (2.0 * pi);
        CHECK(freq_mass == doctest::Approx(time_mass).epsilon(1e-8));

        const Index M = X.omegas.size();
        for (Index k = 0; k < M; ++k)
            CHECK(std::abs(X.values(k) - std::conj(X.values(M - 1 - k))) <
                  1e-10 * X.values.cwiseAbs().maxCoeff());
    }

    SUBCASE("inverse transform round trip") {
        std::mt19937_64 rng(103);
        std::normal_distribution<double> g(0.0, 1.0);
        ResponseSeries s;
        s.grid = TimeGrid{0.0, 4.0, 0.04};
        s.kind = SeriesKind::kubo_obs;
        s.values.resize(s.grid.size());
        for (Index i = 0; i < s.grid.size(); ++i) s.values(i) = cd(g(rng), g(rng));

        const Spectrum X = fourier(s, 2);
        const ResponseSeries back = inverse_fourier(X, s.grid, s.kind);
        CHECK((back.values - s.values).cwiseAbs().maxCoeff() <
              1e-9 * s.values.cwiseAbs().maxCoeff());
    }

    SUBCASE("padding must be positive") {
        const ResponseSeries s =
            series_from(grid, SeriesKind::correlation, gauss_env);
        CHECK_THROWS_AS(fourier(s, 0), config_error);
    }
}

TEST_CASE("susceptibility guards causality") {
    TimeGrid grid{-1.0, 1.0, 0.1};
    ResponseSeries bad = series_from(grid, SeriesKind::kubo_ee, gauss_env);
    CHECK_THROWS_AS(susceptibility_ee(bad), causality_error);

    ResponseSeries zero = bad;
    zero.values.setZero();
    const Spectrum X = susceptibility_ee(zero);
    CHECK(X.values.cwiseAbs().maxCoeff() == 0.0);

    // kernels on a lag grid starting at 0 pass through
    TimeGrid lag{0.0, 2.0, 0.1};
    ResponseSeries ok = series_from(lag, SeriesKind::kubo_ee,
                                    +[](double t) { return std::sin(3.0 * t); });
    CHECK_NOTHROW(susceptibility_ee(ok));
}

TEST_CASE("product identity ties the spectra together") {
    const Index L = 6;
    const Operator H0 =
        xx_chain_single_excitation({L, 0.0, 2.0, Boundary::periodic});
    const Operator H1 = site_perturbation(L, 1);
    const PureState psi = spin_wave_state(L, 1);
    const DensityMatrix rho0 = projector(psi);
    ReductionSpec spec;
    spec.kind = ReductionSpec::Kind::single_excitation;
    spec.site = 1;
    const DensityMatrix rhoA0 = reduce(psi, spec);

    DriveSignal d;
    d.alpha = 0.05;
    d.T = 0.5 * pi;
    const TimeGrid grid{-8.0, 20.0, 0.01};
    const TimeGrid kgrid{0.0, grid.t_max - grid.t0, grid.dt};
    const ResponseSeries R = kubo_ee_series(rhoA0, H1, H0, rho0, kgrid, spec);

    CHECK(ee_product_identity_residual(R, d, grid) < 1e-9);

    ResponseSeries shorter = R;
    shorter.values.conservativeResize(grid.steps() / 2);
    CHECK_THROWS_AS(ee_product_identity_residual(shorter, d, grid), grid_error);
}

TEST_CASE("Kramers-Kronig on the Lorentzian closed form") {
    // eta spans ten grid bins, comfortably resolved; the 1/omega tails put
    // the band-truncated negative-mass diagnostic at its gate, so the
    // reconstruction oracles skip it (the gate is tested on its own below)
    const Spectrum chi = lorentzian(3.0, 0.5, 20.0, 0.05);

    SUBCASE("imaginary part from the real part") {
        const Spectrum rec = kramers_kronig(chi, KKDirection::im_from_re,
                                            /*check_causality=*/false);
        const double err = (rec.values.real() - chi.values.imag()).norm() /
                           chi.values.imag().norm();
        CHECK(err < 0.02);
    }

    SUBCASE("real part from the imaginary part") {
        const Spectrum rec = kramers_kronig(chi, KKDirection::re_from_im,
                                            /*check_causality=*/false);
        const double err = (rec.values.real() - chi.values.real()).norm() /
                           chi.values.real().norm();
        CHECK(err < 0.02);
    }

    SUBCASE("zero in, zero out") {
        Spectrum zero = chi;
        zero.values.setZero();
        const Spectrum rec = kramers_kronig(zero, KKDirection::re_from_im);
        CHECK(rec.values.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("needs a minimal band") {
        Spectrum tiny;
        tiny.omegas = Eigen::VectorXd::LinSpaced(4, -1.0, 1.0);
        tiny.values = Eigen::VectorXcd::Zero(4);
        CHECK_THROWS_AS(kramers_kronig(tiny, KKDirection::re_from_im),
                        grid_error);
    }
}

TEST_CASE("non-causal spectra are rejected") {
    // spectrum of a symmetric time signal: half its mass sits at t < 0
    const TimeGrid grid{-8.0, 8.0, 0.05};
    const ResponseSeries even =
        series_from(grid, SeriesKind::correlation, gauss_env);
    const Spectrum X = fourier(even);

    CHECK(causality_negative_mass(X) > 0.3);
    CHECK_THROWS_AS(kramers_kronig(X, KKDirection::im_from_re), causality_error);
    CHECK_NOTHROW(kramers_kronig(X, KKDirection::im_from_re,
                                 /*check_causality=*/false));

    // a damped causal kernel passes the same gate
    const TimeGrid lag{0.0, 60.0, 0.02};
    const ResponseSeries causal =
        series_from(lag, SeriesKind::kubo_obs,
                    +[](double t) { return std::sin(3.0 * t) * std::exp(-0.2 * t); });
    const Spectrum Xc = fourier(causal);
    CHECK(causality_negative_mass(Xc) < 0.02);
    CHECK_NOTHROW(kramers_kronig(Xc, KKDirection::re_from_im));
}

TEST_CASE("dissipative part of a causal kernel") {
    const TimeGrid lag{0.0, 60.0, 0.02};
    const double w0 = 3.0;
    const ResponseSeries R =
        series_from(lag, SeriesKind::kubo_obs,
                    +[](double t) { return std::sin(3.0 * t) * std::exp(-0.1 * t); });

    SUBCASE("equals the imaginary part of the transform") {
        const Spectrum chi = fourier(R, 2);
        const Spectrum dis = dissipative_part(R, 2);
        CHECK((dis.values.real() - chi.values.imag()).cwiseAbs().maxCoeff() <
              1e-12 * chi.values.imag().cwiseAbs().maxCoeff());
        CHECK(dis.values.imag().cwiseAbs().maxCoeff() <
              1e-10 * dis.values.real().cwiseAbs().maxCoeff());
    }

    SUBCASE("odd, with opposite-sign peaks at the resonance") {
        const Spectrum dis = dissipative_part(R);
        const Index M = dis.omegas.size();
        Index kp = 0;
        double best = -1.0;
        for (Index k = 0; k < M; ++k) {
            if (dis.omegas(k) <= 0.0) continue;
            if (std::abs(dis.values(k).real()) > best) {
                best = std::abs(dis.values(k).real());
                kp = k;
            }
        }
        CHECK(std::abs(dis.omegas(kp) - w0) < 3.0 * dis.domega());
        const Index km = M - 1 - kp;
        CHECK(dis.values(km).real() ==
              doctest::Approx(-dis.values(kp).real()).epsilon(1e-10));
    }

    SUBCASE("even kernels have no dissipative part") {
        const TimeGrid grid{-8.0, 8.0, 0.05};
        const ResponseSeries even =
            series_from(grid, SeriesKind::correlation, gauss_env);
        const Spectrum dis = dissipative_part(even);
        CHECK(dis.values.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("band cropping") {
    const Spectrum chi = lorentzian(1.0, 0.3, 10.0, 0.1);
    const Spectrum cropped = crop_band(chi, 4.0);
    CHECK(std::abs(cropped.omegas(0) + 4.0) < 1e-12);
    CHECK(std::abs(cropped.omegas(cropped.omegas.size() - 1) - 4.0) < 1e-12);
    CHECK(cropped.omegas.size() == 81);
    CHECK_THROWS_AS(crop_band(chi, 0.05), grid_error);
}

TEST_CASE("fluctuation-dissipation identity on thermal states") {
    SUBCASE("two-level system") {
        const Eigen::VectorXd omegas = Eigen::VectorXd::LinSpaced(121, -3.0, 3.0);
        const FdtReport rep = fdt_check(pauli_x(), pauli_x(), pauli_z(), 1.0,
                                        omegas);
        CHECK(rep.bins_checked > 0);
        CHECK(rep.max_residual < 1e-6);
    }

    SUBCASE("four-level random model") {
        std::mt19937_64 rng(107);
        std::normal_distribution<double> g(0.0, 1.0);
        auto rand_herm = [&](Index n) {
            ComplexMatrix<double> m(n, n);
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j) m(i, j) = cd(g(rng), g(rng));
            return Operator(((m + m.adjoint()) / 2.0).eval(), true);
        };
        const Operator H0 = rand_herm(4);
        const Operator O = rand_herm(4);
        const Operator H1 = rand_herm(4);
        auto ev = hermitian_eig(H0).values;
        const double span = ev(3) - ev(0);
        const Eigen::VectorXd omegas =
            Eigen::VectorXd::LinSpaced(241, -1.2 * span, 1.2 * span);
        const FdtReport rep = fdt_check(O, H1, H0, 0.8, omegas);
        CHECK(rep.bins_checked > 0);
        CHECK(rep.max_residual < 1e-6);
    }

    SUBCASE("infinite temperature leaves no checkable line") {
        const Eigen::VectorXd omegas = Eigen::VectorXd::LinSpaced(121, -3.0, 3.0);
        const FdtReport rep =
            fdt_check(pauli_x(), pauli_x(), pauli_z(), 0.0, omegas);
        CHECK(rep.excluded_bins.size() == 1);
        CHECK(rep.bins_checked == 0);
        CHECK(rep.max_residual == 0.0);

        // the beta -> 0+ limit itself stays exact: the per-line Bose weight
        // cancels the population difference algebraically
        const FdtReport limit =
            fdt_check(pauli_x(), pauli_x(), pauli_z(), 1e-8, omegas);
        CHECK(limit.bins_checked > 0);
        CHECK(limit.max_residual < 1e-6);
    }

    SUBCASE("contract violations") {
        const Eigen::VectorXd omegas = Eigen::VectorXd::LinSpaced(11, -1.0, 1.0);
        CHECK_THROWS_AS(fdt_check(identity_op(32), identity_op(32),
                                  identity_op(32), 1.0, omegas),
                        dimension_error);
        CHECK_THROWS_AS(fdt_check(pauli_x(), pauli_x(), pauli_z(), -1.0, omegas),
                        state_error);
        Eigen::VectorXd skewed(3);
        skewed << -1.0, 0.0, 2.0;
        CHECK_THROWS_AS(fdt_check(pauli_x(), pauli_x(), pauli_z(), 1.0, skewed),
                        grid_error);
    }
}
