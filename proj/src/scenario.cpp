#include "eer/scenario.hpp"

#include "eer/dynamics.hpp"
#include "eer/models.hpp"
#include "eer/output.hpp"
#include "eer/parallel.hpp"
#include "eer/response.hpp"
#include "eer/signal.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace eer {

namespace {

using json = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kStepFactor = 0.015;  // dt * (|H0| + alpha|H1|) target

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct KV {
    std::string key;
    std::string value;
    int line = 0;
};

std::vector<KV> parse_kv(const std::string& text) {
    std::vector<KV> out;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(ln) +
                               ": expected 'key = value', got '" + t + "'");
        KV kv{trim(t.substr(0, eq)), trim(t.substr(eq + 1)), ln};
        if (kv.key.empty())
            throw config_error("line " + std::to_string(ln) + ": empty key");
        if (kv.value.empty())
            throw config_error("line " + std::to_string(ln) + ": empty value for key '" +
                               kv.key + "'");
        out.push_back(std::move(kv));
    }
    return out;
}

double parse_double(const KV& kv) {
    const char* s = kv.value.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || !std::isfinite(v))
        throw config_error("line " + std::to_string(kv.line) + ": key '" + kv.key +
                           "': expected a finite number, got '" + kv.value + "'");
    return v;
}

Index parse_index(const KV& kv) {
    const char* s = kv.value.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0')
        throw config_error("line " + std::to_string(kv.line) + ": key '" + kv.key +
                           "': expected an integer, got '" + kv.value + "'");
    return static_cast<Index>(v);
}

uint64_t parse_u64(const KV& kv) {
    const char* s = kv.value.c_str();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0')
        throw config_error("line " + std::to_string(kv.line) + ": key '" + kv.key +
                           "': expected a non-negative integer, got '" + kv.value + "'");
    return v;
}

std::vector<double> parse_double_list(const KV& kv) {
    std::vector<double> out;
    std::stringstream ss(kv.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        KV one{kv.key, trim(item), kv.line};
        if (one.value.empty())
            throw config_error("line " + std::to_string(kv.line) + ": key '" + kv.key +
                               "': empty list entry");
        out.push_back(parse_double(one));
    }
    if (out.empty())
        throw config_error("line " + std::to_string(kv.line) + ": key '" + kv.key +
                           "': empty list");
    return out;
}

const std::set<std::string> kScenarios = {"xx-reproduce", "alpha-scan", "theorem1",
                                          "canonical-fdt"};

const std::set<std::string> kAllKeys = {
    "scenario", "out",   "seed", "L",  "lambda", "J",       "boundary",
    "site",     "k",     "alpha", "alphas", "T",  "t0",     "t_max",
    "dt",       "pad",   "kk_band", "beta"};

std::set<std::string> allowed_keys(const std::string& scenario) {
    if (scenario == "xx-reproduce")
        return {"scenario", "out", "seed", "L", "lambda", "J", "boundary", "site",
                "k", "alpha", "T", "t0", "t_max", "dt", "pad", "kk_band"};
    if (scenario == "alpha-scan")
        return {"scenario", "out", "seed", "L", "lambda", "J", "boundary", "site",
                "k", "alphas", "T", "t0", "t_max", "dt"};
    if (scenario == "theorem1")
        return {"scenario", "out", "seed", "alphas", "T", "t0", "t_max", "dt"};
    return {"scenario", "out", "seed", "beta", "alpha", "T", "t0", "t_max", "dt",
            "pad"};
}

std::set<std::string> required_keys(const std::string& scenario) {
    if (scenario == "xx-reproduce") return {"J", "alpha"};
    if (scenario == "alpha-scan") return {"J", "alphas"};
    return {};
}

double resolve_step(double t0, double t_max, double norm_bound) {
    const double span = t_max - t0;
    const double raw = kStepFactor / norm_bound;
    const Index n = std::max<Index>(
        1, static_cast<Index>(std::ceil(span / raw - 1e-12)));
    return span / static_cast<double>(n);
}

void check_divides(double t0, double t_max, double dt) {
    const double ratio = (t_max - t0) / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw config_error("dt = " + format_g17(dt) + " does not divide t_max - t0 = " +
                           format_g17(t_max - t0) + " evenly");
    if (ratio < 0.5) throw config_error("grid has no steps");
}

Boundary to_boundary(const std::string& s) {
    if (s == "open") return Boundary::open;
    if (s == "periodic") return Boundary::periodic;
    throw config_error("boundary must be 'open' or 'periodic', got '" + s + "'");
}

// ---- fixed models used by the self-contained scenarios ----

struct Theorem1Setup {
    BipartiteModel product_model;
    Operator product_H1;
    BipartiteModel entangled_model;
    Operator entangled_H1;
};

Theorem1Setup theorem1_setup() {
    const ComplexMatrix<double> sx = pauli_x().mat;
    const ComplexMatrix<double> sz = pauli_z().mat;
    const ComplexMatrix<double> id = identity_op(2).mat;
    Theorem1Setup s;
    // widely split non-degenerate product spectrum {17, 3, -3, -17}
    s.product_model =
        bipartite_model(Operator(10.0 * sz, true), Operator(7.0 * sz, true));
    s.product_H1 = Operator(
        kron_dense(sx, sx) + 0.5 * kron_dense(sx, id) + 0.25 * kron_dense(id, sx),
        true);
    // H0 = sz x I - I x sz annihilates the maximally entangled state
    s.entangled_model =
        bipartite_model(Operator(sz, true), Operator(-1.0 * sz, true));
    s.entangled_H1 = Operator(
        kron_dense(sx, sx) + 0.7 * kron_dense(sz, sx) + 0.3 * kron_dense(sx, id),
        true);
    return s;
}

struct CanonicalSetup {
    Operator H0;
    Operator H1;
};

CanonicalSetup canonical_setup() {
    const ComplexMatrix<double> sx = pauli_x().mat;
    const ComplexMatrix<double> sz = pauli_z().mat;
    const ComplexMatrix<double> id = identity_op(2).mat;
    CanonicalSetup s;
    // interacting pair: the entangled ground state has a full-rank
    // A-reduction, and its modular Hamiltonian does not commute with H0,
    // which keeps the canonical kernel alive
    s.H0 = Operator(kron_dense(sz, id) + 0.7 * kron_dense(id, sz) +
                        0.3 * kron_dense(sx, sx),
                    true);
    s.H1 = Operator(kron_dense(sx, sx) + 0.4 * kron_dense(sz, sx), true);
    return s;
}

struct XXSetup {
    Operator H0;
    Operator H1;
    PureState psi0;
    DensityMatrix rho0;
    DensityMatrix rhoA0;
    ReductionSpec red;
};

XXSetup xx_setup(const ScenarioConfig& cfg) {
    XXChainSpec spec{cfg.L, cfg.lambda, cfg.J, to_boundary(cfg.boundary)};
    XXSetup s;
    s.H0 = xx_chain_single_excitation(spec);
    s.H1 = site_perturbation(cfg.L, cfg.site);
    s.psi0 = spin_wave_state(cfg.L, cfg.k);
    s.rho0 = projector(s.psi0);
    s.red.kind = ReductionSpec::Kind::single_excitation;
    s.red.site = cfg.site;
    s.rhoA0 = reduce(s.psi0, s.red);
    return s;
}

double xx_norm_bound(const ScenarioConfig& cfg, double alpha_max) {
    XXChainSpec spec{cfg.L, cfg.lambda, cfg.J, to_boundary(cfg.boundary)};
    const Operator H0 = xx_chain_single_excitation(spec);
    const Operator H1 = site_perturbation(cfg.L, cfg.site);
    return spectral_norm(H0) + alpha_max * spectral_norm(H1);
}

std::pair<double, double> theorem1_steps(const ScenarioConfig& cfg) {
    const Theorem1Setup s = theorem1_setup();
    const double amax = cfg.alphas.back();
    const double np =
        spectral_norm(Operator(s.product_model.H0.mat, true)) +
        amax * spectral_norm(s.product_H1);
    const double ne =
        spectral_norm(Operator(s.entangled_model.H0.mat, true)) +
        amax * spectral_norm(s.entangled_H1);
    return {resolve_step(cfg.t0, cfg.t_max, np), resolve_step(cfg.t0, cfg.t_max, ne)};
}

// ---- shared emission helpers ----

std::filesystem::path out_path(const ScenarioConfig& cfg, const std::string& name) {
    return std::filesystem::path(cfg.out_dir) / name;
}

std::vector<std::string> csv_comments(const ScenarioConfig& cfg) {
    return {"config_hash: " + cfg.hash_hex(), "scenario: " + cfg.scenario};
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

Eigen::VectorXd abs_vec(const Eigen::VectorXcd& v) { return v.cwiseAbs(); }

Eigen::VectorXd drive_column(const DriveSignal& drive, const TimeGrid& grid) {
    Eigen::VectorXd f(grid.size());
    for (Index i = 0; i < grid.size(); ++i) f(i) = drive.value(grid.time(i));
    return f;
}

ResponseSeries drive_series(const DriveSignal& drive, const TimeGrid& grid) {
    ResponseSeries s;
    s.grid = grid;
    s.kind = SeriesKind::correlation;
    s.values = drive_column(drive, grid).cast<std::complex<double>>();
    return s;
}

void write_svg(const ScenarioConfig& cfg, const std::string& name,
               const std::string& title, const std::string& x_label,
               const Eigen::VectorXd& x, const std::vector<PlotSeries>& series) {
    atomic_write_text(out_path(cfg, name).string(),
                      svg_line_plot(title, x_label, x, series,
                                    "config_hash: " + cfg.hash_hex()));
}

void write_summary(const ScenarioConfig& cfg, const json& j) {
    atomic_write_text(out_path(cfg, "summary.json").string(), j.dump(2) + "\n");
}

json summary_base(const ScenarioConfig& cfg) {
    json j;
    j["config_hash"] = cfg.hash_hex();
    j["scenario"] = cfg.scenario;
    return j;
}

std::pair<double, double> top_two_peaks(const Spectrum& s, double exclusion) {
    Index i1 = -1, i2 = -1;
    double m1 = -1.0, m2 = -1.0;
    for (Index i = 0; i < s.omegas.size(); ++i) {
        if (s.omegas(i) <= 0.0) continue;
        const double a = std::abs(s.values(i));
        if (a > m1) {
            m1 = a;
            i1 = i;
        }
    }
    if (i1 < 0) return {0.0, 0.0};
    for (Index i = 0; i < s.omegas.size(); ++i) {
        if (s.omegas(i) <= 0.0) continue;
        if (std::abs(s.omegas(i) - s.omegas(i1)) <= exclusion) continue;
        const double a = std::abs(s.values(i));
        if (a > m2) {
            m2 = a;
            i2 = i;
        }
    }
    return {s.omegas(i1), i2 >= 0 ? s.omegas(i2) : 0.0};
}

double out_of_band_fraction(const Spectrum& s, const std::vector<double>& centers,
                            double half_width) {
    double total = 0.0, outside = 0.0;
    for (Index i = 0; i < s.omegas.size(); ++i) {
        const double p = std::norm(s.values(i));
        total += p;
        bool in_band = false;
        for (double c : centers) {
            if (std::abs(s.omegas(i) - c) <= half_width ||
                std::abs(s.omegas(i) + c) <= half_width) {
                in_band = true;
                break;
            }
        }
        if (!in_band) outside += p;
    }
    return total > 0.0 ? outside / total : 0.0;
}

double kernel_edge_fraction(const Eigen::VectorXd& abs_kernel) {
    const Index n = abs_kernel.size();
    const Index tail = std::max<Index>(1, n / 20);
    const double peak = abs_kernel.maxCoeff();
    return peak > 0.0 ? abs_kernel.tail(tail).maxCoeff() / peak : 0.0;
}

// ---- scenario runs ----

void run_xx_reproduce(const ScenarioConfig& cfg) {
    const XXSetup s = xx_setup(cfg);
    TimeGrid grid{cfg.t0, cfg.t_max, cfg.dt};
    grid.check();
    const TimeGrid kgrid{0.0, cfg.t_max - cfg.t0, cfg.dt};
    DriveSignal drive;
    drive.alpha = cfg.alpha;
    drive.T = cfg.T;

    const ResponseSeries R_E =
        kubo_ee_series(s.rhoA0, s.H1, s.H0, s.rho0, kgrid, s.red);
    const ResponseSeries dS_lin = delta_S_linear(R_E, drive, grid);
    const Trajectory traj = evolve_exact(s.H0, s.H1, drive, s.psi0, grid);
    const ResponseSeries dS_ex = delta_S_exact(traj, s.red);
    const EntropyObservable sA = entropy_observable(s.rhoA0);
    const ResponseSeries d_sA = delta_expectation_sA(traj, sA, s.red);

    const Spectrum chi = susceptibility_ee(R_E, cfg.pad);
    const Spectrum f_hat = fourier(drive_series(drive, grid), cfg.pad);
    const Spectrum ex_hat = fourier(dS_ex, cfg.pad);
    const Spectrum lin_hat = fourier(dS_lin, cfg.pad);

    const Spectrum band = crop_band(chi, cfg.kk_band);
    const Spectrum recon = kramers_kronig(band, KKDirection::re_from_im);
    const double kk_res =
        (recon.values.real() - band.values.real()).norm() / band.values.real().norm();
    const double neg_mass = causality_negative_mass(band);
    const double product_res = ee_product_identity_residual(R_E, drive, grid);

    const Eigen::VectorXd ex_abs = abs_vec(ex_hat.values);
    const Eigen::VectorXd lin_abs = abs_vec(lin_hat.values);
    const double spectral_l2 = (ex_abs - lin_abs).norm() / ex_abs.norm();

    const auto [p1, p2] = top_two_peaks(lin_hat, 1.0);
    const double oob = out_of_band_fraction(ex_hat, {p1, p2}, 1.5);

    const Eigen::VectorXd t = to_vec(grid.times());
    const Eigen::VectorXd f_col = drive_column(drive, grid);
    const Eigen::VectorXd ex_col = dS_ex.real_values();
    const Eigen::VectorXd lin_col = dS_lin.real_values();
    const Eigen::VectorXd sA_col = d_sA.real_values();

    atomic_write_text(
        out_path(cfg, "timeseries.csv").string(),
        csv_table(csv_comments(cfg),
                  {"t", "F", "delta_S_exact", "delta_S_linear", "delta_expect_sA"},
                  {t, f_col, ex_col, lin_col, sA_col}));
    write_svg(cfg, "timeseries.svg", "entropy response vs time", "t", t,
              {{"delta_S_exact", ex_col},
               {"delta_S_linear", lin_col},
               {"delta_expect_sA", sA_col},
               {"F", f_col}});

    const Eigen::VectorXd om = chi.omegas;
    const Eigen::VectorXd two_w_over_J = 2.0 / cfg.J * om;
    const Eigen::VectorXd chi_re = chi.values.real();
    const Eigen::VectorXd chi_im = chi.values.imag();
    const Eigen::VectorXd f_abs = abs_vec(f_hat.values);
    atomic_write_text(
        out_path(cfg, "spectrum.csv").string(),
        csv_table(csv_comments(cfg),
                  {"omega", "two_omega_over_J", "re_chi_E", "im_chi_E", "abs_F_hat",
                   "abs_delta_S_exact_hat", "abs_delta_S_linear_hat"},
                  {om, two_w_over_J, chi_re, chi_im, f_abs, ex_abs, lin_abs}));
    write_svg(cfg, "spectrum.svg", "entanglement susceptibility and spectra", "omega",
              om,
              {{"re_chi_E", chi_re},
               {"im_chi_E", chi_im},
               {"abs_F_hat", f_abs},
               {"abs_delta_S_exact_hat", ex_abs},
               {"abs_delta_S_linear_hat", lin_abs}});

    json j = summary_base(cfg);
    j["L"] = cfg.L;
    j["lambda"] = cfg.lambda;
    j["J"] = cfg.J;
    j["boundary"] = cfg.boundary;
    j["site"] = cfg.site;
    j["k"] = cfg.k;
    j["alpha"] = cfg.alpha;
    j["T"] = cfg.T;
    j["t0"] = cfg.t0;
    j["t_max"] = cfg.t_max;
    j["dt"] = cfg.dt;
    j["pad"] = cfg.pad;
    j["kk_band"] = cfg.kk_band;
    j["norm_drift"] = traj.norm_drift;
    j["floored_rank_deficit"] = sA.floored_rank_deficit;
    j["max_abs_delta_S_exact"] = ex_col.cwiseAbs().maxCoeff();
    j["max_abs_delta_S_linear"] = lin_col.cwiseAbs().maxCoeff();
    j["max_abs_linear_minus_exact"] = (ex_col - lin_col).cwiseAbs().maxCoeff();
    j["product_identity_residual"] = product_res;
    j["spectral_l2_linear_vs_exact"] = spectral_l2;
    j["kk_re_residual"] = kk_res;
    j["kk_negative_mass"] = neg_mass;
    j["kernel_edge_fraction"] = kernel_edge_fraction(abs_vec(R_E.values));
    j["chi_edge_fraction"] =
        std::max(std::abs(band.values(0)), std::abs(band.values(band.values.size() - 1))) /
        abs_vec(band.values).maxCoeff();
    j["peak_omega_1"] = p1;
    j["peak_omega_2"] = p2;
    j["peak_2omega_over_J_1"] = 2.0 * p1 / cfg.J;
    j["peak_2omega_over_J_2"] = 2.0 * p2 / cfg.J;
    j["out_of_band_fraction"] = oob;
    write_summary(cfg, j);
}

void run_alpha_scan(const ScenarioConfig& cfg) {
    const XXSetup s = xx_setup(cfg);
    TimeGrid grid{cfg.t0, cfg.t_max, cfg.dt};
    grid.check();
    const TimeGrid kgrid{0.0, cfg.t_max - cfg.t0, cfg.dt};

    const ResponseSeries R_E =
        kubo_ee_series(s.rhoA0, s.H1, s.H0, s.rho0, kgrid, s.red);
    const EntropyObservable sA = entropy_observable(s.rhoA0);
    const Eigen::VectorXd t = to_vec(grid.times());

    struct ScanPoint {
        double max_diff = 0.0;    // max_t |dS_exact - dS_linear|
        double eq14_ratio = 0.0;  // max_t |dS_exact - d<s_A>| / alpha^2
        double max_exact = 0.0;
        double norm_drift = 0.0;
    };

    auto scan_one = [&](size_t ai) {
        const double alpha = cfg.alphas[ai];
        DriveSignal drive;
        drive.alpha = alpha;
        drive.T = cfg.T;
        const Trajectory traj = evolve_exact(s.H0, s.H1, drive, s.psi0, grid);
        const ResponseSeries dS_ex = delta_S_exact(traj, s.red);
        const ResponseSeries dS_lin = delta_S_linear(R_E, drive, grid);
        const ResponseSeries d_sA = delta_expectation_sA(traj, sA, s.red);
        const Eigen::VectorXd ex = dS_ex.real_values();
        const Eigen::VectorXd lin = dS_lin.real_values();
        const Eigen::VectorXd sa = d_sA.real_values();
        const Eigen::VectorXd f_col = drive_column(drive, grid);

        const std::string tag = "timeseries_alpha_" + std::to_string(ai + 1);
        atomic_write_text(
            out_path(cfg, tag + ".csv").string(),
            csv_table(csv_comments(cfg),
                      {"t", "F", "delta_S_exact", "delta_S_linear", "delta_expect_sA"},
                      {t, f_col, ex, lin, sa}));
        write_svg(cfg, tag + ".svg", "alpha = " + format_g17(alpha), "t", t,
                  {{"delta_S_exact", ex},
                   {"delta_S_linear", lin},
                   {"delta_expect_sA", sa}});

        ScanPoint p;
        p.max_diff = (ex - lin).cwiseAbs().maxCoeff();
        p.eq14_ratio = (ex - sa).cwiseAbs().maxCoeff() / (alpha * alpha);
        p.max_exact = ex.cwiseAbs().maxCoeff();
        p.norm_drift = traj.norm_drift;
        return p;
    };

    std::vector<std::future<ScanPoint>> futs;
    futs.reserve(cfg.alphas.size());
    for (size_t ai = 0; ai < cfg.alphas.size(); ++ai)
        futs.push_back(std::async(std::launch::async, scan_one, ai));
    std::vector<ScanPoint> points;
    points.reserve(futs.size());
    for (auto& f : futs) points.push_back(f.get());

    std::vector<double> diffs, ratios, exacts;
    double drift = 0.0;
    for (const auto& p : points) {
        diffs.push_back(p.max_diff);
        ratios.push_back(p.eq14_ratio);
        exacts.push_back(p.max_exact);
        drift = std::max(drift, p.norm_drift);
    }
    const double slope = power_law_exponent(cfg.alphas, diffs);
    const double rmin = *std::min_element(ratios.begin(), ratios.end());
    const double rmax = *std::max_element(ratios.begin(), ratios.end());

    const Eigen::VectorXd a = to_vec(cfg.alphas);
    atomic_write_text(
        out_path(cfg, "scan.csv").string(),
        csv_table(csv_comments(cfg),
                  {"alpha", "max_abs_linear_minus_exact", "eq14_ratio",
                   "max_abs_delta_S_exact"},
                  {a, to_vec(diffs), to_vec(ratios), to_vec(exacts)}));
    write_svg(cfg, "scan.svg", "amplitude scan", "alpha", a,
              {{"max_abs_linear_minus_exact", to_vec(diffs)},
               {"eq14_ratio", to_vec(ratios)},
               {"max_abs_delta_S_exact", to_vec(exacts)}});

    json j = summary_base(cfg);
    j["L"] = cfg.L;
    j["lambda"] = cfg.lambda;
    j["J"] = cfg.J;
    j["boundary"] = cfg.boundary;
    j["site"] = cfg.site;
    j["k"] = cfg.k;
    j["T"] = cfg.T;
    j["t0"] = cfg.t0;
    j["t_max"] = cfg.t_max;
    j["dt"] = cfg.dt;
    j["alphas"] = cfg.alphas;
    j["max_abs_linear_minus_exact"] = diffs;
    j["eq14_ratio"] = ratios;
    j["max_abs_delta_S_exact"] = exacts;
    j["alpha_scaling_exponent"] = slope;
    j["eq14_ratio_variation"] = (rmax - rmin) / rmin;
    j["max_norm_drift"] = drift;
    write_summary(cfg, j);
}

void run_theorem1(const ScenarioConfig& cfg) {
    const Theorem1Setup s = theorem1_setup();
    const auto [dtp, dte] = cfg.dt_auto
                                ? theorem1_steps(cfg)
                                : std::pair<double, double>{cfg.dt, cfg.dt};
    TimeGrid grid_p{cfg.t0, cfg.t_max, dtp};
    grid_p.check();
    TimeGrid grid_e{cfg.t0, cfg.t_max, dte};
    grid_e.check();

    DriveSignal drive;
    drive.alpha = cfg.alphas.back();
    drive.T = cfg.T;

    Theorem1State st_p;
    st_p.branch = Theorem1State::Branch::product_eigenstate;
    st_p.i = 0;
    st_p.j = 0;
    const Theorem1Report rp =
        theorem1_check(s.product_model, st_p, s.product_H1, drive, cfg.alphas, grid_p);

    Theorem1State st_e;
    st_e.branch = Theorem1State::Branch::maximally_entangled;
    const Theorem1Report re = theorem1_check(s.entangled_model, st_e, s.entangled_H1,
                                             drive, cfg.alphas, grid_e);

    const Eigen::VectorXd a = to_vec(rp.alphas);
    atomic_write_text(
        out_path(cfg, "theorem1.csv").string(),
        csv_table(csv_comments(cfg),
                  {"alpha", "product_max_abs_delta_S_exact",
                   "entangled_max_abs_delta_S_exact"},
                  {a, to_vec(rp.max_abs_delta_S_exact),
                   to_vec(re.max_abs_delta_S_exact)}));
    write_svg(cfg, "theorem1.svg", "exact response vs amplitude", "alpha", a,
              {{"product_max_abs_delta_S_exact", to_vec(rp.max_abs_delta_S_exact)},
               {"entangled_max_abs_delta_S_exact", to_vec(re.max_abs_delta_S_exact)}});

    json j = summary_base(cfg);
    j["alphas"] = cfg.alphas;
    j["T"] = cfg.T;
    j["t0"] = cfg.t0;
    j["t_max"] = cfg.t_max;
    j["dt_product"] = dtp;
    j["dt_entangled"] = dte;
    j["product_ln_rhoA_diagonal"] = rp.ln_rhoA_diagonal;
    j["product_hollow_maxdiag"] = rp.delta_rhoA_hollow_maxdiag;
    j["product_max_abs_delta_S_linear"] = rp.max_abs_delta_S_linear;
    j["product_alpha_scaling_exponent"] = rp.alpha_scaling_exponent;
    j["product_max_abs_delta_S_exact"] = rp.max_abs_delta_S_exact;
    j["entangled_ln_rhoA_diagonal"] = re.ln_rhoA_diagonal;
    j["entangled_hollow_maxdiag"] = re.delta_rhoA_hollow_maxdiag;
    j["entangled_max_abs_delta_S_linear"] = re.max_abs_delta_S_linear;
    j["entangled_alpha_scaling_exponent"] = re.alpha_scaling_exponent;
    j["entangled_max_abs_delta_S_exact"] = re.max_abs_delta_S_exact;
    j["alpha_scaling_exponent"] = re.alpha_scaling_exponent;
    write_summary(cfg, j);
}

void run_canonical_fdt(const ScenarioConfig& cfg) {
    const CanonicalSetup s = canonical_setup();
    TimeGrid grid{cfg.t0, cfg.t_max, cfg.dt};
    grid.check();
    const TimeGrid kgrid{0.0, cfg.t_max - cfg.t0, cfg.dt};
    DriveSignal drive;
    drive.alpha = cfg.alpha;
    drive.T = cfg.T;

    const PureState psi0(hermitian_eig(s.H0).vectors.col(0));
    const DensityMatrix rho0 = projector(psi0);

    ReductionSpec red;
    red.kind = ReductionSpec::Kind::partition;
    red.part = {2, 2};
    red.keep = Keep::A;
    const DensityMatrix rhoA0 = reduced_density(rho0, red.part, red.keep);
    const EntropyObservable sA = entropy_observable(rhoA0);
    // modular Hamiltonian of A: rho_A = gibbs_state(H_A, beta) exactly
    const Operator H_A(sA.s_A.mat / cfg.beta, true);

    const HeatResponse hr =
        heat_response(H_A, cfg.beta, s.H1, s.H0, rho0, drive, grid);

    // independent route to delta Q: minus the first-order energy gain of A
    const Operator H_A_embedded = kron(H_A, identity_op(2));
    const ResponseSeries R_HA =
        kubo_series(H_A_embedded, s.H1, s.H0, rho0, kgrid, SeriesKind::kubo_obs);
    const ResponseSeries dE_A = delta_S_linear(R_HA, drive, grid);
    const Eigen::VectorXd dq = hr.delta_Q.real_values();
    const Eigen::VectorXd de = dE_A.real_values();
    const double de_scale = std::max(1.0, de.cwiseAbs().maxCoeff());
    const double dq_cross = (dq + de).cwiseAbs().maxCoeff() / de_scale;

    const ResponseSeries R_E = kubo_ee_series(rhoA0, s.H1, s.H0, rho0, kgrid, red);
    const Spectrum chi = susceptibility_ee(R_E, cfg.pad);
    const Spectrum f_hat = fourier(drive_series(drive, grid), cfg.pad);

    // the global state is pure, so exact propagation applies too
    const Trajectory traj = evolve_exact(s.H0, s.H1, drive, psi0, grid);
    const ResponseSeries dS_ex = delta_S_exact(traj, red);
    const ResponseSeries d_sA = delta_expectation_sA(traj, sA, red);

    // exact spectral-sum check of the thermal identity on two models
    const Eigen::VectorXd omegas2 = Eigen::VectorXd::LinSpaced(121, -3.0, 3.0);
    const FdtReport fdt2 = fdt_check(pauli_x(), pauli_x(), pauli_z(), cfg.beta, omegas2);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto random_hermitian = [&](Index d) {
        ComplexMatrix<double> A(d, d);
        for (Index r = 0; r < d; ++r)
            for (Index c = 0; c < d; ++c)
                A(r, c) = std::complex<double>(nd(rng), nd(rng));
        return Operator(((A + A.adjoint()) / 2.0).eval(), true);
    };
    const Operator H0_4 = random_hermitian(4);
    const Operator O_4 = random_hermitian(4);
    const Operator H1_4 = random_hermitian(4);
    const auto ev4 = hermitian_eig(H0_4).values;
    const double span4 = ev4.maxCoeff() - ev4.minCoeff();
    const Eigen::VectorXd omegas4 =
        Eigen::VectorXd::LinSpaced(241, -1.2 * span4, 1.2 * span4);
    const FdtReport fdt4 = fdt_check(O_4, H1_4, H0_4, cfg.beta, omegas4);

    const Eigen::VectorXd t = to_vec(grid.times());
    const Eigen::VectorXd f_col = drive_column(drive, grid);
    const Eigen::VectorXd lin_col = hr.delta_S_linear.real_values();
    const Eigen::VectorXd ex_col = dS_ex.real_values();
    const Eigen::VectorXd sA_col = d_sA.real_values();
    atomic_write_text(
        out_path(cfg, "timeseries.csv").string(),
        csv_table(csv_comments(cfg),
                  {"t", "F", "delta_S_exact", "delta_S_linear", "delta_expect_sA",
                   "delta_Q"},
                  {t, f_col, ex_col, lin_col, sA_col, dq}));
    write_svg(cfg, "timeseries.svg", "canonical heat response", "t", t,
              {{"delta_S_exact", ex_col},
               {"delta_S_linear", lin_col},
               {"delta_expect_sA", sA_col},
               {"delta_Q", dq},
               {"F", f_col}});

    const Eigen::VectorXd chi_re = chi.values.real();
    const Eigen::VectorXd chi_im = chi.values.imag();
    const Eigen::VectorXd f_abs = abs_vec(f_hat.values);
    atomic_write_text(out_path(cfg, "spectrum.csv").string(),
                      csv_table(csv_comments(cfg),
                                {"omega", "re_chi_E", "im_chi_E", "abs_F_hat"},
                                {chi.omegas, chi_re, chi_im, f_abs}));
    write_svg(cfg, "spectrum.svg", "thermal entanglement susceptibility", "omega",
              chi.omegas,
              {{"re_chi_E", chi_re}, {"im_chi_E", chi_im}, {"abs_F_hat", f_abs}});

    json j = summary_base(cfg);
    j["beta"] = cfg.beta;
    j["alpha"] = cfg.alpha;
    j["T"] = cfg.T;
    j["t0"] = cfg.t0;
    j["t_max"] = cfg.t_max;
    j["dt"] = cfg.dt;
    j["pad"] = cfg.pad;
    j["seed"] = cfg.seed;
    j["kernel_residual"] = hr.kernel_residual;
    j["dq_cross_residual"] = dq_cross;
    j["norm_drift"] = traj.norm_drift;
    j["max_abs_delta_Q"] = dq.cwiseAbs().maxCoeff();
    j["max_abs_delta_S_exact"] = ex_col.cwiseAbs().maxCoeff();
    j["max_abs_delta_S_linear"] = lin_col.cwiseAbs().maxCoeff();
    j["max_abs_linear_minus_exact"] = (ex_col - lin_col).cwiseAbs().maxCoeff();
    j["fdt_two_level_residual"] = fdt2.max_residual;
    j["fdt_two_level_bins"] = fdt2.bins_checked;
    j["fdt_two_level_excluded"] = static_cast<Index>(fdt2.excluded_bins.size());
    j["fdt_four_level_residual"] = fdt4.max_residual;
    j["fdt_four_level_bins"] = fdt4.bins_checked;
    j["fdt_four_level_excluded"] = static_cast<Index>(fdt4.excluded_bins.size());
    write_summary(cfg, j);
}

std::string effective_text_impl(const ScenarioConfig& cfg, bool include_out) {
    std::string s;
    auto put = [&s](const std::string& key, const std::string& value) {
        s += key;
        s += " = ";
        s += value;
        s += "\n";
    };
    auto put_list = [&](const std::string& key, const std::vector<double>& v) {
        std::string joined;
        for (size_t i = 0; i < v.size(); ++i) {
            if (i) joined += ", ";
            joined += format_g17(v[i]);
        }
        put(key, joined);
    };

    put("scenario", cfg.scenario);
    if (cfg.scenario == "xx-reproduce" || cfg.scenario == "alpha-scan") {
        put("L", std::to_string(cfg.L));
        put("lambda", format_g17(cfg.lambda));
        put("J", format_g17(cfg.J));
        put("boundary", cfg.boundary);
        put("site", std::to_string(cfg.site));
        put("k", std::to_string(cfg.k));
        if (cfg.scenario == "xx-reproduce") put("alpha", format_g17(cfg.alpha));
        else put_list("alphas", cfg.alphas);
    } else if (cfg.scenario == "theorem1") {
        put_list("alphas", cfg.alphas);
    } else {
        put("beta", format_g17(cfg.beta));
        put("alpha", format_g17(cfg.alpha));
    }
    put("T", format_g17(cfg.T));
    put("t0", format_g17(cfg.t0));
    put("t_max", format_g17(cfg.t_max));
    if (cfg.scenario == "theorem1" && cfg.dt_auto) {
        put("dt", "auto");
        const auto [dtp, dte] = theorem1_steps(cfg);
        s += "# dt_product = " + format_g17(dtp) + "\n";
        s += "# dt_entangled = " + format_g17(dte) + "\n";
    } else {
        put("dt", format_g17(cfg.dt));
    }
    if (cfg.scenario == "xx-reproduce" || cfg.scenario == "canonical-fdt")
        put("pad", std::to_string(cfg.pad));
    if (cfg.scenario == "xx-reproduce") put("kk_band", format_g17(cfg.kk_band));
    put("seed", std::to_string(cfg.seed));
    if (include_out) put("out", cfg.out_dir);
    return s;
}

}  // namespace

std::string ScenarioConfig::effective_text() const {
    return effective_text_impl(*this, true);
}

uint64_t ScenarioConfig::hash() const {
    return fnv1a64(effective_text_impl(*this, false));
}

std::string ScenarioConfig::hash_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash()));
    return buf;
}

ScenarioConfig validate_config_text(const std::string& text) {
    const std::vector<KV> kvs = parse_kv(text);

    std::map<std::string, KV> by_key;
    for (const auto& kv : kvs) {
        if (by_key.count(kv.key))
            throw config_error("duplicate key '" + kv.key + "' (line " +
                               std::to_string(kv.line) + ")");
        by_key.emplace(kv.key, kv);
    }
    if (!by_key.count("scenario"))
        throw config_error("missing required key 'scenario'");

    ScenarioConfig cfg;
    cfg.scenario = by_key.at("scenario").value;
    if (!kScenarios.count(cfg.scenario))
        throw config_error(
            "unknown scenario '" + cfg.scenario +
            "'; expected xx-reproduce, alpha-scan, theorem1 or canonical-fdt");

    const std::set<std::string> allowed = allowed_keys(cfg.scenario);
    for (const auto& kv : kvs) {
        if (allowed.count(kv.key)) continue;
        if (kAllKeys.count(kv.key))
            throw config_error("key '" + kv.key + "' is not used by scenario '" +
                               cfg.scenario + "' (line " + std::to_string(kv.line) +
                               ")");
        throw config_error("unknown config key '" + kv.key + "' (line " +
                           std::to_string(kv.line) + ")");
    }
    for (const auto& req : required_keys(cfg.scenario))
        if (!by_key.count(req))
            throw config_error("missing required key '" + req + "' for scenario '" +
                               cfg.scenario + "'");

    // scenario-specific defaults before applying file values
    cfg.T = 0.5 * kPi;
    if (cfg.scenario == "theorem1") {
        cfg.t_max = 20.0;
        cfg.alphas = {0.01, 0.02, 0.04, 0.08};
    }
    if (cfg.scenario == "canonical-fdt") cfg.alpha = 0.05;

    for (const auto& kv : kvs) {
        const std::string& key = kv.key;
        if (key == "scenario") continue;
        else if (key == "out") cfg.out_dir = kv.value;
        else if (key == "seed") cfg.seed = parse_u64(kv);
        else if (key == "L") cfg.L = parse_index(kv);
        else if (key == "lambda") cfg.lambda = parse_double(kv);
        else if (key == "J") cfg.J = parse_double(kv);
        else if (key == "boundary") cfg.boundary = kv.value;
        else if (key == "site") cfg.site = parse_index(kv);
        else if (key == "k") cfg.k = parse_index(kv);
        else if (key == "alpha") cfg.alpha = parse_double(kv);
        else if (key == "alphas") cfg.alphas = parse_double_list(kv);
        else if (key == "T") cfg.T = parse_double(kv);
        else if (key == "t0") cfg.t0 = parse_double(kv);
        else if (key == "t_max") cfg.t_max = parse_double(kv);
        else if (key == "dt") {
            if (kv.value == "auto") cfg.dt_auto = true;
            else {
                cfg.dt = parse_double(kv);
                cfg.dt_auto = false;
            }
        } else if (key == "pad") cfg.pad = parse_index(kv);
        else if (key == "kk_band") cfg.kk_band = parse_double(kv);
        else if (key == "beta") cfg.beta = parse_double(kv);
    }

    if (cfg.out_dir.empty()) throw config_error("key 'out': empty output directory");
    if (!(cfg.T > 0.0)) throw config_error("key 'T': drive period must be positive");
    if (!(cfg.t_max > cfg.t0))
        throw config_error("key 't_max': need t_max > t0, got [" + format_g17(cfg.t0) +
                           ", " + format_g17(cfg.t_max) + "]");
    if (!cfg.dt_auto && !(cfg.dt > 0.0))
        throw config_error("key 'dt': step must be positive");

    const bool is_xx =
        cfg.scenario == "xx-reproduce" || cfg.scenario == "alpha-scan";
    if (is_xx) {
        if (cfg.L < 2 || cfg.L > 2000)
            throw config_error("key 'L': chain length must be in [2, 2000]");
        if (cfg.J == 0.0) throw config_error("key 'J': coupling must be nonzero");
        if (cfg.site < 1 || cfg.site > cfg.L)
            throw config_error("key 'site': must be in [1, L]");
        if (cfg.k < 1 || cfg.k > cfg.L)
            throw config_error("key 'k': wave index must be in [1, L]");
        to_boundary(cfg.boundary);
    }
    if (cfg.scenario == "xx-reproduce" || cfg.scenario == "canonical-fdt") {
        if (!(cfg.alpha > 0.0))
            throw config_error("key 'alpha': amplitude must be positive");
        if (cfg.pad < 1 || cfg.pad > 64)
            throw config_error("key 'pad': zero-pad factor must be in [1, 64]");
    }
    if (cfg.scenario == "xx-reproduce" && !(cfg.kk_band > 0.0))
        throw config_error("key 'kk_band': band must be positive");
    if (cfg.scenario == "canonical-fdt" &&
        (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)))
        throw config_error("key 'beta': inverse temperature must be positive");

    if (cfg.scenario == "alpha-scan" || cfg.scenario == "theorem1") {
        const size_t min_count = cfg.scenario == "theorem1" ? 4 : 2;
        std::sort(cfg.alphas.begin(), cfg.alphas.end());
        if (cfg.alphas.size() < min_count)
            throw config_error("key 'alphas': need at least " +
                               std::to_string(min_count) + " amplitudes");
        for (double a : cfg.alphas)
            if (!(a > 0.0))
                throw config_error("key 'alphas': amplitudes must be positive");
        for (size_t i = 1; i < cfg.alphas.size(); ++i)
            if (cfg.alphas[i] == cfg.alphas[i - 1])
                throw config_error("key 'alphas': duplicate amplitude " +
                                   format_g17(cfg.alphas[i]));
    }

    if (cfg.dt_auto && cfg.scenario != "theorem1") {
        double amax = cfg.alpha;
        if (cfg.scenario == "alpha-scan") amax = cfg.alphas.back();
        double bound = 0.0;
        if (is_xx) bound = xx_norm_bound(cfg, amax);
        else {
            const CanonicalSetup c = canonical_setup();
            bound = spectral_norm(c.H0) + amax * spectral_norm(c.H1);
        }
        cfg.dt = resolve_step(cfg.t0, cfg.t_max, bound);
    } else if (!cfg.dt_auto) {
        check_divides(cfg.t0, cfg.t_max, cfg.dt);
    }
    return cfg;
}

ScenarioConfig validate_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return validate_config_text(ss.str());
}

void run_scenario(const ScenarioConfig& cfg) {
    atomic_write_text(out_path(cfg, "effective_config.txt").string(),
                      "# config_hash: " + cfg.hash_hex() + "\n" +
                          cfg.effective_text());
    if (cfg.scenario == "xx-reproduce") run_xx_reproduce(cfg);
    else if (cfg.scenario == "alpha-scan") run_alpha_scan(cfg);
    else if (cfg.scenario == "theorem1") run_theorem1(cfg);
    else if (cfg.scenario == "canonical-fdt") run_canonical_fdt(cfg);
    else throw config_error("unknown scenario '" + cfg.scenario + "'");
}

}  // namespace eer
