// Command-line driver: parameter scans and single runs of the driven
// dissipative Dicke model, CSV emission with full run-configuration headers,
// and companion gnuplot scripts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dicke/floquet.hpp"
#include "dicke/meanfield.hpp"
#include "dicke/semiclassical.hpp"

namespace fs = std::filesystem;
using dicke::model::ModelParams;
using dicke::numerics::Complex;

namespace {

constexpr const char* kVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// run configuration, serialized into every output header

struct RunConfig {
    std::string command;
    ModelParams params;
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<std::pair<std::string, std::string>> extra;

    void add(const std::string& key, const std::string& value) { extra.emplace_back(key, value); }
    void add(const std::string& key, double value) { extra.emplace_back(key, num(value)); }
    void add(const std::string& key, int value) { extra.emplace_back(key, std::to_string(value)); }

    void write_header(std::ostream& os) const {
        os << "# tool_version = " << kVersion << "\n";
        os << "# command = " << command << "\n";
        os << "# delta_c = " << num(params.delta_c) << "\n";
        os << "# kappa = " << num(params.kappa) << "\n";
        os << "# delta = " << num(params.delta) << "\n";
        os << "# g0 = " << num(params.g0) << "\n";
        os << "# g1 = " << num(params.g1) << "\n";
        os << "# omega = " << num(params.omega) << "\n";
        os << "# n_atoms = " << params.n_atoms << "\n";
        os << "# seed = " << seed << "\n";
        os << "# threads = " << threads << "\n";
        for (const auto& [k, v] : extra) os << "# " << k << " = " << v << "\n";
    }
};

std::ofstream open_csv(const fs::path& dir, const std::string& name, const RunConfig& rc) {
    fs::create_directories(dir);
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot open output file " + (dir / name).string());
    rc.write_header(f);
    return f;
}

void write_script(const fs::path& dir, const std::string& name, const std::string& body) {
    std::ofstream f(dir / name);
    f << "# gnuplot script, run from this directory\n" << body;
}

// paper-style baseline: delta_c = kappa = 1, Delta = 0.1, g0 = 0.5 g_c
ModelParams baseline_params() {
    ModelParams p = ModelParams::create(1.0, 1.0, 0.1, 0.0, 0.0, 0.0, 100);
    p.g0 = 0.5 * dicke::model::critical_coupling(p);
    p.g1 = 0.2 * p.g0;
    p.omega = 2.0 * dicke::model::resonance_frequency(p);
    return p;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return v;
}

double snap_dt(double target, double interval) {
    // largest dt <= target that divides `interval` exactly
    const long k = std::max(1L, long(std::ceil(interval / target)));
    return interval / double(k);
}

// ---------------------------------------------------------------------------
// shared option plumbing

struct CommonOpts {
    std::string config_file;
    std::string out_dir = "out";
    std::string preset;
    std::uint64_t seed = 1;
    int threads = int(std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, CommonOpts& opt) {
    cmd->add_option("--config", opt.config_file, "model parameter file (key = value lines)");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--preset", opt.preset, "named parameter preset");
    cmd->add_option("--seed", opt.seed, "master RNG seed");
    cmd->add_option("--threads", opt.threads, "worker threads (1 = bit-stable output)")
        ->check(CLI::PositiveNumber);
}

ModelParams load_params(const CommonOpts& opt) {
    if (opt.config_file.empty()) return baseline_params();
    return dicke::model::parse_params_file(opt.config_file);
}

void warn_regime(const ModelParams& p) {
    for (const auto& w : dicke::model::regime_warnings(p)) std::cerr << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------
// phase-diagram

int cmd_phase_diagram(const CommonOpts& opt, int n_g1, int n_omega, double g1_lo, double g1_hi,
                      double w_lo, double w_hi, double t_eval) {
    ModelParams p = load_params(opt);
    warn_regime(p);
    const auto g1_grid = linspace(g1_lo, g1_hi, n_g1);
    const auto w_grid = linspace(w_lo, w_hi, n_omega);
    const double wres = dicke::model::resonance_frequency(p);

    RunConfig rc;
    rc.command = "phase-diagram";
    rc.params = p;
    rc.seed = opt.seed;
    rc.threads = opt.threads;
    rc.add("g1_over_g0_range", num(g1_lo) + ".." + num(g1_hi) + " x" + std::to_string(n_g1));
    rc.add("omega_over_2wres_range", num(w_lo) + ".." + num(w_hi) + " x" + std::to_string(n_omega));
    rc.add("t_eval", t_eval);

    const auto cells = dicke::meanfield::phase_diagram(p, g1_grid, w_grid, t_eval, opt.threads);

    // linear-stability rates on the same grid
    std::vector<double> gamma_max(cells.size()), nu_fl(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        ModelParams ps = p;
        ps.g1 = cells[i].g1_over_g0 * p.g0;
        ps.omega = cells[i].omega_over_2wres * 2.0 * wres;
        const auto st = dicke::meanfield::stability_exponents(
            dicke::meanfield::stability_harmonics(ps), ps.omega, 3);
        gamma_max[i] = st.gamma_max;
        nu_fl[i] = st.nu_fl;
    }

    auto f = open_csv(opt.out_dir, "phase_diagram.csv", rc);
    f << "g1_over_g0,omega_over_2wres,x2_tav_norm,gamma_max,nu_fl,classification,ok\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        f << num(c.g1_over_g0) << ',' << num(c.omega_over_2wres) << ',' << num(c.x2_tav_norm)
          << ',' << num(gamma_max[i]) << ',' << num(nu_fl[i]) << ','
          << dicke::meanfield::to_string(c.classification) << ',' << (c.ok ? 1 : 0) << "\n";
    }

    // gamma_max = 0 contour: sign changes along g1 at fixed omega
    auto fc = open_csv(opt.out_dir, "threshold_contour.csv", rc);
    fc << "omega_over_2wres,g1_over_g0\n";
    for (int j = 0; j < n_omega; ++j) {
        for (int i = 0; i + 1 < n_g1; ++i) {
            const double a = gamma_max[std::size_t(i) * n_omega + j];
            const double b = gamma_max[std::size_t(i + 1) * n_omega + j];
            if ((a <= 0.0) == (b <= 0.0)) continue;
            const double frac = a / (a - b);
            fc << num(w_grid[j]) << ',' << num(g1_grid[i] + frac * (g1_grid[i + 1] - g1_grid[i]))
               << "\n";
        }
    }

    write_script(opt.out_dir, "phase_diagram.gp",
                 "set datafile separator ','\n"
                 "set xlabel 'omega/(2 omega_res)'\nset ylabel 'g1/g0'\n"
                 "set view map\n"
                 "splot 'phase_diagram.csv' using 2:1:3 with points pt 5 ps 1.6 palette notitle, \\\n"
                 "      'threshold_contour.csv' using 2:1:(0) with points pt 7 ps 0.3 lc 'black' notitle\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// gap-scan

int cmd_gap_scan(const CommonOpts& opt, std::vector<int> n_list, std::vector<int> m_cut_list,
                 double g1_frac, double omega_frac) {
    if (n_list.empty()) n_list = {10, 20, 30, 40};
    if (m_cut_list.empty()) m_cut_list = {3, 4};
    for (int n : n_list)
        if (n < 1) {
            std::cerr << "error: atom numbers must be positive\n";
            return kExitConfig;
        }
    std::sort(n_list.begin(), n_list.end());

    ModelParams p = load_params(opt);
    p.g1 = g1_frac * p.g0;
    p.omega = omega_frac * 2.0 * dicke::model::resonance_frequency(p);
    warn_regime(p);

    // mean-field reference rate at the same drive
    const auto st = dicke::meanfield::stability_exponents(
        dicke::meanfield::stability_harmonics(p), p.omega, 3);
    const double gamma_fl = -st.gamma_max;

    RunConfig rc;
    rc.command = "gap-scan";
    rc.params = p;
    rc.seed = opt.seed;
    rc.threads = opt.threads;
    rc.add("g1_over_g0", g1_frac);
    rc.add("gamma_fl_meanfield", gamma_fl);

    auto f = open_csv(opt.out_dir, "gap_scan.csv", rc);
    f << "n_atoms,m_cut,gamma,omega_used,residual,widened_window\n";
    for (int m_cut : m_cut_list) {
        std::optional<Complex> hint;
        for (int n : n_list) {
            ModelParams pn = p;
            pn.n_atoms = n;
            const auto g = dicke::floquet::dissipative_gap(pn, {n}, m_cut, hint);
            hint = Complex(-g.gamma, g.im_lambda - 0.5 * g.omega_used);
            f << n << ',' << m_cut << ',' << num(g.gamma) << ',' << num(g.omega_used) << ','
              << num(g.residual) << ',' << (g.widened_window ? 1 : 0) << "\n";
            std::cerr << "gap N=" << n << " m_cut=" << m_cut << " gamma=" << num(g.gamma) << "\n";
        }
    }

    write_script(opt.out_dir, "gap_scan.gp",
                 "set datafile separator ','\n"
                 "set xlabel 'N'\nset ylabel 'gamma / kappa'\nset logscale y\n"
                 "plot 'gap_scan.csv' using 1:($2==3?$3:1/0) with linespoints title 'M_cut=3', \\\n"
                 "     'gap_scan.csv' using 1:($2==4?$3:1/0) with linespoints title 'M_cut=4'\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// dynamics

struct MethodSeries {
    std::vector<double> t;
    std::vector<double> x2;
    std::vector<double> x2_tav;
};

MethodSeries run_quantum(const ModelParams& p, double t_end, double t_rec) {
    const auto h = dicke::liouville::build_atom_only_harmonics(p, {p.n_atoms});
    const double dt = snap_dt(0.02 * std::min({1.0 / p.kappa, 1.0 / p.delta,
                                               2.0 * M_PI / p.omega}),
                              t_rec);
    const int stride = int(std::lround(t_rec / dt));
    const int d = p.n_atoms + 1;
    const auto obs = dicke::hilbert::atom_observables({p.n_atoms});
    dicke::numerics::DenseMatrix rho0 = dicke::numerics::DenseMatrix::Zero(d, d);
    rho0(0, 0) = 1.0;  // all atoms in the ground state
    const auto res = dicke::liouville::evolve_density(h, {rho0, 0.0}, t_end, dt,
                                                      obs.x * obs.x, stride);
    MethodSeries out;
    for (const auto& r : res.records) {
        out.t.push_back(r.t);
        out.x2.push_back(r.x2);
        out.x2_tav.push_back(r.x2_tav);
    }
    return out;
}

MethodSeries run_meanfield(const ModelParams& p, double t_end, double t_rec) {
    const double dt = snap_dt(0.02 * std::min(1.0 / p.delta, 2.0 * M_PI / p.omega), t_rec);
    const int stride = int(std::lround(t_rec / dt));
    const auto traj = dicke::meanfield::integrate_meanfield(
        dicke::meanfield::standard_seed(p.n_atoms), p, t_end, dt, stride);
    MethodSeries out;
    for (const auto& r : traj.records) {
        out.t.push_back(r.t);
        out.x2.push_back(r.x2);
        out.x2_tav.push_back(r.x2_tav);
    }
    return out;
}

MethodSeries run_semiclassical(const ModelParams& p, double t_end, double t_rec, int n_traj,
                               std::uint64_t seed, int threads) {
    dicke::semiclassical::EnsembleConfig cfg;
    cfg.dt = snap_dt(1e-3 / p.kappa, t_rec);
    cfg.record_stride = int(std::lround(t_rec / cfg.dt));
    cfg.n_traj = n_traj;
    cfg.seed = seed;
    cfg.t_end = t_end;
    cfg.threads = threads;
    const auto res = dicke::semiclassical::run_ensemble(p, cfg);
    return {res.t, res.x2_mean, res.x2_tav};
}

int cmd_dynamics(const CommonOpts& opt, const std::string& methods_csv, double t_end,
                 int n_traj, std::vector<double> omega_fracs, double g1_frac_override) {
    ModelParams p = load_params(opt);
    if (g1_frac_override >= 0.0) p.g1 = g1_frac_override * p.g0;
    warn_regime(p);

    std::vector<std::string> methods;
    {
        std::stringstream ss(methods_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok != "quantum" && tok != "meanfield" && tok != "semiclassical") {
                std::cerr << "error: unknown method '" << tok << "'\n";
                return kExitConfig;
            }
            methods.push_back(tok);
        }
    }
    if (methods.empty()) {
        std::cerr << "error: no methods selected\n";
        return kExitConfig;
    }

    const double wres = dicke::model::resonance_frequency(p);
    const bool scan = omega_fracs.size() > 1;
    if (omega_fracs.empty()) omega_fracs = {p.omega / (2.0 * wres)};

    RunConfig rc;
    rc.command = "dynamics";
    rc.params = p;
    rc.seed = opt.seed;
    rc.threads = opt.threads;
    rc.add("methods", methods_csv);
    rc.add("t_end", t_end);
    rc.add("n_traj", n_traj);

    auto run_method = [&](const std::string& name, const ModelParams& pm,
                          double t_rec) -> MethodSeries {
        if (name == "quantum") return run_quantum(pm, t_end, t_rec);
        if (name == "meanfield") return run_meanfield(pm, t_end, t_rec);
        return run_semiclassical(pm, t_end, t_rec, n_traj, opt.seed, opt.threads);
    };

    if (!scan) {
        ModelParams pm = p;
        pm.omega = omega_fracs[0] * 2.0 * wres;
        const double t_rec = 0.5 * M_PI / pm.omega;  // quarter drive period
        std::vector<MethodSeries> series;
        for (const auto& m : methods) {
            std::cerr << "dynamics: running " << m << "\n";
            series.push_back(run_method(m, pm, t_rec));
        }
        auto f = open_csv(opt.out_dir, "dynamics.csv", rc);
        f << "t";
        for (const auto& m : methods) f << ",x2_" << m << ",x2_tav_" << m;
        f << "\n";
        std::size_t rows = series[0].t.size();
        for (const auto& s : series) rows = std::min(rows, s.t.size());
        for (std::size_t i = 0; i < rows; ++i) {
            f << num(series[0].t[i]);
            for (const auto& s : series) f << ',' << num(s.x2[i]) << ',' << num(s.x2_tav[i]);
            f << "\n";
        }
        write_script(opt.out_dir, "dynamics.gp",
                     "set datafile separator ','\n"
                     "set xlabel 'kappa t'\nset ylabel '<X^2>_tav / N^2'\nset key left\n"
                     "n2 = " + num(double(p.n_atoms) * p.n_atoms) + "\n"
                     "plot for [i=3:*:2] 'dynamics.csv' using 1:(column(i)/n2) "
                     "with lines title columnheader(i)\n");
        return kExitOk;
    }

    // omega scan: long-format time series plus a final-plateau summary
    auto f = open_csv(opt.out_dir, "dynamics_scan.csv", rc);
    f << "omega_over_2wres,method,t,x2,x2_tav\n";
    auto fsum = open_csv(opt.out_dir, "dynamics_summary.csv", rc);
    fsum << "omega_over_2wres,method,x2_tav_final\n";
    for (double wf : omega_fracs) {
        ModelParams pm = p;
        pm.omega = wf * 2.0 * wres;
        const double t_rec = 0.5 * M_PI / pm.omega;
        for (const auto& m : methods) {
            std::cerr << "dynamics: omega_frac=" << num(wf) << " method=" << m << "\n";
            const auto s = run_method(m, pm, t_rec);
            for (std::size_t i = 0; i < s.t.size(); ++i)
                f << num(wf) << ',' << m << ',' << num(s.t[i]) << ',' << num(s.x2[i]) << ','
                  << num(s.x2_tav[i]) << "\n";
            fsum << num(wf) << ',' << m << ',' << num(s.x2_tav.back()) << "\n";
        }
    }
    write_script(opt.out_dir, "dynamics_scan.gp",
                 "set datafile separator ','\n"
                 "set xlabel 'omega/(2 omega_res)'\nset ylabel '<X^2>_tav / N^2'\n"
                 "n2 = " + num(double(p.n_atoms) * p.n_atoms) + "\n"
                 "plot 'dynamics_summary.csv' using 1:($3/n2) with linespoints notitle\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// spectrum

int cmd_spectrum(const CommonOpts& opt, std::vector<double> omega_fracs, double t0, double t_max,
                 int n_traj, int n_nu, double g1_frac_override) {
    ModelParams p = load_params(opt);
    if (g1_frac_override >= 0.0) p.g1 = g1_frac_override * p.g0;
    warn_regime(p);
    const double wres = dicke::model::resonance_frequency(p);
    if (omega_fracs.empty()) omega_fracs = {1.0};

    RunConfig rc;
    rc.command = "spectrum";
    rc.params = p;
    rc.seed = opt.seed;
    rc.threads = opt.threads;
    rc.add("t0", t0);
    rc.add("t_max", t_max);
    rc.add("n_traj", n_traj);

    auto f = open_csv(opt.out_dir, "spectrum.csv", rc);
    f << "omega_over_2wres,nu,nu_over_omega,abs_s1,re_s1,im_s1\n";
    auto fl = open_csv(opt.out_dir, "nu_fl.csv", rc);
    fl << "omega_over_2wres,nu_fl,nu_fl_over_omega\n";

    for (double wf : omega_fracs) {
        ModelParams pm = p;
        pm.omega = wf * 2.0 * wres;
        std::cerr << "spectrum: omega_frac=" << num(wf) << "\n";

        dicke::semiclassical::EnsembleConfig cfg;
        cfg.dt = 1e-3 / p.kappa;
        cfg.record_stride = 20;
        cfg.n_traj = n_traj;
        cfg.seed = opt.seed;
        cfg.threads = opt.threads;
        const auto c1 = dicke::semiclassical::two_time_correlation(pm, cfg, t0, t_max);

        std::vector<double> nu_grid(n_nu);
        for (int i = 0; i < n_nu; ++i)
            nu_grid[i] = pm.omega * (0.05 + 1.5 * double(i) / double(n_nu - 1));
        const auto s = dicke::semiclassical::spectrum_s1(c1, t_max, nu_grid);
        for (int i = 0; i < n_nu; ++i)
            f << num(wf) << ',' << num(s.nu[i]) << ',' << num(s.nu[i] / pm.omega) << ','
              << num(s.abs_s1[i]) << ',' << num(s.re_s1[i]) << ',' << num(s.im_s1[i]) << "\n";

        const auto st = dicke::meanfield::stability_exponents(
            dicke::meanfield::stability_harmonics(pm), pm.omega, 3);
        fl << num(wf) << ',' << num(st.nu_fl) << ',' << num(st.nu_fl / pm.omega) << "\n";
    }

    write_script(opt.out_dir, "spectrum.gp",
                 "set datafile separator ','\n"
                 "set xlabel 'omega/(2 omega_res)'\nset ylabel 'nu/omega'\nset view map\n"
                 "splot 'spectrum.csv' using 1:3:(log10($4)) with points pt 5 palette notitle, \\\n"
                 "      'nu_fl.csv' using 1:3:(0) with points pt 7 lc 'red' notitle\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// threshold

int cmd_threshold(const CommonOpts& opt, double w_lo, double w_hi, int n_omega) {
    ModelParams p = load_params(opt);
    const auto d = dicke::model::derived_scalars(p);

    RunConfig rc;
    rc.command = "threshold";
    rc.params = p;
    rc.seed = opt.seed;
    rc.threads = opt.threads;

    auto fs_ = open_csv(opt.out_dir, "scalars.csv", rc);
    fs_ << "name,value\n";
    fs_ << "g_c," << num(d.g_c) << "\n";
    fs_ << "omega_res," << num(d.omega_res) << "\n";
    fs_ << "gamma0," << num(d.gamma0) << "\n";
    fs_ << "g1_c," << num(d.g1_c) << "\n";
    fs_ << "g1_c_over_g0," << num(d.g1_c / p.g0) << "\n";

    auto f = open_csv(opt.out_dir, "threshold.csv", rc);
    f << "omega_over_2wres,g1_threshold,g1_threshold_over_g0\n";
    for (double wf : linspace(w_lo, w_hi, n_omega)) {
        const double g1t = dicke::model::detuned_threshold(p, wf * 2.0 * d.omega_res);
        f << num(wf) << ',' << num(g1t) << ',' << num(g1t / p.g0) << "\n";
    }

    write_script(opt.out_dir, "threshold.gp",
                 "set datafile separator ','\n"
                 "set xlabel 'omega/(2 omega_res)'\nset ylabel 'g1 threshold / g0'\n"
                 "plot 'threshold.csv' using 1:3 with lines notitle\n");
    std::cout << "g_c = " << num(d.g_c) << "\nomega_res = " << num(d.omega_res)
              << "\ngamma0 = " << num(d.gamma0) << "\ng1_c = " << num(d.g1_c) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// validate

struct CheckResult {
    std::string name;
    bool pass;
    double deviation;
    double bound;
};

int cmd_validate(const CommonOpts& opt, bool fast) {
    ModelParams p = load_params(opt);
    std::vector<CheckResult> checks;
    auto record = [&](const std::string& name, double dev, double bound) {
        checks.push_back({name, dev < bound, dev, bound});
    };

    // elimination coefficients: integrated vs expanded past the transient
    {
        ModelParams pe = p;
        pe.g1 = 0.2 * pe.g0;
        pe.omega = 2.0 * dicke::model::resonance_frequency(pe);
        const double bound = 3.0 *
                             (pe.delta * pe.delta + pe.omega * pe.omega) /
                             (pe.delta_c * pe.delta_c + pe.kappa * pe.kappa);
        double worst = 0.0;
        for (double frac : {0.0, 0.25, 0.5, 0.75}) {
            const double t = 10.0 / pe.kappa + frac * 2.0 * M_PI / pe.omega;
            const auto ex = dicke::liouville::c_pm_exact(pe, t, 0.005 / pe.kappa);
            const auto ap = dicke::liouville::c_pm_expanded(pe, t);
            worst = std::max(worst, std::abs(ex.c_plus - ap.c_plus) / std::abs(ex.c_plus));
            worst = std::max(worst, std::abs(ex.c_minus - ap.c_minus) / std::abs(ex.c_minus));
        }
        record("elimination_expanded_vs_integrated", worst, bound);
    }

    // Mathieu exponent vs extended-matrix stability threshold
    {
        ModelParams pm = p;
        pm.omega = 2.0 * dicke::model::resonance_frequency(pm);
        const double g1c = dicke::model::threshold_g1c(pm);
        double lo = 0.5 * g1c, hi = 1.5 * g1c;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            ModelParams pt = pm;
            pt.g1 = mid;
            if (dicke::meanfield::stability_exponents(dicke::meanfield::stability_harmonics(pt),
                                                      pt.omega, 3)
                    .gamma_max > 0.0)
                hi = mid;
            else
                lo = mid;
        }
        record("mathieu_vs_floquet_threshold", std::abs(0.5 * (lo + hi) - g1c) / g1c, 0.02);

        ModelParams pt = pm;
        pt.g1 = 2.0 * g1c;
        const double mathieu =
            dicke::meanfield::mathieu_exponents(dicke::meanfield::mathieu_params(pt, pt.omega))
                .first;
        const double fl = dicke::meanfield::stability_exponents(
                              dicke::meanfield::stability_harmonics(pt), pt.omega, 3)
                              .gamma_max;
        record("mathieu_vs_floquet_exponent", std::abs(mathieu - fl) / std::abs(fl), 0.10);
    }

    // atom-only vs full-model Floquet modes near i omega / 2 (small system)
    {
        const int n = 6, n_phot = 4, m_cut = 3;
        ModelParams pq = p;
        pq.n_atoms = n;
        pq.g1 = 0.2 * pq.g0;
        pq.omega = 2.0 * dicke::model::resonance_frequency(pq);
        const auto h_at = dicke::liouville::build_atom_only_harmonics(pq, {n});
        const auto h_full = dicke::liouville::build_full_harmonics(pq, {n}, {n_phot});
        const auto fm_at = dicke::floquet::assemble(h_at, m_cut);
        const auto fm_full = dicke::floquet::assemble(h_full, m_cut);
        const Complex target(0.0, 0.5 * pq.omega);
        const int k = 10;
        const auto at = dicke::floquet::eigs_near(fm_at, target, k);
        const auto full = dicke::floquet::eigs_near(fm_full, target, k);
        double worst = 0.0;
        for (int i = 0; i < k; ++i) {
            double best = 1e300;
            for (int j = 0; j < k; ++j) {
                const double dist =
                    std::abs(Complex(at[i].lambda.real() - full[j].lambda.real(),
                                     dicke::floquet::circle_distance(at[i].lambda.imag(),
                                                                     full[j].lambda.imag(),
                                                                     pq.omega)));
                best = std::min(best, dist);
            }
            const double scale = std::max(0.05 * std::abs(at[i].lambda), 1e-3 * pq.kappa);
            worst = std::max(worst, best / scale);
        }
        record("atom_only_vs_full_floquet_modes", worst, 1.0);
    }

    // mean-field vs semiclassical stationary plateau
    if (!fast) {
        ModelParams pd = p;
        pd.n_atoms = 100;
        pd.g1 = 0.2 * pd.g0;
        pd.omega = 2.0 * dicke::model::resonance_frequency(pd);
        const double t_end = 1000.0 / pd.kappa;
        const double t_rec = 0.5 * M_PI / pd.omega;
        const auto mf = run_meanfield(pd, t_end, t_rec);
        const auto sc = run_semiclassical(pd, t_end, t_rec, 400, opt.seed, opt.threads);
        record("meanfield_vs_semiclassical_plateau",
               std::abs(mf.x2_tav.back() - sc.x2_tav.back()) / sc.x2_tav.back(), 0.12);
    }

    bool all_pass = true;
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        std::printf("%-42s %s  deviation = %.3e  (bound %.3e)\n", c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.deviation, c.bound);
    }
    return all_pass ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------------------
// presets: pin figure parameters; explicit flags still win because presets are
// applied before CLI11 writes parsed values

struct PresetValues {
    std::string command;
    std::vector<std::pair<std::string, std::string>> args;
};

std::optional<PresetValues> lookup_preset(const std::string& name) {
    if (name.empty()) return std::nullopt;
    if (name == "fig1")
        return PresetValues{"phase-diagram",
                            {{"--n-g1", "61"}, {"--n-omega", "61"}, {"--t-eval", "10000"}}};
    if (name == "fig2a")
        return PresetValues{"gap-scan",
                            {{"--g1-frac", "0.05"}, {"--n-list", "10,20,30,40,50,60"},
                             {"--m-cut", "2,3,4"}}};
    if (name == "fig2b")
        return PresetValues{"gap-scan",
                            {{"--g1-frac", "0.2"}, {"--n-list", "10,20,30,40"},
                             {"--m-cut", "3,4"}}};
    if (name == "fig_s1c")
        return PresetValues{"dynamics",
                            {{"--methods", "quantum,meanfield,semiclassical"},
                             {"--t-end", "1500"}, {"--n-traj", "1000"}}};
    if (name == "fig3a" || name == "fig3b")
        return PresetValues{"dynamics",
                            {{"--methods", "meanfield,semiclassical"}, {"--t-end", "2000"},
                             {"--n-traj", "1000"}, {"--omega-scan", "0.25,1.25,31"},
                             {"--g1-frac-override", "0.75"}}};
    if (name == "fig3c")
        return PresetValues{"spectrum",
                            {{"--t0", "5000"}, {"--t-max", "5000"}, {"--n-traj", "1000"},
                             {"--omega-scan", "0.25,1.25,31"}, {"--g1-frac-override", "0.75"}}};
    return std::nullopt;
}

std::vector<double> parse_scan(const std::string& spec) {
    // "lo,hi,n" inclusive linear grid, or a single value
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) parts.push_back(std::stod(tok));
    if (parts.size() == 1) return parts;
    if (parts.size() != 3 || parts[2] < 1) throw CLI::ValidationError("--omega-scan expects lo,hi,n");
    return linspace(parts[0], parts[1], int(parts[2]));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven dissipative Dicke model: scans, spectra, validation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOpts opt;

    // phase-diagram
    auto* pd = app.add_subcommand("phase-diagram", "mean-field phase diagram with stability contour");
    int n_g1 = 61, n_omega = 61;
    double g1_lo = 0.0, g1_hi = 0.9, w_lo = 0.25, w_hi = 1.25, t_eval = 10000.0;
    add_common(pd, opt);
    pd->add_option("--n-g1", n_g1)->check(CLI::PositiveNumber);
    pd->add_option("--n-omega", n_omega)->check(CLI::PositiveNumber);
    pd->add_option("--g1-lo", g1_lo);
    pd->add_option("--g1-hi", g1_hi);
    pd->add_option("--omega-lo", w_lo);
    pd->add_option("--omega-hi", w_hi);
    pd->add_option("--t-eval", t_eval)->check(CLI::PositiveNumber);

    // gap-scan
    auto* gs = app.add_subcommand("gap-scan", "dissipative gap as a function of atom number");
    std::vector<int> n_list, m_cut_list;
    double g1_frac = 0.2, gs_omega_frac = 1.0;
    add_common(gs, opt);
    gs->add_option("--n-list", n_list, "atom numbers")->delimiter(',');
    gs->add_option("--m-cut", m_cut_list, "Floquet cut-offs")->delimiter(',');
    gs->add_option("--g1-frac", g1_frac, "g1 in units of g0");
    gs->add_option("--omega-frac", gs_omega_frac, "drive in units of 2 omega_res");

    // dynamics
    auto* dy = app.add_subcommand("dynamics", "time evolution overlays and omega scans");
    std::string methods = "meanfield,semiclassical";
    double t_end = 1500.0;
    int n_traj = 1000;
    std::string omega_scan;
    double g1_frac_override = -1.0;
    add_common(dy, opt);
    dy->add_option("--methods", methods, "comma list: quantum,meanfield,semiclassical");
    dy->add_option("--t-end", t_end)->check(CLI::PositiveNumber);
    dy->add_option("--n-traj", n_traj)->check(CLI::PositiveNumber);
    dy->add_option("--omega-scan", omega_scan, "omega/(2 omega_res): value or lo,hi,n");
    dy->add_option("--g1-frac-override", g1_frac_override, "override g1 as fraction of g0");

    // spectrum
    auto* sp = app.add_subcommand("spectrum", "two-time correlation spectra over drive frequency");
    double t0 = 5000.0, t_max = 5000.0;
    int sp_n_traj = 1000, n_nu = 121;
    std::string sp_omega_scan;
    double sp_g1_frac_override = -1.0;
    add_common(sp, opt);
    sp->add_option("--t0", t0)->check(CLI::PositiveNumber);
    sp->add_option("--t-max", t_max)->check(CLI::PositiveNumber);
    sp->add_option("--n-traj", sp_n_traj)->check(CLI::PositiveNumber);
    sp->add_option("--n-nu", n_nu)->check(CLI::PositiveNumber);
    sp->add_option("--omega-scan", sp_omega_scan, "omega/(2 omega_res): value or lo,hi,n");
    sp->add_option("--g1-frac-override", sp_g1_frac_override, "override g1 as fraction of g0");

    // threshold
    auto* th = app.add_subcommand("threshold", "closed-form scalars and detuned threshold curve");
    double th_lo = 0.8, th_hi = 1.2;
    int th_n = 81;
    add_common(th, opt);
    th->add_option("--omega-lo", th_lo);
    th->add_option("--omega-hi", th_hi);
    th->add_option("--n-omega", th_n)->check(CLI::PositiveNumber);

    // validate
    auto* va = app.add_subcommand("validate", "cross-model oracle suite");
    bool fast = false;
    add_common(va, opt);
    va->add_flag("--fast", fast, "skip the slow stochastic comparisons");

    // later occurrences of an option override earlier ones, so preset values
    // can be expanded before the user's explicit flags
    for (auto* sub : {pd, gs, dy, sp, th, va})
        for (auto* o : sub->get_options())
            if (o->get_expected_min() == 1 && o->get_expected_max() == 1)
                o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // preset expansion: [subcommand] [preset args] [original args]
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] != "--preset") continue;
        const auto preset = lookup_preset(args[i + 1]);
        if (!preset) {
            std::cerr << "error: unknown preset '" << args[i + 1] << "'\n";
            return kExitConfig;
        }
        std::vector<std::string> expanded{preset->command};
        for (const auto& [k, v] : preset->args) {
            expanded.push_back(k);
            expanded.push_back(v);
        }
        for (std::size_t j = 0; j < args.size(); ++j) {
            if (j == 0 && args[j] == preset->command) continue;  // duplicated verb
            expanded.push_back(args[j]);
        }
        args = expanded;
        break;
    }

    std::vector<const char*> cargs{argv[0]};
    for (const auto& a : args) cargs.push_back(a.c_str());
    try {
        app.parse(int(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (pd->parsed())
            return cmd_phase_diagram(opt, n_g1, n_omega, g1_lo, g1_hi, w_lo, w_hi, t_eval);
        if (gs->parsed()) return cmd_gap_scan(opt, n_list, m_cut_list, g1_frac, gs_omega_frac);
        if (dy->parsed()) {
            std::vector<double> fracs;
            if (!omega_scan.empty()) fracs = parse_scan(omega_scan);
            return cmd_dynamics(opt, methods, t_end, n_traj, fracs, g1_frac_override);
        }
        if (sp->parsed()) {
            std::vector<double> fracs;
            if (!sp_omega_scan.empty()) fracs = parse_scan(sp_omega_scan);
            return cmd_spectrum(opt, fracs, t0, t_max, sp_n_traj, n_nu, sp_g1_frac_override);
        }
        if (th->parsed()) return cmd_threshold(opt, th_lo, th_hi, th_n);
        if (va->parsed()) return cmd_validate(opt, fast);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitConfig;
}
