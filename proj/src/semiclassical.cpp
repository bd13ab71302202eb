#include "dicke/semiclassical.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace dicke::semiclassical {

void EnsembleConfig::validate(const ModelParams& p) const {
    if (n_traj < 1) throw std::invalid_argument("EnsembleConfig: n_traj must be >= 1");
    double fastest = p.kappa > 0.0 ? 1.0 / p.kappa : t_end;
    fastest = std::min(fastest, 1.0 / p.delta);
    if (p.omega > 0.0) fastest = std::min(fastest, 2.0 * M_PI / p.omega);
    if (dt > 0.02 * fastest)
        throw std::invalid_argument("EnsembleConfig: dt does not resolve kappa, Delta, or the drive");
    if (record_stride < 1) throw std::invalid_argument("EnsembleConfig: record_stride must be >= 1");
}

SemiclassicalState sample_initial(const ModelParams& p, RngStream& rng) {
    const double sqrt_n = std::sqrt(double(p.n_atoms));
    SemiclassicalState s;
    s.a_x = rng.normal();
    s.a_p = rng.normal();
    s.x = sqrt_n * rng.normal();
    s.y = sqrt_n * rng.normal();
    s.z = -double(p.n_atoms);  // zero variance: <Z^2> = <Z>^2
    return s;
}

void step(SemiclassicalState& s, const ModelParams& p, double t, double dt, RngStream& rng) {
    const double g = model::coupling_g(p, t);
    const double coupling = 2.0 * g / std::sqrt(double(p.n_atoms));
    const double noise = std::sqrt(2.0 * p.kappa * dt);

    const double ax = s.a_x, ap = s.a_p, x = s.x, y = s.y, z = s.z;
    s.a_x = ax + dt * (-p.kappa * ax + p.delta_c * ap) + noise * rng.normal();
    s.a_p = ap + dt * (-p.kappa * ap - p.delta_c * ax - coupling * x) + noise * rng.normal();
    s.x = x + dt * (-p.delta * y);
    s.y = y + dt * (p.delta * x - coupling * ax * z);
    s.z = z + dt * (coupling * ax * y);
}

namespace {

struct Accumulator {
    std::vector<double> x2;
    std::vector<double> photon;
    int excluded = 0;
};

// Simulate trajectories [first, last) and accumulate record-grid moments.
// Trajectories that develop NaNs are dropped whole and counted.
Accumulator simulate_range(const ModelParams& p, const EnsembleConfig& cfg, int first,
                           int last, std::size_t n_rec) {
    Accumulator acc;
    acc.x2.assign(n_rec, 0.0);
    acc.photon.assign(n_rec, 0.0);
    std::vector<double> traj_x2(n_rec), traj_photon(n_rec);

    const long n_steps = std::lround(cfg.t_end / cfg.dt);
    for (int traj = first; traj < last; ++traj) {
        RngStream rng(cfg.seed, std::uint64_t(traj));
        SemiclassicalState s = sample_initial(p, rng);
        std::size_t rec = 0;
        traj_x2[rec] = s.x * s.x;
        traj_photon[rec] = s.a_x * s.a_x + s.a_p * s.a_p;
        ++rec;
        bool bad = false;
        for (long stepi = 0; stepi < n_steps; ++stepi) {
            step(s, p, double(stepi) * cfg.dt, cfg.dt, rng);
            if ((stepi + 1) % cfg.record_stride == 0 || stepi + 1 == n_steps) {
                if (!std::isfinite(s.x) || !std::isfinite(s.a_x)) {
                    bad = true;
                    break;
                }
                if (rec < n_rec) {
                    traj_x2[rec] = s.x * s.x;
                    traj_photon[rec] = s.a_x * s.a_x + s.a_p * s.a_p;
                    ++rec;
                }
            }
        }
        if (bad) {
            ++acc.excluded;
            continue;
        }
        for (std::size_t i = 0; i < n_rec; ++i) {
            acc.x2[i] += traj_x2[i];
            acc.photon[i] += traj_photon[i];
        }
    }
    return acc;
}

std::vector<double> record_times(const EnsembleConfig& cfg) {
    const long n_steps = std::lround(cfg.t_end / cfg.dt);
    std::vector<double> t;
    t.push_back(0.0);
    for (long stepi = 0; stepi < n_steps; ++stepi)
        if ((stepi + 1) % cfg.record_stride == 0 || stepi + 1 == n_steps)
            t.push_back(double(stepi + 1) * cfg.dt);
    // the final partial-stride record may duplicate the last full-stride one
    if (t.size() >= 2 && t.back() == t[t.size() - 2]) t.pop_back();
    return t;
}

}  // namespace

MomentSeries run_ensemble(const ModelParams& p, const EnsembleConfig& cfg) {
    cfg.validate(p);
    const auto times = record_times(cfg);
    const std::size_t n_rec = times.size();

    const int threads = std::max(1, cfg.threads);
    std::vector<Accumulator> partials(threads);
    if (threads == 1) {
        partials[0] = simulate_range(p, cfg, 0, cfg.n_traj, n_rec);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (cfg.n_traj + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const int first = w * chunk;
            const int last = std::min(cfg.n_traj, first + chunk);
            pool.emplace_back([&, w, first, last]() {
                partials[w] = simulate_range(p, cfg, first, last, n_rec);
            });
        }
        for (auto& th : pool) th.join();
    }

    // fixed merge order keeps the reduction deterministic
    Accumulator total;
    total.x2.assign(n_rec, 0.0);
    total.photon.assign(n_rec, 0.0);
    for (const auto& part : partials) {
        total.excluded += part.excluded;
        for (std::size_t i = 0; i < n_rec; ++i) {
            total.x2[i] += part.x2[i];
            total.photon[i] += part.photon[i];
        }
    }
    if (double(total.excluded) > 0.01 * double(cfg.n_traj))
        throw std::runtime_error("run_ensemble: more than 1% of trajectories diverged");
    const double norm = 1.0 / double(cfg.n_traj - total.excluded);

    MomentSeries out;
    out.t = times;
    out.n_excluded = total.excluded;
    out.x2_mean.resize(n_rec);
    out.photon_proxy.resize(n_rec);
    for (std::size_t i = 0; i < n_rec; ++i) {
        out.x2_mean[i] = total.x2[i] * norm;
        out.photon_proxy[i] = total.photon[i] * norm;
    }

    // sliding one-period average on the record grid
    out.x2_tav.resize(n_rec);
    const double period = p.omega > 0.0 ? 2.0 * M_PI / p.omega : cfg.t_end;
    std::size_t lo = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n_rec; ++i) {
        sum += out.x2_mean[i];
        while (times[lo] < times[i] - period) {
            sum -= out.x2_mean[lo];
            ++lo;
        }
        out.x2_tav[i] = sum / double(i - lo + 1);
    }
    return out;
}

C1Series two_time_correlation(const ModelParams& p, const EnsembleConfig& cfg, double t0,
                              double t_max) {
    EnsembleConfig run_cfg = cfg;
    run_cfg.t_end = t0 + t_max;
    run_cfg.validate(p);

    const long n_steps = std::lround(run_cfg.t_end / run_cfg.dt);
    const long t0_step = std::lround(t0 / run_cfg.dt / double(run_cfg.record_stride)) *
                         run_cfg.record_stride;  // snapped to the record grid
    const double t0_snap = double(t0_step) * run_cfg.dt;

    std::vector<double> lag_times;
    for (long stepi = t0_step; stepi <= n_steps; stepi += run_cfg.record_stride)
        lag_times.push_back(double(stepi - t0_step) * run_cfg.dt);
    const std::size_t n_lag = lag_times.size();

    const int threads = std::max(1, cfg.threads);
    struct Partial {
        std::vector<double> c1;
        int excluded = 0;
    };
    std::vector<Partial> partials(threads);

    auto worker = [&](int first, int last, Partial& out) {
        out.c1.assign(n_lag, 0.0);
        std::vector<double> xs(n_lag);
        for (int traj = first; traj < last; ++traj) {
            RngStream rng(run_cfg.seed, std::uint64_t(traj));
            SemiclassicalState s = sample_initial(p, rng);
            bool bad = false;
            std::size_t rec = 0;
            for (long stepi = 0; stepi < n_steps; ++stepi) {
                step(s, p, double(stepi) * run_cfg.dt, run_cfg.dt, rng);
                const long k = stepi + 1;
                if (k >= t0_step && (k - t0_step) % run_cfg.record_stride == 0) {
                    if (!std::isfinite(s.x)) {
                        bad = true;
                        break;
                    }
                    if (rec < n_lag) xs[rec++] = s.x;
                }
            }
            if (bad || rec != n_lag) {
                ++out.excluded;
                continue;
            }
            const double x0 = xs[0];
            for (std::size_t i = 0; i < n_lag; ++i) out.c1[i] += xs[i] * x0;
        }
    };

    if (threads == 1) {
        worker(0, run_cfg.n_traj, partials[0]);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (run_cfg.n_traj + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const int first = w * chunk;
            const int last = std::min(run_cfg.n_traj, first + chunk);
            pool.emplace_back([&, w, first, last]() { worker(first, last, partials[w]); });
        }
        for (auto& th : pool) th.join();
    }

    C1Series out;
    out.t = lag_times;
    out.t0 = t0_snap;
    out.c1.assign(n_lag, 0.0);
    int excluded = 0;
    for (const auto& part : partials) {
        excluded += part.excluded;
        for (std::size_t i = 0; i < n_lag; ++i) out.c1[i] += part.c1[i];
    }
    if (double(excluded) > 0.01 * double(run_cfg.n_traj))
        throw std::runtime_error("two_time_correlation: more than 1% of trajectories diverged");
    out.n_excluded = excluded;
    const double norm = 1.0 / double(run_cfg.n_traj - excluded);
    for (double& v : out.c1) v *= norm;
    return out;
}

SpectrumResult spectrum_s1(const C1Series& c1, double t_max,
                           const std::vector<double>& nu_grid) {
    if (c1.t.size() < 2) throw std::invalid_argument("spectrum_s1: C1 series too short");
    SpectrumResult out;
    out.nu = nu_grid;
    out.abs_s1.resize(nu_grid.size());
    out.re_s1.resize(nu_grid.size());
    out.im_s1.resize(nu_grid.size());
    for (std::size_t k = 0; k < nu_grid.size(); ++k) {
        const double nu = nu_grid[k];
        Complex sum = 0.0;
        for (std::size_t i = 0; i + 1 < c1.t.size() && c1.t[i] < t_max; ++i) {
            const double dt = std::min(c1.t[i + 1], t_max) - c1.t[i];
            const Complex f0 = std::exp(Complex(0.0, nu * c1.t[i])) * c1.c1[i];
            const Complex f1 = std::exp(Complex(0.0, nu * c1.t[i + 1])) * c1.c1[i + 1];
            sum += 0.5 * dt * (f0 + f1);
        }
        out.abs_s1[k] = std::abs(sum);
        out.re_s1[k] = sum.real();
        out.im_s1[k] = sum.imag();
    }
    return out;
}

}  // namespace dicke::semiclassical
