#include "dicke/meanfield.hpp"

#include <atomic>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dicke::meanfield {

namespace {
constexpr Complex I{0.0, 1.0};
}

double v0_coeff(const ModelParams& p, double t) {
    const double g = model::coupling_g(p, t);
    const double gd = model::coupling_g_dot(p, t);
    const double d2k2 = p.delta_c * p.delta_c + p.kappa * p.kappa;
    return 2.0 * p.delta_c * g * g / d2k2 -
           4.0 * p.delta_c * p.kappa * g * gd / (d2k2 * d2k2);
}

double v1_coeff(const ModelParams& p, double t) {
    const double g = model::coupling_g(p, t);
    const double d2k2 = p.delta_c * p.delta_c + p.kappa * p.kappa;
    return 4.0 * p.delta_c * p.delta * p.kappa * g * g / (d2k2 * d2k2);
}

MeanFieldDerivs meanfield_rhs(const MeanFieldState& s, double t, const ModelParams& p) {
    const double v0 = v0_coeff(p, t);
    const double v1 = v1_coeff(p, t);
    const double inv_n = 1.0 / double(p.n_atoms);
    const Complex vm = Complex(v0, -v1) * inv_n;  // (V0 - i V1)/N
    const Complex vp = Complex(v0, v1) * inv_n;   // (V0 + i V1)/N

    MeanFieldDerivs d;
    d.d_down = I * vm * std::norm(s.phi_up) * s.phi_down +
               I * vp * s.phi_up * s.phi_up * std::conj(s.phi_down);
    d.d_up = -I * (p.delta - vp * std::norm(s.phi_down)) * s.phi_up +
             I * vm * s.phi_down * s.phi_down * std::conj(s.phi_up);
    return d;
}

MeanFieldState standard_seed(int n_atoms) {
    return MeanFieldState{Complex(std::sqrt(double(n_atoms - 1)), 0.0), Complex(1.0, 0.0)};
}

MfTrajectory integrate_meanfield(const MeanFieldState& s0, const ModelParams& p,
                                 double t_end, double dt, int record_stride,
                                 double sphere_tol) {
    double slow = 1.0 / p.delta;
    const double period = p.omega > 0.0 ? 2.0 * M_PI / p.omega : t_end;
    if (p.omega > 0.0) slow = std::min(slow, period);
    if (dt > 0.02 * slow)
        throw std::invalid_argument("integrate_meanfield: dt does not resolve Delta or the drive");

    // snap dt so the drive period is an integer number of steps
    long steps_per_period = std::lround(period / dt);
    if (steps_per_period < 1) steps_per_period = 1;
    dt = period / double(steps_per_period);
    const long n_steps = std::lround(t_end / dt);

    const double n = double(p.n_atoms);
    const double n2 = n * n;

    MfTrajectory out;
    out.period = period;
    out.n_atoms = p.n_atoms;
    out.records.reserve(std::size_t(n_steps / record_stride) + 2);

    std::deque<double> window;
    double window_sum = 0.0;
    auto push = [&](const MeanFieldState& s) {
        const double x2 = s.x() * s.x();
        window.push_back(x2);
        window_sum += x2;
        while (long(window.size()) > steps_per_period) {
            window_sum -= window.front();
            window.pop_front();
        }
        return x2;
    };

    MeanFieldState s = s0;
    double t = 0.0;
    double x2 = push(s);
    out.records.push_back({t, x2, window_sum / double(window.size())});
    out.strobe.push_back(s);

    auto rk4 = [&](const MeanFieldState& y, double time) {
        auto f = [&](double tt, const MeanFieldState& st) { return meanfield_rhs(st, tt, p); };
        const auto k1 = f(time, y);
        const auto k2 = f(time + 0.5 * dt,
                          {y.phi_down + 0.5 * dt * k1.d_down, y.phi_up + 0.5 * dt * k1.d_up});
        const auto k3 = f(time + 0.5 * dt,
                          {y.phi_down + 0.5 * dt * k2.d_down, y.phi_up + 0.5 * dt * k2.d_up});
        const auto k4 = f(time + dt, {y.phi_down + dt * k3.d_down, y.phi_up + dt * k3.d_up});
        return MeanFieldState{
            y.phi_down + (dt / 6.0) * (k1.d_down + 2.0 * k2.d_down + 2.0 * k3.d_down + k4.d_down),
            y.phi_up + (dt / 6.0) * (k1.d_up + 2.0 * k2.d_up + 2.0 * k3.d_up + k4.d_up)};
    };

    const long half = steps_per_period / 2;
    for (long step = 0; step < n_steps; ++step) {
        s = rk4(s, t);
        t = double(step + 1) * dt;
        x2 = push(s);
        const double r2 = s.norm2();
        if (std::abs(r2 * r2 - n2) > sphere_tol * n2) {
            std::ostringstream os;
            os << "integrate_meanfield: sphere drift " << std::abs(r2 * r2 - n2) / n2
               << " N^2 at t = " << t;
            throw std::runtime_error(os.str());
        }
        if ((step + 1) % record_stride == 0 || step + 1 == n_steps)
            out.records.push_back({t, x2, window_sum / double(window.size())});
        if ((step + 1) % steps_per_period == 0) out.strobe.push_back(s);
        if ((step + 1) % steps_per_period == half) out.strobe_half.push_back(s);
    }
    out.final_state = s;
    return out;
}

const char* to_string(CycleClass c) {
    switch (c) {
        case CycleClass::fixed_point: return "fixed_point";
        case CycleClass::cycle_T: return "cycle_T";
        case CycleClass::cycle_2T: return "cycle_2T";
        case CycleClass::irregular: return "irregular";
    }
    return "?";
}

namespace {

double bloch_distance(const MeanFieldState& a, const MeanFieldState& b) {
    const double dx = a.x() - b.x();
    const double dy = a.y() - b.y();
    const double dz = a.z() - b.z();
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

CycleClass classify_limit_cycle(const MfTrajectory& traj, const ModelParams& p,
                                double point_tol_frac) {
    (void)p;
    if (traj.strobe.size() < 201)
        throw std::invalid_argument("classify_limit_cycle: trajectory shorter than 200 periods");
    const double tol = point_tol_frac * double(traj.n_atoms);

    const std::size_t k = traj.strobe.size();
    const int tail = 16;  // strobe samples inspected at the end

    // convergence of even / odd stroboscopic subsequences
    auto subseq_converged = [&](std::size_t start_parity) {
        for (std::size_t i = k - tail + start_parity; i + 2 < k; i += 2)
            if (bloch_distance(traj.strobe[i], traj.strobe[i + 2]) > tol) return false;
        return true;
    };
    const bool even_ok = subseq_converged(0);
    const bool odd_ok = subseq_converged(1);
    if (!even_ok || !odd_ok) return CycleClass::irregular;

    const MeanFieldState& a = traj.strobe[k - 2];
    const MeanFieldState& b = traj.strobe[k - 1];
    const double split = bloch_distance(a, b);
    if (split > 10.0 * tol) return CycleClass::cycle_2T;

    // single stroboscopic point; distinguish a true fixed point from a
    // T-periodic orbit by the mid-period excursion
    if (!traj.strobe_half.empty()) {
        const double excursion = bloch_distance(b, traj.strobe_half.back());
        if (excursion > 10.0 * tol) return CycleClass::cycle_T;
    }
    return CycleClass::fixed_point;
}

std::vector<PhaseDiagramCell> phase_diagram(const ModelParams& p_base,
                                            const std::vector<double>& g1_over_g0_grid,
                                            const std::vector<double>& omega_over_2wres_grid,
                                            double t_eval, int threads) {
    if (g1_over_g0_grid.empty() || omega_over_2wres_grid.empty())
        throw std::invalid_argument("phase_diagram: empty grid");
    const double wres = model::resonance_frequency(p_base);
    const double n2 = double(p_base.n_atoms) * double(p_base.n_atoms);

    struct Task {
        double g1f, wf;
    };
    std::vector<Task> tasks;
    for (double g1f : g1_over_g0_grid)
        for (double wf : omega_over_2wres_grid) tasks.push_back({g1f, wf});

    std::vector<PhaseDiagramCell> cells(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            PhaseDiagramCell cell{tasks[i].g1f, tasks[i].wf, 0.0, CycleClass::irregular, false};
            try {
                ModelParams p = p_base;
                p.g1 = tasks[i].g1f * p.g0;
                p.omega = tasks[i].wf * 2.0 * wres;
                const double dt = 0.02 * std::min(1.0 / p.delta, 2.0 * M_PI / std::max(p.omega, 1e-12));
                const auto traj = integrate_meanfield(standard_seed(p.n_atoms), p, t_eval, dt,
                                                      1 << 30);
                cell.x2_tav_norm = traj.records.back().x2_tav / n2;
                cell.classification = traj.strobe.size() > 200
                                          ? classify_limit_cycle(traj, p)
                                          : CycleClass::irregular;
                cell.ok = true;
            } catch (const std::exception&) {
                cell.ok = false;
            }
            cells[i] = cell;
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return cells;
}

StabilityHarmonics stability_harmonics(const ModelParams& p) {
    const double d2k2 = p.delta_c * p.delta_c + p.kappa * p.kappa;
    const double d2k2sq = d2k2 * d2k2;
    const double g0 = p.g0, g1 = p.g1;

    auto rotating_block = [](Complex v0, double v1) {
        Eigen::Matrix2cd m;
        m << I * v0 - v1, I * v0 + v1, -I * v0 + v1, -I * v0 - v1;
        return m;
    };
    auto v1_of = [&](double gsq) {
        return 4.0 * p.kappa * p.delta_c * p.delta * gsq / d2k2sq;
    };

    StabilityHarmonics sh;
    // m = 0: time-average includes the g1^2/2 shift
    {
        const double gsq = g0 * g0 + 0.5 * g1 * g1;
        const double v0 = 2.0 * p.delta_c * gsq / d2k2;
        const double v1 = v1_of(gsq);
        Eigen::Matrix2cd m;
        m << -I * (p.delta - v0) - v1, I * v0 + v1, -I * v0 + v1, I * (p.delta - v0) - v1;
        sh.a[2] = m;
    }
    // m = +-1: V0 = 2 dc g0 g1/(dc^2+k^2) -+ i 2 dc k w g0 g1/(dc^2+k^2)^2
    for (int m : {-1, 1}) {
        const Complex v0 = Complex(2.0 * p.delta_c * g0 * g1 / d2k2,
                                   -double(m) * 2.0 * p.delta_c * p.kappa * p.omega * g0 * g1 / d2k2sq);
        sh.a[m + 2] = rotating_block(v0, v1_of(g0 * g1));
    }
    // m = +-2: V0 = 2 dc (g1^2/4)/(dc^2+k^2) -+ i 4 dc k w (g1^2/4)/(dc^2+k^2)^2
    for (int m : {-2, 2}) {
        const double gsq = 0.25 * g1 * g1;
        const Complex v0 = Complex(2.0 * p.delta_c * gsq / d2k2,
                                   -double(m / 2) * 4.0 * p.delta_c * p.kappa * p.omega * gsq / d2k2sq);
        sh.a[m + 2] = rotating_block(v0, v1_of(gsq));
    }
    return sh;
}

StabilityResult stability_exponents(const StabilityHarmonics& sh, double omega, int m_cut) {
    if (m_cut < 2) throw std::invalid_argument("stability_exponents: m_cut must be >= 2");
    const int blocks = 2 * m_cut + 1;
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(2 * blocks, 2 * blocks);
    for (int n = -m_cut; n <= m_cut; ++n) {
        for (int m = -2; m <= 2; ++m) {
            const int nc = n - m;
            if (nc < -m_cut || nc > m_cut) continue;
            big.block<2, 2>(2 * (n + m_cut), 2 * (nc + m_cut)) = sh.block(m);
        }
        big.block<2, 2>(2 * (n + m_cut), 2 * (n + m_cut)) -=
            Complex(0.0, double(n) * omega) * Eigen::Matrix2cd::Identity();
    }
    const auto res = numerics::dense_eig(big, false);

    StabilityResult out;
    out.lambdas.assign(res.values.data(), res.values.data() + res.values.size());
    out.gamma_max = -std::numeric_limits<double>::infinity();
    double dominant_im = 0.0;
    for (const Complex& lam : out.lambdas) {
        if (lam.real() > out.gamma_max) {
            out.gamma_max = lam.real();
            dominant_im = lam.imag();
        }
    }
    double folded = dominant_im;
    if (omega > 0.0) folded = folded - omega * std::floor(folded / omega + 0.5);
    out.nu_fl = std::abs(folded);
    return out;
}

XupTrajectory integrate_x_up(const ModelParams& p, double x0, double v0, double t_end,
                             double dt) {
    XupTrajectory out;
    const long n_steps = std::lround(t_end / dt);
    out.t.reserve(n_steps + 1);
    out.x.reserve(n_steps + 1);
    double x = x0, v = v0, t = 0.0;
    auto acc = [&](double tt, double xx, double vv) {
        return -2.0 * v1_coeff(p, tt) * vv - p.delta * (p.delta - 2.0 * v0_coeff(p, tt)) * xx;
    };
    out.t.push_back(t);
    out.x.push_back(x);
    for (long step = 0; step < n_steps; ++step) {
        const double k1x = v, k1v = acc(t, x, v);
        const double k2x = v + 0.5 * dt * k1v, k2v = acc(t + 0.5 * dt, x + 0.5 * dt * k1x, v + 0.5 * dt * k1v);
        const double k3x = v + 0.5 * dt * k2v, k3v = acc(t + 0.5 * dt, x + 0.5 * dt * k2x, v + 0.5 * dt * k2v);
        const double k4x = v + dt * k3v, k4v = acc(t + dt, x + dt * k3x, v + dt * k3v);
        x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t = double(step + 1) * dt;
        out.t.push_back(t);
        out.x.push_back(x);
    }
    return out;
}

double log_envelope_rate(const XupTrajectory& traj, double window, double fit_start) {
    // RMS over consecutive windows, then least-squares slope of log(RMS)
    std::vector<double> centers, logs;
    double wsum = 0.0;
    long count = 0;
    double wstart = fit_start;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        if (traj.t[i] < fit_start) continue;
        if (traj.t[i] >= wstart + window) {
            if (count > 0 && wsum > 0.0) {
                centers.push_back(wstart + 0.5 * window);
                logs.push_back(0.5 * std::log(wsum / double(count)));
            }
            wsum = 0.0;
            count = 0;
            wstart += window;
        }
        wsum += traj.x[i] * traj.x[i];
        ++count;
    }
    if (centers.size() < 3)
        throw std::invalid_argument("log_envelope_rate: not enough windows for a fit");
    const double n = double(centers.size());
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        st += centers[i];
        sl += logs[i];
        stt += centers[i] * centers[i];
        stl += centers[i] * logs[i];
    }
    return (n * stl - st * sl) / (n * stt - st * st);
}

MathieuParams mathieu_params(const ModelParams& p, double omega) {
    MathieuParams mp{};
    const double d2k2 = p.delta_c * p.delta_c + p.kappa * p.kappa;
    mp.b = 2.0 * p.delta_c * p.g0 * p.g1 / d2k2;
    const double wres = model::resonance_frequency(p);
    mp.epsilon = omega - 2.0 * wres;
    mp.gamma0 = model::damping_gamma0(p);
    mp.delta = p.delta;
    mp.omega_res = wres;
    mp.validity_ratio = std::max(mp.gamma0, std::sqrt(p.delta * mp.b)) / std::max(wres, 1e-300);
    return mp;
}

std::pair<double, double> mathieu_exponents(const MathieuParams& mp) {
    const double drive = mp.delta * mp.b / mp.omega_res;
    const double arg = drive * drive - 0.25 * mp.epsilon * mp.epsilon;
    if (arg >= 0.0) {
        const double root = std::sqrt(arg);
        return {-mp.gamma0 + root, -mp.gamma0 - root};
    }
    // detuned beyond the drive: purely oscillatory square root, damped pair
    return {-mp.gamma0, -mp.gamma0};
}

}  // namespace dicke::meanfield
