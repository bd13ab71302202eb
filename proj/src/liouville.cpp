#include "dicke/liouville.hpp"

#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace dicke::liouville {

namespace {
constexpr Complex I{0.0, 1.0};
}

ElimCoefficients c_pm_expanded(const ModelParams& p, double t) {
    const Complex d = Complex(p.delta_c, -p.kappa);
    const Complex d2 = d * d;
    const double g = model::coupling_g(p, t);
    const double gd = model::coupling_g_dot(p, t);
    const double inv_sqrt_n = 1.0 / std::sqrt(double(p.n_atoms));
    const Complex common = g / d + I * gd / d2;
    const Complex retard = p.delta * g / d2;
    return ElimCoefficients{-inv_sqrt_n * (common - retard),
                            -inv_sqrt_n * (common + retard), ElimMode::expanded};
}

ElimCoefficients c_pm_exact(const ModelParams& p, double t_end, double dt) {
    double fastest = p.kappa > 0.0 ? 1.0 / p.kappa : t_end;
    if (p.omega > 0.0) fastest = std::min(fastest, 1.0 / p.omega);
    if (dt > 0.05 * fastest)
        throw std::invalid_argument("c_pm_exact: dt does not resolve kappa and omega");

    const double inv_sqrt_n = 1.0 / std::sqrt(double(p.n_atoms));
    auto integrate = [&](double sign_delta) {
        const Complex pole = Complex(p.delta_c + sign_delta * p.delta, -p.kappa);
        auto rhs = [&](double t, const Complex& c) {
            return -I * (pole * c + model::coupling_g(p, t) * inv_sqrt_n);
        };
        Complex c = 0.0;
        double t = 0.0;
        while (t < t_end - 0.5 * dt) {
            const double h = std::min(dt, t_end - t);
            const Complex k1 = rhs(t, c);
            const Complex k2 = rhs(t + 0.5 * h, c + 0.5 * h * k1);
            const Complex k3 = rhs(t + 0.5 * h, c + 0.5 * h * k2);
            const Complex k4 = rhs(t + h, c + h * k3);
            c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        return c;
    };
    return ElimCoefficients{integrate(+1.0), integrate(-1.0), ElimMode::exact};
}

SparseMatrix spre(const SparseMatrix& a) {
    SparseMatrix id(a.rows(), a.cols());
    id.setIdentity();
    return Eigen::kroneckerProduct(id, a).eval();
}

SparseMatrix spost(const SparseMatrix& b) {
    SparseMatrix id(b.rows(), b.cols());
    id.setIdentity();
    SparseMatrix bt = SparseMatrix(b.transpose());
    return Eigen::kroneckerProduct(bt, id).eval();
}

SparseMatrix ssandwich(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix bconj = b.conjugate();
    return Eigen::kroneckerProduct(bconj, a).eval();
}

int SuperOperatorHarmonics::max_harmonic() const {
    int m_max = 0;
    for (const auto& [m, h] : harmonics) m_max = std::max(m_max, std::abs(m));
    return m_max;
}

SparseMatrix SuperOperatorHarmonics::at_time(double t) const {
    const int d2 = dim * dim;
    SparseMatrix out(d2, d2);
    for (const auto& [m, h] : harmonics) {
        const Complex phase = std::exp(I * double(m) * omega * t);
        out += phase * h;
    }
    return out;
}

void SuperOperatorHarmonics::apply(double t, const DenseVector& x, DenseVector& y) const {
    y.setZero(x.size());
    for (const auto& [m, h] : harmonics) {
        const Complex phase = m == 0 ? Complex(1.0) : std::exp(I * double(m) * omega * t);
        y.noalias() += phase * (h * x);
    }
}

namespace {

SparseMatrix lindblad_dissipator(const SparseMatrix& jump_left, const SparseMatrix& jump_right) {
    // -(J_l^dag J_r rho + rho J_l^dag J_r - 2 J_r rho J_l^dag), rate folded in by caller
    SparseMatrix jj = SparseMatrix(jump_left.adjoint()) * jump_right;
    return -(spre(jj) + spost(jj) - 2.0 * ssandwich(jump_right, jump_left));
}

SparseMatrix commutator_superop(const SparseMatrix& h) {
    return -I * (spre(h) - spost(h));
}

void prune_harmonics(std::map<int, SparseMatrix>& hs) {
    for (auto it = hs.begin(); it != hs.end();) {
        it->second.prune(1e-15, 1.0);
        if (it->second.nonZeros() == 0)
            it = hs.erase(it);
        else
            ++it;
    }
}

}  // namespace

SuperOperatorHarmonics build_full_harmonics(const ModelParams& p,
                                            const hilbert::AtomSector& sector,
                                            const hilbert::CavitySpace& cavity) {
    const auto atoms = hilbert::atom_observables(sector);
    const auto cav = hilbert::cavity_ops(cavity);

    const SparseMatrix a = hilbert::kron(cav.a, DenseMatrix::Identity(sector.dim(), sector.dim())).sparseView();
    const SparseMatrix num = hilbert::kron(cav.number, DenseMatrix::Identity(sector.dim(), sector.dim())).sparseView();
    const SparseMatrix x = hilbert::kron(DenseMatrix::Identity(cavity.dim(), cavity.dim()), atoms.x).sparseView();
    const SparseMatrix n_up = hilbert::kron(DenseMatrix::Identity(cavity.dim(), cavity.dim()), atoms.n_up).sparseView();

    const double inv_sqrt_n = 1.0 / std::sqrt(double(p.n_atoms));
    const SparseMatrix ax = SparseMatrix(a + SparseMatrix(a.adjoint())) * x;

    SuperOperatorHarmonics out;
    out.dim = sector.dim() * cavity.dim();
    out.model = LiouvilleModel::full;
    out.omega = p.omega;

    SparseMatrix h0 = p.delta_c * num + p.delta * n_up + (p.g0 * inv_sqrt_n) * ax;
    out.harmonics[0] = commutator_superop(h0) + p.kappa * lindblad_dissipator(a, a);
    if (p.g1 != 0.0) {
        SparseMatrix h1 = (0.5 * p.g1 * inv_sqrt_n) * ax;
        out.harmonics[1] = commutator_superop(h1);
        out.harmonics[-1] = commutator_superop(h1);
    }
    prune_harmonics(out.harmonics);
    return out;
}

SuperOperatorHarmonics build_atom_only_harmonics(const ModelParams& p,
                                                 const hilbert::AtomSector& sector) {
    const int d = sector.dim();
    const auto atoms = hilbert::atom_observables(sector);
    const DenseMatrix ladder = hilbert::atom_ladder(sector);
    const DenseMatrix ladder_dag = ladder.adjoint();

    // Fourier components of the elimination coefficients.
    const Complex dd = Complex(p.delta_c, -p.kappa);
    const Complex dd2 = dd * dd;
    const double inv_sqrt_n = 1.0 / std::sqrt(double(p.n_atoms));
    std::map<int, Complex> cp, cm;
    cp[0] = -inv_sqrt_n * p.g0 * (1.0 / dd - p.delta / dd2);
    cm[0] = -inv_sqrt_n * p.g0 * (1.0 / dd + p.delta / dd2);
    for (int m : {-1, 1}) {
        const Complex base = 1.0 / dd - double(m) * p.omega / dd2;
        cp[m] = -inv_sqrt_n * (0.5 * p.g1) * (base - p.delta / dd2);
        cm[m] = -inv_sqrt_n * (0.5 * p.g1) * (base + p.delta / dd2);
    }

    // beta(t) = sum_m B_m exp(i m omega t)
    std::map<int, DenseMatrix> b;
    for (int m : {-1, 0, 1}) b[m] = cp[m] * ladder + cm[m] * ladder_dag;
    auto b_dag = [&](int m) -> DenseMatrix {
        return std::conj(cp.at(m)) * ladder_dag + std::conj(cm.at(m)) * ladder;
    };

    // g(t) harmonics
    std::map<int, double> g;
    g[0] = p.g0;
    g[1] = g[-1] = 0.5 * p.g1;

    SuperOperatorHarmonics out;
    out.dim = d;
    out.model = LiouvilleModel::atom_only;
    out.omega = p.omega;

    for (int m = -2; m <= 2; ++m) {
        // Hamiltonian harmonic: Delta n_up delta_{m,0}
        //   + sum_{a+b=m} g_a/(2 sqrt(N)) (B_{-b}^dag X + X B_b)
        DenseMatrix hm = DenseMatrix::Zero(d, d);
        if (m == 0) hm += p.delta * atoms.n_up;
        for (int ga = -1; ga <= 1; ++ga) {
            const int gb = m - ga;
            if (gb < -1 || gb > 1) continue;
            const double pref = g[ga] * 0.5 * inv_sqrt_n;
            if (pref == 0.0) continue;
            hm += pref * (b_dag(-gb) * atoms.x + atoms.x * b[gb]);
        }
        SparseMatrix lm = commutator_superop(hm.sparseView());

        // Dissipator harmonic: -kappa sum_q [ B_{q-m}^dag B_q rho + rho (...) - 2 B_q rho B_{q-m}^dag ]
        for (int q = -1; q <= 1; ++q) {
            const int qm = q - m;
            if (qm < -1 || qm > 1) continue;
            const SparseMatrix bl = b[qm].sparseView();  // left jump (the daggered one)
            const SparseMatrix br = b[q].sparseView();
            lm += p.kappa * lindblad_dissipator(bl, br);
        }
        out.harmonics[m] = lm;
    }
    prune_harmonics(out.harmonics);
    return out;
}

EvolveResult evolve_density(const SuperOperatorHarmonics& h, const DensityMatrix& rho0,
                            double t_end, double dt, const DenseMatrix& x2_op,
                            int record_stride, const EvolveHook& hook, double trace_tol) {
    const int d = h.dim;
    if (rho0.rho.rows() != d || rho0.rho.cols() != d)
        throw std::invalid_argument("evolve_density: state dimension mismatch");
    double fastest = h.omega > 0.0 ? 2.0 * M_PI / h.omega : t_end;
    // no direct access to kappa/delta here; the caller-chosen dt is checked
    // against the drive period only, the rest is the caller's contract
    if (h.omega > 0.0 && dt > 0.02 * fastest)
        throw std::invalid_argument("evolve_density: dt does not resolve the drive period");
    if (record_stride < 1) throw std::invalid_argument("evolve_density: record_stride >= 1");

    const Eigen::Index d2 = Eigen::Index(d) * d;
    DenseVector v = Eigen::Map<const DenseVector>(rho0.rho.data(), d2);

    // tr(A rho) = vec(A^T) . vec(rho)
    DenseMatrix x2_t = x2_op.transpose();
    const DenseVector x2_weights = Eigen::Map<const DenseVector>(x2_t.data(), d2);
    DenseVector trace_weights = DenseVector::Zero(d2);
    for (int i = 0; i < d; ++i) trace_weights(Eigen::Index(i) * d + i) = 1.0;

    const double period = h.omega > 0.0 ? 2.0 * M_PI / h.omega : t_end;
    std::deque<std::pair<double, double>> window;  // (t, x2) samples inside one period
    double window_sum = 0.0;

    auto measure_x2 = [&](const DenseVector& state) {
        return (x2_weights.array() * state.array()).sum().real();
    };
    auto measure_trace = [&](const DenseVector& state) {
        return (trace_weights.array() * state.array()).sum();
    };

    EvolveResult result;
    const long n_steps = std::lround(t_end / dt);
    result.records.reserve(std::size_t(n_steps / record_stride) + 2);

    DenseVector k1(d2), k2(d2), k3(d2), k4(d2), tmp(d2);
    double t = rho0.t;

    auto push_sample = [&](double time, const DenseVector& state) {
        const double x2 = measure_x2(state);
        window.emplace_back(time, x2);
        window_sum += x2;
        while (!window.empty() && window.front().first < time - period) {
            window_sum -= window.front().second;
            window.pop_front();
        }
        return x2;
    };
    auto record = [&](double time, const DenseVector& state, double x2) {
        const Complex tr = measure_trace(state);
        const double trace_err = std::abs(tr - Complex(1.0));
        if (trace_err > trace_tol) {
            std::ostringstream os;
            os << "evolve_density: trace drift " << trace_err << " at t = " << time
               << " exceeds tolerance " << trace_tol;
            throw std::runtime_error(os.str());
        }
        result.records.push_back({time, x2, window_sum / double(window.size()), trace_err});
        if (hook) hook(time, Eigen::Map<const DenseMatrix>(state.data(), d, d));
    };

    record(t, v, push_sample(t, v));
    for (long step = 0; step < n_steps; ++step) {
        h.apply(t, v, k1);
        tmp = v + (0.5 * dt) * k1;
        h.apply(t + 0.5 * dt, tmp, k2);
        tmp = v + (0.5 * dt) * k2;
        h.apply(t + 0.5 * dt, tmp, k3);
        tmp = v + dt * k3;
        h.apply(t + dt, tmp, k4);
        v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
        const double x2 = push_sample(t, v);
        if ((step + 1) % record_stride == 0 || step + 1 == n_steps) record(t, v, x2);
    }

    result.final_state.rho = Eigen::Map<const DenseMatrix>(v.data(), d, d);
    result.final_state.t = t;
    return result;
}

}  // namespace dicke::liouville
