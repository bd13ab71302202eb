#pragma once

// Numerical kernels shared by all modules: complex eigensolvers (dense and
// shift-invert Arnoldi on sparse matrices), fixed/adaptive ODE steppers, the
// Euler-Maruyama step, and counter-based seeded RNG streams.

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dicke::numerics {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

struct EigResult {
    DenseVector values;
    DenseMatrix vectors;          // column k pairs with values(k); empty if not requested
    Eigen::VectorXd residuals;    // ||A v - lambda v|| / ||v||, relative to ||A||
};

// Full spectrum of a dense complex matrix. Residuals are always computed.
EigResult dense_eig(const DenseMatrix& a, bool with_vectors = true);

// k eigenvalues of a sparse complex matrix nearest the shift sigma, via
// Arnoldi iteration on (A - sigma I)^{-1} with a sparse LU factorization.
// Falls back to a perturbed shift if sigma hits an eigenvalue exactly.
EigResult shift_invert_eigs(const SparseMatrix& a, Complex sigma, int k,
                            double tol = 1e-9, int max_subspace = 0);

// --- ODE / SDE steppers -------------------------------------------------

// Classical fixed-step RK4. Rhs: (t, y) -> dy/dt, y any Eigen-like vector
// supporting axpy arithmetic.
template <class State, class Rhs>
State rk4_step(Rhs&& f, const State& y, double t, double dt) {
    State k1 = f(t, y);
    State k2 = f(t + 0.5 * dt, State(y + (0.5 * dt) * k1));
    State k3 = f(t + 0.5 * dt, State(y + (0.5 * dt) * k2));
    State k4 = f(t + dt, State(y + dt * k3));
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Embedded Cash-Karp 4(5) step. Returns the 5th-order solution and writes the
// embedded error estimate; the caller decides on acceptance/step control.
template <class State, class Rhs>
State rk45_step(Rhs&& f, const State& y, double t, double dt, double& err_norm) {
    const State k1 = f(t, y);
    const State k2 = f(t + dt / 5.0, State(y + dt * (1.0 / 5.0) * k1));
    const State k3 = f(t + 3.0 * dt / 10.0, State(y + dt * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2)));
    const State k4 = f(t + 3.0 * dt / 5.0,
                       State(y + dt * ((3.0 / 10.0) * k1 + (-9.0 / 10.0) * k2 + (6.0 / 5.0) * k3)));
    const State k5 = f(t + dt, State(y + dt * ((-11.0 / 54.0) * k1 + (5.0 / 2.0) * k2 +
                                               (-70.0 / 27.0) * k3 + (35.0 / 27.0) * k4)));
    const State k6 = f(t + 7.0 * dt / 8.0,
                       State(y + dt * ((1631.0 / 55296.0) * k1 + (175.0 / 512.0) * k2 +
                                       (575.0 / 13824.0) * k3 + (44275.0 / 110592.0) * k4 +
                                       (253.0 / 4096.0) * k5)));
    State y5 = y + dt * ((37.0 / 378.0) * k1 + (250.0 / 621.0) * k3 + (125.0 / 594.0) * k4 +
                         (512.0 / 1771.0) * k6);
    State y4 = y + dt * ((2825.0 / 27648.0) * k1 + (18575.0 / 48384.0) * k3 +
                         (13525.0 / 55296.0) * k4 + (277.0 / 14336.0) * k5 + (1.0 / 4.0) * k6);
    err_norm = (y5 - y4).norm();
    return y5;
}

// --- RNG streams --------------------------------------------------------

// Counter-based stream: splitmix64 over a state derived from
// (master_seed, stream_id). Distinct stream ids give independent,
// reproducible sequences; no global state.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    double uniform();           // [0, 1)
    double normal();            // standard normal, Box-Muller

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }
    result_type operator()() { return next_u64(); }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace dicke::numerics
