#include "dicke/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

namespace dicke::numerics {

namespace {

Eigen::VectorXd residuals_for(const DenseMatrix& a, const DenseVector& values,
                              const DenseMatrix& vectors) {
    const double scale = std::max(a.norm(), 1e-300);
    Eigen::VectorXd res(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const auto v = vectors.col(i);
        res(i) = (a * v - values(i) * v).norm() / (v.norm() * scale);
    }
    return res;
}

}  // namespace

EigResult dense_eig(const DenseMatrix& a, bool with_vectors) {
    if (a.rows() != a.cols()) throw std::invalid_argument("dense_eig: matrix not square");
    Eigen::ComplexEigenSolver<DenseMatrix> solver(a, true);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dense_eig: QR iteration did not converge");
    EigResult out;
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    out.residuals = residuals_for(a, out.values, out.vectors);
    if (!with_vectors) out.vectors.resize(0, 0);
    return out;
}

namespace {

// One Arnoldi pass of dimension m on op(v); returns basis V (n x (m+1)) and
// Hessenberg H ((m+1) x m). Stops early on breakdown.
struct ArnoldiResult {
    DenseMatrix v;
    DenseMatrix h;
    int steps;
};

template <class Op>
ArnoldiResult arnoldi(const Op& op, Eigen::Index n, int m, RngStream& rng) {
    DenseMatrix v(n, m + 1);
    DenseMatrix h = DenseMatrix::Zero(m + 1, m);
    DenseVector v0(n);
    for (Eigen::Index i = 0; i < n; ++i) v0(i) = Complex(rng.normal(), rng.normal());
    v.col(0) = v0 / v0.norm();
    int j = 0;
    for (; j < m; ++j) {
        DenseVector w = op(v.col(j));
        // modified Gram-Schmidt with one reorthogonalization pass
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) {
                Complex c = v.col(i).dot(w);
                h(i, j) += c;
                w -= c * v.col(i);
            }
        }
        const double beta = w.norm();
        h(j + 1, j) = beta;
        if (beta < 1e-14) { ++j; break; }
        v.col(j + 1) = w / beta;
    }
    return {std::move(v), std::move(h), j};
}

}  // namespace

EigResult shift_invert_eigs(const SparseMatrix& a, Complex sigma, int k,
                            double tol, int max_subspace) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("shift_invert_eigs: matrix not square");
    if (k < 1) throw std::invalid_argument("shift_invert_eigs: k must be >= 1");
    if (k >= n) throw std::invalid_argument("shift_invert_eigs: k too large for dimension");

    SparseMatrix id(n, n);
    id.setIdentity();

    Eigen::SparseLU<SparseMatrix> lu;
    Complex shift = sigma;
    const double scale = std::max(1.0, std::abs(sigma));
    for (int attempt = 0;; ++attempt) {
        SparseMatrix shifted = a - shift * id;
        shifted.makeCompressed();
        lu.compute(shifted);
        if (lu.info() == Eigen::Success) break;
        if (attempt >= 2)
            throw std::runtime_error("shift_invert_eigs: singular factorization at shift");
        shift += Complex(1e-8, 1e-8) * scale * double(attempt + 1);
    }

    auto op = [&](const DenseVector& x) -> DenseVector { return lu.solve(x); };

    RngStream rng(0x5eed5eedULL, 7);
    const double anorm = std::max(a.norm(), 1e-300);

    int m = std::max(3 * k + 20, 40);
    if (max_subspace > 0) m = std::min(m, max_subspace);
    m = std::min<int>(m, int(n) - 1);

    EigResult best;
    double best_max_res = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 3; ++round) {
        ArnoldiResult ar = arnoldi(op, n, m, rng);
        const int steps = ar.steps;
        DenseMatrix hs = ar.h.topLeftCorner(steps, steps);
        Eigen::ComplexEigenSolver<DenseMatrix> hes(hs, true);
        if (hes.info() != Eigen::Success)
            throw std::runtime_error("shift_invert_eigs: Hessenberg eigensolve failed");

        // Ritz values of (A - sigma I)^{-1}; largest |theta| are nearest the shift.
        std::vector<int> order(steps);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int i, int j) {
            return std::abs(hes.eigenvalues()(i)) > std::abs(hes.eigenvalues()(j));
        });

        const int take = std::min(k, steps);
        EigResult out;
        out.values.resize(take);
        out.vectors.resize(n, take);
        out.residuals.resize(take);
        double max_res = 0.0;
        for (int i = 0; i < take; ++i) {
            const int idx = order[i];
            const Complex theta = hes.eigenvalues()(idx);
            const Complex lambda = shift + 1.0 / theta;
            DenseVector x = ar.v.leftCols(steps) * hes.eigenvectors().col(idx);
            x /= x.norm();
            out.values(i) = lambda;
            out.vectors.col(i) = x;
            out.residuals(i) = (a * x - lambda * x).norm() / anorm;
            max_res = std::max(max_res, out.residuals(i));
        }
        if (max_res < best_max_res) {
            best = out;
            best_max_res = max_res;
        }
        if (best_max_res < tol || steps < m) return best;
        m = std::min<int>(2 * m, int(n) - 1);
        if (max_subspace > 0) m = std::min(m, max_subspace);
    }
    if (best_max_res > std::sqrt(tol))
        throw std::runtime_error("shift_invert_eigs: no convergence, best residual " +
                                 std::to_string(best_max_res));
    return best;
}

// --- RngStream ------------------------------------------------------------

namespace {
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
    // key mixing: run the master seed and stream id through the mixer so that
    // nearby (seed, id) pairs land in unrelated regions of the sequence
    std::uint64_t s = master_seed;
    std::uint64_t a = splitmix64(s);
    s ^= stream_id * 0xda942042e4dd58b5ULL;
    std::uint64_t b = splitmix64(s);
    state_ = a ^ (b + 0x9e3779b97f4a7c15ULL);
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do { u1 = uniform(); } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

}  // namespace dicke::numerics
