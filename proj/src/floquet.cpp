#include "dicke/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dicke::floquet {

FloquetMatrix assemble(const SuperOperatorHarmonics& h, int m_cut) {
    if (m_cut < h.max_harmonic())
        throw std::invalid_argument("assemble: m_cut smaller than the highest nonzero harmonic");
    const Eigen::Index d2 = Eigen::Index(h.dim) * h.dim;
    const int blocks = 2 * m_cut + 1;
    const Eigen::Index dim = d2 * blocks;

    std::vector<numerics::Triplet> trips;
    std::size_t nnz = 0;
    for (const auto& [m, lm] : h.harmonics) nnz += std::size_t(lm.nonZeros());
    trips.reserve(nnz * std::size_t(blocks) + std::size_t(dim));

    for (int n = -m_cut; n <= m_cut; ++n) {
        const Eigen::Index row0 = Eigen::Index(n + m_cut) * d2;
        for (const auto& [m, lm] : h.harmonics) {
            const int nc = n - m;
            if (nc < -m_cut || nc > m_cut) continue;
            const Eigen::Index col0 = Eigen::Index(nc + m_cut) * d2;
            for (int outer = 0; outer < lm.outerSize(); ++outer)
                for (SparseMatrix::InnerIterator it(lm, outer); it; ++it)
                    trips.emplace_back(row0 + it.row(), col0 + it.col(), it.value());
        }
        const Complex diag = Complex(0.0, -double(n) * h.omega);
        if (n != 0)
            for (Eigen::Index i = 0; i < d2; ++i)
                trips.emplace_back(row0 + i, row0 + i, diag);
    }

    FloquetMatrix fm;
    fm.mat.resize(dim, dim);
    fm.mat.setFromTriplets(trips.begin(), trips.end());
    fm.mat.makeCompressed();
    fm.m_cut = m_cut;
    fm.d = h.dim;
    fm.omega = h.omega;
    return fm;
}

double fold_imag(double im, double omega) {
    if (omega <= 0.0) return im;
    return im - omega * std::floor(im / omega + 0.5);
}

double circle_distance(double im, double target, double omega) {
    if (omega <= 0.0) return std::abs(im - target);
    const double delta = fold_imag(im - target, omega);
    return std::abs(delta);
}

namespace {

FloquetMode make_mode(const FloquetMatrix& fm, Complex lambda, double residual,
                      const numerics::DenseVector& vec) {
    FloquetMode mode;
    mode.lambda = Complex(lambda.real(), fold_imag(lambda.imag(), fm.omega));
    mode.residual = residual;
    const Eigen::Index d2 = Eigen::Index(fm.d) * fm.d;
    mode.components.reserve(2 * fm.m_cut + 1);
    for (int n = -fm.m_cut; n <= fm.m_cut; ++n) {
        const Eigen::Index off = Eigen::Index(n + fm.m_cut) * d2;
        mode.components.push_back(
            Eigen::Map<const DenseMatrix>(vec.data() + off, fm.d, fm.d));
    }
    return mode;
}

}  // namespace

std::vector<FloquetMode> eigs_near(const FloquetMatrix& fm, Complex target, int k,
                                   int dense_limit) {
    if (k < 1) throw std::invalid_argument("eigs_near: k must be >= 1");
    const Eigen::Index dim = fm.mat.rows();

    std::vector<FloquetMode> modes;
    if (dim <= dense_limit) {
        const auto res = numerics::dense_eig(DenseMatrix(fm.mat));
        std::vector<int> order(res.values.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(res.values(a) - target) < std::abs(res.values(b) - target);
        });
        const int take = std::min<int>(k, int(order.size()));
        for (int i = 0; i < take; ++i) {
            const int idx = order[i];
            modes.push_back(make_mode(fm, res.values(idx), res.residuals(idx),
                                      res.vectors.col(idx)));
        }
    } else {
        const auto res = numerics::shift_invert_eigs(fm.mat, target, k);
        for (Eigen::Index i = 0; i < res.values.size(); ++i)
            modes.push_back(make_mode(fm, res.values(i), res.residuals(i), res.vectors.col(i)));
    }
    return modes;
}

double finite_size_resonance(const ModelParams& p, const hilbert::AtomSector& sector) {
    const double wres = model::resonance_frequency(p);
    const auto h = liouville::build_atom_only_harmonics(p, sector);
    const SparseMatrix& l0 = h.harmonics.at(0);

    std::vector<Complex> values;
    if (l0.rows() <= 1024) {
        const auto res = numerics::dense_eig(DenseMatrix(l0), false);
        values.assign(res.values.data(), res.values.data() + res.values.size());
    } else {
        const auto res = numerics::shift_invert_eigs(l0, Complex(0.0, wres), 24);
        values.assign(res.values.data(), res.values.data() + res.values.size());
    }

    bool found = false;
    Complex best;
    for (const Complex& lam : values) {
        const double im = lam.imag();
        if (im < 0.5 * wres || im > 1.5 * wres) continue;
        if (!found || lam.real() > best.real() ||
            (lam.real() == best.real() && std::abs(im - wres) < std::abs(best.imag() - wres))) {
            best = lam;
            found = true;
        }
    }
    if (!found)
        throw std::runtime_error("finite_size_resonance: no eigenvalue within 50% of omega_res");
    return best.imag();
}

GapResult dissipative_gap(const ModelParams& p, const hilbert::AtomSector& sector, int m_cut,
                          std::optional<Complex> hint, double fold_tol, double im_window) {
    const double wres_n = finite_size_resonance(p, sector);
    ModelParams pr = p;
    pr.omega = 2.0 * wres_n;

    const auto h = liouville::build_atom_only_harmonics(pr, sector);
    const auto fm = assemble(h, m_cut);
    const Complex target(0.0, 0.5 * pr.omega);
    auto modes = eigs_near(fm, target, 12);

    // The steady-state branch (Im ~ 0) is not a gap candidate.
    struct Candidate {
        Complex lambda;
        double residual;
        double dist;
    };
    auto collect = [&](double tol_frac) {
        std::vector<Candidate> cands;
        for (const auto& mode : modes) {
            const double dist = circle_distance(mode.lambda.imag(), 0.5 * pr.omega, pr.omega);
            if (dist > tol_frac * pr.omega) continue;
            // dedupe Floquet copies / conjugate partner: same Re and same circle
            // distance describe one physical mode
            bool dup = false;
            for (const auto& c : cands)
                if (std::abs(c.lambda.real() - mode.lambda.real()) < 1e-9 &&
                    std::abs(c.dist - dist) < 1e-9)
                    dup = true;
            if (!dup) cands.push_back({mode.lambda, mode.residual, dist});
        }
        return cands;
    };

    bool widened = false;
    auto cands = collect(fold_tol);
    if (cands.empty()) {
        widened = true;
        cands = collect(im_window);
    }
    if (cands.empty())
        throw std::runtime_error("dissipative_gap: no mode near Im(lambda) = omega/2");

    std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
        if (hint) {
            const double da = std::abs(a.lambda.real() - hint->real()) +
                              circle_distance(a.lambda.imag(), 0.5 * pr.omega + hint->imag(), pr.omega);
            const double db = std::abs(b.lambda.real() - hint->real()) +
                              circle_distance(b.lambda.imag(), 0.5 * pr.omega + hint->imag(), pr.omega);
            return da < db;
        }
        return std::abs(a.lambda.real()) < std::abs(b.lambda.real());
    });
    if (!hint && cands.size() > 1 &&
        std::abs(std::abs(cands[0].lambda.real()) - std::abs(cands[1].lambda.real())) < 1e-10) {
        std::ostringstream os;
        os << "dissipative_gap: ambiguous mode identification, candidates " << cands[0].lambda
           << " and " << cands[1].lambda;
        throw std::runtime_error(os.str());
    }

    GapResult out;
    out.gamma = -cands[0].lambda.real();
    out.omega_used = pr.omega;
    out.im_lambda = cands[0].lambda.imag();
    out.residual = cands[0].residual;
    out.widened_window = widened;
    return out;
}

}  // namespace dicke::floquet
