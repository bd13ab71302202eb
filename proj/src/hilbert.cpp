#include "dicke/hilbert.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace dicke::hilbert {

DenseMatrix atom_ladder(const AtomSector& sector) {
    if (sector.n_atoms < 1) throw std::invalid_argument("atom_ladder: n_atoms must be >= 1");
    const int n = sector.n_atoms;
    DenseMatrix l = DenseMatrix::Zero(n + 1, n + 1);
    for (int k = 0; k < n; ++k)
        l(k + 1, k) = std::sqrt(double(k + 1) * double(n - k));
    return l;
}

AtomObservables atom_observables(const AtomSector& sector) {
    const DenseMatrix l = atom_ladder(sector);
    AtomObservables obs;
    obs.x = l + l.adjoint();
    obs.y = Complex(0, 1) * (l.adjoint() - l);
    const int n = sector.n_atoms;
    obs.z = DenseMatrix::Zero(n + 1, n + 1);
    obs.n_up = DenseMatrix::Zero(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
        obs.n_up(k, k) = double(k);
        obs.z(k, k) = double(2 * k - n);
    }
    return obs;
}

CavityOps cavity_ops(const CavitySpace& space) {
    if (space.n_phot_cut < 1) throw std::invalid_argument("cavity_ops: n_phot_cut must be >= 1");
    const int d = space.dim();
    CavityOps ops;
    ops.a = DenseMatrix::Zero(d, d);
    for (int n = 1; n < d; ++n) ops.a(n - 1, n) = std::sqrt(double(n));
    ops.a_dag = ops.a.adjoint();
    ops.number = ops.a_dag * ops.a;
    return ops;
}

DenseMatrix kron(const DenseMatrix& slow, const DenseMatrix& fast) {
    return Eigen::kroneckerProduct(slow, fast).eval();
}

OperatorMatrix kron(const OperatorMatrix& slow, const OperatorMatrix& fast) {
    if (slow.tag != SpaceTag::cavity || fast.tag != SpaceTag::atom)
        throw std::invalid_argument("kron: composite convention is cavity (slow) x atom (fast)");
    return OperatorMatrix{kron(slow.m, fast.m), SpaceTag::composite,
                          slow.hermitian && fast.hermitian};
}

void dump_matrix(std::ostream& out, const DenseMatrix& m, double drop_tol) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > drop_tol)
                out << i << ' ' << j << ' ' << m(i, j).real() << ' ' << m(i, j).imag() << '\n';
}

}  // namespace dicke::hilbert
