#pragma once

// Fixed-N two-mode atomic sector (Schwinger-boson Dicke sector), truncated
// cavity Fock space, and the operator matrices used by the Liouvillians.
// Basis conventions: atomic states labeled by n_up = 0..N ascending; the
// composite space is cavity-major (cavity index slow, atom index fast).

#include <iosfwd>

#include "dicke/numerics.hpp"

namespace dicke::hilbert {

using numerics::Complex;
using numerics::DenseMatrix;

struct AtomSector {
    int n_atoms;
    int dim() const { return n_atoms + 1; }
};

struct CavitySpace {
    int n_phot_cut;
    int dim() const { return n_phot_cut + 1; }
};

enum class SpaceTag { atom, cavity, composite };

struct OperatorMatrix {
    DenseMatrix m;
    SpaceTag tag;
    bool hermitian;
};

// Collective ladder b_up^dag b_down: <k+1| L |k> = sqrt((k+1)(N-k)).
DenseMatrix atom_ladder(const AtomSector& sector);

struct AtomObservables {
    DenseMatrix x;      // L + L^dag
    DenseMatrix y;      // i (L^dag - L)
    DenseMatrix z;      // n_up - n_down
    DenseMatrix n_up;
};
AtomObservables atom_observables(const AtomSector& sector);

struct CavityOps {
    DenseMatrix a;
    DenseMatrix a_dag;
    DenseMatrix number;
};
CavityOps cavity_ops(const CavitySpace& space);

// Tensor product, slow factor first. The tagged overload enforces the
// cavity (slow) x atom (fast) composite convention.
DenseMatrix kron(const DenseMatrix& slow, const DenseMatrix& fast);
OperatorMatrix kron(const OperatorMatrix& slow, const OperatorMatrix& fast);

// Text dump, one `row col re im` line per nonzero entry; for oracle
// cross-checks outside the process.
void dump_matrix(std::ostream& out, const DenseMatrix& m, double drop_tol = 0.0);

}  // namespace dicke::hilbert
