#pragma once

// Time-periodic Liouvillians as Fourier harmonics over one drive period:
// the full atom-cavity model and the atom-only effective model obtained by
// cavity elimination. Vectorization is column-stacking, so vec(A rho B) =
// (B^T kron A) vec(rho).

#include <functional>
#include <map>

#include "dicke/hilbert.hpp"
#include "dicke/model.hpp"
#include "dicke/numerics.hpp"

namespace dicke::liouville {

using model::ModelParams;
using numerics::Complex;
using numerics::DenseMatrix;
using numerics::DenseVector;
using numerics::SparseMatrix;

enum class ElimMode { expanded, exact };

struct ElimCoefficients {
    Complex c_plus;
    Complex c_minus;
    ElimMode mode;
};

// Expanded cavity-elimination coefficients:
// c_pm = -(1/sqrt(N)) [ g/(delta_c - i kappa) + i g_dot/(delta_c - i kappa)^2
//                       -+ Delta g/(delta_c - i kappa)^2 ].
ElimCoefficients c_pm_expanded(const ModelParams& p, double t);

// Exact coefficients from integrating i dc_pm/dt = (delta_c +- Delta - i kappa) c_pm
// + g(t)/sqrt(N) with c_pm(0) = 0. Validation path only; the atom-only
// Liouvillian is always assembled from the expanded form.
ElimCoefficients c_pm_exact(const ModelParams& p, double t_end, double dt);

enum class LiouvilleModel { full, atom_only };

struct SuperOperatorHarmonics {
    std::map<int, SparseMatrix> harmonics;  // m -> L_m, d^2 x d^2
    int dim = 0;                            // base Hilbert dimension d
    LiouvilleModel model = LiouvilleModel::atom_only;
    double omega = 0.0;

    int max_harmonic() const;
    // L(t) = sum_m L_m exp(i m omega t)
    SparseMatrix at_time(double t) const;
    // y = L(t) x without forming L(t)
    void apply(double t, const DenseVector& x, DenseVector& y) const;
};

// Harmonics m in {-1, 0, 1} of the full atom-cavity master equation.
SuperOperatorHarmonics build_full_harmonics(const ModelParams& p,
                                            const hilbert::AtomSector& sector,
                                            const hilbert::CavitySpace& cavity);

// Harmonics m in {-2..2} of the atom-only master equation, assembled
// analytically from the expanded elimination coefficients.
SuperOperatorHarmonics build_atom_only_harmonics(const ModelParams& p,
                                                 const hilbert::AtomSector& sector);

struct DensityMatrix {
    DenseMatrix rho;
    double t = 0.0;
};

struct EvolveRecord {
    double t;
    double x2;        // <X^2>
    double x2_tav;    // sliding one-period average of <X^2>
    double trace_err; // |tr(rho) - 1|
};

struct EvolveResult {
    std::vector<EvolveRecord> records;
    DensityMatrix final_state;
};

using EvolveHook = std::function<void(double t, const DenseMatrix& rho)>;

// Fixed-step RK4 integration of d rho/dt = L(t) rho. Records <X^2> for the
// supplied observable (already squared) and its one-period sliding average.
// Aborts when the trace drifts beyond trace_tol.
EvolveResult evolve_density(const SuperOperatorHarmonics& h, const DensityMatrix& rho0,
                            double t_end, double dt, const DenseMatrix& x2_op,
                            int record_stride = 1, const EvolveHook& hook = nullptr,
                            double trace_tol = 1e-6);

// Superoperator building blocks (column-stacking convention).
SparseMatrix spre(const SparseMatrix& a);                          // vec(A rho)
SparseMatrix spost(const SparseMatrix& b);                         // vec(rho B)
SparseMatrix ssandwich(const SparseMatrix& a, const SparseMatrix& b); // vec(A rho B^dag)

}  // namespace dicke::liouville
