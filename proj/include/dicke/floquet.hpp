#pragma once

// Extended Floquet-Lindblad matrix: block rows n in {-M_cut..M_cut} with
// block (n, n-m) = L_m - i n omega delta_{m,0} I. Eigenmodes near a target
// quasi-frequency, the finite-size corrected resonance, and the dissipative
// gap protocol.

#include <optional>

#include "dicke/liouville.hpp"

namespace dicke::floquet {

using liouville::SuperOperatorHarmonics;
using model::ModelParams;
using numerics::Complex;
using numerics::DenseMatrix;
using numerics::SparseMatrix;

struct FloquetMatrix {
    SparseMatrix mat;   // (2 m_cut + 1) d^2 square
    int m_cut = 0;
    int d = 0;          // base Hilbert dimension
    double omega = 0.0;
};

FloquetMatrix assemble(const SuperOperatorHarmonics& h, int m_cut);

struct FloquetMode {
    Complex lambda;                       // Im folded to [-omega/2, omega/2)
    std::vector<DenseMatrix> components;  // rho^(n), n = -m_cut..m_cut
    double residual;
};

// Fold an imaginary part into [-omega/2, omega/2).
double fold_imag(double im, double omega);
// Distance of im to target on the frequency circle (mod omega).
double circle_distance(double im, double target, double omega);

// k eigenmodes nearest `target`; dense diagonalization below `dense_limit`
// total dimension, shift-invert Arnoldi above.
std::vector<FloquetMode> eigs_near(const FloquetMatrix& fm, Complex target, int k,
                                   int dense_limit = 1024);

// Finite-size corrected resonance frequency from the m = 0 harmonic of the
// atom-only Liouvillian: Im of the slowest-decaying eigenvalue within a
// +-50% window of the mean-field omega_res.
double finite_size_resonance(const ModelParams& p, const hilbert::AtomSector& sector);

struct GapResult {
    double gamma;        // -Re(lambda) of the subharmonic mode
    double omega_used;   // 2 * finite-size resonance
    double im_lambda;    // folded Im of the selected mode
    double residual;
    bool widened_window; // fold tolerance had to be widened to find a candidate
};

// Dissipative gap at the subharmonic frequency Im(lambda) = omega/2 with
// omega = 2 omega_res'(N). `hint` carries (Re, Im - omega/2) of the mode
// selected at the previous N for continuity tracking.
GapResult dissipative_gap(const ModelParams& p, const hilbert::AtomSector& sector, int m_cut,
                          std::optional<Complex> hint = std::nullopt,
                          double fold_tol = 1e-6, double im_window = 0.05);

}  // namespace dicke::floquet
