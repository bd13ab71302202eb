#pragma once

// Nonlinear atom-only mean-field equations for (phi_down, phi_up), limit-cycle
// detection on stroboscopic sections, the linearized 2x2 Floquet stability
// analysis, and the perturbative Mathieu threshold.

#include <utility>
#include <vector>

#include "dicke/model.hpp"
#include "dicke/numerics.hpp"

namespace dicke::meanfield {

using model::ModelParams;
using numerics::Complex;

struct MeanFieldState {
    Complex phi_down;
    Complex phi_up;

    double x() const { return 2.0 * std::real(std::conj(phi_up) * phi_down); }
    double y() const {
        return std::real(Complex(0, 1) * (std::conj(phi_down) * phi_up - std::conj(phi_up) * phi_down));
    }
    double z() const { return std::norm(phi_up) - std::norm(phi_down); }
    double norm2() const { return std::norm(phi_up) + std::norm(phi_down); }
};

// Interaction coefficient V0(t) and cooling rate V1(t).
double v0_coeff(const ModelParams& p, double t);
double v1_coeff(const ModelParams& p, double t);

struct MeanFieldDerivs {
    Complex d_down;
    Complex d_up;
};
MeanFieldDerivs meanfield_rhs(const MeanFieldState& s, double t, const ModelParams& p);

// Standard deterministic seed: one excitation, rest in the ground mode.
MeanFieldState standard_seed(int n_atoms);

struct MfRecord {
    double t;
    double x2;
    double x2_tav;
};

struct MfTrajectory {
    std::vector<MfRecord> records;
    std::vector<MeanFieldState> strobe;      // samples at t = k T
    std::vector<MeanFieldState> strobe_half; // samples at t = (k + 1/2) T
    MeanFieldState final_state;
    double period;
    int n_atoms;
};

// Fixed-step RK4; dt is snapped to an integer division of the drive period so
// the stroboscopic sections are exact. Aborts when the sphere constraint
// |X^2+Y^2+Z^2 - N^2| drifts beyond sphere_tol * N^2.
MfTrajectory integrate_meanfield(const MeanFieldState& s0, const ModelParams& p,
                                 double t_end, double dt, int record_stride = 1,
                                 double sphere_tol = 1e-4);

enum class CycleClass { fixed_point, cycle_T, cycle_2T, irregular };
const char* to_string(CycleClass c);

CycleClass classify_limit_cycle(const MfTrajectory& traj, const ModelParams& p,
                                double point_tol_frac = 1e-5);

struct PhaseDiagramCell {
    double g1_over_g0;
    double omega_over_2wres;
    double x2_tav_norm;  // <X^2>_tav / N^2 at t_eval
    CycleClass classification;
    bool ok;
};

std::vector<PhaseDiagramCell> phase_diagram(const ModelParams& p_base,
                                            const std::vector<double>& g1_over_g0_grid,
                                            const std::vector<double>& omega_over_2wres_grid,
                                            double t_eval, int threads = 1);

// Fourier blocks A^(m), m = -2..2, of the linearized (phi_up, phi_up^*) flow.
struct StabilityHarmonics {
    Eigen::Matrix2cd a[5];  // index m + 2
    const Eigen::Matrix2cd& block(int m) const { return a[m + 2]; }
};
StabilityHarmonics stability_harmonics(const ModelParams& p);

struct StabilityResult {
    std::vector<Complex> lambdas;  // all eigenvalues of the extended matrix
    double gamma_max;              // max Re
    double nu_fl;                  // |Im| of the dominant mode folded to [0, omega/2]
};
StabilityResult stability_exponents(const StabilityHarmonics& sh, double omega, int m_cut);

// Direct integration of x'' + 2 V1(t) x' + Delta (Delta - 2 V0(t)) x = 0;
// independent oracle for the stability exponents.
struct XupTrajectory {
    std::vector<double> t;
    std::vector<double> x;
};
XupTrajectory integrate_x_up(const ModelParams& p, double x0, double v0, double t_end,
                             double dt);

// Late-time exponential rate of an oscillatory trajectory: slope of
// log(window RMS) over windows of one oscillation period.
double log_envelope_rate(const XupTrajectory& traj, double window, double fit_start);

struct MathieuParams {
    double b;               // drive strength 2 delta_c g0 g1 / (delta_c^2 + kappa^2)
    double epsilon;         // omega - 2 omega_res
    double gamma0;
    double delta;
    double omega_res;
    double validity_ratio;  // max(gamma0, sqrt(Delta b)) / omega_res
};
MathieuParams mathieu_params(const ModelParams& p, double omega);

// (gamma_plus, gamma_minus); an imaginary square root contributes nothing to
// the real part (oscillatory branch).
std::pair<double, double> mathieu_exponents(const MathieuParams& mp);

}  // namespace dicke::meanfield
