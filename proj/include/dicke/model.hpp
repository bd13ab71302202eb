#pragma once

// Physical parameters of the driven dissipative Dicke model and all
// closed-form scalar quantities derived from them. Rates are stored in the
// kappa = 1 convention used throughout the CLI and fixtures.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dicke::model {

struct ModelParams {
    double delta_c = 1.0;   // cavity detuning
    double kappa = 1.0;     // cavity loss rate
    double delta = 0.1;     // atomic level splitting
    double g0 = 0.0;        // static coupling
    double g1 = 0.0;        // modulation amplitude
    double omega = 0.0;     // drive angular frequency
    int n_atoms = 1;

    // Validates invariants (kappa, delta_c, delta > 0; n_atoms >= 1;
    // g0, g1 >= 0). g0 > g_c is allowed here; operations that need the
    // resonance frequency reject it at the call site.
    static ModelParams create(double delta_c, double kappa, double delta,
                              double g0, double g1, double omega, int n_atoms);
};

// Static superradiance threshold g_c = sqrt(Delta (delta_c^2 + kappa^2) / (4 delta_c)).
double critical_coupling(const ModelParams& p);

// omega_res = Delta sqrt(1 - g0^2/g_c^2); throws std::domain_error for g0 > g_c.
double resonance_frequency(const ModelParams& p);

// gamma_0 = 4 kappa delta_c Delta g0^2 / (delta_c^2 + kappa^2)^2.
double damping_gamma0(const ModelParams& p);

// Modulation threshold at omega = 2 omega_res: g1_c = 2 kappa omega_res g0 / (delta_c^2 + kappa^2).
double threshold_g1c(const ModelParams& p);

// g1 value saturating the detuned stability inequality at drive frequency omega.
// Valid in the small-g1 perturbative regime; the caller is responsible for
// staying inside it (see mathieu_params validity ratio).
double detuned_threshold(const ModelParams& p, double omega);

// g(t) = g0 + g1 cos(omega t) and its time derivative.
double coupling_g(const ModelParams& p, double t);
double coupling_g_dot(const ModelParams& p, double t);

// Diagnostic ratio |delta_c - i kappa| / max(delta, omega, g0 + g1) for the
// fast-cavity validity condition; reported, never enforced.
double cavity_elimination_ratio(const ModelParams& p);

// Derived scalars cached in one shot; omega_res and g1_c are NaN when g0 > g_c.
struct DerivedScalars {
    double g_c;
    double omega_res;
    double gamma0;
    double g1_c;
};
DerivedScalars derived_scalars(const ModelParams& p);

// Soft regime checks (warn, not fail): subcritical drive g0 + g1 < g_c, and
// the fast-cavity ratio.
std::vector<std::string> regime_warnings(const ModelParams& p);

// Flat key-value configuration (lines of `key = value`, `#` comments).
// Accepted keys: delta_c, kappa, delta, g0, g1, omega, n_atoms, plus the
// relative forms g0_over_gc, g1_over_g0, omega_over_2wres. Giving both an
// absolute key and its relative form is an error.
ModelParams parse_params(std::istream& in);
ModelParams parse_params_file(const std::string& path);

}  // namespace dicke::model
