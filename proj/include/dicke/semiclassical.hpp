#pragma once

// Stochastic semiclassical trajectories of the coupled cavity quadratures and
// collective spin, with vacuum noise entering the quadratures only.
// Ensemble moments, two-time correlations C1(t, t0), and spectra S1(nu).

#include <cstdint>
#include <vector>

#include "dicke/model.hpp"
#include "dicke/numerics.hpp"

namespace dicke::semiclassical {

using model::ModelParams;
using numerics::Complex;
using numerics::RngStream;

struct SemiclassicalState {
    double a_x, a_p;    // cavity quadratures
    double x, y, z;     // collective spin
};

struct EnsembleConfig {
    int n_traj = 1000;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    double t_end = 1000.0;
    int record_stride = 100;
    int threads = 1;

    void validate(const ModelParams& p) const;
};

// Gaussian initialization: a_x, a_p ~ N(0,1); X, Y ~ N(0, N); Z = -N exactly.
SemiclassicalState sample_initial(const ModelParams& p, RngStream& rng);

// One Euler-Maruyama step; noise sqrt(2 kappa dt) N(0,1) on a_x and a_p only.
void step(SemiclassicalState& s, const ModelParams& p, double t, double dt, RngStream& rng);

struct MomentSeries {
    std::vector<double> t;
    std::vector<double> x2_mean;       // <X^2>
    std::vector<double> x2_tav;        // one-period sliding average of <X^2>
    std::vector<double> photon_proxy;  // <a_x^2 + a_p^2>
    int n_excluded = 0;
};

MomentSeries run_ensemble(const ModelParams& p, const EnsembleConfig& cfg);

struct C1Series {
    std::vector<double> t;   // lag grid
    std::vector<double> c1;  // <X(t + t0) X(t0)>
    double t0;
    int n_excluded = 0;
};

// C1 estimated from a fresh ensemble run up to t0 + t_max; t0 is snapped to
// the record grid.
C1Series two_time_correlation(const ModelParams& p, const EnsembleConfig& cfg, double t0,
                              double t_max);

struct SpectrumResult {
    std::vector<double> nu;
    std::vector<double> abs_s1;
    std::vector<double> re_s1;
    std::vector<double> im_s1;
};

// S1(nu) = integral_0^{t_max} dt exp(i nu t) C1(t, t0), plain trapezoidal
// quadrature, no window function.
SpectrumResult spectrum_s1(const C1Series& c1, double t_max, const std::vector<double>& nu_grid);

}  // namespace dicke::semiclassical
