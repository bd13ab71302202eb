#include "doctest.h"

#include <cmath>

#include "dicke/semiclassical.hpp"

using namespace dicke::semiclassical;
using dicke::model::ModelParams;
using dicke::numerics::RngStream;

namespace {

ModelParams paper_point(int n, double g1_frac, double omega_frac = 1.0) {
    ModelParams p = ModelParams::create(1.0, 1.0, 0.1, 0.0, 0.0, 0.0, n);
    p.g0 = 0.5 * dicke::model::critical_coupling(p);
    p.g1 = g1_frac * p.g0;
    p.omega = omega_frac * 2.0 * dicke::model::resonance_frequency(p);
    return p;
}

}  // namespace

TEST_CASE("initial sampling: quantum-matched moments, Z pinned to -N") {
    const auto p = paper_point(50, 0.0);
    RngStream rng(31, 0);
    double sx2 = 0.0, sy2 = 0.0, sax2 = 0.0, sx = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_initial(p, rng);
        CHECK(s.z == -50.0);
        sx += s.x;
        sx2 += s.x * s.x;
        sy2 += s.y * s.y;
        sax2 += s.a_x * s.a_x;
    }
    CHECK(std::abs(sx / n) < 3.0 * std::sqrt(50.0 / n));  // 3 sigma
    CHECK(sx2 / n == doctest::Approx(50.0).epsilon(0.05));
    CHECK(sy2 / n == doctest::Approx(50.0).epsilon(0.05));
    CHECK(sax2 / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("decoupled spin rotates rigidly; cavity relaxes to vacuum variance") {
    auto p = paper_point(20, 0.0);
    p.g0 = 0.0;
    p.omega = 0.0;
    EnsembleConfig cfg;
    cfg.n_traj = 2000;
    cfg.dt = 2e-3;
    cfg.seed = 7;
    cfg.t_end = 40.0;
    cfg.record_stride = 500;
    cfg.threads = 4;
    const auto res = run_ensemble(p, cfg);
    CHECK(res.n_excluded == 0);

    for (std::size_t i = 0; i < res.t.size(); ++i)
        CHECK(res.x2_mean[i] == doctest::Approx(20.0).epsilon(0.10));
    // stationary <a_x^2 + a_p^2> of the damped, driven-by-vacuum cavity is 2
    CHECK(res.photon_proxy.back() == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("ensemble is deterministic in the seed and thread-count independent") {
    const auto p = paper_point(10, 0.2);
    EnsembleConfig cfg;
    cfg.n_traj = 64;
    cfg.dt = 5e-4;
    cfg.seed = 11;
    cfg.t_end = 5.0;
    cfg.record_stride = 1000;
    cfg.threads = 1;
    const auto a = run_ensemble(p, cfg);
    cfg.threads = 4;
    const auto b = run_ensemble(p, cfg);
    REQUIRE(a.x2_mean.size() == b.x2_mean.size());
    for (std::size_t i = 0; i < a.x2_mean.size(); ++i)
        CHECK(a.x2_mean[i] == doctest::Approx(b.x2_mean[i]).epsilon(1e-12));

    cfg.seed = 12;
    const auto c = run_ensemble(p, cfg);
    CHECK(c.x2_mean.back() != a.x2_mean.back());
}

TEST_CASE("spin length drifts only at the integrator's order") {
    const auto p = paper_point(10, 0.2);
    RngStream rng(3, 5);
    SemiclassicalState s = sample_initial(p, rng);
    const double r0 = s.x * s.x + s.y * s.y + s.z * s.z;
    const double dt = 1e-4;
    for (int i = 0; i < 100000; ++i) step(s, p, i * dt, dt, rng);  // t = 10
    const double r1 = s.x * s.x + s.y * s.y + s.z * s.z;
    CHECK(std::abs(r1 - r0) / r0 < 1e-3);
}

TEST_CASE("step-size guard rejects unresolved dynamics") {
    const auto p = paper_point(10, 0.2);
    EnsembleConfig cfg;
    cfg.dt = 0.5;
    CHECK_THROWS(cfg.validate(p));
}

TEST_CASE("two-time correlation starts at the equal-time second moment") {
    const auto p = paper_point(20, 0.2);
    EnsembleConfig cfg;
    cfg.n_traj = 200;
    cfg.dt = 1e-3;
    cfg.seed = 21;
    cfg.record_stride = 100;
    cfg.threads = 4;
    cfg.t_end = 30.0;

    const double t0 = 20.0;  // multiple of dt * record_stride
    const auto c1 = two_time_correlation(p, cfg, t0, 10.0);
    CHECK(c1.t0 == doctest::Approx(t0).epsilon(1e-12));
    CHECK(c1.t.front() == 0.0);

    const auto mom = run_ensemble(p, cfg);
    double x2_at_t0 = 0.0;
    for (std::size_t i = 0; i < mom.t.size(); ++i)
        if (std::abs(mom.t[i] - t0) < 1e-9) x2_at_t0 = mom.x2_mean[i];
    CHECK(c1.c1.front() == doctest::Approx(x2_at_t0).epsilon(1e-10));
}

TEST_CASE("spectrum of a synthetic cosine peaks at its frequency") {
    C1Series c1;
    const double nu0 = 0.30, dt = 0.05, t_max = 400.0;
    for (double t = 0.0; t <= t_max + 1e-9; t += dt) {
        c1.t.push_back(t);
        c1.c1.push_back(std::cos(nu0 * t));
    }
    c1.t0 = 0.0;

    std::vector<double> grid;
    for (double nu = 0.05; nu <= 0.6; nu += 0.005) grid.push_back(nu);
    const auto s = spectrum_s1(c1, t_max, grid);

    std::size_t peak = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (s.abs_s1[i] > s.abs_s1[peak]) peak = i;
    CHECK(grid[peak] == doctest::Approx(nu0).epsilon(0.02));
    // half the record length, the cosine's self-overlap
    CHECK(s.abs_s1[peak] == doctest::Approx(0.5 * t_max).epsilon(0.05));
}
