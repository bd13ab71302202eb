#include "doctest.h"

#include <cmath>

#include "dicke/meanfield.hpp"

using namespace dicke::meanfield;
using dicke::model::ModelParams;
using dicke::numerics::Complex;

namespace {

ModelParams paper_point(int n, double g1_frac, double omega_frac = 1.0) {
    ModelParams p = ModelParams::create(1.0, 1.0, 0.1, 0.0, 0.0, 0.0, n);
    p.g0 = 0.5 * dicke::model::critical_coupling(p);
    p.g1 = g1_frac * p.g0;
    p.omega = omega_frac * 2.0 * dicke::model::resonance_frequency(p);
    return p;
}

}  // namespace

TEST_CASE("interaction coefficients: closed forms and zero-coupling limit") {
    auto p = paper_point(10, 0.0);
    const double d2k2 = 2.0;
    CHECK(v0_coeff(p, 0.0) == doctest::Approx(2.0 * p.g0 * p.g0 / d2k2).epsilon(1e-12));
    CHECK(v1_coeff(p, 0.0) ==
          doctest::Approx(4.0 * 0.1 * p.g0 * p.g0 / (d2k2 * d2k2)).epsilon(1e-12));
    // static V1 is exactly the linear damping rate
    CHECK(v1_coeff(p, 0.0) == doctest::Approx(dicke::model::damping_gamma0(p)).epsilon(1e-12));

    p.g0 = 0.0;
    CHECK(v0_coeff(p, 1.3) == 0.0);
    CHECK(v1_coeff(p, 1.3) == 0.0);
}

TEST_CASE("fully inverted-free configurations are fixed points") {
    const auto p = paper_point(10, 0.2);
    const MeanFieldState down_only{Complex(std::sqrt(10.0), 0.0), Complex(0.0, 0.0)};
    const auto d = meanfield_rhs(down_only, 0.7, p);
    CHECK(std::abs(d.d_down) < 1e-14);
    CHECK(std::abs(d.d_up) < 1e-14);
}

TEST_CASE("free atoms: phi_up rotates at Delta, Bloch vector precesses") {
    auto p = paper_point(4, 0.0);
    p.g0 = 0.0;
    p.omega = 0.0;
    const MeanFieldState s0 = standard_seed(4);
    const auto traj = integrate_meanfield(s0, p, 50.0, 0.05, 1);
    const double phase = -p.delta * 50.0;
    const Complex expected = s0.phi_up * std::exp(Complex(0.0, phase));
    CHECK(std::abs(traj.final_state.phi_up - expected) < 1e-8);
    CHECK(std::abs(traj.final_state.phi_down - s0.phi_down) < 1e-8);
    CHECK(traj.final_state.x() == doctest::Approx(s0.x() * std::cos(phase)).epsilon(1e-6));
}

TEST_CASE("integration conserves the norm and the Bloch sphere") {
    const auto p = paper_point(100, 0.2);
    const auto traj = integrate_meanfield(standard_seed(100), p, 500.0, 0.1, 100);
    const double n2 = 100.0 * 100.0;
    CHECK(traj.final_state.norm2() == doctest::Approx(100.0).epsilon(1e-9));
    const auto& f = traj.final_state;
    CHECK(f.x() * f.x() + f.y() * f.y() + f.z() * f.z() == doctest::Approx(n2).epsilon(1e-9));
    CHECK(!traj.strobe.empty());
    CHECK(traj.strobe_half.size() >= traj.strobe.size() - 2);
}

TEST_CASE("step-size guard rejects unresolved drives") {
    const auto p = paper_point(10, 0.2);
    CHECK_THROWS(integrate_meanfield(standard_seed(10), p, 10.0, 2.0, 1));
}

TEST_CASE("stability harmonics: coefficient structure at omega = 0") {
    auto p = paper_point(10, 0.4);
    p.omega = 0.0;  // strips the retardation phases; V0 becomes real
    const auto sh = stability_harmonics(p);
    const double d2k2 = 2.0;
    const double g0 = p.g0, g1 = p.g1;

    // m = 0 carries the g1^2/2 time average
    const double gsq0 = g0 * g0 + 0.5 * g1 * g1;
    const double v00 = 2.0 * gsq0 / d2k2;
    CHECK(sh.block(0)(0, 1).imag() == doctest::Approx(v00).epsilon(1e-12));
    CHECK(sh.block(0)(0, 0).imag() == doctest::Approx(-(p.delta - v00)).epsilon(1e-12));

    // V1 ratios across harmonics follow the g-products
    const double v1_1 = sh.block(1)(0, 1).real();
    const double v1_2 = sh.block(2)(0, 1).real();
    CHECK(v1_2 / v1_1 == doctest::Approx(g1 / (4.0 * g0)).epsilon(1e-10));
    CHECK(sh.block(1)(0, 1).imag() == doctest::Approx(2.0 * g0 * g1 / d2k2).epsilon(1e-12));

    // omega = 0 blocks are conjugation-symmetric between +-m
    for (int m : {1, 2}) CHECK((sh.block(m) - sh.block(-m)).norm() < 1e-14);
}

TEST_CASE("static stability: gamma_max equals -gamma0 below threshold") {
    const auto p = paper_point(10, 0.0);
    const auto sh = stability_harmonics(p);
    const auto res = stability_exponents(sh, p.omega, 2);
    CHECK(res.gamma_max == doctest::Approx(-dicke::model::damping_gamma0(p)).epsilon(1e-8));
    CHECK_THROWS(stability_exponents(sh, p.omega, 1));
}

TEST_CASE("stability exponents bracket the modulation threshold") {
    auto p = paper_point(10, 0.0);
    const double g1c = dicke::model::threshold_g1c(p);

    p.g1 = 0.95 * g1c;
    CHECK(stability_exponents(stability_harmonics(p), p.omega, 3).gamma_max < 0.0);
    p.g1 = 1.05 * g1c;
    const auto above = stability_exponents(stability_harmonics(p), p.omega, 3);
    CHECK(above.gamma_max > 0.0);
    // parametric instability responds at half the drive frequency
    CHECK(above.nu_fl == doctest::Approx(0.5 * p.omega).epsilon(1e-3));

    // bisect the sign change: within 2% of the closed-form threshold
    double lo = 0.5 * g1c, hi = 1.5 * g1c;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        p.g1 = mid;
        if (stability_exponents(stability_harmonics(p), p.omega, 3).gamma_max > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(g1c).epsilon(0.02));
}

TEST_CASE("direct second-order integration reproduces the Floquet growth rate") {
    auto p = paper_point(10, 0.0);
    const double g1c = dicke::model::threshold_g1c(p);
    p.g1 = 2.0 * g1c;

    const double gamma_fl = stability_exponents(stability_harmonics(p), p.omega, 3).gamma_max;
    CHECK(gamma_fl > 0.0);

    const auto traj = integrate_x_up(p, 1e-3, 0.0, 4000.0, 0.05);
    const double window = 2.0 * M_PI / (0.5 * p.omega);
    const double rate = log_envelope_rate(traj, window, 500.0);
    CHECK(rate == doctest::Approx(gamma_fl).epsilon(0.03));
}

TEST_CASE("Mathieu reduction: parameters and exponents") {
    auto p = paper_point(10, 0.0);
    const double g1c = dicke::model::threshold_g1c(p);
    const double wres = dicke::model::resonance_frequency(p);

    p.g1 = g1c;
    const auto mp = mathieu_params(p, 2.0 * wres);
    CHECK(mp.epsilon == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mp.b == doctest::Approx(2.0 * p.g0 * p.g1 / 2.0).epsilon(1e-12));
    // exactly at threshold the growing branch is marginal
    const auto [gp, gm] = mathieu_exponents(mp);
    CHECK(gp == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(gm == doctest::Approx(-2.0 * mp.gamma0).epsilon(1e-10));

    // far detuned: imaginary root, both branches damped at gamma0
    const auto far = mathieu_exponents(mathieu_params(p, 2.0 * wres + 10.0 * mp.b));
    CHECK(far.first == doctest::Approx(-mp.gamma0));
    CHECK(far.second == doctest::Approx(-mp.gamma0));
}

TEST_CASE("Mathieu vs Floquet exponents agree near resonance") {
    auto p = paper_point(10, 0.0);
    const double g1c = dicke::model::threshold_g1c(p);
    for (double frac : {1.5, 2.0, 3.0}) {
        p.g1 = frac * g1c;
        const double mathieu = mathieu_exponents(mathieu_params(p, p.omega)).first;
        const double fl = stability_exponents(stability_harmonics(p), p.omega, 3).gamma_max;
        CHECK(std::abs(mathieu - fl) < 0.10 * std::abs(fl));
    }
}

TEST_CASE("limit-cycle classification across the phase diagram lobes") {
    // below threshold: relaxation to the normal fixed point
    {
        const auto p = paper_point(100, 0.05);
        const double period = 2.0 * M_PI / p.omega;
        // slow (~1e-3) subthreshold decay: a long record is needed before the
        // stroboscopic points settle below the classification tolerance
        const auto traj =
            integrate_meanfield(standard_seed(100), p, 800.0 * period, 0.2, 1 << 30);
        CHECK(classify_limit_cycle(traj, p) == CycleClass::fixed_point);
    }
    // period-doubled response at the main lobe
    {
        const auto p = paper_point(100, 0.2);
        const double period = 2.0 * M_PI / p.omega;
        const auto traj =
            integrate_meanfield(standard_seed(100), p, 300.0 * period, 0.2, 1 << 30);
        CHECK(classify_limit_cycle(traj, p) == CycleClass::cycle_2T);
    }
    // classification needs a long stroboscopic record
    {
        const auto p = paper_point(100, 0.2);
        const double period = 2.0 * M_PI / p.omega;
        const auto traj =
            integrate_meanfield(standard_seed(100), p, 20.0 * period, 0.2, 1 << 30);
        CHECK_THROWS(classify_limit_cycle(traj, p));
    }
}

TEST_CASE("phase diagram: smoke grid with sane cells") {
    const auto p = paper_point(50, 0.0);
    const std::vector<double> g1f{0.05, 0.2, 0.5};
    const std::vector<double> wf{0.6, 1.0, 1.4};
    const auto cells = phase_diagram(p, g1f, wf, 2000.0, 2);
    REQUIRE(cells.size() == 9);
    for (const auto& cell : cells) {
        CHECK(cell.ok);
        CHECK(cell.x2_tav_norm >= 0.0);
        CHECK(cell.x2_tav_norm < 1.2);
    }
    // the resonant DTC cell responds much harder than the detuned weak-drive one
    double resonant = 0.0, weak = 1.0;
    for (const auto& cell : cells) {
        if (cell.g1_over_g0 == 0.5 && cell.omega_over_2wres == 1.0) resonant = cell.x2_tav_norm;
        if (cell.g1_over_g0 == 0.05 && cell.omega_over_2wres == 1.4) weak = cell.x2_tav_norm;
    }
    CHECK(resonant > 10.0 * weak);
}
