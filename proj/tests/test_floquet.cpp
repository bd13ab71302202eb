#include "doctest.h"

#include <cmath>

#include "dicke/floquet.hpp"

using namespace dicke::floquet;
using dicke::hilbert::AtomSector;
using dicke::liouville::build_atom_only_harmonics;
using dicke::model::ModelParams;
using dicke::numerics::Complex;
using dicke::numerics::DenseMatrix;
using dicke::numerics::DenseVector;

namespace {

ModelParams paper_point(int n, double g1_frac = 0.2) {
    ModelParams p = ModelParams::create(1.0, 1.0, 0.1, 0.0, 0.0, 0.0, n);
    p.g0 = 0.5 * dicke::model::critical_coupling(p);
    p.g1 = g1_frac * p.g0;
    p.omega = 2.0 * dicke::model::resonance_frequency(p);
    return p;
}

}  // namespace

TEST_CASE("imaginary-part folding maps into [-omega/2, omega/2) and is idempotent") {
    const double w = 0.2;
    CHECK(fold_imag(0.0, w) == 0.0);
    CHECK(fold_imag(0.1, w) == doctest::Approx(-0.1));   // upper edge wraps
    CHECK(fold_imag(0.25, w) == doctest::Approx(0.05));
    CHECK(fold_imag(-0.25, w) == doctest::Approx(-0.05));
    for (double im : {-1.37, 0.0, 0.049, 3.21}) {
        const double once = fold_imag(im, w);
        CHECK(once >= -0.5 * w - 1e-15);
        CHECK(once < 0.5 * w);
        CHECK(fold_imag(once, w) == doctest::Approx(once).epsilon(1e-14));
    }
    CHECK(circle_distance(0.1, -0.1, w) == doctest::Approx(0.0));
    CHECK(circle_distance(0.05, 0.0, w) == doctest::Approx(0.05));
}

TEST_CASE("assembled matrix: dimension, m_cut = 0 reduction, diagonal shifts") {
    const auto p = paper_point(3);
    const auto h = build_atom_only_harmonics(p, {3});
    const int d2 = h.dim * h.dim;

    CHECK_THROWS(assemble(h, 1));  // below the highest harmonic

    const auto fm = assemble(h, 3);
    CHECK(fm.mat.rows() == 7 * d2);

    const DenseMatrix full(fm.mat);
    const DenseMatrix l0(h.harmonics.at(0));
    for (int n = -3; n <= 3; ++n) {
        const int off = (n + 3) * d2;
        const DenseMatrix block = full.block(off, off, d2, d2);
        const DenseMatrix shift =
            Complex(0.0, -double(n) * p.omega) * DenseMatrix::Identity(d2, d2);
        CHECK((block - l0 - shift).norm() < 1e-12);
    }

    // static model: m_cut = 0 is the bare generator
    auto ps = paper_point(3, 0.0);
    ps.omega = 0.0;
    const auto hs = build_atom_only_harmonics(ps, {3});
    const auto fs = assemble(hs, 0);
    CHECK((DenseMatrix(fs.mat) - DenseMatrix(hs.harmonics.at(0))).norm() < 1e-14);
}

TEST_CASE("eigenmodes near zero: static model has the steady state, all decaying") {
    auto p = paper_point(2, 0.0);
    p.omega = 0.0;
    const auto h = build_atom_only_harmonics(p, {2});
    const auto fm = assemble(h, 0);
    const auto modes = eigs_near(fm, Complex(0.0, 0.0), 5);

    CHECK(std::abs(modes[0].lambda) < 1e-10);
    for (const auto& mode : modes) {
        CHECK(mode.lambda.real() <= 1e-8);
        CHECK(mode.residual < 1e-8);
    }
    // the zero mode carries a normalizable density matrix
    const Complex tr = modes[0].components[0].trace();
    CHECK(std::abs(tr) > 1e-6);
}

TEST_CASE("dense and shift-invert paths agree on the same Floquet matrix") {
    const auto p = paper_point(3);
    const auto h = build_atom_only_harmonics(p, {3});
    const auto fm = assemble(h, 2);  // 5 * 16 = 80 dimensional
    const Complex target(0.0, 0.5 * p.omega);

    const auto dense = eigs_near(fm, target, 6, 1 << 20);
    const auto sparse = eigs_near(fm, target, 6, 1);
    for (int i = 0; i < 6; ++i) {
        double best = 1e300;
        for (int j = 0; j < 6; ++j)
            best = std::min(best, std::abs(dense[i].lambda - sparse[j].lambda));
        CHECK(best < 1e-9);
    }
}

TEST_CASE("finite-size resonance: free atoms give Delta for any N") {
    for (int n : {1, 5, 20}) {
        const auto p = ModelParams::create(1.0, 1.0, 0.1, 0.0, 0.0, 0.0, n);
        CHECK(finite_size_resonance(p, {n}) == doctest::Approx(0.1).epsilon(1e-9));
    }
}

TEST_CASE("finite-size resonance: frozen N = 10 value and drift toward mean field") {
    const double wres_mf = 0.0866025404;
    const auto p10 = paper_point(10, 0.0);
    const double w10 = finite_size_resonance(p10, {10});
    CHECK(w10 == doctest::Approx(0.0944556004).epsilon(1e-6));

    double prev = w10;
    for (int n : {16, 24}) {
        const auto pn = paper_point(n, 0.0);
        const double w = finite_size_resonance(pn, {n});
        CHECK(w > wres_mf);  // finite size pushes the resonance up at these N
        CHECK(w < prev);     // and the shift shrinks with N
        prev = w;
    }
}

TEST_CASE("dissipative gap: frozen N = 10 value and cut-off insensitivity") {
    const auto p = paper_point(10, 0.05);
    const auto g2 = dissipative_gap(p, {10}, 2);
    const auto g3 = dissipative_gap(p, {10}, 3);

    CHECK(g2.gamma == doctest::Approx(0.0048541917).epsilon(1e-5));
    CHECK(std::abs(g3.gamma - g2.gamma) < 0.01 * g2.gamma);
    CHECK(g2.omega_used == doctest::Approx(0.1888985132).epsilon(1e-6));
    CHECK(circle_distance(g2.im_lambda, 0.5 * g2.omega_used, g2.omega_used) <
          1e-6 * g2.omega_used);
    CHECK(!g2.widened_window);
    CHECK(g2.residual < 1e-8);
}

TEST_CASE("dissipative gap: hint steers mode selection consistently") {
    const auto p = paper_point(10, 0.05);
    const auto base = dissipative_gap(p, {10}, 2);
    const Complex hint(-base.gamma, 0.0);
    const auto tracked = dissipative_gap(p, {10}, 2, hint);
    CHECK(tracked.gamma == doctest::Approx(base.gamma).epsilon(1e-10));
}
