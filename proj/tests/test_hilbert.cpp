#include "doctest.h"

#include <cmath>
#include <sstream>

#include "dicke/hilbert.hpp"

using namespace dicke::hilbert;
using dicke::numerics::Complex;

TEST_CASE("atom ladder: N = 1 gives the exchange structure") {
    const auto l = atom_ladder({1});
    DenseMatrix expected(2, 2);
    expected << 0, 0, 1, 0;
    CHECK((l - expected).norm() < 1e-15);
    const DenseMatrix x = l + l.adjoint();
    DenseMatrix exchange(2, 2);
    exchange << 0, 1, 1, 0;
    CHECK((x - exchange).norm() < 1e-15);
}

TEST_CASE("atom ladder: bosonic matrix elements and commutation with n_up") {
    const auto l = atom_ladder({2});
    CHECK(l(1, 0).real() == doctest::Approx(std::sqrt(2.0)));
    for (int n = 1; n <= 5; ++n) {
        const auto ld = atom_ladder({n});
        const auto obs = atom_observables({n});
        const DenseMatrix comm = obs.n_up * ld - ld * obs.n_up;
        CHECK((comm - ld).norm() < 1e-12);
    }
}

TEST_CASE("observables: N = 1 are the Pauli matrices") {
    const auto obs = atom_observables({1});
    DenseMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, Complex(0, 1), Complex(0, -1), 0;
    sz << -1, 0, 0, 1;  // basis {n_up=0, n_up=1} = {down, up}
    CHECK((obs.x - sx).norm() < 1e-15);
    CHECK((obs.y - sy).norm() < 1e-15);
    CHECK((obs.z - sz).norm() < 1e-15);
}

TEST_CASE("observables: Casimir, hermiticity, and spin commutators for N = 1..5") {
    for (int n = 1; n <= 5; ++n) {
        const auto obs = atom_observables({n});
        const int d = n + 1;
        CHECK((obs.x - obs.x.adjoint()).norm() < 1e-12 * std::max(1.0, obs.x.norm()));
        CHECK((obs.y - obs.y.adjoint()).norm() < 1e-12 * std::max(1.0, obs.y.norm()));
        CHECK((obs.z - obs.z.adjoint()).norm() < 1e-12 * std::max(1.0, obs.z.norm()));

        const DenseMatrix casimir = obs.x * obs.x + obs.y * obs.y + obs.z * obs.z;
        const DenseMatrix expected = double(n) * double(n + 2) * DenseMatrix::Identity(d, d);
        CHECK((casimir - expected).norm() < 1e-10);

        const DenseMatrix comm = obs.x * obs.y - obs.y * obs.x;
        CHECK((comm - Complex(0, 2) * obs.z).norm() < 1e-10);

        CHECK(obs.z(d - 1, d - 1).real() == doctest::Approx(double(n)));
    }
}

TEST_CASE("cavity operators on the truncated Fock space") {
    const auto ops = cavity_ops({3});
    DenseMatrix ket1 = DenseMatrix::Zero(4, 1);
    ket1(1, 0) = 1.0;
    const DenseMatrix lowered = ops.a * ket1;
    CHECK(lowered(0, 0).real() == doctest::Approx(1.0));
    for (int n = 0; n <= 3; ++n) CHECK(ops.number(n, n).real() == doctest::Approx(double(n)));

    // truncation artifact: [a, a^dag] = I except the top corner
    const DenseMatrix comm = ops.a * ops.a_dag - ops.a_dag * ops.a;
    CHECK(comm(0, 0).real() == doctest::Approx(1.0));
    CHECK(comm(3, 3).real() == doctest::Approx(-3.0));
}

TEST_CASE("kron: dimensions, commutation across factors, and product identity") {
    const auto obs = atom_observables({2});
    const auto cav = cavity_ops({2});
    const DenseMatrix ic = DenseMatrix::Identity(3, 3);
    const DenseMatrix ia = DenseMatrix::Identity(3, 3);

    const DenseMatrix xa = kron(ic, obs.x);
    const DenseMatrix nc = kron(cav.number, ia);
    CHECK(xa.rows() == 9);
    CHECK((xa * nc - nc * xa).norm() < 1e-12);

    const DenseMatrix lhs = kron(cav.a, ia) * kron(cav.a_dag, ia);
    const DenseMatrix rhs = kron(DenseMatrix(cav.a * cav.a_dag), ia);
    CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("tagged kron enforces the cavity-major convention") {
    const auto obs = atom_observables({1});
    const auto cav = cavity_ops({1});
    OperatorMatrix atom_op{obs.x, SpaceTag::atom, true};
    OperatorMatrix cav_op{cav.number, SpaceTag::cavity, true};
    const auto composite = kron(cav_op, atom_op);
    CHECK(composite.tag == SpaceTag::composite);
    CHECK(composite.hermitian);
    CHECK_THROWS(kron(atom_op, cav_op));
}

TEST_CASE("matrix dump emits row col re im lines") {
    DenseMatrix m = DenseMatrix::Zero(2, 2);
    m(0, 1) = Complex(1.5, -2.0);
    std::ostringstream os;
    dump_matrix(os, m);
    CHECK(os.str() == "0 1 1.5 -2\n");
}
