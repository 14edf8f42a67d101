// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "ergodyn/error.hpp"
#include "ergodyn/quantum_switch.hpp"

using namespace ergodyn;
using namespace ergodyn::quantum;

namespace {

const Complex I(0.0, 1.0);

bool close(const CMatrix& a, const CMatrix& b, double tol) { return (a - b).norm() <= tol; }

HermitianMatrix diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return diagonal(d);
}

}  // namespace

TEST_CASE("matrix wrappers validate their input") {
  CMatrix m(2, 2);
  m << 1, I, 0, 1;
  CHECK_THROWS_AS(HermitianMatrix{m}, Error);
  CHECK(HermitianMatrix::hermitian_part(m).matrix()(1, 0) == 0.5 * -I);
  CHECK_THROWS_AS(UnitaryMatrix{CMatrix::Identity(2, 2) * 1.1}, Error);
  CHECK(UnitaryMatrix{pauli_x().matrix()}.unitarity_drift() < 1e-15);
  CHECK_THROWS_AS(DensityMatrix{CMatrix::Identity(2, 2)}, Error);
  CMatrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, Error);
  CHECK(DensityMatrix::maximally_mixed(4).matrix().trace().real() == doctest::Approx(1.0));
  CVector psi(2);
  psi << 3, 4;
  CHECK_THROWS_AS(DensityMatrix::pure(psi), Error);
  CHECK(DensityMatrix::pure(psi / 5.0).matrix().trace().real() == doctest::Approx(1.0));
}

TEST_CASE("brackets") {
  const auto b = bracket(pauli_x(), pauli_z());
  CHECK(close(b.matrix(), 2.0 * pauli_y().matrix(), 1e-15));
  Rng rng = make_stream(1, 0);
  for (int k = 0; k < 10; ++k) {
    const auto a = random_hermitian(3, rng), c = random_hermitian(3, rng);
    CHECK(close(bracket(a, c).matrix(), -bracket(c, a).matrix(), 1e-13));
    CHECK(close(bracket(a, a).matrix(), CMatrix::Zero(3, 3), 1e-13));
  }
}

TEST_CASE("Lie closure dimensions") {
  CHECK(lie_closure(pauli_x(), pauli_z()).dim == 3);
  CHECK(lie_closure(pauli_x(), diag({1, 0})).dim == 4);
  CHECK(lie_closure(pauli_z(), diag({1, 0})).dim == 2);
  CHECK(is_u_controllable(pauli_x(), diag({1, 0})));
  CHECK_FALSE(is_u_controllable(pauli_x(), pauli_z()));

  const auto cl = lie_closure(pauli_x(), pauli_z());
  CHECK(membership_residual(cl, pauli_y().matrix()) < 1e-12);
  CHECK(membership_residual(cl, CMatrix::Identity(2, 2)) > 0.99);

  // Conjugation by a unitary preserves the dimension.
  Rng rng = make_stream(2, 0);
  const auto h1 = random_hermitian(3, rng), h2 = random_hermitian(3, rng);
  const auto U = haar_unitary(3, rng).matrix();
  const HermitianMatrix g1 = HermitianMatrix::hermitian_part(U * h1.matrix() * U.adjoint());
  const HermitianMatrix g2 = HermitianMatrix::hermitian_part(U * h2.matrix() * U.adjoint());
  CHECK(lie_closure(h1, h2).dim == lie_closure(g1, g2).dim);
  CHECK_THROWS_AS(lie_closure(pauli_x(), diag({1, 2, 3})), Error);
}

TEST_CASE("explicit criterion") {
  const auto r = check_explicit_criterion(pauli_x(), pauli_z());
  CHECK(r.applicable);
  CHECK(r.both_traceless);
  CHECK(r.predicted_dim == 3);
  const auto r2 = check_explicit_criterion(pauli_x(), diag({1, 0}));
  CHECK(r2.applicable);
  CHECK(r2.predicted_dim == 4);
  // H1 diagonal in the eigenbasis of H2: off-diagonal entries vanish.
  const auto r3 = check_explicit_criterion(diag({1, -1}), pauli_z());
  CHECK_FALSE(r3.offdiagonal_nonzero);
  CHECK_FALSE(r3.applicable);
  CHECK(r3.predicted_dim == 0);
  // Equally spaced spectrum: gaps repeat.
  CMatrix h1 = CMatrix::Ones(3, 3);
  const auto r4 = check_explicit_criterion(HermitianMatrix(h1), diag({0, 1, 2}));
  CHECK(r4.offdiagonal_nonzero);
  CHECK_FALSE(r4.gaps_distinct);
  CHECK_FALSE(r4.applicable);
}

TEST_CASE("generic pairs") {
  const auto g = sample_generic_pairs(2, 50, 11);
  CHECK(g.samples == 50);
  CHECK(g.controllable == 50);
  CHECK(g.fraction == 1.0);
  CHECK(g.failures.empty());
  CHECK_THROWS_AS(sample_generic_pairs(2, 0, 11), Error);
}

TEST_CASE("switch process") {
  const auto clock = RandomClock::exponential(1.0, 5);
  const auto path0 = simulate_switch(pauli_x(), pauli_z(), clock, 0);
  REQUIRE(path0.size() == 1);
  CHECK(close(path0[0].matrix(), CMatrix::Identity(2, 2), 0.0));
  CHECK_THROWS_AS(simulate_switch(pauli_x(), pauli_z(), clock, -1), Error);

  const auto path = simulate_switch(pauli_x(), pauli_z(), clock, 10);
  CHECK(path.size() == 11);
  CHECK(close(path.back().matrix(), switch_endpoint(pauli_x(), pauli_z(), clock, 10).matrix(), 1e-12));

  // H1 = H2 collapses to one flow over the total elapsed time.
  auto times = clock.stream();
  double total = 0.0;
  for (int k = 0; k < 7; ++k) total += times.next();
  const auto same = simulate_switch(pauli_y(), pauli_y(), clock, 7);
  const CMatrix expect = (CMatrix(-I * total * pauli_y().matrix())).exp();
  CHECK(close(same.back().matrix(), expect, 1e-12));

  const auto far = switch_endpoint(pauli_x(), diag({1, 0}), clock, 10000);
  CHECK(far.unitarity_drift() <= 1e-9);
}

TEST_CASE("propagator and polar factor") {
  Rng rng = make_stream(3, 0);
  const auto h = random_hermitian(4, rng);
  const SpectralPropagator P(h);
  CHECK(close(P.evolve(0.7), CMatrix(-I * 0.7 * h.matrix()).exp(), 1e-12));
  const CMatrix U = haar_unitary(4, rng).matrix();
  CHECK(close(polar_unitary(U), U, 1e-12));
  const CMatrix noisy = U + 1e-6 * CMatrix::Random(4, 4);
  CHECK(UnitaryMatrix(polar_unitary(noisy)).unitarity_drift() < 1e-13);
}

TEST_CASE("Haar moment test") {
  Rng rng = make_stream(4, 0);
  std::vector<UnitaryMatrix> haar;
  for (int k = 0; k < 2000; ++k) haar.push_back(haar_unitary(2, rng));
  const auto rep = haar_moment_test(haar);
  CHECK(rep.samples == 2000);
  CHECK(rep.pass);
  CHECK(rep.max_abs_z <= 4.0);

  std::vector<UnitaryMatrix> ident(200, UnitaryMatrix(CMatrix::Identity(2, 2)));
  CHECK_FALSE(haar_moment_test(ident).pass);
  CHECK_THROWS_AS(haar_moment_test(std::span<const UnitaryMatrix>(haar.data(), 99)), Error);
}

TEST_CASE("Cesaro averages of the switched density") {
  const auto clock = RandomClock::exponential(1.0, 6);
  const auto h2 = diag({1, 0});
  std::vector<NamedObservable> obs{{"E", HermitianMatrix(CMatrix::Identity(2, 2))}, {"sz", pauli_z()}};

  const auto mixed = cesaro_density(pauli_x(), h2, clock, DensityMatrix::maximally_mixed(2), obs, 100.0);
  CHECK(mixed.entries[0].average == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mixed.entries[1].average) <= 1e-10);
  CHECK(mixed.trace_average == doctest::Approx(1.0).epsilon(1e-12));

  CVector e1 = CVector::Zero(2);
  e1(0) = 1.0;
  const auto pure = cesaro_density(pauli_x(), h2, clock, DensityMatrix::pure(e1), obs, 1e4);
  CHECK(std::abs(pure.entries[1].average) <= 0.05);
  CHECK(pure.entries[1].reference == 0.0);

  std::vector<NamedObservable> proj{{"P1", diag({1, 0})}};
  const auto st = pure_state_switch(pauli_x(), h2, clock, e1, 1e4, proj);
  CHECK(st.entries[0].average == doctest::Approx(0.5).epsilon(0.1));
  CHECK(st.max_norm_drift <= 1e-10);
  CHECK_THROWS_AS(cesaro_density(pauli_x(), h2, clock, DensityMatrix::pure(e1), obs, 0.0), Error);
}

TEST_CASE("fixed Hamiltonian Cesaro limit") {
  const auto h = diag({0.0, 1.0, 2.5});
  CVector v = CVector::Zero(3);
  v(1) = 1.0;
  const auto eig = fixed_hamiltonian_cesaro(h, v, 10.0);
  CHECK(close(eig.average, eig.limit, 1e-12));
  CHECK(close(eig.limit, v * v.adjoint(), 1e-14));

  CVector psi(3);
  psi << 1.0, Complex(0.5, 0.5), -0.25;
  psi.normalize();
  double prev = 1e300;
  for (double T : {1e2, 1e3, 1e4}) {
    const auto f = fixed_hamiltonian_cesaro(h, psi, T);
    const double err = (f.average - f.limit).norm();
    CHECK(err <= f.error_constant / T);
    CHECK(err < prev);
    prev = err;
    CHECK(close(f.limit * h.matrix(), h.matrix() * f.limit, 1e-12));
  }
  CHECK_THROWS_AS(fixed_hamiltonian_cesaro(diag({1, 1, 2}), psi, 10.0), Error);
}

TEST_CASE("unitary flow as a classical quadratic Hamiltonian") {
  const auto gx = unitary_to_symplectic(pauli_x());
  const phase::PhaseVector s = split_complex(CVector::Ones(2) * Complex(0.3, -0.7));
  const double q1 = s.q(0), q2 = s.q(1), p1 = s.p(0), p2 = s.p(1);
  CHECK(gx.value(s) == doctest::Approx(-q1 * q2 - p1 * p2));

  const auto ge = unitary_to_symplectic(HermitianMatrix(CMatrix::Identity(2, 2)));
  CHECK(ge.value(s) == doctest::Approx(-0.5 * (s.q.squaredNorm() + s.p.squaredNorm())));

  Rng rng = make_stream(8, 0);
  const auto h = random_hermitian(3, rng);
  const auto g = unitary_to_symplectic(h);
  CVector f = CVector::Random(3);
  const double t = 1.3;
  const CVector expect = CMatrix(I * t * h.matrix()).exp() * f;
  const CVector got = join_complex(g.evolve(split_complex(f), t));
  CHECK((got - expect).norm() <= 1e-9);
  CHECK((join_complex(split_complex(f)) - f).norm() == 0.0);
  CHECK(g.value(g.evolve(split_complex(f), t)) == doctest::Approx(g.value(split_complex(f))).epsilon(1e-12));
}
