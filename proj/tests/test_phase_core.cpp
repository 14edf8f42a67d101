// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "ergodyn/error.hpp"
#include "ergodyn/phase_core.hpp"

using namespace ergodyn;
using namespace ergodyn::phase;

namespace {

Eigen::MatrixXd chain2() {
  Eigen::MatrixXd V(2, 2);
  V << 2, -1, -1, 2;
  return V;
}

Eigen::MatrixXd diag(std::initializer_list<double> d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

PhaseVector random_state(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd q(n), p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    q(i) = g(rng);
    p(i) = g(rng);
  }
  return {q, p};
}

Eigen::MatrixXd random_spd(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = g(rng);
  return M * M.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("phase vector validates its shape") {
  CHECK_THROWS_AS(PhaseVector(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), Error);
  Eigen::VectorXd bad(1);
  bad << std::nan("");
  CHECK_THROWS_AS(PhaseVector(bad, Eigen::VectorXd::Zero(1)), Error);
  Eigen::VectorXd s(4);
  s << 1, 2, 3, 4;
  const auto psi = PhaseVector::from_stacked(s);
  CHECK(psi.q(1) == 2);
  CHECK(psi.p(0) == 3);
  CHECK(psi.coord(3) == 4);
  CHECK(psi.stacked() == s);
}

TEST_CASE("spectral decomposition of small matrices") {
  SUBCASE("identity") {
    const auto H = spectral_decompose(Eigen::MatrixXd::Identity(1, 1));
    CHECK(H.omega_squared()(0) == doctest::Approx(1.0));
    CHECK(H.modes()(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("2x2 chain") {
    const auto H = spectral_decompose(chain2());
    CHECK(H.omega_squared()(0) == doctest::Approx(1.0));
    CHECK(H.omega_squared()(1) == doctest::Approx(3.0));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(H.modes()(0, 0) == doctest::Approx(r));
    CHECK(H.modes()(1, 0) == doctest::Approx(r));
    CHECK(H.modes()(0, 1) == doctest::Approx(r));
    CHECK(H.modes()(1, 1) == doctest::Approx(-r));
    CHECK(reconstruction_error(H) <= 1e-10);
  }
  SUBCASE("diagonal") {
    const auto H = spectral_decompose(diag({1, 4, 9}));
    for (int k = 0; k < 3; ++k) {
      CHECK(H.omega()(k) == doctest::Approx(k + 1.0));
      CHECK(std::abs(H.modes()(k, k)) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("spectral decomposition rejects bad input") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0, 1;
  try {
    QuadraticHamiltonian h(asym);
    FAIL("expected NotSymmetric");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotSymmetric);
  }
  try {
    QuadraticHamiltonian h(diag({1, 0}));
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotPositiveDefinite);
  }
  CHECK_THROWS_AS(QuadraticHamiltonian(Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST_CASE("flow closed forms") {
  const QuadraticHamiltonian H1(Eigen::MatrixXd::Identity(1, 1));
  Eigen::VectorXd q(1), p(1);
  q << 1;
  p << 0;
  const auto out = flow(H1, {q, p}, std::numbers::pi / 2);
  CHECK(std::abs(out.q(0)) < 1e-14);
  CHECK(out.p(0) == doctest::Approx(-1.0));

  Rng rng = make_stream(3);
  const QuadraticHamiltonian H(chain2());
  const auto psi = random_state(2, rng);
  const auto same = flow(H, psi, 0.0);
  CHECK((same.stacked() - psi.stacked()).norm() < 1e-14);
  const double e0 = energy(H, psi);
  CHECK(std::abs(energy(H, flow(H, psi, 0.7)) - e0) <= 1e-10 * e0);
  CHECK_THROWS_AS(flow(H, PhaseVector::zeros(3), 1.0), Error);
}

TEST_CASE("energy examples") {
  const QuadraticHamiltonian H1(Eigen::MatrixXd::Identity(1, 1));
  CHECK(energy(H1, PhaseVector::zeros(1)) == 0.0);
  Eigen::VectorXd q(1), p(1);
  q << 3;
  p << 4;
  CHECK(energy(H1, {q, p}) == doctest::Approx(12.5));
  const QuadraticHamiltonian H(chain2());
  Eigen::VectorXd q2(2);
  q2 << 1, 0;
  CHECK(energy(H, {q2, Eigen::VectorXd::Zero(2)}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(energy(H, PhaseVector::zeros(1)), Error);
}

TEST_CASE("flow group law, symplecticity and energy on random systems") {
  Rng rng = make_stream(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 1 + trial % 5;
    const QuadraticHamiltonian H(random_spd(n, rng));
    const auto psi = random_state(n, rng);
    const double s = u(rng), t = u(rng);
    const auto a = flow(H, flow(H, psi, s), t);
    const auto b = flow(H, psi, s + t);
    CHECK((a.stacked() - b.stacked()).norm() <= 1e-10 * std::max(1.0, b.stacked().norm()));

    const Eigen::MatrixXd J = flow_matrix(H, t);
    Eigen::MatrixXd Omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Omega.topRightCorner(n, n).setIdentity();
    Omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    CHECK((J.transpose() * Omega * J - Omega).cwiseAbs().maxCoeff() <= 1e-9);

    const double e = energy(H, psi);
    CHECK(std::abs(energy(H, flow(H, psi, t)) - e) <= 1e-9 * e);
  }
}

TEST_CASE("mixing subspace examples") {
  const auto d14 = mixing_subspace(QuadraticHamiltonian(diag({1, 4})));
  CHECK(d14.dim == 1);
  const auto c = mixing_subspace(QuadraticHamiltonian(chain2()));
  CHECK(c.dim == 2);
  CHECK(c.overlaps(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(c.overlaps(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(mixing_subspace(QuadraticHamiltonian(diag({1, 1, 2}))).dim == 1);
}

TEST_CASE("mixing subspace invariants on random matrices") {
  Rng rng = make_stream(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + trial % 6;
    Eigen::MatrixXd V = random_spd(n, rng);
    if (trial % 3 == 0 && n > 2) {
      // decouple the last coordinate
      V.row(n - 1).head(n - 1).setZero();
      V.col(n - 1).head(n - 1).setZero();
    }
    const QuadraticHamiltonian H(V);
    const auto m = mixing_subspace(H);
    const Eigen::MatrixXd& B = m.basis;
    CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(m.dim, m.dim)).cwiseAbs().maxCoeff() <= 1e-10);
    const Eigen::MatrixXd leak = (Eigen::MatrixXd::Identity(n, n) - B * B.transpose()) * V * B;
    CHECK(leak.norm() <= 1e-9 * V.norm());
    // Cayley-Hamilton saturation
    CHECK(krylov_basis(V, static_cast<int>(n) - 1).cols() == krylov_basis(V, 2 * static_cast<int>(n)).cols());
    if (is_v_plus(H)) {
      CHECK(m.overlaps.cwiseAbs().minCoeff() > 1e-10);
    }
  }
}

TEST_CASE("is_v_plus") {
  CHECK(is_v_plus(QuadraticHamiltonian(chain2())));
  CHECK_FALSE(is_v_plus(QuadraticHamiltonian(diag({1, 4}))));
  Rng rng = make_stream(9);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 5;
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      V(i, i) = 3.0 + u(rng);
      if (i + 1 < n) V(i, i + 1) = V(i + 1, i) = -u(rng);
    }
    CHECK(is_v_plus(QuadraticHamiltonian(V)));
  }
}

TEST_CASE("rational independence") {
  const std::vector<double> a{1.0, 2.0};
  const auto r1 = rational_independence(a, 3);
  REQUIRE(r1.relation_found);
  CHECK(r1.relation == std::vector<long>{2, -1});

  const std::vector<double> b{1.0, std::sqrt(2.0)};
  const auto r2 = rational_independence(b, 10, 1e-9);
  CHECK_FALSE(r2.relation_found);
  CHECK(r2.max_coeff == 10);

  const std::vector<double> c{1.0, 3.0};
  const auto r3 = rational_independence(c, 3);
  REQUIRE(r3.relation_found);
  CHECK(r3.relation == std::vector<long>{3, -1});

  const std::vector<double> big(8, 1.0);
  try {
    rational_independence(big, 20);
    FAIL("expected SearchSpaceTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSearchSpaceTooLarge);
  }
  CHECK_THROWS_AS(rational_independence(a, 0), Error);
}

TEST_CASE("covering bound") {
  Eigen::MatrixXd one(1, 1);
  one << 2.5;
  CHECK(covering_bound(QuadraticHamiltonian(one)) == 4);
  CHECK(covering_bound(QuadraticHamiltonian(chain2())) == 6);
  try {
    covering_bound(QuadraticHamiltonian(diag({1, 4})));
    FAIL("expected NotMixing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotMixing);
  }
}

TEST_CASE("microcanonical sampler") {
  const QuadraticHamiltonian H(chain2());
  const double h = 1.7;
  Rng rng = make_stream(21);
  double mean = 0.0;
  for (int k = 0; k < 10000; ++k) mean += energy(H, sample_microcanonical(H, h, rng)) / 10000.0;
  CHECK(std::abs(mean - h) <= 1e-10);

  const QuadraticHamiltonian I(Eigen::MatrixXd::Identity(2, 2));
  const int n = 100000;
  std::vector<double> acc(5, 0.0), acc2(5, 0.0);
  for (int k = 0; k < n; ++k) {
    const auto psi = sample_microcanonical(I, h, rng);
    const double x[5] = {psi.p(0) * psi.p(0), psi.q(0) * psi.p(0), psi.q(0) * psi.q(0), psi.q(1) * psi.q(1),
                         psi.p(1) * psi.p(1)};
    for (int j = 0; j < 5; ++j) {
      acc[j] += x[j];
      acc2[j] += x[j] * x[j];
    }
  }
  const double target[5] = {h / 2, 0.0, h / 2, h / 2, h / 2};
  for (int j = 0; j < 5; ++j) {
    const double m = acc[j] / n;
    const double se = std::sqrt((acc2[j] / n - m * m) / n);
    CHECK(std::abs(m - target[j]) <= 3.0 * se);
  }
  CHECK_THROWS_AS(sample_microcanonical(H, 0.0, rng), Error);
  const auto a = sample_microcanonical(H, 1.0, std::uint64_t{4});
  const auto b = sample_microcanonical(H, 1.0, std::uint64_t{4});
  CHECK(a.stacked() == b.stacked());
}
