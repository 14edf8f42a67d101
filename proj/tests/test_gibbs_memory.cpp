// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "ergodyn/error.hpp"
#include "ergodyn/gibbs_memory.hpp"

using namespace ergodyn;
using namespace ergodyn::gibbs;

namespace {

const double kPi = std::acos(-1.0);

Eigen::MatrixXd mat1(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

Eigen::MatrixXd chain(int n, double d = 2.5) {
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    V(i, i) = d;
    if (i + 1 < n) V(i, i + 1) = V(i + 1, i) = -1.0;
  }
  return V;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::kInvalidArgument;
}

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
auto simpson(F f, double a, double b, int n) -> decltype(f(a)) {
  const double h = (b - a) / n;
  decltype(f(a)) s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  s *= h / 3.0;
  return s;
}

}  // namespace

TEST_CASE("local graphs") {
  const auto c = LocalGraph::chain(5);
  CHECK(c.connected());
  CHECK(c.distance(0, 4) == 4);
  CHECK(c.adjacent(2, 3));
  CHECK(LocalGraph::star(5).distance(3, 4) == 2);
  CHECK(LocalGraph::parse("grid:3x4").size() == 12);
  CHECK(LocalGraph::parse("grid:3x4").distance(0, 11) == 5);
  CHECK(LocalGraph::parse("complete:4").distance(1, 3) == 1);
  CHECK_THROWS_AS(LocalGraph::parse("ring:4"), Error);
  CHECK_THROWS_AS(LocalGraph::parse("chain:x"), Error);
  const LocalGraph split(3, {{0, 1}});
  CHECK_FALSE(split.connected());
  CHECK(split.distance(0, 2) == -1);

  CHECK(c.is_gamma_local(chain(5), 1));
  Eigen::MatrixXd far = chain(5);
  far(0, 2) = far(2, 0) = 0.1;
  CHECK_FALSE(c.is_gamma_local(far, 1));
  CHECK(c.is_gamma_local(far, 2));

  const auto order = c.source_first_order(3);
  CHECK(order[0] == 3);
  CHECK(order.size() == 5);
}

TEST_CASE("kernels") {
  const auto w = CovarianceKernel::parse("white:2");
  CHECK(w.is_white());
  CHECK(w.white_intensity() == 2.0);
  const auto g = CovarianceKernel::parse("gauss:2,3");
  CHECK(g(0.0) == doctest::Approx(2.0));
  CHECK(g(3.0) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(g.tail_integral(0.0) == doctest::Approx(2.0 * 3.0 * std::sqrt(kPi) / 2.0));
  CHECK(g.spectral_density(0.0) == doctest::Approx(g.tail_integral(0.0) / kPi));
  const auto b = CovarianceKernel::parse("bspline:1,0.5");
  CHECK(b(0.0) == doctest::Approx(1.0));
  REQUIRE(b.support().has_value());
  CHECK(*b.support() == doctest::Approx(1.0));
  CHECK(b(1.01) == 0.0);
  CHECK(b.tail_integral(0.0) ==
        doctest::Approx(simpson([&](double t) { return b(t); }, 0.0, 1.0, 2000)).epsilon(1e-10));
  CHECK(b.tail_integral(0.7) ==
        doctest::Approx(simpson([&](double t) { return b(t); }, 0.7, 1.0, 2000)).epsilon(1e-10));
  CHECK(CovarianceKernel::parse("zero")(0.0) == 0.0);
  CHECK(CovarianceKernel::parse("gauss")(0.0) == 1.0);
  CHECK_THROWS_AS(CovarianceKernel::parse("pink:1"), Error);
  CHECK_THROWS_AS(CovarianceKernel::parse("gauss:1,-1"), Error);
  CHECK_THROWS_AS(CovarianceKernel::sum(w, g), Error);
  const auto s = CovarianceKernel::sum(g, b);
  CHECK(s(0.2) == doctest::Approx(g(0.2) + b(0.2)));

  CHECK(g.bochner_check());
  CHECK(b.bochner_check());
  const auto box = CovarianceKernel::custom(
      "box", [](double t) { return std::abs(t) <= 1.0 ? 1.0 : 0.0; },
      [](double t) { return std::max(0.0, 1.0 - t); }, 1.0);
  CHECK_FALSE(box.bochner_check());
}

TEST_CASE("driven system construction") {
  const auto sys = build_driven(QuadraticHamiltonian(mat1(1.0)), 0.5, CovarianceKernel::white(1.0));
  Eigen::MatrixXd A(2, 2);
  A << 0, 1, -1, -0.5;
  CHECK(sys.A == A);
  CHECK(sys.stable);
  CHECK(sys.l0_dim == 0);

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 4.0;
  const auto dec = build_driven(QuadraticHamiltonian(D), 1.0, CovarianceKernel::white(1.0));
  CHECK(dec.l0_dim == 2);
  CHECK_FALSE(dec.stable);
  Eigen::EigenSolver<Eigen::MatrixXd> es(dec.A);
  bool found = false;
  for (Eigen::Index k = 0; k < 4; ++k) {
    const auto z = es.eigenvalues()(k);
    if (std::abs(z.real()) < 1e-12 && std::abs(std::abs(z.imag()) - 2.0) < 1e-12) found = true;
  }
  CHECK(found);
  CHECK_FALSE(build_driven(QuadraticHamiltonian(chain(3)), 0.0, CovarianceKernel::white(1.0)).stable);
}

TEST_CASE("Gibbs covariance under white forcing") {
  const QuadraticHamiltonian H(chain(4));
  const auto G = gibbs_covariance(H, 2.0);
  CHECK((G.qq() - 0.5 * chain(4).inverse()).norm() < 1e-14);
  CHECK((G.pp() - 0.5 * Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-14);
  CHECK(G.qp().norm() == 0.0);
  CHECK(G.is_symmetric_psd());

  const auto sys = build_driven(H, 0.8, CovarianceKernel::white(1.2));
  const auto W = stationary_white(sys);
  CHECK((W.C - gibbs_covariance(H, 2 * 0.8 / 1.2).C).norm() < 1e-14);
  CHECK(stationarity_residual(sys, W.C) < 1e-12);
  CHECK(stationarity_residual(sys, gibbs_covariance(H, 1.0).C) > 1e-3);

  const auto zero = stationary_white(build_driven(H, 0.8, CovarianceKernel::white(0.0)));
  CHECK(zero.C.norm() == 0.0);

  CHECK(code_of([&] { stationary_white(build_driven(H, 0.0, CovarianceKernel::white(1.0))); }) ==
        ErrorCode::kUnstable);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 4.0;
  CHECK(code_of([&] { stationary_white(build_driven(QuadraticHamiltonian(D), 1.0, CovarianceKernel::white(1.0))); }) ==
        ErrorCode::kUnstable);
  CHECK_THROWS_AS(gibbs_covariance(H, 0.0), Error);
}

TEST_CASE("memory propagator") {
  const QuadraticHamiltonian H1(mat1(1.0));

  SUBCASE("vanishes for a zero kernel and beyond the support") {
    const auto z = build_driven(H1, 1.0, CovarianceKernel::zero());
    CHECK(memory_propagator(z, 0.0).norm() == 0.0);
    const auto b = build_driven(H1, 1.0, CovarianceKernel::bspline(1.0, 1.0));
    CHECK(memory_propagator(b, 3.0).norm() == 0.0);
    CHECK(memory_propagator(b, 1.0).norm() > 0.0);
  }
  SUBCASE("matches a dense quadrature") {
    const auto sys = build_driven(H1, 1.0, CovarianceKernel::gaussian(1.0, 1.0));
    const Eigen::MatrixXd W = memory_propagator(sys, 0.0);
    const Eigen::MatrixXd ref = simpson(
        [&](double t) -> Eigen::MatrixXd { return (t * sys.A).exp() * std::exp(-t * t); }, 0.0, 10.0, 20000);
    CHECK((W - ref).norm() <= 1e-8);
    const Eigen::MatrixXd Ws = memory_propagator(sys, -0.7);
    const Eigen::MatrixXd refs = simpson(
        [&](double t) -> Eigen::MatrixXd { return (t * sys.A).exp() * std::exp(-(t - 0.7) * (t - 0.7)); }, 0.0,
        12.0, 24000);
    CHECK((Ws - refs).norm() <= 1e-8);
  }
  SUBCASE("additive in the kernel") {
    const auto g = CovarianceKernel::gaussian(1.0, 0.7);
    const auto b = CovarianceKernel::bspline(0.5, 1.3);
    const QuadraticHamiltonian H(chain(3));
    for (double s : {0.0, 0.4, -1.1}) {
      const Eigen::MatrixXd sum = memory_propagator(build_driven(H, 0.9, CovarianceKernel::sum(g, b)), s);
      const Eigen::MatrixXd parts = memory_propagator(build_driven(H, 0.9, g), s) + memory_propagator(build_driven(H, 0.9, b), s);
      CHECK((sum - parts).norm() <= 1e-10 * parts.norm());
    }
  }
  SUBCASE("non-integrable kernels are reported") {
    const auto slow = CovarianceKernel::custom(
        "slow", [](double t) { return 1.0 / (1.0 + std::abs(t)); }, [](double) { return 1e300; });
    const auto sys = build_driven(H1, 1.0, slow);
    QuadratureOptions o;
    o.max_horizon = 50.0;
    CHECK(code_of([&] { memory_propagator(sys, 0.0, o); }) == ErrorCode::kKernelNotIntegrable);
  }
}

TEST_CASE("colored stationary covariance of one oscillator") {
  // Independent frequency-domain reference for q'' + alpha q' + w^2 q = f.
  const double w2 = 1.7, alpha = 0.6;
  const auto kern = CovarianceKernel::gaussian(1.3, 0.8);
  const auto sys = build_driven(QuadraticHamiltonian(mat1(w2)), alpha, kern);
  const auto C = stationary_colored(sys);
  auto den = [&](double l) { return (w2 - l * l) * (w2 - l * l) + alpha * alpha * l * l; };
  const double qq = simpson([&](double l) { return kern.spectral_density(l) / den(l); }, -40.0, 40.0, 400000);
  const double pp =
      simpson([&](double l) { return l * l * kern.spectral_density(l) / den(l); }, -40.0, 40.0, 400000);
  CHECK(C.qq(0, 0) == doctest::Approx(qq).epsilon(1e-8));
  CHECK(C.pp(0, 0) == doctest::Approx(pp).epsilon(1e-8));
  CHECK(std::abs(C.C(0, 1)) <= 1e-10);
  CHECK(C.is_symmetric_psd());

  // C_psi(0) is the stationary covariance; lag symmetry C(-s) = C(s)^T.
  CHECK((lagged_covariance(sys, 0.0) - C.C).norm() <= 1e-10);
  CHECK((lagged_covariance(sys, -0.9) - lagged_covariance(sys, 0.9).transpose()).norm() <= 1e-10);
}

TEST_CASE("white lagged covariance") {
  const auto sys = build_driven(QuadraticHamiltonian(chain(2)), 0.7, CovarianceKernel::white(1.0));
  const Eigen::MatrixXd C = stationary_white(sys).C;
  CHECK((lagged_covariance(sys, 0.5) - C * (0.5 * sys.A.transpose()).exp()).norm() <= 1e-13);
  CHECK((lagged_covariance(sys, -0.5) - (0.5 * sys.A).exp() * C).norm() <= 1e-13);
}

TEST_CASE("spectral comparison matrix") {
  const QuadraticHamiltonian H(chain(3));
  const double sigma2 = 1.4, alpha = 0.9;
  const auto cv = c_v_matrix(H, alpha, [&](double) { return sigma2 / (2 * kPi); });
  CHECK((cv.C - gibbs_covariance(H, 2 * alpha / sigma2).C).norm() <= 1e-12);
  CHECK(c_v_matrix(H, alpha, [](double) { return 0.0; }).C.norm() == 0.0);

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 4.0;
  auto a = [](double l) { return std::exp(-l * l); };
  const auto dv = c_v_matrix(QuadraticHamiltonian(D), 2.0, a);
  CHECK(dv.pp(0, 0) == doctest::Approx(kPi / 2.0 * a(1.0)));
  CHECK(dv.pp(1, 1) == doctest::Approx(kPi / 2.0 * a(2.0)));
  CHECK(dv.qq(1, 1) == doctest::Approx(kPi / 2.0 * a(2.0) / 4.0));
  CHECK(dv.pp(0, 1) == 0.0);
}

TEST_CASE("remainder scan") {
  const auto g = LocalGraph::chain(8);
  const auto white = remainder_scan(g, chain(8), 1, 1.0, CovarianceKernel::white(1.0), 0);
  CHECK(white.rows.size() == 8);
  for (const auto& r : white.rows) {
    CHECK(r.max_pp <= 1e-12);
    CHECK(r.max_qq <= 1e-12);
  }
  const auto col = remainder_scan(g, chain(8), 1, 1.0, CovarianceKernel::bspline(1.0, 1.0), 0);
  CHECK(col.rows[0].distance == 0);
  for (std::size_t k = 1; k < col.rows.size(); ++k) {
    CHECK(col.rows[k].envelope_pp_diag <= col.rows[k - 1].envelope_pp_diag);
  }
  CHECK(col.rows[0].envelope_pp_diag > 0.0);
  CHECK(col.decay_exponent < 0.0);
  Eigen::MatrixXd far = chain(8);
  far(0, 3) = far(3, 0) = 0.1;
  CHECK_THROWS_AS(remainder_scan(g, far, 1, 1.0, CovarianceKernel::white(1.0), 0), Error);
}

TEST_CASE("SDE oracle") {
  SUBCASE("white forcing matches Gibbs") {
    const auto sys = build_driven(QuadraticHamiltonian(mat1(1.0)), 1.0, CovarianceKernel::white(1.0));
    SdeOptions o;
    o.horizon = 2000.0;
    o.dt = 1e-2;
    o.paths = 8;
    o.seed = 3;
    const auto r = sde_oracle(sys, o);
    CHECK(r.covariance.pp(0, 0) == doctest::Approx(0.5).epsilon(0.05));
    CHECK(r.covariance.qq(0, 0) == doctest::Approx(0.5).epsilon(0.05));
    const auto again = sde_oracle(sys, o);
    CHECK(again.covariance.C == r.covariance.C);
  }
  SUBCASE("no friction: energy grows at rate sigma^2 / 2") {
    const auto sys = build_driven(QuadraticHamiltonian(mat1(1.0)), 0.0, CovarianceKernel::white(1.0));
    SdeOptions o;
    o.horizon = 50.0;
    o.dt = 1e-2;
    o.paths = 400;
    o.seed = 5;
    const auto r = sde_oracle(sys, o);
    CHECK(r.energy_slope == doctest::Approx(0.5).epsilon(0.1));
  }
  SUBCASE("step size precondition") {
    const auto sys = build_driven(QuadraticHamiltonian(mat1(400.0)), 1.0, CovarianceKernel::white(1.0));
    SdeOptions o;
    o.dt = 0.1;
    CHECK_THROWS_AS(sde_oracle(sys, o), Error);
  }
}

TEST_CASE("generic local Hamiltonians") {
  const auto c = sample_local_hamiltonians(LocalGraph::chain(6), 50, 1);
  CHECK(c.samples == 50);
  CHECK(c.fraction == 1.0);
  CHECK(sample_local_hamiltonians(LocalGraph::star(5), 50, 2).fraction == 1.0);
  CHECK(code_of([] { sample_local_hamiltonians(LocalGraph(3, {{0, 1}}), 5, 1); }) == ErrorCode::kDisconnectedGraph);
  CHECK_THROWS_AS(sample_local_hamiltonians(LocalGraph::chain(3), 0, 1), Error);
}

TEST_CASE("thermodynamic scan") {
  const auto tpl = chain_template(2.5);
  CHECK(tpl(1, 1) == 2.5);
  CHECK(tpl(3, 4) == -1.0);
  CHECK(tpl(1, 3) == 0.0);

  const auto white = thermo_scan({4, 8}, tpl, 0.5, CovarianceKernel::white(1.0), {{1, 1}, {1, 2}});
  for (const auto& st : white.stages) {
    CHECK(st.pp[0] == doctest::Approx(1.0));
    CHECK(std::abs(st.pp[1]) <= 1e-12);
    CHECK(st.cv_pp[0] == doctest::Approx(1.0));
  }
  CHECK(white.stages[1].internal_index[0] == 7);

  const auto col = thermo_scan({6, 10, 14}, tpl, 1.0, CovarianceKernel::gaussian(), {{1, 2}});
  REQUIRE(col.pp_differences.size() == 1);
  CHECK(col.pp_differences[0].size() == 2);
  CHECK(col.pp_differences_decrease);

  CHECK_THROWS_AS(thermo_scan({4}, tpl, 1.0, CovarianceKernel::gaussian(), {{5, 1}}), Error);
}
