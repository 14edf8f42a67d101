// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "ergodyn/clock.hpp"
#include "ergodyn/error.hpp"
#include "ergodyn/flip_dynamics.hpp"

using namespace ergodyn;
using namespace ergodyn::flip;

namespace {

Eigen::MatrixXd chain2() {
  Eigen::MatrixXd V(2, 2);
  V << 2, -1, -1, 2;
  return V;
}

PhaseVector state(std::initializer_list<double> q, std::initializer_list<double> p) {
  Eigen::VectorXd a(static_cast<Eigen::Index>(q.size())), b(static_cast<Eigen::Index>(p.size()));
  Eigen::Index i = 0;
  for (double x : q) a(i++) = x;
  i = 0;
  for (double x : p) b(i++) = x;
  return {a, b};
}

}  // namespace

TEST_CASE("clock laws") {
  auto e = RandomClock::exponential(2.0, 7).stream();
  auto g = RandomClock::gamma(2.0, 3.0, 7).stream();
  auto u = RandomClock::uniform(0.5, 7).stream();
  double se = 0.0, sg = 0.0, su = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double a = e.next(), b = g.next(), c = u.next();
    CHECK_UNARY(a > 0.0);
    CHECK_UNARY(b > 0.0);
    CHECK_UNARY((c > 0.0 && c <= 0.5));
    se += a;
    sg += b;
    su += c;
  }
  CHECK(se / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sg / n == doctest::Approx(2.0 / 3.0).epsilon(0.01));
  CHECK(su / n == doctest::Approx(0.25).epsilon(0.01));
  CHECK(RandomClock::exponential(1.0).satisfies_condition_d());
  CHECK(RandomClock::gamma(2.0, 1.0).satisfies_condition_d());
  CHECK_FALSE(RandomClock::uniform(1.0).satisfies_condition_d());
}

TEST_CASE("clock parsing") {
  CHECK(RandomClock::parse("exp:3").mean() == doctest::Approx(1.0 / 3.0));
  CHECK(RandomClock::parse("gamma:2,4").mean() == doctest::Approx(0.5));
  CHECK(RandomClock::parse("uniform:2").law() == RandomClock::Law::kUniform);
  CHECK_THROWS_AS(RandomClock::parse("exp:-1"), Error);
  CHECK_THROWS_AS(RandomClock::parse("exp"), Error);
  CHECK_THROWS_AS(RandomClock::parse("poisson:1"), Error);
  CHECK_THROWS_AS(RandomClock::parse("gamma:2"), Error);
  CHECK_THROWS_AS(RandomClock::parse("exp:1x"), Error);
}

TEST_CASE("velocity flip") {
  const auto psi = state({0.3, -0.2}, {1, 2});
  const auto f = velocity_flip(psi);
  CHECK(f.p(0) == -1);
  CHECK(f.p(1) == 2);
  CHECK(f.q == psi.q);
  CHECK(velocity_flip(f).stacked() == psi.stacked());
  const QuadraticHamiltonian H(chain2());
  CHECK(energy(H, f) == energy(H, psi));
}

TEST_CASE("simulate_flip basics") {
  const QuadraticHamiltonian H(chain2());
  const auto psi = state({0.5, 0.1}, {0.2, -0.3});

  SUBCASE("no flips before the first clock time") {
    // Uniform(0, b) with b huge: the first holding time exceeds T almost surely.
    const auto traj = simulate_flip(H, psi, RandomClock::uniform(1e9, 3), 1.0);
    CHECK(traj.flips() == 0);
    const auto end = traj.state_at(H, 1.0);
    CHECK((end.stacked() - flow(H, psi, 1.0).stacked()).norm() < 1e-12);
  }
  SUBCASE("energy conserved at every event and in between") {
    const auto traj = simulate_flip(H, psi, RandomClock::exponential(1.0, 5), 200.0);
    CHECK(traj.flips() > 100);
    const double h = energy(H, psi);
    double last = -1.0;
    for (const auto& ev : traj.events) {
      CHECK(std::abs(energy(H, ev.state) - h) <= 1e-8 * h);
      CHECK(ev.time > last);
      last = ev.time;
    }
    CHECK(traj.events.front().time == 0.0);
    for (double t : {0.0, 13.3, 77.7, 200.0}) CHECK(std::abs(energy(H, traj.state_at(H, t)) - h) <= 1e-8 * h);
  }
  SUBCASE("deterministic for a fixed seed") {
    const auto a = simulate_flip(H, psi, RandomClock::exponential(1.0, 9), 50.0);
    const auto b = simulate_flip(H, psi, RandomClock::exponential(1.0, 9), 50.0);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t k = 0; k < a.events.size(); ++k) {
      CHECK(a.events[k].time == b.events[k].time);
      CHECK(a.events[k].state.stacked() == b.events[k].state.stacked());
    }
  }
  SUBCASE("1-D oscillator stays on its circle") {
    const QuadraticHamiltonian H1(Eigen::MatrixXd::Identity(1, 1));
    const auto s = state({0.6}, {0.8});
    const auto traj = simulate_flip(H1, s, RandomClock::gamma(2.0, 1.0, 1), 100.0);
    for (const auto& ev : traj.events) {
      CHECK(ev.state.q(0) * ev.state.q(0) + ev.state.p(0) * ev.state.p(0) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(simulate_flip(H, psi, RandomClock::exponential(1.0), 0.0), Error);
}

TEST_CASE("observable parsing") {
  const Eigen::MatrixXd V = chain2();
  const auto psi = state({0.5, -1.5}, {2.0, 3.0});
  CHECK(Observable::parse("p1^2", V)(psi) == doctest::Approx(4.0));
  CHECK(Observable::parse("q1q2", V)(psi) == doctest::Approx(-0.75));
  CHECK(Observable::parse("0.5*p1*p2 - q2", V)(psi) == doctest::Approx(3.0 + 1.5));
  CHECK(Observable::parse("1", V)(psi) == doctest::Approx(1.0));
  // H1 + H2 is the total energy
  const QuadraticHamiltonian H(V);
  const double parts = Observable::parse("H1", V)(psi) + Observable::parse("H2", V)(psi);
  CHECK(parts == doctest::Approx(energy(H, psi)));
  CHECK_THROWS_AS(Observable::parse("x1", V), Error);
  CHECK_THROWS_AS(Observable::parse("p0", V), Error);
  CHECK_THROWS_AS(Observable::parse("", V), Error);
  CHECK_THROWS_AS(Observable::parse("p3", V), Error);
}

TEST_CASE("time averages") {
  const Eigen::MatrixXd V = chain2();
  const QuadraticHamiltonian H(V);
  const auto psi = state({0.5, 0.1}, {0.2, -0.3});
  const auto clock = RandomClock::exponential(1.0, 2);
  CHECK(time_average(H, psi, clock, 123.4, Observable::parse("1", V)) == doctest::Approx(1.0).epsilon(1e-13));
  const double h = energy(H, psi);
  const double e = time_average(H, psi, clock, 123.4, Observable::parse("H1 + H2", V));
  CHECK(std::abs(e - h) <= 1e-12 * h);

  // Pure flow of a 1-D oscillator: mean of p^2 over one period is h.
  const QuadraticHamiltonian H1(Eigen::MatrixXd::Identity(1, 1));
  const double avg = time_average(H1, state({1.0}, {0.0}), RandomClock::uniform(1e9, 1), 2.0 * std::acos(-1.0),
                                  Observable::parse("p1^2", Eigen::MatrixXd::Identity(1, 1)));
  CHECK(avg == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("microcanonical average of p1^2") {
  const QuadraticHamiltonian H(chain2());
  const auto est = microcanonical_average(H, 1.0, Observable::parse("p1^2", chain2()), 200000, 3);
  CHECK(std::abs(est.mean - 0.5) <= 4.0 * est.stderr_);
  CHECK_THROWS_AS(microcanonical_average(H, 1.0, Observable::parse("p1^2", chain2()), 1, 3), Error);
}

TEST_CASE("ergodicity experiment: ergodic chain and the decoupled counterexample") {
  const Eigen::MatrixXd V = chain2();
  std::vector<Observable> obs{Observable::parse("p1^2", V), Observable::parse("p2^2", V),
                              Observable::parse("q1q2", V)};
  ErgodicityConfig cfg;
  cfg.horizon = 2e4;
  cfg.replicas = 3;
  cfg.reference_samples = 200000;
  cfg.seed = 17;
  const auto rep = ergodicity_experiment(QuadraticHamiltonian(V), obs, cfg);
  CHECK(rep.ergodic);
  CHECK(rep.v_plus);
  CHECK_FALSE(rep.independence.relation_found);
  REQUIRE(rep.covering_bound.has_value());
  CHECK(*rep.covering_bound == 6);
  for (const auto& o : rep.observables) CHECK(o.time_averages.size() == 3);

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 4.0;
  std::vector<Observable> obs2{Observable::parse("p2^2", D)};
  ErgodicityConfig bad = cfg;
  bad.horizon = 1e3;
  bad.initial = state({0.7, 0.0}, {0.2, 0.0});  // all energy in mode 1
  const auto rep2 = ergodicity_experiment(QuadraticHamiltonian(D), obs2, bad);
  CHECK_FALSE(rep2.ergodic);
  CHECK_FALSE(rep2.v_plus);
  CHECK_FALSE(rep2.covering_bound.has_value());
  CHECK(rep2.observables[0].reference > 0.0);
  CHECK(std::abs(rep2.observables[0].time_averages[0]) < 1e-12);
  CHECK(rep2.observables[0].worst_rel_error > 0.5);
}

TEST_CASE("ergodicity experiment is reproducible and Cesaro-stable") {
  const Eigen::MatrixXd V = chain2();
  std::vector<Observable> obs{Observable::parse("p1^2", V)};
  ErgodicityConfig cfg;
  cfg.horizon = 5e3;
  cfg.replicas = 2;
  cfg.reference_samples = 100000;
  cfg.seed = 4;
  const auto a = ergodicity_experiment(QuadraticHamiltonian(V), obs, cfg);
  const auto b = ergodicity_experiment(QuadraticHamiltonian(V), obs, cfg);
  CHECK(a.observables[0].time_averages == b.observables[0].time_averages);
  cfg.horizon = 1e4;
  const auto c = ergodicity_experiment(QuadraticHamiltonian(V), obs, cfg);
  CHECK(c.observables[0].worst_rel_error <= std::max(0.05, 2.0 * a.observables[0].worst_rel_error));
  cfg.energy = 0.0;
  CHECK_THROWS_AS(ergodicity_experiment(QuadraticHamiltonian(V), obs, cfg), Error);
}
