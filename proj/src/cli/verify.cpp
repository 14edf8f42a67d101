// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include "ergodyn/cli/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "ergodyn/error.hpp"
#include "ergodyn/flip_dynamics.hpp"
#include "ergodyn/gibbs_memory.hpp"
#include "ergodyn/numeric.hpp"
#include "ergodyn/phase_core.hpp"
#include "ergodyn/quantum_switch.hpp"

namespace ergodyn::cli {

using nlohmann::json;

Profile parse_profile(std::string_view text) {
  if (text == "quick") return Profile::kQuick;
  if (text == "full") return Profile::kFull;
  throw Error(ErrorCode::kConfigError, "profile must be quick or full, got '" + std::string(text) + "'");
}

std::string_view to_string(Profile profile) { return profile == Profile::kQuick ? "quick" : "full"; }

namespace {

bool full(Profile p) { return p == Profile::kFull; }

CriterionResult make(double value, double limit, std::string relation, bool extra_ok = true) {
  CriterionResult r;
  r.value = value;
  r.limit = limit;
  r.relation = std::move(relation);
  const bool ok = r.relation == "<=" ? value <= limit : value >= limit;
  r.pass = ok && extra_ok && std::isfinite(value);
  return r;
}

Eigen::MatrixXd random_spd(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M(i, j) = g(rng);
  }
  return M * M.transpose() / n + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M(i, j) = g(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  return qr.householderQ();
}

Eigen::MatrixXd chain_matrix(int n, double diag) {
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    V(i, i) = diag;
    if (i + 1 < n) V(i, i + 1) = V(i + 1, i) = -1.0;
  }
  return V;
}

// 1. Gibbs recovery for white noise.
CriterionResult gibbs_recovery(Profile, std::uint64_t seed) {
  Rng rng = make_stream(seed, 1);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_real_distribution<double> alpha_d(0.2, 2.0), sigma_d(0.5, 2.0);
  double worst_entry = 0.0, worst_residual = 0.0;
  int systems = 0;
  while (systems < 20) {
    const int n = dim(rng);
    const double alpha = alpha_d(rng), sigma2 = sigma_d(rng);
    const phase::QuadraticHamiltonian H(random_spd(n, rng));
    const auto sys = gibbs::build_driven(H, alpha, gibbs::CovarianceKernel::white(sigma2));
    if (!sys.stable) continue;
    ++systems;
    const auto C = gibbs::stationary_white(sys).C;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    G.topLeftCorner(n, n) = H.V().partialPivLu().inverse();
    G.bottomRightCorner(n, n).setIdentity();
    G *= sigma2 / (2.0 * alpha);
    const double scale = G.cwiseAbs().maxCoeff();
    worst_entry = std::max(worst_entry, (C - G).cwiseAbs().maxCoeff() / scale);
    worst_residual = std::max(worst_residual, gibbs::stationarity_residual(sys, C) / sigma2);
  }
  auto r = make(std::max(worst_entry, worst_residual), 1e-9, "<=");
  r.details = {{"systems", systems}, {"max_rel_entry_error", worst_entry}, {"max_rel_residual", worst_residual}};
  char buf[160];
  std::snprintf(buf, sizeof buf, "20 systems, entry err %.2e, residual %.2e", worst_entry, worst_residual);
  r.summary = buf;
  return r;
}

// 2. White-noise SDE vs analytic covariance, N = 1.
CriterionResult white_sde(Profile p, std::uint64_t seed) {
  Eigen::MatrixXd V(1, 1);
  V << 1.5;
  const auto sys = gibbs::build_driven(phase::QuadraticHamiltonian(V), 0.7, gibbs::CovarianceKernel::white(1.3));
  gibbs::SdeOptions o;
  o.horizon = full(p) ? 1e4 : 2e3;
  o.dt = 1e-3;
  o.paths = 16;
  o.seed = seed;
  const auto rep = gibbs::sde_oracle(sys, o);
  const auto ref = gibbs::stationary_white(sys).C;
  double worst = 0.0;
  for (int k = 0; k < 2; ++k) worst = std::max(worst, std::abs(rep.covariance.C(k, k) / ref(k, k) - 1.0));
  auto r = make(worst, 0.03, "<=");
  r.details = {{"horizon", o.horizon}, {"paths", o.paths}, {"empirical_qq", rep.covariance.C(0, 0)},
               {"empirical_pp", rep.covariance.C(1, 1)}, {"analytic_qq", ref(0, 0)}, {"analytic_pp", ref(1, 1)}};
  char buf[160];
  std::snprintf(buf, sizeof buf, "max rel diag error %.4f (T=%g)", worst, o.horizon);
  r.summary = buf;
  return r;
}

// 3. Memory breaks Gibbs: zero q-p block, nonzero p1p2, SDE confirmation.
CriterionResult memory_non_gibbs(Profile p, std::uint64_t seed) {
  const phase::QuadraticHamiltonian H(chain_matrix(2, 2.0));
  const auto sys = gibbs::build_driven(H, 1.0, gibbs::CovarianceKernel::gaussian());
  const auto C = gibbs::stationary_colored(sys);
  const double qp = C.qp().cwiseAbs().maxCoeff();
  const double p12 = C.pp(0, 1);
  gibbs::SdeOptions o;
  o.horizon = full(p) ? 1e4 : 2e3;
  o.dt = 0.05;
  o.paths = full(p) ? 32 : 16;
  o.seed = seed;
  const auto rep = gibbs::sde_oracle(sys, o);
  const double emp = rep.covariance.pp(0, 1);
  const double rel = std::abs(emp / p12 - 1.0);
  const bool ok = qp <= 1e-8 && std::abs(p12) >= 1e-3 && (emp > 0) == (p12 > 0);
  auto r = make(rel, 0.10, "<=", ok);
  r.details = {{"qp_max_abs", qp}, {"analytic_p1p2", p12}, {"sde_p1p2", emp},
               {"sde_p1p2_stderr", rep.standard_error(3, 2)}, {"horizon", o.horizon}, {"paths", o.paths}};
  char buf[200];
  std::snprintf(buf, sizeof buf, "qp %.1e, C(p1,p2) %.5f, sde %.5f, rel %.4f", qp, p12, emp, rel);
  r.summary = buf;
  return r;
}

// 4. Velocity-flip ergodicity and the non-mixing counterexample.
CriterionResult flip_ergodicity(Profile p, std::uint64_t seed) {
  const Eigen::MatrixXd V = chain_matrix(2, 2.0);
  const phase::QuadraticHamiltonian H(V);
  std::vector<flip::Observable> obs;
  for (const char* f : {"p1^2", "p2^2", "q1q2"}) obs.push_back(flip::Observable::parse(f, V));
  flip::ErgodicityConfig cfg;
  cfg.energy = 1.0;
  cfg.clock = RandomClock::exponential(1.0);
  cfg.horizon = full(p) ? 1e5 : 1e4;
  cfg.replicas = full(p) ? 8 : 4;
  cfg.reference_samples = full(p) ? 1'000'000 : 100'000;
  cfg.seed = seed;
  cfg.max_coeff = 20;
  const auto rep = flip::ergodicity_experiment(H, obs, cfg);
  double worst = 0.0;
  json per = json::object();
  for (const auto& o : rep.observables) {
    worst = std::max(worst, o.worst_rel_error);
    per[o.name] = {{"reference", o.reference}, {"worst_rel_error", o.worst_rel_error}};
  }

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 4.0;
  const phase::QuadraticHamiltonian Hd(D);
  std::vector<flip::Observable> obs_d;
  for (const char* f : {"p1^2", "p2^2", "q1q2"}) obs_d.push_back(flip::Observable::parse(f, D));
  flip::ErgodicityConfig cd = cfg;
  cd.horizon = 1e4;
  cd.replicas = 2;
  cd.reference_samples = 100'000;
  Eigen::VectorXd q(2), pv(2);
  q << 0.0, 0.5;
  pv << 0.0, 0.3;
  cd.initial = phase::PhaseVector(q, pv);
  const auto bad = flip::ergodicity_experiment(Hd, obs_d, cd);
  double bad_err = 0.0;
  for (const auto& o : bad.observables) bad_err = std::max(bad_err, o.worst_rel_error);

  const bool certified = rep.v_plus && !rep.independence.relation_found;
  auto r = make(worst, 0.05, "<=", certified && bad_err > 0.5);
  r.details = {{"horizon", cfg.horizon}, {"replicas", cfg.replicas}, {"observables", per},
               {"v_plus", rep.v_plus}, {"relation_found", rep.independence.relation_found},
               {"counterexample_worst_rel_error", bad_err}};
  char buf[200];
  std::snprintf(buf, sizeof buf, "worst rel error %.4f over %d replicas, counterexample %.2f", worst, cfg.replicas,
                bad_err);
  r.summary = buf;
  return r;
}

// 5. Covering bound and V+ against brute-force Krylov rank.
CriterionResult covering(Profile, std::uint64_t seed) {
  const int bound = phase::covering_bound(phase::QuadraticHamiltonian(chain_matrix(2, 2.0)));
  Rng rng = make_stream(seed, 5);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int disagreements = 0, v_plus_count = 0;
  for (int s = 0; s < 100; ++s) {
    const int n = dim(rng);
    Eigen::VectorXd lambda(n);
    for (int k = 0; k < n; ++k) lambda(k) = 1.0 + (k + 0.25 + 0.5 * u(rng)) * 2.0 / n;
    Eigen::MatrixXd Q = random_orthogonal(n, rng);
    const int variant = s % 3;
    if (variant == 1 && n > 1) {
      lambda(n - 1) = lambda(0);  // repeated eigenvalue
    } else if (variant == 2 && n > 1) {
      // e_1 orthogonal to the last eigenvector.
      Eigen::MatrixXd R = Eigen::MatrixXd::Identity(n, n);
      R.bottomRightCorner(n - 1, n - 1) = random_orthogonal(n - 1, rng);
      Eigen::MatrixXd B = random_orthogonal(n - 1, rng);
      Q.setZero();
      Q.topLeftCorner(n - 1, n - 1) = B;
      Q(n - 1, n - 1) = 1.0;
      Q = (R * Q).eval();
    }
    const Eigen::MatrixXd V = Q * lambda.asDiagonal() * Q.transpose();
    const phase::QuadraticHamiltonian H(0.5 * (V + V.transpose()));
    Eigen::MatrixXd K(n, n);
    Eigen::VectorXd x = Eigen::VectorXd::Unit(n, 0);
    for (int k = 0; k < n; ++k) {
      K.col(k) = x / x.norm();
      x = H.V() * x;
    }
    const bool brute = numerical_rank(K, 1e-8) == n;
    const bool fast = phase::is_v_plus(H);
    v_plus_count += fast;
    disagreements += brute != fast;
  }
  auto r = make(disagreements, 0, "<=", bound == 6);
  r.details = {{"covering_bound_chain", bound}, {"matrices", 100}, {"v_plus", v_plus_count},
               {"disagreements", disagreements}};
  r.summary = "covering_bound " + std::to_string(bound) + ", " + std::to_string(disagreements) +
              " disagreements on 100 matrices (" + std::to_string(v_plus_count) + " in V+)";
  return r;
}

// 6. Lie closure dimensions and the explicit criterion.
CriterionResult lie_criterion(Profile, std::uint64_t seed) {
  using namespace quantum;
  Eigen::VectorXd d10(2), d01(2);
  d10 << 1.0, 0.0;
  d01 << 0.0, 1.0;
  const int dim_xz = lie_closure(pauli_x(), pauli_z()).dim;
  const int dim_xd = lie_closure(pauli_x(), diagonal(d10)).dim;
  const int dim_dd = lie_closure(diagonal(d10), diagonal(d01)).dim;
  Rng rng = make_stream(seed, 6);
  int mismatches = 0, tested = 0, traceless = 0;
  while (tested < 100) {
    const Eigen::Index n = 2 + tested % 3;
    HermitianMatrix h1 = random_hermitian(n, rng);
    HermitianMatrix h2 = random_hermitian(n, rng);
    if (tested % 2 == 0) {
      const CMatrix I = CMatrix::Identity(n, n);
      h1 = HermitianMatrix::hermitian_part(h1.matrix() - (h1.trace() / n) * I);
      h2 = HermitianMatrix::hermitian_part(h2.matrix() - (h2.trace() / n) * I);
    }
    const auto crit = check_explicit_criterion(h1, h2);
    if (!crit.applicable) continue;
    ++tested;
    traceless += crit.both_traceless;
    if (crit.predicted_dim != lie_closure(h1, h2).dim) ++mismatches;
  }
  const bool dims_ok = dim_xz == 3 && dim_xd == 4 && dim_dd == 2;
  auto r = make(mismatches, 0, "<=", dims_ok);
  r.details = {{"dim_sx_sz", dim_xz}, {"dim_sx_diag10", dim_xd}, {"dim_commuting", dim_dd},
               {"pairs", tested}, {"traceless_pairs", traceless}, {"mismatches", mismatches}};
  r.summary = "dims " + std::to_string(dim_xz) + "/" + std::to_string(dim_xd) + "/" + std::to_string(dim_dd) +
              ", " + std::to_string(mismatches) + " mismatches on 100 pairs";
  return r;
}

// 7. Random pairs are U-controllable.
CriterionResult genericity(Profile, std::uint64_t seed) {
  const auto r2 = quantum::sample_generic_pairs(2, 200, seed);
  const auto r3 = quantum::sample_generic_pairs(3, 100, seed + 1);
  const int failures = (r2.samples - r2.controllable) + (r3.samples - r3.controllable);
  auto r = make(failures, 0, "<=");
  r.details = {{"n2_fraction", r2.fraction}, {"n3_fraction", r3.fraction}, {"failures", r2.failures}};
  for (const auto& f : r3.failures) r.details["failures"].push_back(f);
  r.summary = std::to_string(r2.controllable) + "/200 at N=2, " + std::to_string(r3.controllable) + "/100 at N=3";
  return r;
}

// 8. Switch endpoints pass Haar moment tests like the reference sampler.
CriterionResult haar_convergence(Profile p, std::uint64_t seed) {
  using namespace quantum;
  Eigen::VectorXd d10(2);
  d10 << 1.0, 0.0;
  const auto h1 = pauli_x();
  const auto h2 = diagonal(d10);
  const int runs = full(p) ? 2000 : 500;
  std::vector<UnitaryMatrix> switched, reference;
  switched.reserve(runs);
  Rng rng = make_stream(seed, 8);
  for (int k = 0; k < runs; ++k) {
    const auto clock = RandomClock::exponential(1.0, seed * 1000003ULL + k);
    switched.push_back(switch_endpoint(h1, h2, clock, 50));
    reference.push_back(haar_unitary(2, rng));
  }
  const auto sw = haar_moment_test(switched, 4.0);
  const auto ref = haar_moment_test(reference, 4.0);
  auto r = make(sw.max_abs_z, 4.0, "<=", ref.pass && is_u_controllable(h1, h2));
  r.details = {{"runs", runs}, {"steps", 50}, {"switch_max_abs_z", sw.max_abs_z},
               {"reference_max_abs_z", ref.max_abs_z}, {"moments", sw.z_scores.size()}};
  char buf[160];
  std::snprintf(buf, sizeof buf, "switch max|z| %.2f, reference max|z| %.2f (%d runs)", sw.max_abs_z, ref.max_abs_z,
                runs);
  r.summary = buf;
  return r;
}

// 9. Mixed-state Cesaro limit and the fixed point E/N.
CriterionResult mixed_state(Profile, std::uint64_t seed) {
  using namespace quantum;
  Eigen::VectorXd d10(2);
  d10 << 1.0, 0.0;
  const auto clock = RandomClock::exponential(1.0, seed);
  std::vector<NamedObservable> obs{{"sigma_z", pauli_z()}, {"sigma_x", pauli_x()}};
  CVector psi = CVector::Zero(2);
  psi(0) = 1.0;
  const auto pure = cesaro_density(pauli_x(), diagonal(d10), clock, DensityMatrix::pure(psi), obs, 1e4);
  const auto mixed =
      cesaro_density(pauli_x(), diagonal(d10), clock, DensityMatrix::maximally_mixed(2), obs, 1e4);
  double fixed_dev = std::abs(mixed.trace_average - 1.0);
  for (const auto& e : mixed.entries) fixed_dev = std::max(fixed_dev, std::abs(e.average));
  const double dev = std::abs(pure.entries[0].average);
  auto r = make(dev, 0.05, "<=", fixed_dev <= 1e-10);
  r.details = {{"cesaro_sigma_z", pure.entries[0].average}, {"segments", pure.segments},
               {"fixed_point_deviation", fixed_dev}};
  char buf[160];
  std::snprintf(buf, sizeof buf, "|<sigma_z>| %.4f, fixed point deviation %.1e", dev, fixed_dev);
  r.summary = buf;
  return r;
}

// 10. Pure-state Cesaro law with C/T error.
CriterionResult pure_cesaro(Profile, std::uint64_t) {
  using namespace quantum;
  Eigen::VectorXd d(2);
  d << 0.0, 1.0;
  const auto H = diagonal(d);
  CVector psi(2);
  psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  std::vector<double> errors, bounds;
  bool within = true;
  for (double T : {1e2, 1e3, 1e4}) {
    const auto fc = fixed_hamiltonian_cesaro(H, psi, T);
    const double err = (fc.average - fc.limit).norm();
    errors.push_back(err);
    bounds.push_back(fc.error_constant / T);
    within = within && err <= fc.error_constant / T;
  }
  const bool decreasing = errors[1] < errors[0] && errors[2] < errors[1];
  const double worst_ratio = std::max({errors[0] / bounds[0], errors[1] / bounds[1], errors[2] / bounds[2]});
  const double envelope_drop = std::min(bounds[0] / bounds[1], bounds[1] / bounds[2]);
  auto r = make(worst_ratio, 1.0, "<=", within && decreasing && envelope_drop >= 10.0 - 1e-9);
  r.details = {{"errors", errors}, {"bounds", bounds}, {"decay_per_decade", {errors[0] / errors[1], errors[1] / errors[2]}},
               {"envelope_drop_per_decade", envelope_drop}};
  char buf[200];
  std::snprintf(buf, sizeof buf, "err %.2e/%.2e/%.2e, max err*T/C %.3f", errors[0], errors[1], errors[2],
                worst_ratio);
  r.summary = buf;
  return r;
}

// 11. Classical flow of the gyroscopic Hamiltonian reproduces e^{itH}f.
CriterionResult symplectic_bridge(Profile, std::uint64_t seed) {
  using namespace quantum;
  Rng rng = make_stream(seed, 11);
  std::normal_distribution<double> g(0.0, 1.0);
  const double t = 1.3;
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const Eigen::Index n = 1 + s % 4;
    const auto h = random_hermitian(n, rng);
    CVector f(n);
    for (Eigen::Index k = 0; k < n; ++k) f(k) = Complex(g(rng), g(rng));
    const CMatrix U = (Complex(0.0, t) * h.matrix()).exp();
    const CVector exact = U * f;
    const auto gyro = unitary_to_symplectic(h);
    const auto psi = gyro.evolve(split_complex(f), t);
    worst = std::max(worst, (join_complex(psi) - exact).cwiseAbs().maxCoeff());
  }
  auto r = make(worst, 1e-9, "<=");
  r.details = {{"samples", 50}, {"t", t}, {"max_abs_error", worst}};
  char buf[120];
  std::snprintf(buf, sizeof buf, "max |classical - quantum| %.2e over 50 systems", worst);
  r.summary = buf;
  return r;
}

// 12. Remainder Y_V decays away from the driven vertex.
CriterionResult remainder_decay(Profile, std::uint64_t) {
  const int n = 40;
  const auto graph = gibbs::LocalGraph::chain(n);
  const auto rep = gibbs::remainder_scan(graph, chain_matrix(n, 2.5), 1, 1.0, gibbs::CovarianceKernel::bspline(), 0);
  const double d0 = rep.rows[0].envelope_pp_diag;
  const double d20 = std::max(rep.rows[20].envelope_pp_diag, rep.noise_floor);
  const double ratio = d0 / d20;
  bool monotone = true;
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    monotone = monotone && rep.rows[k].envelope_pp_diag <= rep.rows[k - 1].envelope_pp_diag;
  }
  json env = json::array();
  for (const auto& row : rep.rows) env.push_back(row.envelope_pp_diag);
  auto r = make(ratio, 10.0, ">=", monotone && rep.decay_exponent < 0.0);
  r.details = {{"envelope_pp_diag", env}, {"decay_exponent", rep.decay_exponent}, {"noise_floor", rep.noise_floor}};
  char buf[160];
  std::snprintf(buf, sizeof buf, "envelope(0)/envelope(20) %.2e, decay exponent %.2f", ratio, rep.decay_exponent);
  r.summary = buf;
  return r;
}

// 13. Thermodynamic scan along chain truncations.
CriterionResult thermo(Profile, std::uint64_t seed) {
  const auto rep = gibbs::thermo_scan({8, 16, 32}, gibbs::chain_template(2.5), 1.0, gibbs::CovarianceKernel::gaussian(),
                                      {{1, 2}}, seed);
  const auto& d = rep.pp_differences[0];
  json stages = json::array();
  for (const auto& s : rep.stages) stages.push_back({{"size", s.size}, {"pp", s.pp[0]}, {"cv_pp", s.cv_pp[0]}});
  auto r = make(d[1] / d[0], 1.0, "<=", rep.pp_differences_decrease);
  r.pass = r.value < 1.0 && rep.pp_differences_decrease;
  r.relation = "<";
  r.details = {{"differences", d}, {"stages", stages}};
  char buf[160];
  std::snprintf(buf, sizeof buf, "successive differences %.2e, %.2e", d[0], d[1]);
  r.summary = buf;
  return r;
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "Gibbs recovery for white noise", gibbs_recovery},
      {2, "white-noise SDE matches analytic covariance", white_sde},
      {3, "memory breaks Gibbs", memory_non_gibbs},
      {4, "velocity-flip ergodicity", flip_ergodicity},
      {5, "covering diagnostics", covering},
      {6, "Lie-algebra criterion", lie_criterion},
      {7, "genericity of U-controllability", genericity},
      {8, "Haar convergence of the switch", haar_convergence},
      {9, "mixed-state Cesaro limit", mixed_state},
      {10, "pure-state Cesaro law", pure_cesaro},
      {11, "unitary to symplectic bridge", symplectic_bridge},
      {12, "remainder decay on a chain", remainder_decay},
      {13, "thermodynamic scan", thermo},
  };
  return all;
}

std::vector<CriterionResult> verify_suite(Profile profile, std::uint64_t seed, const std::vector<int>& ids,
                                          const std::function<void(const CriterionResult&)>& on_done) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c.run(profile, seed);
    } catch (const std::exception& e) {
      r = CriterionResult{};
      r.pass = false;
      r.summary = std::string("error: ") + e.what();
    }
    r.id = c.id;
    r.title = c.title;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_done) on_done(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s [%2d] ", r.pass ? "PASS" : "FAIL", r.id);
  char tail[96];
  std::snprintf(tail, sizeof tail, " | value %.4g %s %.4g | %.1fs", r.value, r.relation.c_str(), r.limit, r.seconds);
  return std::string(buf) + r.title + ": " + r.summary + tail;
}

json to_json(const CriterionResult& r) {
  return {{"id", r.id},       {"title", r.title}, {"pass", r.pass},       {"value", r.value},
          {"limit", r.limit}, {"relation", r.relation}, {"summary", r.summary}, {"details", r.details}};
}

}  // namespace ergodyn::cli
