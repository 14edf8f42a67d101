// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include "ergodyn/cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>
#include <sstream>

#include "ergodyn/cli/verify.hpp"
#include "ergodyn/error.hpp"
#include "ergodyn/flip_dynamics.hpp"
#include "ergodyn/gibbs_memory.hpp"
#include "ergodyn/matrix_io.hpp"
#include "ergodyn/phase_core.hpp"
#include "ergodyn/quantum_switch.hpp"

namespace ergodyn::cli {

using nlohmann::json;

namespace {

struct Payload {
  json body = json::object();
  bool pass = true;
  std::optional<std::string> csv;
};

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
  }
  return out;
}

double positive(const ExperimentConfig& c, const std::string& key) {
  const double v = c.real(key);
  if (!(v > 0.0)) throw Error(ErrorCode::kConfigError, "key '" + key + "' must be positive");
  return v;
}

long at_least(const ExperimentConfig& c, const std::string& key, long lo) {
  const long v = c.integer(key);
  if (v < lo) throw Error(ErrorCode::kConfigError, "key '" + key + "' must be at least " + std::to_string(lo));
  return v;
}

double nonnegative(const ExperimentConfig& c, const std::string& key) {
  const double v = c.real(key);
  if (v < 0.0) throw Error(ErrorCode::kConfigError, "key '" + key + "' must be nonnegative");
  return v;
}

RandomClock clock_of(const ExperimentConfig& c) {
  try {
    return RandomClock::parse(c.text("clock"), c.seed());
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, std::string("key 'clock': ") + e.what());
  }
}

gibbs::CovarianceKernel kernel_of(const ExperimentConfig& c) {
  try {
    return gibbs::CovarianceKernel::parse(c.text("kernel"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, std::string("key 'kernel': ") + e.what());
  }
}

quantum::HermitianMatrix hermitian_of(const ExperimentConfig& c, const std::string& key) {
  const std::string& v = c.text(key);
  if (v.rfind("pauli:", 0) == 0) {
    const auto axis = v.substr(6);
    if (axis == "x") return quantum::pauli_x();
    if (axis == "y") return quantum::pauli_y();
    if (axis == "z") return quantum::pauli_z();
    throw Error(ErrorCode::kConfigError, "key '" + key + "': unknown Pauli axis '" + axis + "'");
  }
  if (v.rfind("diag:", 0) == 0) {
    const auto parts = split(v.substr(5), ',');
    Eigen::VectorXd d(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t k = 0; k < parts.size(); ++k) {
      try {
        std::size_t used = 0;
        d(static_cast<Eigen::Index>(k)) = std::stod(parts[k], &used);
        if (used != parts[k].size()) throw std::invalid_argument(parts[k]);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kConfigError, "key '" + key + "': bad diagonal entry '" + parts[k] + "'");
      }
    }
    if (d.size() == 0) throw Error(ErrorCode::kConfigError, "key '" + key + "': empty diagonal");
    return quantum::diagonal(d);
  }
  return quantum::HermitianMatrix(io::read_complex_matrix(v));
}

json relation_json(const phase::RelationReport& r) {
  return {{"relation_found", r.relation_found}, {"relation", r.relation}, {"residual", r.residual},
          {"max_coeff", r.max_coeff}, {"tol", r.tol}};
}

Payload flip_sim(const ExperimentConfig& c) {
  const Eigen::MatrixXd V = io::read_real_matrix(c.text("matrix"));
  const phase::QuadraticHamiltonian H(V);
  std::vector<flip::Observable> obs;
  if (c.text("observables") == "auto") {
    for (Eigen::Index i = 1; i <= H.dim(); ++i) obs.push_back(flip::Observable::parse("p" + std::to_string(i) + "^2", V));
    if (H.dim() >= 2) obs.push_back(flip::Observable::parse("q1q2", V));
  } else {
    for (const auto& f : split(c.text("observables"), ',')) obs.push_back(flip::Observable::parse(f, V));
  }
  if (obs.empty()) throw Error(ErrorCode::kConfigError, "key 'observables' is empty");
  flip::ErgodicityConfig cfg;
  cfg.energy = positive(c, "energy");
  cfg.clock = clock_of(c);
  cfg.horizon = positive(c, "time");
  cfg.replicas = static_cast<int>(at_least(c, "replicas", 1));
  cfg.seed = c.seed();
  cfg.threshold = positive(c, "threshold");
  cfg.reference_samples = static_cast<std::size_t>(at_least(c, "reference-samples", 2));
  cfg.max_coeff = static_cast<int>(at_least(c, "max-coeff", 1));
  cfg.relation_tol = positive(c, "relation-tol");
  const auto rep = flip::ergodicity_experiment(H, obs, cfg);
  Payload p;
  json list = json::array();
  for (const auto& o : rep.observables) {
    double mean = 0.0;
    for (double a : o.time_averages) mean += a / static_cast<double>(o.time_averages.size());
    list.push_back({{"name", o.name}, {"time_average", mean}, {"time_averages", o.time_averages},
                    {"reference", o.reference}, {"reference_stderr", o.reference_stderr},
                    {"rel_error", o.worst_rel_error}, {"pass", o.pass}});
  }
  p.body = {{"observables", list},
            {"threshold", rep.threshold},
            {"ergodic", rep.ergodic},
            {"clock", cfg.clock.describe()},
            {"diagnostics",
             {{"v_plus", rep.v_plus},
              {"covering_bound", rep.covering_bound ? json(*rep.covering_bound) : json(nullptr)},
              {"independence_certificate", relation_json(rep.independence)}}}};
  p.pass = rep.ergodic;
  return p;
}

json criterion_json(const quantum::CriterionReport& r) {
  return {{"offdiagonal_nonzero", r.offdiagonal_nonzero}, {"gaps_distinct", r.gaps_distinct},
          {"min_offdiagonal", r.min_offdiagonal},         {"min_gap_separation", r.min_gap_separation},
          {"trace1", r.trace1},                           {"trace2", r.trace2},
          {"both_traceless", r.both_traceless},           {"applicable", r.applicable},
          {"predicted_dim", r.predicted_dim}};
}

Payload qc_check(const ExperimentConfig& c) {
  const auto h1 = hermitian_of(c, "h1");
  const auto h2 = hermitian_of(c, "h2");
  if (h1.dim() != h2.dim()) throw Error(ErrorCode::kDimensionMismatch, "h1 and h2 differ in size");
  const auto closure = quantum::lie_closure(h1, h2, positive(c, "lie-tol"));
  const auto n = h1.dim();
  Payload p;
  p.body = {{"n", n},
            {"lie_dim", closure.dim},
            {"generations", closure.generations},
            {"full_dim", n * n},
            {"u_controllable", closure.dim == n * n},
            {"explicit_criterion", criterion_json(quantum::check_explicit_criterion(h1, h2))}};
  return p;
}

json moments_json(const quantum::MomentReport& m) {
  json z = json::array();
  for (const auto& s : m.z_scores) z.push_back({{"label", s.label}, {"estimate", s.estimate}, {"target", s.target}, {"z", s.z}});
  return {{"samples", m.samples}, {"max_abs_z", m.max_abs_z}, {"threshold", m.threshold}, {"pass", m.pass}, {"z_scores", z}};
}

Payload qc_sim(const ExperimentConfig& c) {
  using namespace quantum;
  const auto h1 = hermitian_of(c, "h1");
  const auto h2 = hermitian_of(c, "h2");
  if (h1.dim() != h2.dim()) throw Error(ErrorCode::kDimensionMismatch, "h1 and h2 differ in size");
  const auto n = h1.dim();
  const int steps = static_cast<int>(at_least(c, "steps", 1));
  const long runs = at_least(c, "runs", 100);
  const double threshold = positive(c, "threshold");
  const RandomClock clock = clock_of(c);
  std::vector<UnitaryMatrix> switched, reference;
  Rng rng = make_stream(c.seed(), 0x4aa5);
  for (long k = 0; k < runs; ++k) {
    switched.push_back(switch_endpoint(h1, h2, clock.with_seed(c.seed() * 1000003ULL + k), steps));
    reference.push_back(haar_unitary(n, rng));
  }
  const auto sw = haar_moment_test(switched, threshold);
  const auto ref = haar_moment_test(reference, threshold);

  std::vector<NamedObservable> obs;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    d(k) = 1.0;
    obs.push_back({"P" + std::to_string(k + 1), diagonal(d)});
  }
  if (n >= 2) {
    CMatrix x = CMatrix::Zero(n, n);
    x(0, 1) = x(1, 0) = 1.0;
    obs.push_back({"X12", HermitianMatrix(x)});
  }
  CVector psi = CVector::Zero(n);
  psi(0) = 1.0;
  const double horizon = positive(c, "horizon");
  const auto ces = cesaro_density(h1, h2, clock, DensityMatrix::pure(psi), obs, horizon);
  const double tol = positive(c, "cesaro-tol");
  json entries = json::array();
  double worst = 0.0;
  for (const auto& e : ces.entries) {
    worst = std::max(worst, e.deviation);
    entries.push_back({{"name", e.name}, {"average", e.average}, {"reference", e.reference}, {"deviation", e.deviation}});
  }
  Payload p;
  p.body = {{"u_controllable", is_u_controllable(h1, h2)},
            {"steps", steps},
            {"runs", runs},
            {"switch_moments", moments_json(sw)},
            {"reference_moments", moments_json(ref)},
            {"cesaro",
             {{"horizon", ces.horizon}, {"segments", ces.segments}, {"initial_state", "e1"},
              {"entries", entries}, {"max_deviation", worst}, {"tolerance", tol}, {"trace_average", ces.trace_average}}}};
  p.pass = sw.pass && worst <= tol;
  return p;
}

gibbs::QuadratureOptions quadrature_of(const ExperimentConfig& c) {
  gibbs::QuadratureOptions q;
  q.rel_tol = positive(c, "rel-tol");
  q.tail_tol = positive(c, "tail-tol");
  q.max_horizon = positive(c, "max-horizon");
  return q;
}

Payload cov(const ExperimentConfig& c) {
  const phase::QuadraticHamiltonian H(io::read_real_matrix(c.text("matrix")));
  const auto kernel = kernel_of(c);
  const auto sys = gibbs::build_driven(H, nonnegative(c, "alpha"), kernel);
  const double lag = c.real("lag");
  const std::string& format = c.text("format");
  if (format != "csv" && format != "json") throw Error(ErrorCode::kConfigError, "key 'format' must be csv or json");
  const Eigen::MatrixXd C = lag == 0.0 ? gibbs::stationary_colored(sys, quadrature_of(c)).C
                                       : gibbs::lagged_covariance(sys, lag, quadrature_of(c));
  const gibbs::StationaryCovariance sc{C};
  Payload p;
  p.body = {{"kernel", kernel.name()},
            {"lag", lag},
            {"l0_dim", sys.l0_dim},
            {"spectral_abscissa", sys.spectral_abscissa},
            {"qp_max_abs", sc.qp().cwiseAbs().maxCoeff()},
            {"matrix", to_json(C)}};
  if (lag == 0.0) p.body["symmetric_psd"] = sc.is_symmetric_psd();
  if (format == "csv") p.csv = io::to_csv(C);
  return p;
}

Payload cov_verify(const ExperimentConfig& c) {
  const phase::QuadraticHamiltonian H(io::read_real_matrix(c.text("matrix")));
  const auto kernel = kernel_of(c);
  const double alpha = nonnegative(c, "alpha");
  const auto sys = gibbs::build_driven(H, alpha, kernel);
  gibbs::SdeOptions o;
  o.horizon = positive(c, "time");
  o.dt = positive(c, "dt");
  o.paths = static_cast<int>(at_least(c, "paths", 2));
  o.frequencies = static_cast<int>(at_least(c, "frequencies", 1));
  o.seed = c.seed();
  const double tol = positive(c, "tolerance");
  const auto rep = gibbs::sde_oracle(sys, o);
  Payload p;
  if (alpha == 0.0) {
    if (!kernel.is_white()) throw Error(ErrorCode::kConfigError, "alpha = 0 is only checked for white noise");
    const double expected = kernel.white_intensity() / 2.0;
    const double rel = std::abs(rep.energy_slope / expected - 1.0);
    p.body = {{"mode", "energy-growth"}, {"energy_slope", rep.energy_slope}, {"expected_slope", expected},
              {"rel_error", rel}, {"tolerance", tol}};
    p.pass = rel <= tol;
    return p;
  }
  const Eigen::MatrixXd A = gibbs::stationary_colored(sys).C;
  const Eigen::MatrixXd& E = rep.covariance.C;
  const double scale = A.cwiseAbs().maxCoeff();
  json entries = json::array();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = i; j < A.cols(); ++j) {
      if (std::abs(A(i, j)) < 1e-3 * scale) continue;
      const double rel = std::abs(E(i, j) / A(i, j) - 1.0);
      worst = std::max(worst, rel);
      entries.push_back({{"i", i}, {"j", j}, {"analytic", A(i, j)}, {"empirical", E(i, j)},
                         {"standard_error", rep.standard_error(i, j)}, {"rel_error", rel}});
    }
  }
  p.body = {{"mode", "covariance"}, {"analytic", to_json(A)}, {"empirical", to_json(E)},
            {"standard_error", to_json(rep.standard_error)}, {"entries", entries},
            {"max_rel_error", worst}, {"tolerance", tol}};
  p.pass = worst <= tol;
  return p;
}

Payload thermo_scan(const ExperimentConfig& c) {
  const std::string& g = c.text("graph");
  if (g.rfind("chain:", 0) != 0) throw Error(ErrorCode::kConfigError, "key 'graph' must be chain:N1,N2,...");
  std::vector<int> sizes;
  for (const auto& s : split(g.substr(6), ',')) {
    try {
      sizes.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, "key 'graph': bad size '" + s + "'");
    }
  }
  std::vector<std::pair<int, int>> probes;
  for (const auto& pr : split(c.text("probe"), ';')) {
    const auto ij = split(pr, ',');
    try {
      if (ij.size() != 2) throw std::invalid_argument(pr);
      probes.emplace_back(std::stoi(ij[0]), std::stoi(ij[1]));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, "key 'probe': expected i,j pairs, got '" + pr + "'");
    }
  }
  const auto rep = gibbs::thermo_scan(sizes, gibbs::chain_template(c.real("diagonal")), positive(c, "alpha"),
                                      kernel_of(c), probes, c.seed());
  json stages = json::array();
  for (const auto& s : rep.stages) {
    stages.push_back({{"size", s.size}, {"perturbation", s.perturbation}, {"internal_index", s.internal_index},
                      {"pp", s.pp}, {"qq", s.qq}, {"cv_pp", s.cv_pp}});
  }
  json pr = json::array();
  for (auto [i, j] : rep.probes) pr.push_back({i, j});
  Payload p;
  p.body = {{"mapping", "template vertex v sits at internal index N_n - v; the driven vertex N_n is 0"},
            {"probes", pr},
            {"stages", stages},
            {"pp_differences", rep.pp_differences},
            {"qq_differences", rep.qq_differences},
            {"pp_differences_decrease", rep.pp_differences_decrease}};
  p.pass = rep.pp_differences_decrease || rep.stages.size() < 3;
  return p;
}

Payload ldim(const ExperimentConfig& c) {
  const phase::QuadraticHamiltonian H(io::read_real_matrix(c.text("matrix")));
  const auto mix = phase::mixing_subspace(H);
  const int n = static_cast<int>(H.dim());
  const std::vector<double> freqs(H.omega().data(), H.omega().data() + n);
  const auto rel = phase::rational_independence(freqs, static_cast<int>(at_least(c, "max-coeff", 1)),
                                                positive(c, "relation-tol"));
  std::optional<int> bound;
  if (mix.dim == n) bound = phase::covering_bound(H);
  Payload p;
  p.body = {{"n", n},
            {"dim_l_v", mix.dim},
            {"dim_l_minus", 2 * mix.dim},
            {"dim_l0", 2 * (n - mix.dim)},
            {"v_plus", mix.dim == n},
            {"frequencies", freqs},
            {"overlaps", std::vector<double>(mix.overlaps.data(), mix.overlaps.data() + n)},
            {"covering_bound", bound ? json(*bound) : json(nullptr)},
            {"independence_certificate", relation_json(rel)}};
  return p;
}

Payload generic_sample(const ExperimentConfig& c) {
  const int samples = static_cast<int>(at_least(c, "samples", 1));
  const double threshold = c.real("threshold");
  Payload p;
  if (c.has("graph")) {
    const auto graph = gibbs::LocalGraph::parse(c.text("graph"));
    const auto rep = gibbs::sample_local_hamiltonians(graph, samples, c.seed(), positive(c, "margin"));
    p.body = {{"mode", "local-l0"}, {"graph", c.text("graph")}, {"samples", rep.samples},
              {"full_rank", rep.full_rank}, {"fraction", rep.fraction}, {"failures", rep.failures}};
    p.pass = rep.fraction >= threshold;
  } else {
    const auto rep = quantum::sample_generic_pairs(at_least(c, "dim", 1), samples, c.seed());
    p.body = {{"mode", "hermitian-pairs"}, {"n", c.integer("dim")}, {"samples", rep.samples},
              {"controllable", rep.controllable}, {"fraction", rep.fraction}, {"failures", rep.failures}};
    p.pass = rep.fraction >= threshold;
  }
  return p;
}

Payload verify(const ExperimentConfig& c, const std::function<void(const std::string&)>& progress) {
  const Profile profile = parse_profile(c.text("profile"));
  std::vector<int> ids;
  for (const auto& s : split(c.text("only"), ',')) {
    try {
      ids.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, "key 'only': bad criterion id '" + s + "'");
    }
  }
  const auto results = verify_suite(profile, c.seed(), ids, [&](const CriterionResult& r) {
    if (progress) progress(format_line(r));
  });
  Payload p;
  json list = json::array();
  for (const auto& r : results) {
    list.push_back(to_json(r));
    p.pass = p.pass && r.pass;
  }
  p.body = {{"profile", std::string(to_string(profile))}, {"criteria", list}};
  return p;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ResultEnvelope run(const ExperimentConfig& config, const std::function<void(const std::string&)>& progress) {
  const auto start = std::chrono::steady_clock::now();
  const std::string& kind = config.kind();
  Payload p;
  if (kind == "flip-sim") {
    p = flip_sim(config);
  } else if (kind == "qc-check") {
    p = qc_check(config);
  } else if (kind == "qc-sim") {
    p = qc_sim(config);
  } else if (kind == "cov") {
    p = cov(config);
  } else if (kind == "cov-verify") {
    p = cov_verify(config);
  } else if (kind == "thermo-scan") {
    p = thermo_scan(config);
  } else if (kind == "ldim") {
    p = ldim(config);
  } else if (kind == "generic-sample") {
    p = generic_sample(config);
  } else if (kind == "verify") {
    p = verify(config, progress);
  } else {
    throw Error(ErrorCode::kConfigError, "unknown experiment kind '" + kind + "'");
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ResultEnvelope env;
  env.pass = p.pass;
  env.csv = std::move(p.csv);
  env.document = {{"schema", kSchema},
                  {"artifact_version", kArtifactVersion},
                  {"experiment", kind},
                  {"config", config.echo()},
                  {"seed", config.seed()},
                  {"status", p.pass ? "ok" : "fail"},
                  {"payload", std::move(p.body)},
                  {"timestamp", {{"utc", utc_now()}, {"wall_clock_seconds", seconds}}}};
  return env;
}

void emit(const ResultEnvelope& result, const ExperimentConfig& config, std::ostream& fallback) {
  const std::string text = result.csv ? *result.csv : result.document.dump(2) + "\n";
  if (config.has("out")) {
    io::write_atomic(config.text("out"), text);
  } else {
    fallback << text;
  }
}

}  // namespace ergodyn::cli
