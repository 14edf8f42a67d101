// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include "ergodyn/flip_dynamics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "ergodyn/error.hpp"

namespace ergodyn::flip {

PhaseVector velocity_flip(PhaseVector psi) {
  if (psi.dim() > 0) psi.p(0) = -psi.p(0);
  return psi;
}

FlipTrajectory simulate_flip(const QuadraticHamiltonian& H, const PhaseVector& psi0,
                             const RandomClock& clock, double horizon) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "horizon must be positive");
  FlipTrajectory traj;
  traj.energy = phase::energy(H, psi0);
  traj.horizon = horizon;
  traj.clock = clock;
  traj.events.push_back({0.0, psi0});
  auto stream = clock.stream();
  double t = 0.0;
  PhaseVector state = psi0;
  while (true) {
    const double tau = stream.next();
    if (t + tau > horizon) break;
    state = velocity_flip(phase::flow(H, state, tau));
    t += tau;
    traj.events.push_back({t, state});
  }
  return traj;
}

PhaseVector FlipTrajectory::state_at(const QuadraticHamiltonian& H, double t) const {
  if (events.empty()) throw Error(ErrorCode::kInvalidArgument, "empty trajectory");
  if (t < 0.0 || t > horizon) throw Error(ErrorCode::kInvalidArgument, "time outside [0, horizon]");
  auto it = std::upper_bound(events.begin(), events.end(), t,
                             [](double value, const FlipEvent& e) { return value < e.time; });
  const FlipEvent& e = *std::prev(it);
  return phase::flow(H, e.state, t - e.time);
}

Observable::Observable(std::string name, std::vector<Term> terms)
    : name_(std::move(name)), terms_(std::move(terms)) {}

int Observable::max_index() const {
  int m = -1;
  for (const auto& t : terms_) {
    for (int f : t.factors) m = std::max(m, f);
  }
  return m;
}

double Observable::operator()(const PhaseVector& psi) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (int f : t.factors) v *= psi.coord(f);
    total += v;
  }
  return total;
}

namespace {

class ObservableParser {
 public:
  ObservableParser(std::string_view text, const Eigen::MatrixXd& V) : text_(text), V_(V), n_(static_cast<int>(V.rows())) {}

  std::vector<Observable::Term> parse() {
    std::vector<Observable::Term> terms;
    skip_space();
    if (at_end()) fail("empty observable");
    bool first = true;
    while (!at_end()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        skip_space();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      parse_term(sign, terms);
      first = false;
      skip_space();
    }
    return terms;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kInvalidArgument,
                "observable '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + what);
  }

  int parse_int() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected an index");
    int v = 0;
    std::from_chars(text_.data() + start, text_.data() + pos_, v);
    return v;
  }

  void parse_term(double sign, std::vector<Observable::Term>& out) {
    double coeff = sign;
    bool has_number = false;
    if (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
      if (ec != std::errc()) fail("bad coefficient");
      pos_ = static_cast<std::size_t>(ptr - text_.data());
      coeff *= v;
      has_number = true;
      skip_space();
      if (!at_end() && peek() == '*') {
        ++pos_;
        skip_space();
      }
    }
    std::vector<int> factors;
    while (!at_end() && (peek() == 'q' || peek() == 'p' || peek() == 'H')) {
      const char kind = peek();
      ++pos_;
      const int index = parse_int();
      if (index < 1 || index > n_) fail("index " + std::to_string(index) + " outside 1.." + std::to_string(n_));
      if (kind == 'H') {
        if (!factors.empty()) fail("H<i> cannot be multiplied by other factors");
        const int i = index - 1;
        out.push_back({0.5 * coeff, {n_ + i, n_ + i}});
        for (int j = 0; j < n_; ++j) {
          if (V_(i, j) != 0.0) out.push_back({0.5 * coeff * V_(i, j), {i, j}});
        }
        skip_space();
        if (!at_end() && peek() != '+' && peek() != '-') fail("unexpected input after H<i>");
        return;
      }
      int power = 1;
      if (!at_end() && peek() == '^') {
        ++pos_;
        power = parse_int();
      }
      const int coord = kind == 'q' ? index - 1 : n_ + index - 1;
      for (int k = 0; k < power; ++k) factors.push_back(coord);
      skip_space();
      if (!at_end() && peek() == '*') {
        ++pos_;
        skip_space();
      }
    }
    if (factors.empty() && !has_number) fail("expected a coefficient or a factor");
    out.push_back({coeff, std::move(factors)});
  }

  std::string_view text_;
  const Eigen::MatrixXd& V_;
  int n_;
  std::size_t pos_ = 0;
};

// Segment [0, length] of the flow from `start`, split into pieces of at most
// kMaxSegment, each integrated with the 16-point rule.
template <typename Visit>
void visit_segment_nodes(const QuadraticHamiltonian& H, const PhaseVector& start, double length, Visit&& visit) {
  if (length <= 0.0) return;
  const auto& gl = gauss_legendre16();
  const int pieces = std::max(1, static_cast<int>(std::ceil(length / kMaxSegment)));
  const double h = length / pieces;
  const Eigen::VectorXd qn0 = H.to_normal(start.q);
  const Eigen::VectorXd pn0 = H.to_normal(start.p);
  const Eigen::VectorXd& w = H.omega();
  Eigen::VectorXd qn(H.dim()), pn(H.dim());
  PhaseVector psi = PhaseVector::zeros(H.dim());
  for (int j = 0; j < pieces; ++j) {
    const double mid = (j + 0.5) * h;
    for (int i = 0; i < 16; ++i) {
      const double t = mid + 0.5 * h * gl.nodes[i];
      for (Eigen::Index k = 0; k < H.dim(); ++k) {
        const double c = std::cos(w(k) * t), s = std::sin(w(k) * t);
        qn(k) = qn0(k) * c + pn0(k) / w(k) * s;
        pn(k) = -w(k) * qn0(k) * s + pn0(k) * c;
      }
      psi.q.noalias() = H.modes() * qn;
      psi.p.noalias() = H.modes() * pn;
      visit(psi, 0.5 * h * gl.weights[i]);
    }
  }
}

}  // namespace

Observable Observable::parse(std::string_view text, const Eigen::MatrixXd& V) {
  ObservableParser parser(text, V);
  auto terms = parser.parse();
  std::string name(text);
  name.erase(std::remove_if(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); }), name.end());
  return Observable(std::move(name), std::move(terms));
}

std::vector<double> time_averages(const QuadraticHamiltonian& H, const FlipTrajectory& trajectory,
                                  const std::vector<Observable>& fs) {
  for (const auto& f : fs) {
    if (f.max_index() >= 2 * H.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "observable " + f.name() + " refers past N");
    }
  }
  std::vector<double> sums(fs.size(), 0.0);
  const auto& ev = trajectory.events;
  for (std::size_t e = 0; e < ev.size(); ++e) {
    const double end = e + 1 < ev.size() ? ev[e + 1].time : trajectory.horizon;
    visit_segment_nodes(H, ev[e].state, end - ev[e].time, [&](const PhaseVector& psi, double weight) {
      for (std::size_t k = 0; k < fs.size(); ++k) sums[k] += weight * fs[k](psi);
    });
  }
  for (auto& s : sums) s /= trajectory.horizon;
  return sums;
}

double time_average(const QuadraticHamiltonian& H, const FlipTrajectory& trajectory, const Observable& f) {
  return time_averages(H, trajectory, {f}).front();
}

double time_average(const QuadraticHamiltonian& H, const PhaseVector& psi0, const RandomClock& clock,
                    double horizon, const Observable& f) {
  return time_average(H, simulate_flip(H, psi0, clock, horizon), f);
}

MicrocanonicalEstimate microcanonical_average(const QuadraticHamiltonian& H, double h, const Observable& f,
                                              std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two samples");
  Rng rng = make_stream(seed, 0x5a3b);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = f(phase::sample_microcanonical(H, h, rng));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

ErgodicityReport ergodicity_experiment(const QuadraticHamiltonian& H, const std::vector<Observable>& observables,
                                       const ErgodicityConfig& config) {
  if (config.replicas < 1) throw Error(ErrorCode::kInvalidArgument, "replicas must be >= 1");
  if (!(config.energy > 0.0)) throw Error(ErrorCode::kNonPositiveEnergy, "energy must be positive");
  ErgodicityReport report;
  report.threshold = config.threshold;
  report.v_plus = phase::is_v_plus(H);
  if (report.v_plus) report.covering_bound = phase::covering_bound(H);
  {
    const Eigen::VectorXd& w = H.omega();
    try {
      report.independence = phase::rational_independence(std::span<const double>(w.data(), w.size()),
                                                         config.max_coeff, config.relation_tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSearchSpaceTooLarge) throw;
      report.independence.max_coeff = 0;  // not certified
    }
  }

  const auto replicas = static_cast<std::size_t>(config.replicas);
  std::vector<std::vector<double>> averages(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    PhaseVector start = PhaseVector::zeros(H.dim());
    if (config.initial) {
      start = *config.initial;
      const double e0 = phase::energy(H, start);
      if (!(e0 > 0.0)) throw Error(ErrorCode::kNonPositiveEnergy, "initial condition has zero energy");
      const double scale = std::sqrt(config.energy / e0);
      start.q *= scale;
      start.p *= scale;
    } else {
      Rng rng = make_stream(config.seed, 0x1000 + r);
      start = phase::sample_microcanonical(H, config.energy, rng);
    }
    const auto clock = config.clock.with_seed(config.seed * 1000003ULL + r);
    averages[r] = time_averages(H, simulate_flip(H, start, clock, config.horizon), observables);
  });

  const double scale = config.energy / static_cast<double>(H.dim());
  report.ergodic = true;
  for (std::size_t k = 0; k < observables.size(); ++k) {
    ObservableResult res;
    res.name = observables[k].name();
    const auto ref = microcanonical_average(H, config.energy, observables[k], config.reference_samples,
                                            config.seed + 7919 * (k + 1));
    res.reference = ref.mean;
    res.reference_stderr = ref.stderr_;
    for (std::size_t r = 0; r < replicas; ++r) {
      res.time_averages.push_back(averages[r][k]);
      const double rel = std::abs(averages[r][k] - ref.mean) / std::max(std::abs(ref.mean), scale);
      res.worst_rel_error = std::max(res.worst_rel_error, rel);
    }
    res.pass = res.worst_rel_error <= config.threshold;
    report.ergodic = report.ergodic && res.pass;
    report.observables.push_back(std::move(res));
  }
  return report;
}

}  // namespace ergodyn::flip
