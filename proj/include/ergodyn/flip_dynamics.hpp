// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ergodyn/clock.hpp"
#include "ergodyn/phase_core.hpp"

namespace ergodyn::flip {

using phase::PhaseVector;
using phase::QuadraticHamiltonian;

// p_1 -> -p_1.
PhaseVector velocity_flip(PhaseVector psi);

struct FlipEvent {
  double time;
  PhaseVector state;  // right after the flip (events[0] is the initial state)
};

struct FlipTrajectory {
  std::vector<FlipEvent> events;
  double energy = 0.0;
  double horizon = 0.0;
  RandomClock clock = RandomClock::exponential(1.0);

  std::size_t flips() const { return events.empty() ? 0 : events.size() - 1; }
  // State at time t in [0, horizon].
  PhaseVector state_at(const QuadraticHamiltonian& H, double t) const;
};

FlipTrajectory simulate_flip(const QuadraticHamiltonian& H, const PhaseVector& psi0,
                             const RandomClock& clock, double horizon);

// Polynomial observable in the stacked coordinates (q_1..q_N, p_1..p_N).
class Observable {
 public:
  struct Term {
    double coeff;
    std::vector<int> factors;  // stacked coordinate indices, repeated for powers
  };

  Observable(std::string name, std::vector<Term> terms);

  // Grammar: sum of '+'/'-' separated terms, each an optional coefficient
  // followed by factors q<i> / p<i> (1-based) with optional ^k, '*' optional:
  //   "p1^2", "q1q2", "0.5*p1*p2 - q3", plus the built-in "H<i>"
  //   (per-particle energy p_i^2/2 + sum_j V(i,j) q_i q_j / 2).
  static Observable parse(std::string_view text, const Eigen::MatrixXd& V);

  const std::string& name() const { return name_; }
  const std::vector<Term>& terms() const { return terms_; }
  int max_index() const;
  double operator()(const PhaseVector& psi) const;

 private:
  std::string name_;
  std::vector<Term> terms_;
};

inline constexpr double kMaxSegment = 1.0;

// (1/T) int_0^T f(psi(t)) dt along a recorded trajectory, 16-point
// Gauss-Legendre on every flow segment (split into pieces no longer than 1).
double time_average(const QuadraticHamiltonian& H, const FlipTrajectory& trajectory,
                    const Observable& f);

double time_average(const QuadraticHamiltonian& H, const PhaseVector& psi0,
                    const RandomClock& clock, double horizon, const Observable& f);

// Several observables in one pass.
std::vector<double> time_averages(const QuadraticHamiltonian& H, const FlipTrajectory& trajectory,
                                  const std::vector<Observable>& fs);

struct MicrocanonicalEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MicrocanonicalEstimate microcanonical_average(const QuadraticHamiltonian& H, double h,
                                              const Observable& f, std::size_t samples,
                                              std::uint64_t seed);

struct ErgodicityConfig {
  double energy = 1.0;
  RandomClock clock = RandomClock::exponential(1.0);
  double horizon = 1e5;
  int replicas = 8;
  std::uint64_t seed = 0;
  double threshold = 0.05;
  std::size_t reference_samples = 1'000'000;
  // When set, every replica starts here (rescaled onto {H = energy});
  // otherwise each replica draws its own microcanonical start.
  std::optional<PhaseVector> initial;
  int max_coeff = phase::kDefaultMaxCoeff;
  double relation_tol = phase::kDefaultRelationTol;
};

struct ObservableResult {
  std::string name;
  std::vector<double> time_averages;  // one per replica
  double reference = 0.0;
  double reference_stderr = 0.0;
  double worst_rel_error = 0.0;
  bool pass = false;
};

struct ErgodicityReport {
  std::vector<ObservableResult> observables;
  bool v_plus = false;
  std::optional<int> covering_bound;
  phase::RelationReport independence;
  double threshold = 0.0;
  bool ergodic = false;  // every observable passed in every replica
};

// rel_error = |avg - ref| / max(|ref|, h/N).
ErgodicityReport ergodicity_experiment(const QuadraticHamiltonian& H,
                                       const std::vector<Observable>& observables,
                                       const ErgodicityConfig& config);

}  // namespace ergodyn::flip
