// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ergodyn/numeric.hpp"

namespace ergodyn::phase {

// A point (q, p) of the phase space R^{2N}.
struct PhaseVector {
  Eigen::VectorXd q;
  Eigen::VectorXd p;

  PhaseVector() = default;
  PhaseVector(Eigen::VectorXd q_, Eigen::VectorXd p_);

  static PhaseVector zeros(Eigen::Index n);
  // Builds from the stacked vector (q_1..q_N, p_1..p_N).
  static PhaseVector from_stacked(const Eigen::VectorXd& psi);

  Eigen::Index dim() const { return q.size(); }
  Eigen::VectorXd stacked() const;
  // Coordinate k of the stacked vector: q for k < N, p otherwise.
  double coord(Eigen::Index k) const { return k < dim() ? q(k) : p(k - dim()); }
};

// H(q, p) = |p|^2 / 2 + (Vq, q) / 2 with V symmetric positive definite and
// its eigen-decomposition V = sum_k omega_k^2 v_k v_k^T cached.
class QuadraticHamiltonian {
 public:
  // Validates V and diagonalises it (see spectral_decompose).
  explicit QuadraticHamiltonian(const Eigen::MatrixXd& V);

  Eigen::Index dim() const { return V_.rows(); }
  const Eigen::MatrixXd& V() const { return V_; }
  // Ascending eigenvalues omega_k^2.
  const Eigen::VectorXd& omega_squared() const { return omega_sq_; }
  const Eigen::VectorXd& omega() const { return omega_; }
  // Column k is v_k; the first entry above 1e-12 in magnitude is positive.
  const Eigen::MatrixXd& modes() const { return modes_; }

  Eigen::VectorXd to_normal(const Eigen::VectorXd& x) const { return modes_.transpose() * x; }
  Eigen::VectorXd from_normal(const Eigen::VectorXd& x) const { return modes_ * x; }

 private:
  Eigen::MatrixXd V_;
  Eigen::VectorXd omega_sq_;
  Eigen::VectorXd omega_;
  Eigen::MatrixXd modes_;
};

QuadraticHamiltonian spectral_decompose(const Eigen::MatrixXd& V);

// Relative Frobenius reconstruction error ||V - sum omega^2 v v^T|| / ||V||.
double reconstruction_error(const QuadraticHamiltonian& H);

// e^{tA} psi for A = [[0, E], [-V, 0]], evaluated in normal coordinates.
PhaseVector flow(const QuadraticHamiltonian& H, const PhaseVector& psi, double t);

double energy(const QuadraticHamiltonian& H, const PhaseVector& psi);

// Dense 2N x 2N matrix of the flow map (used by symplecticity checks).
Eigen::MatrixXd flow_matrix(const QuadraticHamiltonian& H, double t);

// The Krylov space l_V = span{V^n e_1}.
struct MixingSubspace {
  Eigen::MatrixXd basis;     // N x dim, orthonormal columns
  int dim = 0;
  Eigen::VectorXd overlaps;  // beta_k = (v_k, e_1)
};

MixingSubspace mixing_subspace(const QuadraticHamiltonian& H);

// Orthonormal basis of span{e_1, V e_1, ..., V^max_power e_1} via Arnoldi with
// full reorthogonalisation.
Eigen::MatrixXd krylov_basis(const Eigen::MatrixXd& V, int max_power,
                             double rel_tol = kRankTolerance);

bool is_v_plus(const QuadraticHamiltonian& H);

struct RelationReport {
  bool relation_found = false;
  std::vector<long> relation;  // empty when no relation was found
  double residual = 0.0;       // |sum n_k omega_k| for the relation
  int max_coeff = 0;
  double tol = 0.0;
};

inline constexpr int kDefaultMaxCoeff = 20;
inline constexpr double kDefaultRelationTol = 1e-9;
inline constexpr double kDefaultSearchBudget = 5e7;

// Bounded search for an integer relation sum n_k omega_k ~ 0 with
// max|n_k| <= max_coeff. A negative result is a certificate only up to
// (max_coeff, tol).
RelationReport rational_independence(std::span<const double> frequencies,
                                     int max_coeff = kDefaultMaxCoeff,
                                     double tol = kDefaultRelationTol,
                                     double budget = kDefaultSearchBudget);

// ceil(2 / min_k beta_k^2 + 2); throws NotMixing when some beta_k vanishes.
int covering_bound(const QuadraticHamiltonian& H);

// Draw from the microcanonical measure on {H = h}.
PhaseVector sample_microcanonical(const QuadraticHamiltonian& H, double h, Rng& rng);
PhaseVector sample_microcanonical(const QuadraticHamiltonian& H, double h, std::uint64_t seed);

}  // namespace ergodyn::phase
