// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ergodyn/clock.hpp"
#include "ergodyn/numeric.hpp"
#include "ergodyn/phase_core.hpp"

namespace ergodyn::quantum {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

class HermitianMatrix {
 public:
  // Throws NotHermitian when ||M - M*||_F > 1e-12 ||M||_F. The stored matrix
  // is the Hermitian part of M.
  explicit HermitianMatrix(const CMatrix& m);
  // (M + M*) / 2 without the check; for results that are Hermitian by
  // construction up to rounding.
  static HermitianMatrix hermitian_part(const CMatrix& m);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

 private:
  struct Unchecked {};
  HermitianMatrix(const CMatrix& m, Unchecked) : m_(0.5 * (m + m.adjoint())) {}
  CMatrix m_;
};

class UnitaryMatrix {
 public:
  // Throws InvalidArgument when ||U*U - E||_F > 1e-10.
  explicit UnitaryMatrix(const CMatrix& m);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  double unitarity_drift() const;

 private:
  friend std::vector<UnitaryMatrix> simulate_switch(const HermitianMatrix&, const HermitianMatrix&,
                                                    const RandomClock&, int);
  struct Unchecked {};
  UnitaryMatrix(const CMatrix& m, Unchecked) : m_(m) {}
  CMatrix m_;
};

class DensityMatrix {
 public:
  // Hermitian, unit trace, eigenvalues >= -1e-12.
  explicit DensityMatrix(const CMatrix& m);
  static DensityMatrix pure(const CVector& psi);
  static DensityMatrix maximally_mixed(Eigen::Index n);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }

 private:
  CMatrix m_;
};

// Pauli matrices and friends.
HermitianMatrix pauli_x();
HermitianMatrix pauli_y();
HermitianMatrix pauli_z();
HermitianMatrix diagonal(const Eigen::VectorXd& d);
HermitianMatrix random_hermitian(Eigen::Index n, Rng& rng);

// {A, B} = i(AB - BA).
HermitianMatrix bracket(const HermitianMatrix& a, const HermitianMatrix& b);

// Real span of H1, H2 and all iterated brackets.
struct LieClosure {
  std::vector<CMatrix> basis;  // orthonormal for <A, B> = Tr(AB)
  int dim = 0;
  int generations = 0;
};

inline constexpr double kLieTolerance = 1e-10;

LieClosure lie_closure(const HermitianMatrix& h1, const HermitianMatrix& h2,
                       double rel_tol = kLieTolerance);

// Residual of projecting m onto the span of closure.basis, relative to ||m||_F.
double membership_residual(const LieClosure& closure, const CMatrix& m);

bool is_u_controllable(const HermitianMatrix& h1, const HermitianMatrix& h2);

struct CriterionReport {
  bool offdiagonal_nonzero = false;  // (H1 psi_k, psi_j) != 0 for k != j
  bool gaps_distinct = false;        // lambda_k - lambda_l pairwise distinct, k != l
  double min_offdiagonal = 0.0;
  double min_gap_separation = 0.0;
  double trace1 = 0.0;
  double trace2 = 0.0;
  bool both_traceless = false;
  bool applicable = false;  // both hypotheses hold
  int predicted_dim = 0;    // N^2 - 1 or N^2 when applicable, else 0
};

CriterionReport check_explicit_criterion(const HermitianMatrix& h1, const HermitianMatrix& h2);

struct GenericityReport {
  int samples = 0;
  int controllable = 0;
  double fraction = 0.0;
  std::vector<std::string> failures;  // offending pairs, printed
};

GenericityReport sample_generic_pairs(Eigen::Index n, int samples, std::uint64_t seed);

// Cached eigen-decomposition of a Hermitian matrix; evolve(t) = e^{-itH}.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const HermitianMatrix& h);

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const CMatrix& eigenvectors() const { return eigenvectors_; }
  CMatrix evolve(double t) const;

 private:
  Eigen::VectorXd eigenvalues_;
  CMatrix eigenvectors_;
};

inline constexpr int kReorthonormalizeEvery = 100;

// X_0 = E, X_k = e^{-i tau_k H_{1 or 2}} X_{k-1}: H1 on odd steps, H2 on even.
// Returns X_0..X_n; n_steps = 0 gives just X_0 = E.
std::vector<UnitaryMatrix> simulate_switch(const HermitianMatrix& h1, const HermitianMatrix& h2,
                                           const RandomClock& clock, int n_steps);

// Only X_n, without storing the path.
UnitaryMatrix switch_endpoint(const HermitianMatrix& h1, const HermitianMatrix& h2,
                              const RandomClock& clock, int n_steps);

// Closest unitary in Frobenius norm (polar factor).
CMatrix polar_unitary(const CMatrix& m);

// Reference Haar sampler: QR of a complex Ginibre matrix with phase fix.
UnitaryMatrix haar_unitary(Eigen::Index n, Rng& rng);

struct MomentZScore {
  std::string label;
  double estimate = 0.0;
  double target = 0.0;
  double z = 0.0;
};

struct MomentReport {
  std::size_t samples = 0;
  std::vector<MomentZScore> z_scores;
  double max_abs_z = 0.0;
  double threshold = 4.0;
  bool pass = false;
};

// First moments E[u_ij] = 0 and second moments E[u_ij conj(u_kl)] = delta/N,
// real and imaginary parts separately.
MomentReport haar_moment_test(std::span<const UnitaryMatrix> samples, double threshold = 4.0);

struct CesaroEntry {
  std::string name;
  double average = 0.0;
  double reference = 0.0;  // Tr(A) / N
  double deviation = 0.0;
};

struct CesaroReport {
  double horizon = 0.0;
  std::size_t segments = 0;
  std::vector<CesaroEntry> entries;
  double trace_average = 0.0;  // Cesaro average of Tr(rho(t))
  double max_norm_drift = 0.0; // pure-state runs: max |‖psi(t_n)‖ - 1|
};

struct NamedObservable {
  std::string name;
  HermitianMatrix matrix;
};

CesaroReport cesaro_density(const HermitianMatrix& h1, const HermitianMatrix& h2,
                            const RandomClock& clock, const DensityMatrix& rho0,
                            const std::vector<NamedObservable>& observables, double horizon);

CesaroReport pure_state_switch(const HermitianMatrix& h1, const HermitianMatrix& h2,
                               const RandomClock& clock, const CVector& psi0, double horizon,
                               const std::vector<NamedObservable>& observables);

struct FixedCesaro {
  CMatrix average;  // (1/T) int_0^T P_{e^{-iHt} psi} dt
  CMatrix limit;    // sum_k |(psi, psi_k)|^2 P_{psi_k}
  double error_constant = 0.0;  // ||average - limit||_F <= error_constant / T
};

inline constexpr double kDegenerateGap = 1e-8;

FixedCesaro fixed_hamiltonian_cesaro(const HermitianMatrix& h, const CVector& psi, double horizon);

// Classical quadratic Hamiltonian H = psi^T S psi / 2 on (q, p) with
// q + ip = f, whose Hamiltonian flow is f -> e^{itH^} f.
struct QuadraticHamiltonianGyro {
  Eigen::MatrixXd hessian;    // S, 2N x 2N symmetric
  Eigen::MatrixXd generator;  // Omega S, the linear vector field

  double value(const phase::PhaseVector& psi) const;
  phase::PhaseVector evolve(const phase::PhaseVector& psi, double t) const;
};

QuadraticHamiltonianGyro unitary_to_symplectic(const HermitianMatrix& h);

// (Re f, Im f) as a phase vector and back.
phase::PhaseVector split_complex(const CVector& f);
CVector join_complex(const phase::PhaseVector& psi);

}  // namespace ergodyn::quantum
