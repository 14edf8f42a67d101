// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include "ergodyn/phase_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ergodyn/error.hpp"

namespace ergodyn::phase {

PhaseVector::PhaseVector(Eigen::VectorXd q_, Eigen::VectorXd p_) : q(std::move(q_)), p(std::move(p_)) {
  if (q.size() != p.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "q has " + std::to_string(q.size()) +
                                                   " entries, p has " + std::to_string(p.size()));
  }
  if (!q.allFinite() || !p.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "phase vector has non-finite entries");
  }
}

PhaseVector PhaseVector::zeros(Eigen::Index n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

PhaseVector PhaseVector::from_stacked(const Eigen::VectorXd& psi) {
  if (psi.size() % 2 != 0) throw Error(ErrorCode::kDimensionMismatch, "stacked phase vector has odd length");
  const Eigen::Index n = psi.size() / 2;
  return {psi.head(n), psi.tail(n)};
}

Eigen::VectorXd PhaseVector::stacked() const {
  Eigen::VectorXd psi(2 * dim());
  psi << q, p;
  return psi;
}

namespace {

constexpr double kSymmetryTolerance = 1e-12;

void require_dim(const QuadraticHamiltonian& H, const PhaseVector& psi) {
  if (psi.dim() != H.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "phase vector has N = " + std::to_string(psi.dim()) +
                                                   ", Hamiltonian has N = " + std::to_string(H.dim()));
  }
}

}  // namespace

QuadraticHamiltonian::QuadraticHamiltonian(const Eigen::MatrixXd& V) {
  if (V.rows() < 1 || V.rows() != V.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "V must be square with N >= 1");
  }
  if (!V.allFinite()) throw Error(ErrorCode::kInvalidArgument, "V has non-finite entries");
  const double asym = relative_asymmetry(V);
  if (asym > kSymmetryTolerance) {
    throw Error(ErrorCode::kNotSymmetric, "relative asymmetry " + std::to_string(asym));
  }
  V_ = 0.5 * (V + V.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(V_);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kInvalidArgument, "eigensolver failed");
  omega_sq_ = eig.eigenvalues();
  const double largest = omega_sq_.cwiseAbs().maxCoeff();
  if (omega_sq_(0) <= 1e-12 * largest || largest == 0.0) {
    throw Error(ErrorCode::kNotPositiveDefinite, "smallest eigenvalue " + std::to_string(omega_sq_(0)));
  }
  omega_ = omega_sq_.cwiseSqrt();
  modes_ = eig.eigenvectors();
  for (Eigen::Index k = 0; k < modes_.cols(); ++k) {
    for (Eigen::Index i = 0; i < modes_.rows(); ++i) {
      if (std::abs(modes_(i, k)) > 1e-12) {
        if (modes_(i, k) < 0) modes_.col(k) *= -1.0;
        break;
      }
    }
  }
}

QuadraticHamiltonian spectral_decompose(const Eigen::MatrixXd& V) { return QuadraticHamiltonian(V); }

double reconstruction_error(const QuadraticHamiltonian& H) {
  const Eigen::MatrixXd rebuilt = H.modes() * H.omega_squared().asDiagonal() * H.modes().transpose();
  return (H.V() - rebuilt).norm() / H.V().norm();
}

PhaseVector flow(const QuadraticHamiltonian& H, const PhaseVector& psi, double t) {
  require_dim(H, psi);
  Eigen::VectorXd qn = H.to_normal(psi.q);
  Eigen::VectorXd pn = H.to_normal(psi.p);
  for (Eigen::Index k = 0; k < H.dim(); ++k) {
    const double w = H.omega()(k);
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    const double q0 = qn(k);
    qn(k) = q0 * c + pn(k) / w * s;
    pn(k) = -w * q0 * s + pn(k) * c;
  }
  return {H.from_normal(qn), H.from_normal(pn)};
}

double energy(const QuadraticHamiltonian& H, const PhaseVector& psi) {
  require_dim(H, psi);
  return 0.5 * psi.p.squaredNorm() + 0.5 * psi.q.dot(H.V() * psi.q);
}

Eigen::MatrixXd flow_matrix(const QuadraticHamiltonian& H, double t) {
  const Eigen::Index n = H.dim();
  Eigen::MatrixXd J(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(2 * n, k);
    J.col(k) = flow(H, PhaseVector::from_stacked(e), t).stacked();
  }
  return J;
}

Eigen::MatrixXd krylov_basis(const Eigen::MatrixXd& V, int max_power, double rel_tol) {
  const Eigen::Index n = V.rows();
  const double scale = std::max(1.0, V.norm());
  Eigen::MatrixXd basis(n, 0);
  Eigen::VectorXd next = Eigen::VectorXd::Unit(n, 0);
  for (int power = 0; power <= max_power && basis.cols() < n; ++power) {
    // Candidate V^power e_1 direction, reorthogonalised twice.
    const double before = next.norm();
    for (int pass = 0; pass < 2; ++pass) next -= basis * (basis.transpose() * next);
    const double after = next.norm();
    if (after <= rel_tol * before || after == 0.0) break;
    basis.conservativeResize(n, basis.cols() + 1);
    basis.col(basis.cols() - 1) = next / after;
    next = V * basis.col(basis.cols() - 1) / scale;
  }
  return basis;
}

MixingSubspace mixing_subspace(const QuadraticHamiltonian& H) {
  MixingSubspace out;
  out.basis = krylov_basis(H.V(), static_cast<int>(H.dim()) - 1);
  out.dim = static_cast<int>(out.basis.cols());
  out.overlaps = H.modes().row(0).transpose();
  return out;
}

bool is_v_plus(const QuadraticHamiltonian& H) { return mixing_subspace(H).dim == H.dim(); }

RelationReport rational_independence(std::span<const double> frequencies, int max_coeff, double tol,
                                     double budget) {
  if (max_coeff < 1) throw Error(ErrorCode::kInvalidArgument, "max_coeff must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  const std::size_t n = frequencies.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "no frequencies");
  for (double w : frequencies) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::kInvalidArgument, "frequencies must be positive");
  }
  const double space = std::pow(2.0 * max_coeff + 1.0, static_cast<double>(n));
  if (space > budget) {
    throw Error(ErrorCode::kSearchSpaceTooLarge,
                "(2*" + std::to_string(max_coeff) + "+1)^" + std::to_string(n) + " exceeds budget");
  }
  RelationReport report;
  report.max_coeff = max_coeff;
  report.tol = tol;

  // Odometer over [-m, m]^n. Keep the best candidate under the order
  // (max-norm, lexicographic) among sign-normalised vectors.
  std::vector<long> n_vec(n, -max_coeff);
  std::vector<long> best;
  long best_norm = 0;
  auto advance = [&] {
    for (std::size_t k = n; k-- > 0;) {
      if (n_vec[k] < max_coeff) {
        ++n_vec[k];
        return true;
      }
      n_vec[k] = -max_coeff;
    }
    return false;
  };
  do {
    long norm = 0;
    std::size_t first_nz = n;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      norm = std::max(norm, std::labs(n_vec[k]));
      if (first_nz == n && n_vec[k] != 0) first_nz = k;
      sum += static_cast<double>(n_vec[k]) * frequencies[k];
    }
    if (first_nz < n && n_vec[first_nz] > 0 && std::abs(sum) <= tol) {
      if (best.empty() || norm < best_norm || (norm == best_norm && n_vec < best)) {
        best = n_vec;
        best_norm = norm;
        report.residual = std::abs(sum);
      }
    }
  } while (advance());
  if (!best.empty()) {
    report.relation_found = true;
    report.relation = best;
  }
  return report;
}

int covering_bound(const QuadraticHamiltonian& H) {
  const auto sub = mixing_subspace(H);
  const double min_beta_sq = sub.overlaps.cwiseAbs2().minCoeff();
  if (sub.dim < H.dim() || min_beta_sq <= kRankTolerance * kRankTolerance) {
    throw Error(ErrorCode::kNotMixing, "some overlap beta_k = (v_k, e_1) vanishes; bound undefined");
  }
  const double bound = 2.0 / min_beta_sq + 2.0;
  // Absorb rounding in beta_k^2 before taking the ceiling.
  return static_cast<int>(std::ceil(bound - 1e-9 * bound));
}

PhaseVector sample_microcanonical(const QuadraticHamiltonian& H, double h, Rng& rng) {
  if (!(h > 0.0)) throw Error(ErrorCode::kNonPositiveEnergy, "energy must be positive, got " + std::to_string(h));
  const Eigen::Index n = H.dim();
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x(2 * n);
  double norm = 0.0;
  do {
    for (Eigen::Index k = 0; k < 2 * n; ++k) x(k) = gauss(rng);
    norm = x.norm();
  } while (norm == 0.0);
  x *= std::sqrt(2.0 * h) / norm;
  // x = (omega_k qn_k, pn_k): uniform on the sphere of radius sqrt(2h).
  Eigen::VectorXd qn = x.head(n).cwiseQuotient(H.omega());
  Eigen::VectorXd pn = x.tail(n);
  return {H.from_normal(qn), H.from_normal(pn)};
}

PhaseVector sample_microcanonical(const QuadraticHamiltonian& H, double h, std::uint64_t seed) {
  Rng rng = make_stream(seed);
  return sample_microcanonical(H, h, rng);
}

}  // namespace ergodyn::phase
