// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include "ergodyn/quantum_switch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "ergodyn/error.hpp"

namespace ergodyn::quantum {

namespace {

constexpr Complex kI(0.0, 1.0);

void require_same_dim(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrices are " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
}

void require_square(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw Error(ErrorCode::kDimensionMismatch, "matrix must be square");
}

// int_0^tau e^{-i w u} du.
Complex phase_integral(double w, double tau) {
  const double x = w * tau;
  if (std::abs(x) < 1e-4) {
    return tau * Complex(1.0 - x * x / 6.0, -x / 2.0 + x * x * x / 24.0);
  }
  const double half = std::sin(0.5 * x);
  return Complex(std::sin(x) / w, -2.0 * half * half / w);
}

std::string format_matrix(const CMatrix& m) {
  std::ostringstream out;
  out.precision(6);
  out << '[';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << (r ? "; " : "");
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
  }
  out << ']';
  return out.str();
}

}  // namespace

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
  require_square(m);
  const double norm = m.norm();
  const double asym = (m - m.adjoint()).norm();
  if (!m.allFinite() || asym > 1e-12 * norm) {
    throw Error(ErrorCode::kNotHermitian, "||M - M*||_F = " + std::to_string(asym));
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::hermitian_part(const CMatrix& m) {
  require_square(m);
  return HermitianMatrix(m, Unchecked{});
}

UnitaryMatrix::UnitaryMatrix(const CMatrix& m) : m_(m) {
  require_square(m);
  if (unitarity_drift() > 1e-10) {
    throw Error(ErrorCode::kInvalidArgument, "matrix is not unitary, drift " + std::to_string(unitarity_drift()));
  }
}

double UnitaryMatrix::unitarity_drift() const {
  return (m_.adjoint() * m_ - CMatrix::Identity(dim(), dim())).norm();
}

DensityMatrix::DensityMatrix(const CMatrix& m) {
  require_square(m);
  if ((m - m.adjoint()).norm() > 1e-12 * std::max(1.0, m.norm())) {
    throw Error(ErrorCode::kNotHermitian, "density matrix is not Hermitian");
  }
  m_ = 0.5 * (m + m.adjoint());
  if (std::abs(m_.trace().real() - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "density matrix trace is " + std::to_string(m_.trace().real()));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(m_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const double norm = psi.norm();
  if (std::abs(norm - 1.0) > 1e-10) throw Error(ErrorCode::kInvalidArgument, "state vector must have unit norm");
  const CVector u = psi / norm;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index n) {
  return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(n));
}

HermitianMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianMatrix(m);
}

HermitianMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return HermitianMatrix(m);
}

HermitianMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianMatrix(m);
}

HermitianMatrix diagonal(const Eigen::VectorXd& d) {
  return HermitianMatrix(d.cast<Complex>().asDiagonal().toDenseMatrix());
}

HermitianMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> gauss;
  CMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = Complex(gauss(rng), gauss(rng));
  }
  return HermitianMatrix::hermitian_part(g);
}

HermitianMatrix bracket(const HermitianMatrix& a, const HermitianMatrix& b) {
  require_same_dim(a, b);
  const CMatrix& A = a.matrix();
  const CMatrix& B = b.matrix();
  return HermitianMatrix::hermitian_part(kI * (A * B - B * A));
}

namespace {

// Real coordinates of a Hermitian matrix, orthonormal for <A, B> = Tr(AB).
Eigen::VectorXd hermitian_coords(const CMatrix& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd v(n * n);
  Eigen::Index k = 0;
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) v(k++) = m(i, i).real();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      v(k++) = r2 * m(i, j).real();
      v(k++) = r2 * m(i, j).imag();
    }
  }
  return v;
}

CMatrix from_hermitian_coords(const Eigen::VectorXd& v, Eigen::Index n) {
  CMatrix m = CMatrix::Zero(n, n);
  Eigen::Index k = 0;
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = v(k++);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double re = v(k++) / r2;
      const double im = v(k++) / r2;
      m(i, j) = Complex(re, im);
      m(j, i) = Complex(re, -im);
    }
  }
  return m;
}

class RealSpan {
 public:
  explicit RealSpan(Eigen::Index dim) : dim_(dim) {}

  // Adds the component of v orthogonal to the span if its norm exceeds
  // rel_tol * scale. Returns the new unit vector's index or -1.
  int add(Eigen::VectorXd v, double scale, double rel_tol) {
    if (static_cast<Eigen::Index>(vectors_.size()) >= dim_) return -1;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : vectors_) v -= b.dot(v) * b;
    }
    const double norm = v.norm();
    if (!(norm > rel_tol * scale)) return -1;
    vectors_.push_back(v / norm);
    return static_cast<int>(vectors_.size()) - 1;
  }

  double residual(Eigen::VectorXd v) const {
    const double norm = v.norm();
    if (norm == 0.0) return 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : vectors_) v -= b.dot(v) * b;
    }
    return v.norm() / norm;
  }

  const std::vector<Eigen::VectorXd>& vectors() const { return vectors_; }

 private:
  Eigen::Index dim_;
  std::vector<Eigen::VectorXd> vectors_;
};

}  // namespace

LieClosure lie_closure(const HermitianMatrix& h1, const HermitianMatrix& h2, double rel_tol) {
  require_same_dim(h1, h2);
  const Eigen::Index n = h1.dim();
  RealSpan span(n * n);
  std::vector<CMatrix> mats;
  std::vector<int> frontier;
  for (const auto* h : {&h1, &h2}) {
    const Eigen::VectorXd v = hermitian_coords(h->matrix());
    const int idx = span.add(v, v.norm(), rel_tol);
    if (idx >= 0) {
      mats.push_back(from_hermitian_coords(span.vectors()[idx], n));
      frontier.push_back(idx);
    }
  }
  const HermitianMatrix* gens[2] = {&h1, &h2};
  const double gen_norm[2] = {h1.matrix().norm(), h2.matrix().norm()};
  LieClosure out;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int idx : frontier) {
      const auto b = HermitianMatrix::hermitian_part(mats[idx]);
      for (int g = 0; g < 2; ++g) {
        const CMatrix c = bracket(*gens[g], b).matrix();
        // ||{H, B}||_F <= 2 ||H||_F for unit B.
        const int added = span.add(hermitian_coords(c), 2.0 * gen_norm[g], rel_tol);
        if (added >= 0) {
          mats.push_back(from_hermitian_coords(span.vectors()[added], n));
          next.push_back(added);
        }
      }
    }
    if (!next.empty()) ++out.generations;
    frontier = std::move(next);
  }
  out.basis = std::move(mats);
  out.dim = static_cast<int>(out.basis.size());
  return out;
}

double membership_residual(const LieClosure& closure, const CMatrix& m) {
  if (closure.basis.empty()) return m.norm() == 0.0 ? 0.0 : 1.0;
  const Eigen::Index n = m.rows();
  RealSpan span(n * n);
  for (const auto& b : closure.basis) span.add(hermitian_coords(b), 1.0, 0.0);
  return span.residual(hermitian_coords(m));
}

bool is_u_controllable(const HermitianMatrix& h1, const HermitianMatrix& h2) {
  return lie_closure(h1, h2).dim == h1.dim() * h1.dim();
}

CriterionReport check_explicit_criterion(const HermitianMatrix& h1, const HermitianMatrix& h2) {
  require_same_dim(h1, h2);
  const Eigen::Index n = h1.dim();
  CriterionReport rep;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h2.matrix());
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const CMatrix h1e = eig.eigenvectors().adjoint() * h1.matrix() * eig.eigenvectors();

  rep.min_offdiagonal = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (k != j) rep.min_offdiagonal = std::min(rep.min_offdiagonal, std::abs(h1e(k, j)));
    }
  }
  rep.offdiagonal_nonzero = n > 1 && rep.min_offdiagonal > kRankTolerance * h1.matrix().norm();

  std::vector<double> gaps;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if (k != l) gaps.push_back(lambda(k) - lambda(l));
    }
  }
  std::sort(gaps.begin(), gaps.end());
  rep.min_gap_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    rep.min_gap_separation = std::min(rep.min_gap_separation, gaps[i] - gaps[i - 1]);
  }
  const double radius = lambda.cwiseAbs().maxCoeff();
  rep.gaps_distinct = n > 1 && radius > 0.0 && rep.min_gap_separation > kRankTolerance * radius;

  rep.trace1 = h1.trace();
  rep.trace2 = h2.trace();
  const double tr_tol = kRankTolerance * std::sqrt(static_cast<double>(n));
  rep.both_traceless = std::abs(rep.trace1) <= tr_tol * h1.matrix().norm() &&
                       std::abs(rep.trace2) <= tr_tol * h2.matrix().norm();
  rep.applicable = rep.offdiagonal_nonzero && rep.gaps_distinct;
  if (rep.applicable) rep.predicted_dim = static_cast<int>(rep.both_traceless ? n * n - 1 : n * n);
  return rep;
}

GenericityReport sample_generic_pairs(Eigen::Index n, int samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  GenericityReport rep;
  rep.samples = samples;
  Rng rng = make_stream(seed, 0x6e6e);
  for (int s = 0; s < samples; ++s) {
    const auto h1 = random_hermitian(n, rng);
    const auto h2 = random_hermitian(n, rng);
    if (is_u_controllable(h1, h2)) {
      ++rep.controllable;
    } else {
      rep.failures.push_back("sample " + std::to_string(s) + ": H1 = " + format_matrix(h1.matrix()) +
                             ", H2 = " + format_matrix(h2.matrix()));
    }
  }
  rep.fraction = static_cast<double>(rep.controllable) / samples;
  return rep;
}

SpectralPropagator::SpectralPropagator(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h.matrix());
  eigenvalues_ = eig.eigenvalues();
  eigenvectors_ = eig.eigenvectors();
}

CMatrix SpectralPropagator::evolve(double t) const {
  Eigen::VectorXcd phases(eigenvalues_.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(-kI * (eigenvalues_(k) * t));
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

CMatrix polar_unitary(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

namespace {

template <typename Sink>
void run_switch(const HermitianMatrix& h1, const HermitianMatrix& h2, const RandomClock& clock, int n_steps,
                Sink&& sink) {
  require_same_dim(h1, h2);
  if (n_steps < 0) throw Error(ErrorCode::kInvalidArgument, "n_steps must be >= 0");
  const SpectralPropagator p1(h1), p2(h2);
  auto stream = clock.stream();
  CMatrix x = CMatrix::Identity(h1.dim(), h1.dim());
  sink(x);
  for (int k = 1; k <= n_steps; ++k) {
    const double tau = stream.next();
    x = ((k % 2 == 1) ? p1 : p2).evolve(tau) * x;
    if (k % kReorthonormalizeEvery == 0) x = polar_unitary(x);
    sink(x);
  }
}

}  // namespace

std::vector<UnitaryMatrix> simulate_switch(const HermitianMatrix& h1, const HermitianMatrix& h2,
                                           const RandomClock& clock, int n_steps) {
  if (n_steps < 0) throw Error(ErrorCode::kInvalidArgument, "n_steps must be >= 0");
  std::vector<UnitaryMatrix> path;
  path.reserve(static_cast<std::size_t>(n_steps) + 1);
  run_switch(h1, h2, clock, n_steps, [&](const CMatrix& x) { path.push_back(UnitaryMatrix(x, UnitaryMatrix::Unchecked{})); });
  return path;
}

UnitaryMatrix switch_endpoint(const HermitianMatrix& h1, const HermitianMatrix& h2, const RandomClock& clock,
                              int n_steps) {
  CMatrix last;
  run_switch(h1, h2, clock, n_steps, [&](const CMatrix& x) { last = x; });
  return UnitaryMatrix(last);
}

UnitaryMatrix haar_unitary(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CMatrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double a = std::abs(d);
    q.col(k) *= a > 0.0 ? d / a : Complex(1.0);
  }
  return UnitaryMatrix(q);
}

MomentReport haar_moment_test(std::span<const UnitaryMatrix> samples, double threshold) {
  if (samples.size() < 100) {
    throw Error(ErrorCode::kTooFewSamples, "need >= 100 samples, got " + std::to_string(samples.size()));
  }
  const Eigen::Index n = samples.front().dim();
  const double m = static_cast<double>(samples.size());
  MomentReport rep;
  rep.samples = samples.size();
  rep.threshold = threshold;

  auto push = [&](std::string label, double target, auto&& value) {
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    for (const auto& u : samples) {
      const double v = value(u.matrix());
      ++count;
      const double delta = v - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (v - mean);
    }
    const double se = std::sqrt(m2 / (m - 1.0) / m);
    const double diff = mean - target;
    double z = 0.0;
    if (se > 0.0) {
      z = diff / se;
    } else if (std::abs(diff) > 1e-12) {
      z = std::copysign(1e9, diff);  // zero spread, wrong value
    }
    rep.z_scores.push_back({std::move(label), mean, target, z});
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
  };

  auto idx = [](Eigen::Index i, Eigen::Index j) { return std::to_string(i + 1) + std::to_string(j + 1); };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      push("Re u" + idx(i, j), 0.0, [=](const CMatrix& u) { return u(i, j).real(); });
      push("Im u" + idx(i, j), 0.0, [=](const CMatrix& u) { return u(i, j).imag(); });
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index a = 0; a < n * n; ++a) {
    for (Eigen::Index b = a; b < n * n; ++b) {
      const Eigen::Index i = a / n, j = a % n, k = b / n, l = b % n;
      const std::string label = "u" + idx(i, j) + "*conj(u" + idx(k, l) + ")";
      push("Re " + label, a == b ? inv_n : 0.0,
           [=](const CMatrix& u) { return (u(i, j) * std::conj(u(k, l))).real(); });
      if (a != b) {
        push("Im " + label, 0.0, [=](const CMatrix& u) { return (u(i, j) * std::conj(u(k, l))).imag(); });
      }
    }
  }
  rep.pass = rep.max_abs_z <= threshold;
  return rep;
}

namespace {

// Cesaro integration of Tr(rho(t) A) over switching segments, exact within
// each segment in the eigenbasis of the active Hamiltonian.
class CesaroIntegrator {
 public:
  CesaroIntegrator(const HermitianMatrix& h1, const HermitianMatrix& h2,
                   const std::vector<NamedObservable>& observables)
      : props_{SpectralPropagator(h1), SpectralPropagator(h2)}, sums_(observables.size(), 0.0) {
    for (const auto& p : props_) {
      std::vector<CMatrix> rotated;
      for (const auto& o : observables) {
        if (o.matrix.dim() != h1.dim()) throw Error(ErrorCode::kDimensionMismatch, "observable " + o.name);
        rotated.push_back(p.eigenvectors().adjoint() * o.matrix.matrix() * p.eigenvectors());
      }
      rotated_.push_back(std::move(rotated));
    }
  }

  // Integrates over [0, tau] under Hamiltonian `which` starting from rho (in
  // the standard basis) and returns rho(tau).
  CMatrix segment(int which, const CMatrix& rho, double tau) {
    const auto& p = props_[which];
    const CMatrix& U = p.eigenvectors();
    const Eigen::VectorXd& lam = p.eigenvalues();
    const CMatrix rt = U.adjoint() * rho * U;
    const Eigen::Index n = rt.rows();
    CMatrix weights(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = 0; l < n; ++l) weights(k, l) = rt(k, l) * phase_integral(lam(k) - lam(l), tau);
    }
    trace_sum_ += weights.trace().real();
    for (std::size_t o = 0; o < sums_.size(); ++o) {
      // sum_{k,l} w_kl A_lk = Tr(w A)
      sums_[o] += (weights.cwiseProduct(rotated_[which][o].transpose())).sum().real();
    }
    Eigen::VectorXcd ph(n);
    for (Eigen::Index k = 0; k < n; ++k) ph(k) = std::exp(-kI * (lam(k) * tau));
    CMatrix out = U * (ph.asDiagonal() * rt * ph.conjugate().asDiagonal()) * U.adjoint();
    return 0.5 * (out + out.adjoint());
  }

  const SpectralPropagator& propagator(int which) const { return props_[which]; }
  const std::vector<double>& sums() const { return sums_; }
  double trace_sum() const { return trace_sum_; }

 private:
  SpectralPropagator props_[2];
  std::vector<std::vector<CMatrix>> rotated_;
  std::vector<double> sums_;
  double trace_sum_ = 0.0;
};

CesaroReport run_cesaro(const HermitianMatrix& h1, const HermitianMatrix& h2, const RandomClock& clock,
                        const CMatrix& rho0, const std::vector<NamedObservable>& observables, double horizon,
                        const CVector* psi0) {
  require_same_dim(h1, h2);
  if (!(horizon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "T must be positive");
  if (rho0.rows() != h1.dim()) throw Error(ErrorCode::kDimensionMismatch, "initial state dimension");
  CesaroIntegrator integ(h1, h2, observables);
  auto stream = clock.stream();
  CMatrix rho = rho0;
  CVector psi;
  if (psi0) psi = *psi0;
  CesaroReport rep;
  rep.horizon = horizon;
  double t = 0.0;
  int which = 0;
  while (t < horizon) {
    const double tau = std::min(stream.next(), horizon - t);
    rho = integ.segment(which, rho, tau);
    if (psi0) {
      psi = integ.propagator(which).evolve(tau) * psi;
      rep.max_norm_drift = std::max(rep.max_norm_drift, std::abs(psi.norm() - 1.0));
    }
    t += tau;
    ++rep.segments;
    which = 1 - which;
  }
  const double n = static_cast<double>(h1.dim());
  for (std::size_t o = 0; o < observables.size(); ++o) {
    CesaroEntry e;
    e.name = observables[o].name;
    e.average = integ.sums()[o] / horizon;
    e.reference = observables[o].matrix.trace() / n;
    e.deviation = std::abs(e.average - e.reference);
    rep.entries.push_back(std::move(e));
  }
  rep.trace_average = integ.trace_sum() / horizon;
  return rep;
}

}  // namespace

CesaroReport cesaro_density(const HermitianMatrix& h1, const HermitianMatrix& h2, const RandomClock& clock,
                            const DensityMatrix& rho0, const std::vector<NamedObservable>& observables,
                            double horizon) {
  return run_cesaro(h1, h2, clock, rho0.matrix(), observables, horizon, nullptr);
}

CesaroReport pure_state_switch(const HermitianMatrix& h1, const HermitianMatrix& h2, const RandomClock& clock,
                               const CVector& psi0, double horizon,
                               const std::vector<NamedObservable>& observables) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw Error(ErrorCode::kInvalidArgument, "psi0 must have unit norm");
  const CMatrix rho0 = psi0 * psi0.adjoint();
  return run_cesaro(h1, h2, clock, rho0, observables, horizon, &psi0);
}

FixedCesaro fixed_hamiltonian_cesaro(const HermitianMatrix& h, const CVector& psi, double horizon) {
  if (psi.size() != h.dim()) throw Error(ErrorCode::kDimensionMismatch, "state dimension");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw Error(ErrorCode::kInvalidArgument, "psi must have unit norm");
  if (!(horizon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "T must be positive");
  const SpectralPropagator prop(h);
  const Eigen::VectorXd& lam = prop.eigenvalues();
  const Eigen::Index n = lam.size();
  const double radius = lam.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 1; k < n; ++k) {
    if (lam(k) - lam(k - 1) < kDegenerateGap * radius || radius == 0.0) {
      throw Error(ErrorCode::kDegenerateSpectrum, "eigenvalues " + std::to_string(k) + " and " +
                                                      std::to_string(k + 1) + " coincide at tolerance");
    }
  }
  const CMatrix& U = prop.eigenvectors();
  const CVector a = U.adjoint() * psi;
  CMatrix avg(n, n), lim = CMatrix::Zero(n, n);
  double c2 = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      const Complex akl = a(k) * std::conj(a(l));
      const double w = lam(k) - lam(l);
      avg(k, l) = k == l ? akl : akl * phase_integral(w, horizon) / horizon;
      if (k == l) {
        lim(k, k) = akl;
      } else {
        c2 += 4.0 * std::norm(akl) / (w * w);
      }
    }
  }
  FixedCesaro out;
  out.average = U * avg * U.adjoint();
  out.limit = U * lim * U.adjoint();
  out.error_constant = std::sqrt(c2);
  return out;
}

double QuadraticHamiltonianGyro::value(const phase::PhaseVector& psi) const {
  const Eigen::VectorXd x = psi.stacked();
  return 0.5 * x.dot(hessian * x);
}

phase::PhaseVector QuadraticHamiltonianGyro::evolve(const phase::PhaseVector& psi, double t) const {
  if (2 * psi.dim() != generator.rows()) throw Error(ErrorCode::kDimensionMismatch, "phase vector dimension");
  const Eigen::MatrixXd flow = (t * generator).exp();
  return phase::PhaseVector::from_stacked(flow * psi.stacked());
}

QuadraticHamiltonianGyro unitary_to_symplectic(const HermitianMatrix& h) {
  const Eigen::Index n = h.dim();
  const Eigen::MatrixXd a = h.matrix().real();
  const Eigen::MatrixXd b = h.matrix().imag();
  // H = -1/2 sum a_kl (q_k q_l + p_k p_l) + sum b_kl q_k p_l
  QuadraticHamiltonianGyro g;
  g.hessian.resize(2 * n, 2 * n);
  g.hessian << -a, b, -b, -a;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n).setIdentity();
  omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  g.generator = omega * g.hessian;
  return g;
}

phase::PhaseVector split_complex(const CVector& f) { return {f.real(), f.imag()}; }

CVector join_complex(const phase::PhaseVector& psi) {
  CVector f(psi.dim());
  for (Eigen::Index k = 0; k < psi.dim(); ++k) f(k) = Complex(psi.q(k), psi.p(k));
  return f;
}

}  // namespace ergodyn::quantum
