// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ergodyn/local_graph.hpp"
#include "ergodyn/phase_core.hpp"

namespace ergodyn::gibbs {

using phase::QuadraticHamiltonian;

// Autocovariance C_f(s) = <f_t f_{t+s}> of the stationary forcing.
class CovarianceKernel {
 public:
  enum class Kind { kWhite, kGaussian, kBSpline, kCustom };

  // C_f = sigma2 * delta.
  static CovarianceKernel white(double sigma2);
  // C_f(t) = amplitude * exp(-(t/width)^2).
  static CovarianceKernel gaussian(double amplitude = 1.0, double width = 1.0);
  // C_f(t) = amplitude * M4(t/width) / M4(0), cubic B-spline, support |t| <= 2 width.
  static CovarianceKernel bspline(double amplitude = 1.0, double width = 1.0);
  static CovarianceKernel zero();
  // Generic even kernel. `tail(t)` must bound int_t^inf |C_f|.
  static CovarianceKernel custom(std::string name, std::function<double(double)> cf,
                                 std::function<double(double)> tail,
                                 std::optional<double> support = std::nullopt,
                                 std::function<double(double)> spectral = {},
                                 std::vector<double> breakpoints = {});
  static CovarianceKernel sum(const CovarianceKernel& a, const CovarianceKernel& b);
  // "white:SIGMA2", "gauss", "gauss:AMP,WIDTH", "bspline:AMP,WIDTH", "zero".
  static CovarianceKernel parse(std::string_view spec);

  Kind kind() const { return kind_; }
  bool is_white() const { return kind_ == Kind::kWhite; }
  double white_intensity() const;  // sigma^2
  const std::string& name() const { return name_; }

  double operator()(double s) const;
  // int_t^inf |C_f(u)| du for t >= 0.
  double tail_integral(double t) const;
  // C_f(s) = 0 for |s| > support.
  std::optional<double> support() const { return support_; }
  // Points (in s, both signs) where C_f is not smooth.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  bool has_spectral_density() const { return static_cast<bool>(spectral_); }
  // a(lambda) = (1/2pi) int e^{-it lambda} C_f(t) dt.
  double spectral_density(double lambda) const;

  // Evenness and Bochner spot check: C_f sampled on [-L, L] has a DFT that is
  // nonnegative up to tol * max.
  bool bochner_check(double half_width = 20.0, int samples = 4096, double tol = 1e-8) const;

 private:
  CovarianceKernel() = default;
  Kind kind_ = Kind::kCustom;
  std::string name_;
  double sigma2_ = 0.0;
  std::function<double(double)> cf_;
  std::function<double(double)> tail_;
  std::function<double(double)> spectral_;
  std::optional<double> support_;
  std::vector<double> breakpoints_;
};

// 2N x 2N covariance in (q, p) block form.
struct StationaryCovariance {
  Eigen::MatrixXd C;

  Eigen::Index n() const { return C.rows() / 2; }
  Eigen::MatrixXd qq() const { return C.topLeftCorner(n(), n()); }
  Eigen::MatrixXd qp() const { return C.topRightCorner(n(), n()); }
  Eigen::MatrixXd pp() const { return C.bottomRightCorner(n(), n()); }
  double pp(Eigen::Index i, Eigen::Index j) const { return C(n() + i, n() + j); }
  double qq(Eigen::Index i, Eigen::Index j) const { return C(i, j); }
  bool is_symmetric_psd(double tol = 1e-9) const;
};

struct DrivenSystem {
  QuadraticHamiltonian H;
  double alpha;
  CovarianceKernel kernel;
  Eigen::MatrixXd A;  // [[0, E], [-V, -alpha D]], D = diag(1, 0, ..., 0)
  int l0_dim = 0;     // dim of the orthogonal complement of L_-
  bool stable = false;
  double spectral_abscissa = 0.0;  // max Re eig(A)
};

DrivenSystem build_driven(const QuadraticHamiltonian& H, double alpha, const CovarianceKernel& kernel);

Eigen::MatrixXd drift_matrix(const Eigen::MatrixXd& V, double alpha);

// (1/beta) diag(V^{-1}, E).
StationaryCovariance gibbs_covariance(const QuadraticHamiltonian& H, double beta);

// ||A C + C A^T + B||_F with B = sigma^2 e_{N+1} e_{N+1}^T.
double stationarity_residual(const DrivenSystem& system, const Eigen::MatrixXd& C);

// White forcing: Gibbs with beta = 2 alpha / sigma^2. Throws Unstable when
// alpha <= 0 or dim L_0 > 0.
StationaryCovariance stationary_white(const DrivenSystem& system);

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double tail_tol = 1e-10;
  double max_horizon = 1e4;
};

// W(s) = int_0^inf e^{tau A} C_f(tau + s) dtau.
Eigen::MatrixXd memory_propagator(const DrivenSystem& system, double lag,
                                  const QuadratureOptions& options = {});

// C_psi(s) = lim <psi(t) psi(t+s)^T> = (1/2 alpha)(W(s) C_G1 + C_G1 W(-s)^T);
// white forcing gives C e^{s A^T}.
Eigen::MatrixXd lagged_covariance(const DrivenSystem& system, double lag,
                                  const QuadratureOptions& options = {});

StationaryCovariance stationary_colored(const DrivenSystem& system,
                                        const QuadratureOptions& options = {});

// (pi/alpha) diag(a(sqrt V) V^{-1}, a(sqrt V)).
StationaryCovariance c_v_matrix(const QuadraticHamiltonian& H, double alpha,
                                const std::function<double(double)>& spectral_density);

struct RemainderRow {
  int distance = 0;
  double max_pp_diag = 0.0;  // max |Y(p_i, p_i)| over r(i, source) = distance
  double max_qq_diag = 0.0;
  double max_pp = 0.0;  // max |Y(p_i, p_j)| over min(r(i), r(j)) = distance
  double max_qq = 0.0;
  double envelope_pp_diag = 0.0;  // suffix max of max_pp_diag over distances >= this
  double envelope_pp = 0.0;
  double envelope_qq = 0.0;
};

struct RemainderReport {
  std::vector<RemainderRow> rows;
  double decay_exponent = 0.0;  // slope of log envelope_pp_diag vs distance
  double noise_floor = 0.0;
};

RemainderReport remainder_scan(const LocalGraph& graph, const Eigen::MatrixXd& V, int gamma,
                               double alpha, const CovarianceKernel& kernel, int source);

struct SdeOptions {
  double horizon = 1e4;
  double dt = 1e-3;
  int paths = 16;
  std::uint64_t seed = 0;
  int frequencies = 512;
  double burn_in_fraction = 0.5;
  int energy_samples = 200;  // points of the mean-energy curve
};

struct SdeReport {
  StationaryCovariance covariance;  // time- and path-averaged psi psi^T
  Eigen::MatrixXd standard_error;   // across paths
  std::vector<double> times;        // mean-energy curve
  std::vector<double> mean_energy;
  double energy_slope = 0.0;  // least-squares dE/dt of the curve
};

SdeReport sde_oracle(const DrivenSystem& system, const SdeOptions& options);

struct L0Report {
  int samples = 0;
  int full_rank = 0;  // dim L_0 == 0
  double fraction = 0.0;
  std::vector<std::string> failures;
};

L0Report sample_local_hamiltonians(const LocalGraph& graph, int samples, std::uint64_t seed,
                                   double margin = 0.1);

// Infinite gamma-local template V(i, j) on vertices 1, 2, ...
using MatrixTemplate = std::function<double(int, int)>;

// Chain template: diagonal d, nearest neighbours -1.
MatrixTemplate chain_template(double diagonal = 2.5);

struct ThermoStage {
  int size = 0;
  double perturbation = 0.0;        // ||V_n - V'_n||_inf applied
  std::vector<int> internal_index;  // probe vertex -> internal index (driven vertex -> 0)
  std::vector<double> pp;           // C_psi(p_i, p_j) per probe pair
  std::vector<double> qq;
  std::vector<double> cv_pp;        // C_V(p_i, p_j) of the same truncation
};

struct ThermoReport {
  std::vector<std::pair<int, int>> probes;  // 1-based template vertices
  std::vector<ThermoStage> stages;
  std::vector<std::vector<double>> pp_differences;  // [probe][stage-1]
  std::vector<std::vector<double>> qq_differences;
  bool pp_differences_decrease = false;
};

// Chain truncations Lambda_n = {1..N_n}, driven vertex N_n.
ThermoReport thermo_scan(const std::vector<int>& sizes, const MatrixTemplate& V, double alpha,
                         const CovarianceKernel& kernel,
                         const std::vector<std::pair<int, int>>& probes, std::uint64_t seed = 0);

}  // namespace ergodyn::gibbs
