// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include "ergodyn/gibbs_memory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "ergodyn/error.hpp"
#include "ergodyn/numeric.hpp"

namespace ergodyn::gibbs {

namespace {

constexpr double kPi = std::numbers::pi;

// Centered cubic B-spline on [-2, 2].
double m4(double x) {
  x = std::abs(x);
  if (x >= 2.0) return 0.0;
  if (x >= 1.0) return (2.0 - x) * (2.0 - x) * (2.0 - x) / 6.0;
  return 2.0 / 3.0 - x * x + 0.5 * x * x * x;
}

// int_x^2 M4.
double m4_tail(double x) {
  x = std::max(x, 0.0);
  if (x >= 2.0) return 0.0;
  if (x >= 1.0) return std::pow(2.0 - x, 4) / 24.0;
  return 0.5 - (2.0 * x / 3.0 - x * x * x / 3.0 + x * x * x * x / 8.0);
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be positive and finite");
  }
}

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::string buf(text);
  std::replace(buf.begin(), buf.end(), ',', ' ');
  std::istringstream in(buf);
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw Error(ErrorCode::kInvalidArgument, "bad number in kernel spec '" + std::string(text) + "'");
  return out;
}

}  // namespace

CovarianceKernel CovarianceKernel::white(double sigma2) {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw Error(ErrorCode::kInvalidArgument, "white-noise intensity must be nonnegative");
  }
  CovarianceKernel k;
  k.kind_ = Kind::kWhite;
  k.name_ = "white:" + std::to_string(sigma2);
  k.sigma2_ = sigma2;
  k.cf_ = [](double) { return 0.0; };
  k.tail_ = [](double) { return 0.0; };
  k.spectral_ = [sigma2](double) { return sigma2 / (2.0 * kPi); };
  return k;
}

CovarianceKernel CovarianceKernel::gaussian(double amplitude, double width) {
  require_positive(amplitude, "kernel amplitude");
  require_positive(width, "kernel width");
  CovarianceKernel k;
  k.kind_ = Kind::kGaussian;
  k.name_ = "gauss:" + std::to_string(amplitude) + "," + std::to_string(width);
  k.cf_ = [=](double t) { return amplitude * std::exp(-(t / width) * (t / width)); };
  k.tail_ = [=](double t) { return amplitude * width * std::sqrt(kPi) / 2.0 * std::erfc(std::max(t, 0.0) / width); };
  k.spectral_ = [=](double l) {
    return amplitude * width / (2.0 * std::sqrt(kPi)) * std::exp(-l * l * width * width / 4.0);
  };
  return k;
}

CovarianceKernel CovarianceKernel::bspline(double amplitude, double width) {
  require_positive(amplitude, "kernel amplitude");
  require_positive(width, "kernel width");
  CovarianceKernel k;
  k.kind_ = Kind::kBSpline;
  k.name_ = "bspline:" + std::to_string(amplitude) + "," + std::to_string(width);
  const double scale = amplitude / (2.0 / 3.0);
  k.cf_ = [=](double t) { return scale * m4(t / width); };
  k.tail_ = [=](double t) { return scale * width * m4_tail(t / width); };
  k.spectral_ = [=](double l) {
    const double s = sinc(width * l / 2.0);
    return scale * width / (2.0 * kPi) * s * s * s * s;
  };
  k.support_ = 2.0 * width;
  k.breakpoints_ = {-2.0 * width, -width, 0.0, width, 2.0 * width};
  return k;
}

CovarianceKernel CovarianceKernel::zero() {
  CovarianceKernel k;
  k.kind_ = Kind::kCustom;
  k.name_ = "zero";
  k.cf_ = [](double) { return 0.0; };
  k.tail_ = [](double) { return 0.0; };
  k.spectral_ = [](double) { return 0.0; };
  k.support_ = 0.0;
  return k;
}

CovarianceKernel CovarianceKernel::custom(std::string name, std::function<double(double)> cf,
                                          std::function<double(double)> tail,
                                          std::optional<double> support,
                                          std::function<double(double)> spectral,
                                          std::vector<double> breakpoints) {
  if (!cf || !tail) throw Error(ErrorCode::kInvalidArgument, "custom kernel needs C_f and a tail bound");
  CovarianceKernel k;
  k.kind_ = Kind::kCustom;
  k.name_ = std::move(name);
  k.cf_ = std::move(cf);
  k.tail_ = std::move(tail);
  k.support_ = support;
  k.spectral_ = std::move(spectral);
  k.breakpoints_ = std::move(breakpoints);
  return k;
}

CovarianceKernel CovarianceKernel::sum(const CovarianceKernel& a, const CovarianceKernel& b) {
  if (a.is_white() || b.is_white()) {
    if (a.is_white() && b.is_white()) return white(a.sigma2_ + b.sigma2_);
    throw Error(ErrorCode::kInvalidArgument, "cannot mix white and colored kernels");
  }
  std::optional<double> support;
  if (a.support_ && b.support_) support = std::max(*a.support_, *b.support_);
  std::function<double(double)> spectral;
  if (a.spectral_ && b.spectral_) {
    spectral = [fa = a.spectral_, fb = b.spectral_](double l) { return fa(l) + fb(l); };
  }
  auto bp = a.breakpoints_;
  bp.insert(bp.end(), b.breakpoints_.begin(), b.breakpoints_.end());
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return custom(a.name_ + "+" + b.name_, [fa = a.cf_, fb = b.cf_](double t) { return fa(t) + fb(t); },
                [ta = a.tail_, tb = b.tail_](double t) { return ta(t) + tb(t); }, support,
                std::move(spectral), std::move(bp));
}

CovarianceKernel CovarianceKernel::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const auto kind = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string_view::npos) args = parse_numbers(spec.substr(colon + 1));
  auto arg = [&](std::size_t i, double fallback) { return i < args.size() ? args[i] : fallback; };
  if (kind == "white") {
    if (args.size() != 1) throw Error(ErrorCode::kInvalidArgument, "white kernel needs white:SIGMA2");
    return white(args[0]);
  }
  if (args.size() > 2) throw Error(ErrorCode::kInvalidArgument, "too many kernel parameters");
  if (kind == "gauss" || kind == "gaussian") return gaussian(arg(0, 1.0), arg(1, 1.0));
  if (kind == "bspline") return bspline(arg(0, 1.0), arg(1, 1.0));
  if (kind == "zero" && args.empty()) return zero();
  throw Error(ErrorCode::kInvalidArgument, "unknown kernel '" + std::string(spec) + "'");
}

double CovarianceKernel::white_intensity() const {
  if (!is_white()) throw Error(ErrorCode::kInvalidArgument, "kernel is not white");
  return sigma2_;
}

double CovarianceKernel::operator()(double s) const { return cf_(s); }

double CovarianceKernel::tail_integral(double t) const { return tail_(t); }

double CovarianceKernel::spectral_density(double lambda) const {
  if (!spectral_) throw Error(ErrorCode::kInvalidArgument, "kernel '" + name_ + "' has no spectral density");
  return spectral_(lambda);
}

bool CovarianceKernel::bochner_check(double half_width, int samples, double tol) const {
  if (is_white()) return true;
  if (samples < 4 || samples % 2 != 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be even");
  const double dt = 2.0 * half_width / samples;
  const double c0 = std::abs(cf_(0.0));
  std::vector<double> x(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double t = (k <= samples / 2 ? k : k - samples) * dt;
    x[k] = cf_(t);
    if (std::abs(cf_(t) - cf_(-t)) > tol * std::max(c0, 1e-300)) return false;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, x);
  double top = 0.0;
  for (const auto& z : spec) top = std::max(top, z.real());
  return std::all_of(spec.begin(), spec.end(), [&](const auto& z) { return z.real() >= -tol * top; });
}

bool StationaryCovariance::is_symmetric_psd(double tol) const {
  if (C.rows() != C.cols()) return false;
  const double scale = std::max(C.cwiseAbs().maxCoeff(), 1e-300);
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (C + C.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol * scale;
}

Eigen::MatrixXd drift_matrix(const Eigen::MatrixXd& V, double alpha) {
  const Eigen::Index n = V.rows();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  A.topRightCorner(n, n).setIdentity();
  A.bottomLeftCorner(n, n) = -V;
  A(n, n) = -alpha;
  return A;
}

DrivenSystem build_driven(const QuadraticHamiltonian& H, double alpha, const CovarianceKernel& kernel) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::kInvalidArgument, "alpha must be nonnegative");
  DrivenSystem sys{H, alpha, kernel, drift_matrix(H.V(), alpha)};
  const auto mix = phase::mixing_subspace(H);
  sys.l0_dim = 2 * static_cast<int>(H.dim() - mix.dim);
  Eigen::EigenSolver<Eigen::MatrixXd> es(sys.A, false);
  sys.spectral_abscissa = es.eigenvalues().real().maxCoeff();
  sys.stable = alpha > 0.0 && sys.l0_dim == 0 && sys.spectral_abscissa < 0.0;
  return sys;
}

namespace {

Eigen::MatrixXd gibbs_unit(const QuadraticHamiltonian& H) {
  const Eigen::Index n = H.dim();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  C.topLeftCorner(n, n) = H.modes() * H.omega_squared().cwiseInverse().asDiagonal() * H.modes().transpose();
  C.bottomRightCorner(n, n).setIdentity();
  return C;
}

// sup_t ||e^{tA}||_2 <= sqrt(cond diag(V, E)) since the energy norm is non-increasing.
double transient_bound(const QuadraticHamiltonian& H) {
  const auto& w2 = H.omega_squared();
  return std::sqrt(std::max(w2.maxCoeff(), 1.0) / std::min(w2.minCoeff(), 1.0));
}

}  // namespace

StationaryCovariance gibbs_covariance(const QuadraticHamiltonian& H, double beta) {
  require_positive(beta, "beta");
  return {gibbs_unit(H) / beta};
}

double stationarity_residual(const DrivenSystem& system, const Eigen::MatrixXd& C) {
  const Eigen::Index n = system.H.dim();
  if (C.rows() != 2 * n || C.cols() != 2 * n) throw Error(ErrorCode::kDimensionMismatch, "covariance has wrong shape");
  Eigen::MatrixXd R = system.A * C + C * system.A.transpose();
  if (system.kernel.is_white()) R(n, n) += system.kernel.white_intensity();
  return R.norm();
}

StationaryCovariance stationary_white(const DrivenSystem& system) {
  if (!system.kernel.is_white()) throw Error(ErrorCode::kInvalidArgument, "stationary_white needs a white kernel");
  if (!(system.alpha > 0.0)) throw Error(ErrorCode::kUnstable, "alpha must be positive for a stationary state");
  if (system.l0_dim > 0) {
    throw Error(ErrorCode::kUnstable, "dim L_0 = " + std::to_string(system.l0_dim) + ", no unique stationary state");
  }
  return {system.kernel.white_intensity() / (2.0 * system.alpha) * gibbs_unit(system.H)};
}

Eigen::MatrixXd memory_propagator(const DrivenSystem& system, double lag, const QuadratureOptions& options) {
  const auto& kernel = system.kernel;
  if (kernel.is_white()) throw Error(ErrorCode::kInvalidArgument, "memory propagator needs a colored kernel");
  if (!system.stable) throw Error(ErrorCode::kUnstable, "drift is not asymptotically stable");
  const Eigen::MatrixXd& A = system.A;
  const Eigen::Index m = A.rows();
  const auto& gl = gauss_legendre16();

  std::optional<double> end;
  if (kernel.support()) {
    end = *kernel.support() - lag;
    if (*end <= 0.0) return Eigen::MatrixXd::Zero(m, m);
  }
  std::vector<double> cuts{0.0};
  for (double b : kernel.breakpoints()) {
    const double t = b - lag;
    if (t > 0.0 && (!end || t < *end)) cuts.push_back(t);
  }
  if (end) cuts.push_back(*end);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double bound = transient_bound(system.H);

  auto integrate = [&](double h) {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
    std::vector<Eigen::MatrixXd> node_exp(16);
    Eigen::MatrixXd step;
    double width = -1.0;
    auto prepare = [&](double w) {
      if (w == width) return;
      width = w;
      for (int i = 0; i < 16; ++i) node_exp[i] = (A * (0.5 * w * (1.0 + gl.nodes[i]))).exp();
      step = (A * w).exp();
    };
    Eigen::MatrixXd P;
    Eigen::MatrixXd S(m, m);
    auto panel = [&](double t0) {
      S.setZero();
      for (int i = 0; i < 16; ++i) {
        const double t = t0 + 0.5 * width * (1.0 + gl.nodes[i]);
        S += (0.5 * width * gl.weights[i] * kernel(t + lag)) * node_exp[i];
      }
      W += P * S;
      P = P * step;
    };
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c];
      const double len = cuts[c + 1] - a;
      const int panels = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
      prepare(len / panels);
      P = (A * a).exp();
      for (int j = 0; j < panels; ++j) panel(a + j * width);
    }
    if (!end) {
      double t = cuts.back();
      prepare(h);
      P = (A * t).exp();
      for (;;) {
        if (t + lag >= 0.0) {
          const double tail = kernel.tail_integral(t + lag);
          if (tail == 0.0 || bound * tail <= options.tail_tol * W.norm()) break;
        }
        if (t > options.max_horizon) {
          throw Error(ErrorCode::kKernelNotIntegrable,
                      "kernel tail not below tolerance by horizon " + std::to_string(options.max_horizon));
        }
        panel(t);
        t += width;
      }
    }
    return W;
  };

  double h = 0.5;
  Eigen::MatrixXd coarse = integrate(h);
  for (int refine = 0; refine < 8; ++refine) {
    h *= 0.5;
    Eigen::MatrixXd fine = integrate(h);
    const double change = (fine - coarse).norm();
    coarse = std::move(fine);
    if (change <= options.rel_tol * coarse.norm() || change == 0.0) break;
  }
  return coarse;
}

Eigen::MatrixXd lagged_covariance(const DrivenSystem& system, double lag, const QuadratureOptions& options) {
  if (!(system.alpha > 0.0)) throw Error(ErrorCode::kUnstable, "alpha must be positive for a stationary state");
  if (system.kernel.is_white()) {
    // <psi(t) psi(t+s)^T> = C e^{s A^T} for s >= 0.
    const Eigen::MatrixXd C = stationary_white(system).C;
    if (lag >= 0.0) return C * (system.A * lag).exp().transpose();
    return (system.A * -lag).exp() * C;
  }
  const Eigen::MatrixXd G = gibbs_unit(system.H);
  const Eigen::MatrixXd Wp = memory_propagator(system, lag, options);
  const Eigen::MatrixXd Wm = lag == 0.0 ? Wp : memory_propagator(system, -lag, options);
  return (Wp * G + G * Wm.transpose()) / (2.0 * system.alpha);
}

StationaryCovariance stationary_colored(const DrivenSystem& system, const QuadratureOptions& options) {
  if (system.kernel.is_white()) return stationary_white(system);
  const Eigen::MatrixXd C = lagged_covariance(system, 0.0, options);
  return {0.5 * (C + C.transpose())};
}

StationaryCovariance c_v_matrix(const QuadraticHamiltonian& H, double alpha,
                                const std::function<double(double)>& spectral_density) {
  require_positive(alpha, "alpha");
  const Eigen::Index n = H.dim();
  Eigen::VectorXd a(n);
  for (Eigen::Index k = 0; k < n; ++k) a(k) = spectral_density(H.omega()(k));
  const auto& U = H.modes();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  C.topLeftCorner(n, n) = U * a.cwiseQuotient(H.omega_squared()).asDiagonal() * U.transpose();
  C.bottomRightCorner(n, n) = U * a.asDiagonal() * U.transpose();
  return {(kPi / alpha) * C};
}

RemainderReport remainder_scan(const LocalGraph& graph, const Eigen::MatrixXd& V, int gamma, double alpha,
                               const CovarianceKernel& kernel, int source) {
  const int n = graph.size();
  if (V.rows() != n || V.cols() != n) throw Error(ErrorCode::kDimensionMismatch, "V does not match the graph");
  if (!graph.connected()) throw Error(ErrorCode::kDisconnectedGraph, "graph is not connected");
  if (!graph.is_gamma_local(V, gamma)) {
    throw Error(ErrorCode::kInvalidArgument, "V is not " + std::to_string(gamma) + "-local on the graph");
  }
  if (!kernel.has_spectral_density()) throw Error(ErrorCode::kInvalidArgument, "kernel needs a spectral density");
  const auto order = graph.source_first_order(source);
  Eigen::MatrixXd Vp(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) Vp(i, j) = V(order[i], order[j]);
  }
  const QuadraticHamiltonian H(Vp);
  const auto sys = build_driven(H, alpha, kernel);
  const auto C = stationary_colored(sys).C;
  const auto CV = c_v_matrix(H, alpha, [&](double l) { return kernel.spectral_density(l); }).C;
  const Eigen::MatrixXd Y = C - CV;

  std::vector<int> r(static_cast<std::size_t>(n));
  int max_d = 0;
  for (int k = 0; k < n; ++k) {
    r[k] = graph.distance(order[k], source);
    max_d = std::max(max_d, r[k]);
  }
  RemainderReport rep;
  rep.rows.resize(static_cast<std::size_t>(max_d) + 1);
  for (int d = 0; d <= max_d; ++d) rep.rows[d].distance = d;
  for (int i = 0; i < n; ++i) {
    auto& diag = rep.rows[r[i]];
    diag.max_pp_diag = std::max(diag.max_pp_diag, std::abs(Y(n + i, n + i)));
    diag.max_qq_diag = std::max(diag.max_qq_diag, std::abs(Y(i, i)));
    for (int j = 0; j < n; ++j) {
      auto& row = rep.rows[std::min(r[i], r[j])];
      row.max_pp = std::max(row.max_pp, std::abs(Y(n + i, n + j)));
      row.max_qq = std::max(row.max_qq, std::abs(Y(i, j)));
    }
  }
  double env_diag = 0.0, env_pp = 0.0, env_qq = 0.0;
  for (int d = max_d; d >= 0; --d) {
    auto& row = rep.rows[d];
    env_diag = std::max(env_diag, row.max_pp_diag);
    env_pp = std::max(env_pp, row.max_pp);
    env_qq = std::max(env_qq, row.max_qq);
    row.envelope_pp_diag = env_diag;
    row.envelope_pp = env_pp;
    row.envelope_qq = env_qq;
  }
  rep.noise_floor = 1e-13 * C.cwiseAbs().maxCoeff();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (const auto& row : rep.rows) {
    if (row.envelope_pp_diag <= rep.noise_floor) break;
    const double y = std::log(row.envelope_pp_diag);
    sx += row.distance;
    sy += y;
    sxx += static_cast<double>(row.distance) * row.distance;
    sxy += row.distance * y;
    ++count;
  }
  if (count >= 2) rep.decay_exponent = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return rep;
}

namespace {

struct PathResult {
  Eigen::MatrixXd cov;
  std::vector<double> energy;
};

// Frequencies lambda_m >= 0 drawn by stratified inverse-CDF sampling of a(lambda).
std::vector<double> sample_frequencies(const CovarianceKernel& kernel, int count, Rng& rng) {
  auto mass = [&](double a, double b) {
    return integrate_gl16([&](double l) { return kernel.spectral_density(l); }, a, b, 8);
  };
  double top = 1.0;
  double head = mass(0.0, top);
  while (top < 1e4) {
    const double next = mass(top, 2.0 * top);
    if (next <= 1e-10 * head) break;
    head += next;
    top *= 2.0;
  }
  top *= 2.0;
  constexpr int kCells = 8192;
  std::vector<double> cdf(kCells + 1, 0.0);
  const double cell = top / kCells;
  for (int i = 0; i < kCells; ++i) cdf[i + 1] = cdf[i] + mass(i * cell, (i + 1) * cell);
  const double total = cdf.back();
  if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "kernel has zero spectral mass");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) {
    const double u = (m + unif(rng)) / count * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const int i = std::clamp(static_cast<int>(it - cdf.begin()) - 1, 0, kCells - 1);
    const double span = cdf[i + 1] - cdf[i];
    const double frac = span > 0.0 ? (u - cdf[i]) / span : 0.0;
    out[m] = (i + std::clamp(frac, 0.0, 1.0)) * cell;
  }
  return out;
}

}  // namespace

SdeReport sde_oracle(const DrivenSystem& system, const SdeOptions& o) {
  require_positive(o.horizon, "horizon");
  require_positive(o.dt, "dt");
  if (o.paths < 2) throw Error(ErrorCode::kTooFewSamples, "sde oracle needs at least two paths");
  if (!(o.burn_in_fraction >= 0.0 && o.burn_in_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "burn-in fraction must lie in [0, 1)");
  }
  const bool white = system.kernel.is_white();
  Eigen::EigenSolver<Eigen::MatrixXd> es(system.A, false);
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  if (o.dt * rho > 0.1) {
    throw Error(ErrorCode::kInvalidArgument, "dt * spectral radius exceeds 0.1");
  }
  if (!white && o.frequencies < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one frequency");

  const int n = static_cast<int>(system.H.dim());
  const int m = 2 * n;
  const Eigen::MatrixXd& V = system.H.V();
  const double alpha = system.alpha;
  const long steps = static_cast<long>(std::ceil(o.horizon / o.dt));
  const long burn = static_cast<long>(o.burn_in_fraction * steps);
  const long stride = std::max<long>(1, steps / std::max(1, o.energy_samples));

  auto deriv = [&](const std::vector<double>& x, double force, std::vector<double>& out) {
    for (int i = 0; i < n; ++i) {
      out[i] = x[n + i];
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc -= V(i, j) * x[j];
      out[n + i] = acc;
    }
    out[n] += -alpha * x[n] + force;
  };
  auto energy_of = [&](const std::vector<double>& x) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      e += 0.5 * x[n + i] * x[n + i];
      for (int j = 0; j < n; ++j) e += 0.5 * x[i] * V(i, j) * x[j];
    }
    return e;
  };

  std::vector<PathResult> results(static_cast<std::size_t>(o.paths));
  parallel_for(results.size(), [&](std::size_t path) {
    Rng rng = make_stream(o.seed, path);
    std::vector<double> x(m, 0.0), k1(m), k2(m), k3(m), k4(m), tmp(m);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    std::vector<double> energies;
    energies.reserve(static_cast<std::size_t>(steps / stride) + 2);
    auto accumulate = [&](long step) {
      if (step % stride == 0) energies.push_back(energy_of(x));
      if (step > burn) {
        for (int a = 0; a < m; ++a) {
          for (int b = 0; b <= a; ++b) acc(a, b) += x[a] * x[b];
        }
      }
    };
    accumulate(0);
    if (white) {
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double kick = std::sqrt(system.kernel.white_intensity() * o.dt);
      for (long s = 1; s <= steps; ++s) {
        deriv(x, 0.0, k1);
        for (int i = 0; i < m; ++i) x[i] += o.dt * k1[i];
        x[n] += kick * gauss(rng);
        accumulate(s);
      }
    } else {
      const auto lambda = sample_frequencies(system.kernel, o.frequencies, rng);
      const int nf = o.frequencies;
      std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * kPi);
      std::vector<double> phase(nf);
      for (auto& p : phase) p = phase_dist(rng);
      const double amp = std::sqrt(2.0 * system.kernel(0.0) / nf);
      // Cosine sum advanced by half-step rotations, split into re/im arrays.
      std::vector<double> zr(nf), zi(nf), rr(nf), ri(nf);
      for (int k = 0; k < nf; ++k) {
        rr[k] = std::cos(0.5 * lambda[k] * o.dt);
        ri[k] = std::sin(0.5 * lambda[k] * o.dt);
      }
      auto sync = [&](double t) {
        for (int k = 0; k < nf; ++k) {
          zr[k] = std::cos(lambda[k] * t + phase[k]);
          zi[k] = std::sin(lambda[k] * t + phase[k]);
        }
      };
      auto force_now = [&] {
        double f = 0.0;
        for (int k = 0; k < nf; ++k) f += zr[k];
        return amp * f;
      };
      auto half_step = [&] {
        for (int k = 0; k < nf; ++k) {
          const double re = zr[k] * rr[k] - zi[k] * ri[k];
          zi[k] = zi[k] * rr[k] + zr[k] * ri[k];
          zr[k] = re;
        }
      };
      sync(0.0);
      const double h = o.dt;
      for (long s = 1; s <= steps; ++s) {
        const double f0 = force_now();
        half_step();
        const double fh = force_now();
        half_step();
        const double f1 = force_now();
        deriv(x, f0, k1);
        for (int i = 0; i < m; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        deriv(tmp, fh, k2);
        for (int i = 0; i < m; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        deriv(tmp, fh, k3);
        for (int i = 0; i < m; ++i) tmp[i] = x[i] + h * k3[i];
        deriv(tmp, f1, k4);
        for (int i = 0; i < m; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (s % 4096 == 0) sync(s * h);
        accumulate(s);
      }
    }
    const double samples = static_cast<double>(std::max<long>(1, steps - burn));
    acc = acc.selfadjointView<Eigen::Lower>();
    results[path] = {acc / samples, std::move(energies)};
  });

  SdeReport rep;
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(m, m);
  for (const auto& r : results) mean += r.cov;
  mean /= o.paths;
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(m, m);
  for (const auto& r : results) var += (r.cov - mean).cwiseAbs2();
  var /= (o.paths - 1);
  rep.covariance = {mean};
  rep.standard_error = (var / o.paths).cwiseSqrt();

  const std::size_t points = results.front().energy.size();
  rep.times.resize(points);
  rep.mean_energy.assign(points, 0.0);
  for (std::size_t i = 0; i < points; ++i) {
    rep.times[i] = static_cast<double>(i * stride) * o.dt;
    for (const auto& r : results) rep.mean_energy[i] += r.energy[i] / o.paths;
  }
  if (points >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      sx += rep.times[i];
      sy += rep.mean_energy[i];
      sxx += rep.times[i] * rep.times[i];
      sxy += rep.times[i] * rep.mean_energy[i];
    }
    const double np = static_cast<double>(points);
    rep.energy_slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  }
  return rep;
}

L0Report sample_local_hamiltonians(const LocalGraph& graph, int samples, std::uint64_t seed, double margin) {
  if (samples < 1) throw Error(ErrorCode::kTooFewSamples, "need at least one sample");
  if (!graph.connected()) throw Error(ErrorCode::kDisconnectedGraph, "graph is not connected");
  require_positive(margin, "diagonal margin");
  const int n = graph.size();
  L0Report rep;
  rep.samples = samples;
  Rng rng = make_stream(seed, 0x10ca1);
  std::uniform_real_distribution<double> weight(-1.0, 1.0), extra(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
    for (auto [a, b] : graph.edges()) V(a, b) = V(b, a) = weight(rng);
    for (int i = 0; i < n; ++i) V(i, i) = V.row(i).cwiseAbs().sum() + margin + extra(rng);
    const QuadraticHamiltonian H(V);
    const int dim = phase::mixing_subspace(H).dim;
    if (dim == n) {
      ++rep.full_rank;
    } else {
      rep.failures.push_back("sample " + std::to_string(s) + ": dim L_0 = " + std::to_string(2 * (n - dim)));
    }
  }
  rep.fraction = static_cast<double>(rep.full_rank) / samples;
  return rep;
}

MatrixTemplate chain_template(double diagonal) {
  return [diagonal](int i, int j) {
    if (i == j) return diagonal;
    return std::abs(i - j) == 1 ? -1.0 : 0.0;
  };
}

ThermoReport thermo_scan(const std::vector<int>& sizes, const MatrixTemplate& V, double alpha,
                         const CovarianceKernel& kernel, const std::vector<std::pair<int, int>>& probes,
                         std::uint64_t seed) {
  if (sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "need at least one truncation size");
  if (!std::is_sorted(sizes.begin(), sizes.end()) || sizes.front() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "truncation sizes must be positive and increasing");
  }
  if (probes.empty()) throw Error(ErrorCode::kInvalidArgument, "need at least one probe pair");
  ThermoReport rep;
  rep.probes = probes;
  for (std::size_t stage = 0; stage < sizes.size(); ++stage) {
    const int size = sizes[stage];
    for (auto [i, j] : probes) {
      if (i < 1 || j < 1 || i > size || j > size) {
        throw Error(ErrorCode::kInvalidArgument, "probe (" + std::to_string(i) + "," + std::to_string(j) +
                                                     ") lies outside truncation of size " + std::to_string(size));
      }
    }
    // Template vertex v sits at internal index size - v, so the driven vertex is 0.
    Eigen::MatrixXd Vn(size, size);
    for (int a = 0; a < size; ++a) {
      for (int b = 0; b < size; ++b) Vn(a, b) = V(size - a, size - b);
    }
    ThermoStage st;
    st.size = size;
    std::optional<DrivenSystem> sys;
    {
      DrivenSystem base = build_driven(QuadraticHamiltonian(Vn), alpha, kernel);
      Rng rng = make_stream(seed, 0x7e40 + stage);
      const double eps = std::pow(10.0, -static_cast<double>(stage + 1));
      std::uniform_real_distribution<double> shift(-eps, eps);
      for (int attempt = 0; base.l0_dim > 0 && attempt < 32; ++attempt) {
        Eigen::MatrixXd Vp = Vn;
        double applied = 0.0;
        for (int a = 0; a < size; ++a) {
          const double d = shift(rng);
          Vp(a, a) += d;
          applied = std::max(applied, std::abs(d));
        }
        DrivenSystem trial = build_driven(QuadraticHamiltonian(Vp), alpha, kernel);
        if (trial.l0_dim == 0) {
          st.perturbation = applied;
          base = std::move(trial);
        }
      }
      if (base.l0_dim > 0) throw Error(ErrorCode::kUnstable, "could not remove L_0 by a small perturbation");
      sys.emplace(std::move(base));
    }
    const auto C = stationary_colored(*sys);
    std::optional<StationaryCovariance> cv;
    if (kernel.has_spectral_density()) {
      cv = c_v_matrix(sys->H, alpha, [&](double l) { return kernel.spectral_density(l); });
    }
    for (auto [i, j] : probes) {
      const int a = size - i, b = size - j;
      st.internal_index.push_back(a);
      st.pp.push_back(C.pp(a, b));
      st.qq.push_back(C.qq(a, b));
      st.cv_pp.push_back(cv ? cv->pp(a, b) : std::nan(""));
    }
    rep.stages.push_back(std::move(st));
  }
  rep.pp_differences.assign(probes.size(), {});
  rep.qq_differences.assign(probes.size(), {});
  rep.pp_differences_decrease = rep.stages.size() >= 3;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    for (std::size_t s = 1; s < rep.stages.size(); ++s) {
      rep.pp_differences[k].push_back(std::abs(rep.stages[s].pp[k] - rep.stages[s - 1].pp[k]));
      rep.qq_differences[k].push_back(std::abs(rep.stages[s].qq[k] - rep.stages[s - 1].qq[k]));
    }
    const auto& d = rep.pp_differences[k];
    const double floor = 1e-13 * std::abs(rep.stages.back().pp[k]);
    for (std::size_t s = 1; s < d.size(); ++s) {
      if (!(d[s] < d[s - 1] || d[s] <= floor)) rep.pp_differences_decrease = false;
    }
  }
  return rep;
}

}  // namespace ergodyn::gibbs
