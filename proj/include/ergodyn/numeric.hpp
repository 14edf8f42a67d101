// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace ergodyn {

using Rng = std::mt19937_64;

// Uniform rank/zero policy: a singular value counts as zero when it is at most
// kRankTolerance times the largest one.
inline constexpr double kRankTolerance = 1e-10;

// Seeded stream for replica `index` of an experiment seeded with `seed`.
Rng make_stream(std::uint64_t seed, std::uint64_t index = 0);

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = kRankTolerance);

double relative_asymmetry(const Eigen::MatrixXd& m);

// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
  std::array<double, 16> nodes;
  std::array<double, 16> weights;
};
const GaussLegendre16& gauss_legendre16();

// Integrates f over [a, b] with the 16-point rule on `panels` equal panels.
double integrate_gl16(const std::function<double(double)>& f, double a, double b, int panels = 1);

// Worker count honouring ERGODYN_THREADS.
unsigned worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index is
// processed exactly once; callers write results into slot i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ergodyn
