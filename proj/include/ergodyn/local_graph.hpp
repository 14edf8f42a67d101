// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ergodyn::gibbs {

// Undirected graph on vertices 0..N-1 (loops implicit) with BFS distances.
class LocalGraph {
 public:
  LocalGraph(int n, const std::vector<std::pair<int, int>>& edges);

  static LocalGraph chain(int n);
  static LocalGraph star(int n);  // vertex 0 is the hub
  static LocalGraph complete(int n);
  static LocalGraph grid(int rows, int cols);
  // "chain:N", "star:N", "complete:N", "grid:RxC".
  static LocalGraph parse(std::string_view spec);

  int size() const { return n_; }
  bool connected() const;
  // -1 when unreachable.
  int distance(int i, int j) const { return dist_[static_cast<std::size_t>(i) * n_ + j]; }
  bool adjacent(int i, int j) const { return i == j || distance(i, j) == 1; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  bool is_gamma_local(const Eigen::MatrixXd& V, int gamma, double tol = 0.0) const;
  // Permutes vertices so that `source` becomes 0; order[new] = old.
  std::vector<int> source_first_order(int source) const;

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> dist_;
};

}  // namespace ergodyn::gibbs
