// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include "ergodyn/local_graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <queue>
#include <string>

#include "ergodyn/error.hpp"

namespace ergodyn::gibbs {

LocalGraph::LocalGraph(int n, const std::vector<std::pair<int, int>>& edges) : n_(n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "graph needs at least one vertex");
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw Error(ErrorCode::kInvalidArgument, "edge endpoint out of range");
    if (a == b) continue;
    const auto e = std::minmax(a, b);
    if (std::find(edges_.begin(), edges_.end(), std::pair<int, int>(e)) != edges_.end()) continue;
    edges_.emplace_back(e);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  dist_.assign(static_cast<std::size_t>(n) * n, -1);
  for (int s = 0; s < n; ++s) {
    std::queue<int> frontier;
    dist_[static_cast<std::size_t>(s) * n + s] = 0;
    frontier.push(s);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v : adj[u]) {
        auto& d = dist_[static_cast<std::size_t>(s) * n + v];
        if (d < 0) {
          d = dist_[static_cast<std::size_t>(s) * n + u] + 1;
          frontier.push(v);
        }
      }
    }
  }
}

LocalGraph LocalGraph::chain(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return LocalGraph(n, e);
}

LocalGraph LocalGraph::star(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < n; ++i) e.emplace_back(0, i);
  return LocalGraph(n, e);
}

LocalGraph LocalGraph::complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return LocalGraph(n, e);
}

LocalGraph LocalGraph::grid(int rows, int cols) {
  std::vector<std::pair<int, int>> e;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) e.emplace_back(v, v + 1);
      if (r + 1 < rows) e.emplace_back(v, v + cols);
    }
  }
  return LocalGraph(rows * cols, e);
}

namespace {

int parse_positive(std::string_view text, std::string_view spec) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad size in graph spec '" + std::string(spec) + "'");
  }
  return v;
}

}  // namespace

LocalGraph LocalGraph::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::kInvalidArgument, "graph spec needs KIND:SIZE");
  const auto kind = spec.substr(0, colon);
  const auto arg = spec.substr(colon + 1);
  if (kind == "chain") return chain(parse_positive(arg, spec));
  if (kind == "star") return star(parse_positive(arg, spec));
  if (kind == "complete") return complete(parse_positive(arg, spec));
  if (kind == "grid") {
    const auto x = arg.find('x');
    if (x == std::string_view::npos) throw Error(ErrorCode::kInvalidArgument, "grid spec needs RxC");
    return grid(parse_positive(arg.substr(0, x), spec), parse_positive(arg.substr(x + 1), spec));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown graph kind '" + std::string(kind) + "'");
}

bool LocalGraph::connected() const {
  return std::none_of(dist_.begin(), dist_.begin() + n_, [](int d) { return d < 0; });
}

bool LocalGraph::is_gamma_local(const Eigen::MatrixXd& V, int gamma, double tol) const {
  if (V.rows() != n_ || V.cols() != n_) return false;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const int d = distance(i, j);
      if ((d < 0 || d > gamma) && std::abs(V(i, j)) > tol) return false;
    }
  }
  return true;
}

std::vector<int> LocalGraph::source_first_order(int source) const {
  if (source < 0 || source >= n_) throw Error(ErrorCode::kInvalidArgument, "source vertex out of range");
  std::vector<int> order(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) order[i] = i;
  std::swap(order[0], order[source]);
  return order;
}

}  // namespace ergodyn::gibbs
