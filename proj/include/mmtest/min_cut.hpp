// Copyright 2026 mmtest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

// Minimum-weight vertex cover on a weighted bipartite graph, via max
// flow.  The graphs here are tiny (one vertex per tree edge), so a plain
// Dinic solver on an adjacency list is plenty.

namespace mmtest {

namespace detail {

class Dinic {
 public:
  explicit Dinic(std::size_t n) : adj_(n) {}

  void add_edge(std::size_t from, std::size_t to, double capacity) {
    adj_[from].push_back({to, capacity, adj_[to].size()});
    adj_[to].push_back({from, 0.0, adj_[from].size() - 1});
  }

  double run(std::size_t source, std::size_t sink) {
    double total = 0.0;
    while (bfs(source, sink)) {
      iter_.assign(adj_.size(), 0);
      for (;;) {
        double pushed = dfs(source, sink, kInf);
        if (pushed <= kEps) break;
        total += pushed;
      }
    }
    return total;
  }

  // After run(): vertices still reachable from the source in the
  // residual graph (the source side of a minimum cut).
  std::vector<bool> source_side(std::size_t source) const {
    std::vector<bool> seen(adj_.size(), false);
    std::queue<std::size_t> queue;
    seen[source] = true;
    queue.push(source);
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop();
      for (const Edge& e : adj_[v]) {
        if (e.capacity > kEps && !seen[e.to]) {
          seen[e.to] = true;
          queue.push(e.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    std::size_t to;
    double capacity;  // residual
    std::size_t rev;
  };

  static constexpr double kInf = 1e300;
  static constexpr double kEps = 1e-12;

  bool bfs(std::size_t source, std::size_t sink) {
    level_.assign(adj_.size(), -1);
    std::queue<std::size_t> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop();
      for (const Edge& e : adj_[v]) {
        if (e.capacity > kEps && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          queue.push(e.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  double dfs(std::size_t v, std::size_t sink, double limit) {
    if (v == sink) return limit;
    for (std::size_t& i = iter_[v]; i < adj_[v].size(); ++i) {
      Edge& e = adj_[v][i];
      if (e.capacity <= kEps || level_[e.to] != level_[v] + 1) continue;
      double pushed = dfs(e.to, sink, std::min(limit, e.capacity));
      if (pushed > kEps) {
        e.capacity -= pushed;
        adj_[e.to][e.rev].capacity += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

}  // namespace detail

struct VertexCover {
  std::vector<std::size_t> a_members;  // indices into the A side
  std::vector<std::size_t> b_members;
  double weight = 0.0;
};

// Minimum-weight vertex cover of the bipartite graph with the given
// vertex weights (each side normalised to sum 1) and crossing edges.
// Source -> a_i at weight(a_i), b_j -> sink at weight(b_j), crossing
// edges at a capacity no cut would pick; the min cut then cuts exactly
// the cover's source/sink edges, and the cover is read off the residual
// reachability.
inline VertexCover min_weight_vertex_cover(
    const std::vector<double>& a_weights, const std::vector<double>& b_weights,
    const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  double a_total = 0.0, b_total = 0.0;
  for (double w : a_weights) {
    if (!(w >= 0.0))
      throw std::invalid_argument("vertex_cover: negative weight");
    a_total += w;
  }
  for (double w : b_weights) {
    if (!(w >= 0.0))
      throw std::invalid_argument("vertex_cover: negative weight");
    b_total += w;
  }
  if (std::abs(a_total - 1.0) > 1e-9 || std::abs(b_total - 1.0) > 1e-9)
    throw std::invalid_argument("vertex_cover: each side must sum to 1");

  std::size_t na = a_weights.size(), nb = b_weights.size();
  std::size_t source = na + nb, sink = na + nb + 1;
  detail::Dinic flow(na + nb + 2);
  for (std::size_t i = 0; i < na; ++i) flow.add_edge(source, i, a_weights[i]);
  for (std::size_t j = 0; j < nb; ++j) flow.add_edge(na + j, sink, b_weights[j]);
  double uncuttable = a_total + b_total + 1.0;
  for (const auto& [i, j] : edges) {
    if (i >= na || j >= nb)
      throw std::invalid_argument("vertex_cover: edge endpoint out of range");
    flow.add_edge(i, na + j, uncuttable);
  }
  flow.run(source, sink);

  std::vector<bool> reach = flow.source_side(source);
  VertexCover cover;
  for (std::size_t i = 0; i < na; ++i) {
    if (!reach[i]) {  // source edge saturated and cut: a_i in the cover
      cover.a_members.push_back(i);
      cover.weight += a_weights[i];
    }
  }
  for (std::size_t j = 0; j < nb; ++j) {
    if (reach[na + j]) {  // sink edge cut: b_j in the cover
      cover.b_members.push_back(j);
      cover.weight += b_weights[j];
    }
  }
  return cover;
}

}  // namespace mmtest
