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

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmtest/random.hpp"

// Rooted phylogenetic trees with weighted internal edges, the points of
// the Billera-Holmes-Vogtmann (BHV) tree space.
//
// Leaves are labelled 1..n.  An internal edge is identified by its clade:
// the set of leaves below it, encoded as a bitmask (bit k-1 <=> leaf k).
// A tree is any pairwise-compatible family of clades with positive
// weights; binary topologies have the full n-2 of them, degenerate trees
// fewer.

namespace mmtest {

using Clade = std::uint64_t;

constexpr int kMaxLeaves = 64;  // Clade is a 64-bit mask

inline Clade all_leaves(int n_leaves) {
  return n_leaves == kMaxLeaves ? ~Clade{0}
                                : (Clade{1} << n_leaves) - 1;
}

inline int clade_size(Clade c) { return std::popcount(c); }

// Two clades can coexist in one tree iff they are nested or disjoint.
inline bool compatible(Clade a, Clade b) {
  return (a & b) == 0 || (a | b) == a || (a | b) == b;
}

class PhyloTree {
 public:
  PhyloTree() = default;

  // Validates the clade family; zero-weight clades are dropped so that
  // trees on the boundary of an orthant compare equal to their collapsed
  // form.  Throws std::invalid_argument on negative weights, clades out
  // of range, or incompatible pairs.
  PhyloTree(int n_leaves, const std::map<Clade, double>& clades)
      : n_leaves_(n_leaves) {
    if (n_leaves < 2 || n_leaves > kMaxLeaves)
      throw std::invalid_argument("PhyloTree: need 2 <= n_leaves <= 64");
    Clade full = all_leaves(n_leaves);
    for (const auto& [c, w] : clades) {
      if (!(w >= 0.0))
        throw std::invalid_argument("PhyloTree: negative or NaN weight");
      if (w == 0.0) continue;
      if ((c & ~full) != 0)
        throw std::invalid_argument("PhyloTree: clade has leaves beyond n");
      int size = clade_size(c);
      if (size < 2 || size > n_leaves - 1)
        throw std::invalid_argument(
            "PhyloTree: clade size must be in [2, n_leaves - 1]");
      clades_.emplace(c, w);
    }
    if (clades_.size() > static_cast<std::size_t>(n_leaves - 2))
      throw std::invalid_argument("PhyloTree: more than n - 2 clades");
    for (auto it = clades_.begin(); it != clades_.end(); ++it) {
      auto jt = it;
      for (++jt; jt != clades_.end(); ++jt)
        if (!compatible(it->first, jt->first))
          throw std::invalid_argument("PhyloTree: incompatible clades " +
                                      std::to_string(it->first) + " and " +
                                      std::to_string(jt->first));
    }
  }

  int n_leaves() const { return n_leaves_; }
  const std::map<Clade, double>& clades() const { return clades_; }

  double weight(Clade c) const {
    auto it = clades_.find(c);
    return it == clades_.end() ? 0.0 : it->second;
  }

  bool operator==(const PhyloTree& other) const {
    return n_leaves_ == other.n_leaves_ && clades_ == other.clades_;
  }

 private:
  int n_leaves_ = 0;
  std::map<Clade, double> clades_;  // ordered: canonical iteration
};

// Relabels leaves: leaf i becomes perm[i-1].  perm must be a permutation
// of 1..n.  Compatibility is preserved, so the result is always valid.
inline PhyloTree permute_leaves(const PhyloTree& tree,
                                const std::vector<int>& perm) {
  int n = tree.n_leaves();
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permute_leaves: wrong permutation length");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int p : perm) {
    if (p < 1 || p > n || seen[static_cast<std::size_t>(p - 1)])
      throw std::invalid_argument("permute_leaves: not a permutation of 1..n");
    seen[static_cast<std::size_t>(p - 1)] = true;
  }
  std::map<Clade, double> remapped;
  for (const auto& [c, w] : tree.clades()) {
    Clade m = 0;
    for (int i = 0; i < n; ++i)
      if (c & (Clade{1} << i)) m |= Clade{1} << (perm[static_cast<std::size_t>(i)] - 1);
    remapped.emplace(m, w);
  }
  return PhyloTree(n, remapped);
}

// Uniform random rooted binary topology by sequential attachment: leaf k
// joins one of the 2k-3 edges of the partial tree (counting a virtual
// edge above the root), which makes all (2n-3)!! shapes equally likely.
// Internal edge weights are drawn i.i.d. from weight_sampler.
template <typename WeightSampler>
PhyloTree random_tree(int n_leaves, std::mt19937_64& gen,
                      WeightSampler&& weight_sampler) {
  if (n_leaves < 2 || n_leaves > kMaxLeaves)
    throw std::invalid_argument("random_tree: need 2 <= n_leaves <= 64");

  struct Node {
    int parent = -1;
    int leaf = 0;  // label if > 0
  };
  std::vector<Node> nodes;
  int root = 0;
  nodes.push_back(Node{-1, 0});  // root
  nodes.push_back(Node{0, 1});
  nodes.push_back(Node{0, 2});

  for (int leaf = 3; leaf <= n_leaves; ++leaf) {
    // Slots: every non-root node stands for the edge to its parent; one
    // extra slot stands for the edge above the root.
    std::uint64_t n_slots = nodes.size() - 1 + 1;
    std::uint64_t pick = uniform_index(gen, n_slots);
    int fresh = static_cast<int>(nodes.size());
    if (pick == n_slots - 1) {
      // New root above the old one.
      nodes.push_back(Node{-1, 0});
      nodes[static_cast<std::size_t>(root)].parent = fresh;
      root = fresh;
    } else {
      // Subdivide the edge above the pick-th non-root node.  The root can
      // sit at any index once re-rooting has happened, so skip it by
      // position rather than assuming it is node 0.
      int v = static_cast<int>(pick) + (pick >= static_cast<std::uint64_t>(root) ? 1 : 0);
      nodes.push_back(Node{nodes[static_cast<std::size_t>(v)].parent, 0});
      nodes[static_cast<std::size_t>(v)].parent = fresh;
    }
    nodes.push_back(Node{fresh, leaf});
  }

  // Leaf masks below every node, by walking each leaf up to the root.
  // (Insertion reparents old nodes onto new ones, so node indices carry
  // no topological order.)
  std::vector<Clade> below(nodes.size(), 0);
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (nodes[v].leaf == 0) continue;
    Clade bit = Clade{1} << (nodes[v].leaf - 1);
    for (int u = static_cast<int>(v); u >= 0;
         u = nodes[static_cast<std::size_t>(u)].parent)
      below[static_cast<std::size_t>(u)] |= bit;
  }

  std::map<Clade, double> clades;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (nodes[v].leaf > 0 || static_cast<int>(v) == root) continue;
    clades.emplace(below[v], weight_sampler(gen));
  }
  return PhyloTree(n_leaves, clades);
}

inline PhyloTree random_tree(int n_leaves, std::mt19937_64& gen) {
  return random_tree(n_leaves, gen, [](std::mt19937_64& g) {
    return standard_exponential(g);
  });
}

}  // namespace mmtest
