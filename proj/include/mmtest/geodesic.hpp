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
#include <list>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mmtest/min_cut.hpp"
#include "mmtest/tree.hpp"

// Geodesic distance in BHV tree space, computed with the successive
// support refinement of Owen and Provan (the GTP algorithm).
//
// Structure of a geodesic between trees T1 and T2:
//
//  * Clades compatible with every clade of both trees (in particular all
//    clades the trees share) never collapse along the way; they move in a
//    straight line and contribute (w1 - w2)^2 to the squared distance,
//    with weight 0 where a tree lacks the clade.
//  * The remaining clades leave in groups A_1..A_k (from T1) as groups
//    B_1..B_k (from T2) appear, with every clade of A_i compatible with
//    every clade of B_j for j < i, and the leg lengths obey
//    ||A_1||/||B_1|| <= ... <= ||A_k||/||B_k||.  Such a sequence adds
//    sum_i (||A_i|| + ||B_i||)^2.
//
// Refinement starts from the cone pair (everything out, everything in)
// and keeps splitting: a pair (A, B) can be improved iff the bipartite
// incompatibility graph between A and B, with vertex weights w(a)^2/||A||^2
// and w(b)^2/||B||^2, has a vertex cover of weight < 1.  The minimum cover
// (C_A, C_B) then splits the pair into (C_A, B \ C_B), (A \ C_A, C_B).

namespace mmtest {

struct SupportPair {
  std::vector<Clade> a_side;  // clades leaving, weights from t1
  std::vector<Clade> b_side;  // clades appearing, weights from t2
  double a_norm = 0.0;
  double b_norm = 0.0;
};

struct GeodesicResult {
  double distance = 0.0;
  // Support pairs ordered by nondecreasing ||A||/||B||.
  std::vector<SupportPair> support;
  // Squared-distance share of the coordinatewise clades: shared clades
  // plus clades one tree has and the other tree is entirely compatible
  // with.
  double common_contribution = 0.0;
};

struct Decomposition {
  std::vector<Clade> shared;  // clades present in both trees
  struct Subproblem {
    std::vector<Clade> a;  // non-shared clades of t1 in this region
    std::vector<Clade> b;  // non-shared clades of t2 in this region
  };
  std::vector<Subproblem> subproblems;
};

// Cuts both trees at their shared clades.  Every non-shared clade is
// nested in or disjoint from every shared clade, so the regions of the
// cut are keyed by the tightest shared clade enclosing each (the whole
// tree when none does).  Clades in different regions are automatically
// compatible, which is what makes the regions independent.
inline Decomposition common_split_decomposition(const PhyloTree& t1,
                                                const PhyloTree& t2) {
  if (t1.n_leaves() != t2.n_leaves())
    throw std::invalid_argument("decomposition: leaf counts differ");
  Decomposition out;
  for (const auto& [c, w] : t1.clades())
    if (t2.clades().count(c)) out.shared.push_back(c);

  // region key: tightest enclosing shared clade, or ~0 for the root region
  constexpr Clade kRootRegion = ~Clade{0};
  auto region_of = [&](Clade c) {
    Clade best = kRootRegion;
    int best_size = kMaxLeaves + 1;
    for (Clade s : out.shared) {
      if (s == c) continue;
      if ((c | s) == s && clade_size(s) < best_size) {
        best = s;
        best_size = clade_size(s);
      }
    }
    return best;
  };

  std::vector<Clade> keys;
  auto slot = [&](Clade key) -> Decomposition::Subproblem& {
    for (std::size_t k = 0; k < keys.size(); ++k)
      if (keys[k] == key) return out.subproblems[k];
    keys.push_back(key);
    out.subproblems.emplace_back();
    return out.subproblems.back();
  };
  for (const auto& [c, w] : t1.clades())
    if (!t2.clades().count(c)) slot(region_of(c)).a.push_back(c);
  for (const auto& [c, w] : t2.clades())
    if (!t1.clades().count(c)) slot(region_of(c)).b.push_back(c);
  return out;
}

namespace detail {

inline double norm_of(const std::vector<Clade>& clades, const PhyloTree& t) {
  double s = 0.0;
  for (Clade c : clades) {
    double w = t.weight(c);
    s += w * w;
  }
  return std::sqrt(s);
}

// Support refinement for one region.  Pairs whose sides stop crossing
// anything get peeled off into the coordinatewise term; the rest split
// until no cover is cheap enough.
inline void refine_region(const std::vector<Clade>& a0,
                          const std::vector<Clade>& b0, const PhyloTree& t1,
                          const PhyloTree& t2,
                          std::vector<SupportPair>* support,
                          double* coordinatewise) {
  struct Pair {
    std::vector<Clade> a, b;
  };
  std::list<Pair> pairs;
  pairs.push_back({a0, b0});

  auto peel = [&](std::vector<Clade>& side, const std::vector<Clade>& other,
                  const PhyloTree& tree_of_side) {
    // move clades compatible with the whole other side out of the pair
    std::vector<Clade> kept;
    for (Clade c : side) {
      bool crosses = false;
      for (Clade d : other)
        if (!compatible(c, d)) {
          crosses = true;
          break;
        }
      if (crosses) {
        kept.push_back(c);
      } else {
        double w = tree_of_side.weight(c);
        *coordinatewise += w * w;
      }
    }
    side.swap(kept);
  };

  auto it = pairs.begin();
  while (it != pairs.end()) {
    peel(it->a, it->b, t1);
    peel(it->b, it->a, t2);
    if (it->a.empty() || it->b.empty()) {
      // A clade crossing something forces a crossing partner on the other
      // side, so after peeling either both sides are empty or neither is;
      // absorbing leftovers coordinatewise keeps this robust regardless.
      for (Clade c : it->a) *coordinatewise += t1.weight(c) * t1.weight(c);
      for (Clade c : it->b) *coordinatewise += t2.weight(c) * t2.weight(c);
      it = pairs.erase(it);
      continue;
    }
    double a_norm2 = 0.0, b_norm2 = 0.0;
    std::vector<double> wa(it->a.size()), wb(it->b.size());
    for (std::size_t i = 0; i < it->a.size(); ++i) {
      double w = t1.weight(it->a[i]);
      wa[i] = w * w;
      a_norm2 += w * w;
    }
    for (std::size_t j = 0; j < it->b.size(); ++j) {
      double w = t2.weight(it->b[j]);
      wb[j] = w * w;
      b_norm2 += w * w;
    }
    for (double& w : wa) w /= a_norm2;
    for (double& w : wb) w /= b_norm2;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < it->a.size(); ++i)
      for (std::size_t j = 0; j < it->b.size(); ++j)
        if (!compatible(it->a[i], it->b[j])) edges.emplace_back(i, j);

    VertexCover cover = min_weight_vertex_cover(wa, wb, edges);
    if (cover.weight >= 1.0 - 1e-10) {
      ++it;  // cannot improve this pair
      continue;
    }
    std::vector<bool> in_a(it->a.size(), false), in_b(it->b.size(), false);
    for (std::size_t i : cover.a_members) in_a[i] = true;
    for (std::size_t j : cover.b_members) in_b[j] = true;
    Pair first, second;
    for (std::size_t i = 0; i < it->a.size(); ++i)
      (in_a[i] ? first.a : second.a).push_back(it->a[i]);
    for (std::size_t j = 0; j < it->b.size(); ++j)
      (in_b[j] ? second.b : first.b).push_back(it->b[j]);
    // replace the pair by (C_A, B \ C_B), (A \ C_A, C_B), in that order;
    // rescan from the first piece since both can split further
    it = pairs.erase(it);
    it = pairs.insert(it, second);
    it = pairs.insert(it, first);
  }

  for (const Pair& p : pairs) {
    SupportPair sp;
    sp.a_side = p.a;
    sp.b_side = p.b;
    sp.a_norm = norm_of(p.a, t1);
    sp.b_norm = norm_of(p.b, t2);
    support->push_back(std::move(sp));
  }
}

}  // namespace detail

// Geodesic between two trees on the same leaf set.
inline GeodesicResult gtp_geodesic(const PhyloTree& t1, const PhyloTree& t2) {
  if (t1.n_leaves() != t2.n_leaves())
    throw std::invalid_argument("gtp_geodesic: leaf counts differ");
  GeodesicResult result;
  Decomposition decomp = common_split_decomposition(t1, t2);
  for (Clade c : decomp.shared) {
    double dw = t1.weight(c) - t2.weight(c);
    result.common_contribution += dw * dw;
  }
  for (const auto& sub : decomp.subproblems)
    detail::refine_region(sub.a, sub.b, t1, t2, &result.support,
                          &result.common_contribution);

  // Regions are solved independently; interleave their pairs into one
  // sequence sorted by ||A||/||B||.  Cross-region clades are compatible,
  // so any interleaving is a valid support; the stable sort keeps each
  // region's own (already nondecreasing) order.
  std::stable_sort(result.support.begin(), result.support.end(),
                   [](const SupportPair& x, const SupportPair& y) {
                     return x.a_norm * y.b_norm < y.a_norm * x.b_norm;
                   });

  double sq = result.common_contribution;
  for (const SupportPair& p : result.support) {
    double leg = p.a_norm + p.b_norm;
    sq += leg * leg;
  }
  result.distance = std::sqrt(sq);
  return result;
}

inline double bhv_distance(const PhyloTree& t1, const PhyloTree& t2) {
  return gtp_geodesic(t1, t2).distance;
}

}  // namespace mmtest
