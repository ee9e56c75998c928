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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "mmtest/geodesic.hpp"
#include "mmtest/random.hpp"
#include "mmtest/tree.hpp"
#include "oracles.hpp"

using mmtest::Clade;
using mmtest::PhyloTree;

namespace {

// binary tree with each edge weight knocked out with probability ~1/3,
// to also exercise boundary (degenerate) trees
PhyloTree random_degenerate_tree(int n, std::mt19937_64& gen) {
  PhyloTree t = mmtest::random_tree(n, gen);
  std::map<Clade, double> clades;
  for (const auto& [c, w] : t.clades())
    clades.emplace(c, mmtest::uniform01(gen) < 1.0 / 3.0 ? 0.0 : w);
  return PhyloTree(n, clades);
}

}  // namespace

TEST_CASE("same topology reduces to the euclidean distance on weights") {
  PhyloTree t1(4, {{0b0011, 1.0}, {0b0111, 2.0}});
  PhyloTree t2(4, {{0b0011, 2.0}, {0b0111, 4.0}});
  mmtest::GeodesicResult g = mmtest::gtp_geodesic(t1, t2);
  CHECK(g.distance == Catch::Approx(std::sqrt(5.0)).margin(1e-12));
  CHECK(g.support.empty());
  CHECK(g.common_contribution == Catch::Approx(5.0).margin(1e-12));
}

TEST_CASE("one crossing pair walks through the cone") {
  PhyloTree t1(4, {{0b0011, 3.0}});         // {1,2}
  PhyloTree t2(4, {{0b0110, 4.0}});         // {2,3}
  CHECK(mmtest::bhv_distance(t1, t2) == Catch::Approx(7.0).margin(1e-12));
}

TEST_CASE("distance to the star tree is the weight norm") {
  PhyloTree t(4, {{0b0011, 3.0}, {0b0111, 4.0}});
  PhyloTree star(4, {});
  mmtest::GeodesicResult g = mmtest::gtp_geodesic(t, star);
  CHECK(g.distance == Catch::Approx(5.0).margin(1e-12));
  CHECK(g.support.empty());
}

TEST_CASE("clades compatible with the whole other tree move on their own") {
  // {1,2} and {3,4} cross nothing opposite; only {5,6} vs {3,4,5} cross
  PhyloTree t1(6, {{0b000011, 1.0}, {0b110000, 1.0}});
  PhyloTree t2(6, {{0b001100, 1.0}, {0b011100, 1.0}});
  mmtest::GeodesicResult g = mmtest::gtp_geodesic(t1, t2);
  CHECK(g.distance == Catch::Approx(std::sqrt(6.0)).margin(1e-12));
  CHECK(g.common_contribution == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(g.support.size() == 1);
  CHECK(g.support[0].a_side == std::vector<Clade>{0b110000});
  CHECK(g.support[0].b_side == std::vector<Clade>{0b011100});
}

TEST_CASE("a cheap vertex cover splits the cone pair") {
  // edges: {1,2} x {2,3} and {1,2,3,4} x {4,5}; covering the two light
  // clades (weight 0.1 each) beats the cone, and the split legs come out
  // (0.1 + 1)^2 each
  PhyloTree t1(5, {{0b00011, 0.1}, {0b01111, 1.0}});
  PhyloTree t2(5, {{0b00110, 1.0}, {0b11000, 0.1}});
  mmtest::GeodesicResult g = mmtest::gtp_geodesic(t1, t2);
  CHECK(g.distance == Catch::Approx(std::sqrt(2.42)).margin(1e-12));
  REQUIRE(g.support.size() == 2);
  CHECK(g.support[0].a_side == std::vector<Clade>{0b00011});
  CHECK(g.support[0].b_side == std::vector<Clade>{0b00110});
  CHECK(g.support[1].a_side == std::vector<Clade>{0b01111});
  CHECK(g.support[1].b_side == std::vector<Clade>{0b11000});
  CHECK(g.support[0].a_norm == Catch::Approx(0.1).margin(1e-12));
  CHECK(g.support[0].b_norm == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("shared clades split the problem into regions") {
  PhyloTree t1(5, {{0b00011, 1.0}, {0b00111, 1.0}, {0b11000, 1.0}});
  PhyloTree t2(5, {{0b00101, 1.0}, {0b00111, 2.0}, {0b01111, 1.0}});
  mmtest::Decomposition decomp = mmtest::common_split_decomposition(t1, t2);
  REQUIRE(decomp.shared == std::vector<Clade>{0b00111});
  REQUIRE(decomp.subproblems.size() == 2);
  // inside {1,2,3}: {1,2} vs {1,3}; outside: {4,5} vs {1,2,3,4}
  CHECK(decomp.subproblems[0].a == std::vector<Clade>{0b00011});
  CHECK(decomp.subproblems[0].b == std::vector<Clade>{0b00101});
  CHECK(decomp.subproblems[1].a == std::vector<Clade>{0b11000});
  CHECK(decomp.subproblems[1].b == std::vector<Clade>{0b01111});

  // shared leg (1-2)^2 plus two crossing legs of (1+1)^2 each
  CHECK(mmtest::bhv_distance(t1, t2) == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("decomposition rejects mismatched leaf counts") {
  CHECK_THROWS_AS(
      mmtest::common_split_decomposition(PhyloTree(3, {}), PhyloTree(4, {})),
      std::invalid_argument);
  CHECK_THROWS_AS(mmtest::bhv_distance(PhyloTree(3, {}), PhyloTree(4, {})),
                  std::invalid_argument);
}

TEST_CASE("matches brute-force enumeration on 4-leaf pairs") {
  std::mt19937_64 gen(0x67656f34u);
  for (int rep = 0; rep < 60; ++rep) {
    PhyloTree t1 = random_degenerate_tree(4, gen);
    PhyloTree t2 = random_degenerate_tree(4, gen);
    double fast = mmtest::bhv_distance(t1, t2);
    double brute = oracles::oracle_bhv_distance(t1, t2);
    CHECK(fast == Catch::Approx(brute).margin(1e-9));
  }
}

TEST_CASE("matches brute-force enumeration on 5-leaf pairs") {
  std::mt19937_64 gen(0x67656f35u);
  for (int rep = 0; rep < 30; ++rep) {
    PhyloTree t1 = random_degenerate_tree(5, gen);
    PhyloTree t2 = random_degenerate_tree(5, gen);
    double fast = mmtest::bhv_distance(t1, t2);
    double brute = oracles::oracle_bhv_distance(t1, t2);
    CHECK(fast == Catch::Approx(brute).margin(1e-9));
  }
}

TEST_CASE("geodesic results satisfy their own invariants") {
  std::mt19937_64 gen(0x696e76u);
  for (int rep = 0; rep < 40; ++rep) {
    PhyloTree t1 = mmtest::random_tree(7, gen);
    PhyloTree t2 = mmtest::random_tree(7, gen);
    mmtest::GeodesicResult g = mmtest::gtp_geodesic(t1, t2);

    // squared distance decomposes over the support
    double sq = g.common_contribution;
    for (const auto& p : g.support) {
      double leg = p.a_norm + p.b_norm;
      sq += leg * leg;
      CHECK(p.a_norm > 0.0);
      CHECK(p.b_norm > 0.0);
      // every clade in a pair crosses something in its partner
      for (Clade a : p.a_side) {
        bool crosses = false;
        for (Clade b : p.b_side) crosses = crosses || !mmtest::compatible(a, b);
        CHECK(crosses);
      }
    }
    CHECK(g.distance * g.distance == Catch::Approx(sq).margin(1e-12));

    // leg ratios are nondecreasing, and later A-groups are compatible
    // with earlier B-groups
    for (std::size_t i = 0; i + 1 < g.support.size(); ++i) {
      CHECK(g.support[i].a_norm * g.support[i + 1].b_norm <=
            g.support[i + 1].a_norm * g.support[i].b_norm + 1e-12);
    }
    for (std::size_t i = 0; i < g.support.size(); ++i)
      for (std::size_t j = i + 1; j < g.support.size(); ++j)
        for (Clade a : g.support[j].a_side)
          for (Clade b : g.support[i].b_side)
            CHECK(mmtest::compatible(a, b));
  }
}

TEST_CASE("distance is a metric on random trees") {
  std::mt19937_64 gen(0x6d657472u);
  std::vector<PhyloTree> trees;
  for (int i = 0; i < 12; ++i) trees.push_back(random_degenerate_tree(6, gen));
  for (const auto& t : trees) CHECK(mmtest::bhv_distance(t, t) == 0.0);
  for (std::size_t i = 0; i < trees.size(); ++i) {
    for (std::size_t j = i + 1; j < trees.size(); ++j) {
      double dij = mmtest::bhv_distance(trees[i], trees[j]);
      // the two directions run the refinement with the roles swapped, so
      // agreement is to rounding, not bitwise
      CHECK(dij ==
            Catch::Approx(mmtest::bhv_distance(trees[j], trees[i]))
                .margin(1e-12));
      if (!(trees[i] == trees[j])) CHECK(dij > 0.0);
      for (std::size_t k = 0; k < trees.size(); ++k) {
        double dik = mmtest::bhv_distance(trees[i], trees[k]);
        double dkj = mmtest::bhv_distance(trees[k], trees[j]);
        CHECK(dij <= dik + dkj + 1e-9);
      }
    }
  }
}

TEST_CASE("relabelling both trees together preserves distance") {
  std::mt19937_64 gen(0x70657268u);
  std::vector<int> perm = {3, 5, 1, 6, 2, 4};
  for (int rep = 0; rep < 25; ++rep) {
    PhyloTree t1 = mmtest::random_tree(6, gen);
    PhyloTree t2 = mmtest::random_tree(6, gen);
    double plain = mmtest::bhv_distance(t1, t2);
    double permuted = mmtest::bhv_distance(mmtest::permute_leaves(t1, perm),
                                           mmtest::permute_leaves(t2, perm));
    CHECK(permuted == Catch::Approx(plain).margin(1e-12));
  }
}
