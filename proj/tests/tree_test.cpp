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

#include <map>
#include <random>
#include <vector>

#include "mmtest/random.hpp"
#include "mmtest/tree.hpp"

using mmtest::Clade;
using mmtest::PhyloTree;

namespace {

// topology key: the clade masks without their weights
std::vector<Clade> topology_of(const PhyloTree& t) {
  std::vector<Clade> key;
  for (const auto& [c, w] : t.clades()) key.push_back(c);
  return key;
}

}  // namespace

TEST_CASE("clade compatibility is nested-or-disjoint") {
  CHECK(mmtest::compatible(0b0011, 0b1100));   // disjoint
  CHECK(mmtest::compatible(0b0011, 0b0111));   // nested
  CHECK(mmtest::compatible(0b0111, 0b0011));
  CHECK_FALSE(mmtest::compatible(0b0011, 0b0110));  // crossing
}

TEST_CASE("all_leaves handles the 64-leaf edge") {
  CHECK(mmtest::all_leaves(2) == 0b11u);
  CHECK(mmtest::all_leaves(64) == ~Clade{0});
}

TEST_CASE("tree construction validates its clade family") {
  CHECK_NOTHROW(PhyloTree(4, {{0b0011, 1.0}, {0b0111, 0.5}}));
  CHECK_NOTHROW(PhyloTree(2, {}));

  CHECK_THROWS_AS(PhyloTree(1, {}), std::invalid_argument);
  CHECK_THROWS_AS(PhyloTree(65, {}), std::invalid_argument);
  // negative and NaN weights
  CHECK_THROWS_AS(PhyloTree(3, {{0b011, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(PhyloTree(3, {{0b011, std::nan("")}}),
                  std::invalid_argument);
  // clade reaching beyond leaf n
  CHECK_THROWS_AS(PhyloTree(3, {{0b1100, 1.0}}), std::invalid_argument);
  // singletons and the full leaf set are not internal edges
  CHECK_THROWS_AS(PhyloTree(3, {{0b001, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(PhyloTree(3, {{0b111, 1.0}}), std::invalid_argument);
  // crossing clades
  CHECK_THROWS_AS(PhyloTree(4, {{0b0011, 1.0}, {0b0110, 1.0}}),
                  std::invalid_argument);
  // more clades than any tree on 4 leaves can host
  CHECK_THROWS_AS(
      PhyloTree(4, {{0b0011, 1.0}, {0b0110, 1.0}, {0b1100, 1.0}}),
      std::invalid_argument);
}

TEST_CASE("zero-weight clades collapse away") {
  PhyloTree a(4, {{0b0011, 1.0}, {0b0111, 0.0}});
  PhyloTree b(4, {{0b0011, 1.0}});
  CHECK(a == b);
  CHECK(a.clades().size() == 1);
  CHECK(a.weight(0b0111) == 0.0);
  CHECK(a.weight(0b0011) == 1.0);
}

TEST_CASE("permute_leaves relabels clades") {
  PhyloTree t(3, {{0b011, 1.5}});
  // leaf 1 -> 2, leaf 2 -> 3, leaf 3 -> 1: clade {1,2} becomes {2,3}
  PhyloTree p = mmtest::permute_leaves(t, {2, 3, 1});
  CHECK(p.weight(0b110) == 1.5);
  CHECK(p.clades().size() == 1);

  PhyloTree id = mmtest::permute_leaves(t, {1, 2, 3});
  CHECK(id == t);

  CHECK_THROWS_AS(mmtest::permute_leaves(t, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(mmtest::permute_leaves(t, {1, 2, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mmtest::permute_leaves(t, {0, 1, 2}),
                  std::invalid_argument);
}

TEST_CASE("random trees are binary with positive weights") {
  std::mt19937_64 gen(41);
  for (int rep = 0; rep < 100; ++rep) {
    PhyloTree t = mmtest::random_tree(6, gen);
    CHECK(t.n_leaves() == 6);
    CHECK(t.clades().size() == 4);  // n - 2 internal edges when binary
    for (const auto& [c, w] : t.clades()) CHECK(w > 0.0);
  }
}

TEST_CASE("random tree generation is deterministic in the seed") {
  std::mt19937_64 g1(7), g2(7), g3(8);
  PhyloTree a = mmtest::random_tree(8, g1);
  PhyloTree b = mmtest::random_tree(8, g2);
  PhyloTree c = mmtest::random_tree(8, g3);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("3-leaf topologies come out uniform") {
  std::mt19937_64 gen(0x746f706f33u);
  std::map<std::vector<Clade>, int> counts;
  int draws = 3000;
  for (int rep = 0; rep < draws; ++rep)
    ++counts[topology_of(mmtest::random_tree(3, gen))];
  REQUIRE(counts.size() == 3);  // rooted binary shapes on 3 leaves
  for (const auto& [key, c] : counts) {
    CHECK(c > 880);  // expected 1000, sd ~26
    CHECK(c < 1120);
  }
}

TEST_CASE("4-leaf topologies come out uniform") {
  std::mt19937_64 gen(0x746f706f34u);
  std::map<std::vector<Clade>, int> counts;
  int draws = 7500;
  for (int rep = 0; rep < draws; ++rep)
    ++counts[topology_of(mmtest::random_tree(4, gen))];
  REQUIRE(counts.size() == 15);  // (2*4 - 3)!! rooted binary shapes
  for (const auto& [key, c] : counts) {
    CHECK(c > 390);  // expected 500, sd ~22
    CHECK(c < 610);
  }
}

TEST_CASE("custom weight samplers feed the edge weights") {
  std::mt19937_64 gen(5);
  PhyloTree t =
      mmtest::random_tree(5, gen, [](std::mt19937_64&) { return 2.5; });
  REQUIRE(t.clades().size() == 3);
  for (const auto& [c, w] : t.clades()) CHECK(w == 2.5);
}
