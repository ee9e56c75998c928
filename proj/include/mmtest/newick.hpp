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
#include <bit>
#include <cstddef>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmtest/distance_matrix.hpp"  // format_double
#include "mmtest/tree.hpp"

// Newick reader/writer for the dialect used here: rooted trees, integer
// leaf labels 1..n, optional ':' branch lengths on internal edges,
// semicolon terminated.  No quoted labels, no [comments].  Leaf branch
// lengths are legal input but carry no information in this space, so they
// are discarded with a warning rather than rejected.

namespace mmtest {

struct NewickError : std::runtime_error {
  NewickError(const std::string& message, std::size_t position)
      : std::runtime_error("newick: " + message + " at position " +
                           std::to_string(position + 1)),
        position(position) {}
  std::size_t position;
};

namespace detail {

class NewickParser {
 public:
  NewickParser(const std::string& text, std::vector<std::string>* warnings)
      : text_(text), warnings_(warnings) {}

  PhyloTree parse(int expected_leaves) {
    skip_space();
    Clade top = subtree();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ':') {
      // A length on the root has nothing above it to attach to.
      ++pos_;
      length();
      warn("length above the root ignored");
    }
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != ';')
      throw NewickError("expected ';'", pos_);
    ++pos_;
    skip_space();
    if (pos_ != text_.size())
      throw NewickError("trailing characters after ';'", pos_);

    int n = static_cast<int>(labels_seen_.size());
    if (n < 2) throw NewickError("tree needs at least 2 leaves", 0);
    for (int label = 1; label <= n; ++label)
      if (!labels_seen_.count(label))
        throw NewickError(
            "leaf labels must be exactly 1..n; missing " + std::to_string(label),
            0);
    if (expected_leaves > 0 && n != expected_leaves)
      throw NewickError("expected " + std::to_string(expected_leaves) +
                            " leaves, found " + std::to_string(n),
                        0);
    (void)top;
    std::map<Clade, double> clades;
    for (const auto& [mask, weight] : raw_clades_) {
      if (clade_size(mask) < 2 || mask == all_leaves(n)) {
        // Unary wrappers around a leaf, or a length on the outermost
        // grouping: no such edge exists in the space.
        if (weight != 0.0) warn("length on a non-internal edge ignored");
        continue;
      }
      auto [it, inserted] = clades.emplace(mask, weight);
      if (!inserted)
        throw NewickError("duplicate internal edge", 0);
    }
    return PhyloTree(n, clades);
  }

 private:
  // subtree := '(' subtree (',' subtree)* ')' [':' length]
  //          | label [':' length]
  Clade subtree() {
    skip_space();
    if (pos_ >= text_.size()) throw NewickError("unexpected end of input", pos_);
    if (text_[pos_] == '(') {
      std::size_t open = pos_;
      ++pos_;
      Clade members = subtree();
      skip_space();
      while (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        Clade child = subtree();
        if (members & child)
          throw NewickError("duplicate leaf label", pos_);
        members |= child;
      }
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')')
        throw NewickError("expected ')' to match '('", open);
      ++pos_;
      skip_space();
      double w = 0.0;
      if (pos_ < text_.size() && text_[pos_] == ':') {
        ++pos_;
        w = length();
      }
      raw_clades_.emplace_back(members, w);
      return members;
    }
    int label = integer_label();
    if (label < 1 || label > kMaxLeaves)
      throw NewickError("leaf label out of range 1..64", pos_);
    if (labels_seen_.count(label))
      throw NewickError("duplicate leaf label " + std::to_string(label), pos_);
    labels_seen_[label] = true;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      length();
      warn("branch length on leaf " + std::to_string(label) + " ignored");
    }
    return Clade{1} << (label - 1);
  }

  int integer_label() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9')
      ++pos_;
    if (pos_ == start) throw NewickError("expected a leaf label", pos_);
    if (pos_ - start > 9) throw NewickError("leaf label too long", start);
    return std::stoi(text_.substr(start, pos_ - start));
  }

  double length() {
    skip_space();
    std::size_t start = pos_;
    double v = 0.0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (res.ec != std::errc()) throw NewickError("expected a branch length", start);
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    if (!(v >= 0.0)) throw NewickError("negative branch length", start);
    return v;
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  void warn(const std::string& message) {
    if (warnings_) warnings_->push_back(message);
  }

  const std::string& text_;
  std::vector<std::string>* warnings_;
  std::size_t pos_ = 0;
  std::map<int, bool> labels_seen_;
  std::vector<std::pair<Clade, double>> raw_clades_;
};

}  // namespace detail

// Parses one Newick string.  If expected_leaves > 0 the leaf count must
// match it.  Non-fatal oddities (ignored leaf lengths) are appended to
// *warnings when given.
inline PhyloTree parse_newick(const std::string& text, int expected_leaves = 0,
                              std::vector<std::string>* warnings = nullptr) {
  detail::NewickParser parser(text, warnings);
  return parser.parse(expected_leaves);
}

// Canonical Newick form: children ordered by smallest leaf label, weights
// as shortest round-trip decimals, no leaf lengths.  parse_newick of the
// result reproduces the tree exactly.
inline std::string write_newick(const PhyloTree& tree) {
  int n = tree.n_leaves();
  // Sort clades smallest first so each finds its tightest parent below.
  std::vector<Clade> order;
  order.reserve(tree.clades().size());
  for (const auto& [c, w] : tree.clades()) order.push_back(c);
  std::sort(order.begin(), order.end(), [](Clade a, Clade b) {
    int sa = clade_size(a), sb = clade_size(b);
    return sa != sb ? sa < sb : a < b;
  });

  struct Item {
    Clade mask;
    int leaf;  // label if > 0, else an internal child
    std::string text;
  };
  // children[c]: already-rendered items nested directly under clade c
  // (or under the root for c == all_leaves).
  std::map<Clade, std::vector<Item>> children;
  Clade root = all_leaves(n);
  auto parent_of = [&](Clade c, std::size_t upto) {
    // tightest strict superset among clades later in `order`, else root
    Clade best = root;
    for (std::size_t k = upto + 1; k < order.size(); ++k) {
      Clade p = order[k];
      if ((c | p) == p && clade_size(p) < clade_size(best)) best = p;
    }
    return best;
  };
  for (int leaf = 1; leaf <= n; ++leaf) {
    Clade bit = Clade{1} << (leaf - 1);
    Clade best = root;
    for (Clade c : order)
      if ((c & bit) && clade_size(c) < clade_size(best)) best = c;
    children[best].push_back(Item{bit, leaf, std::to_string(leaf)});
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    Clade c = order[k];
    auto& items = children[c];
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      return std::countr_zero(a.mask) < std::countr_zero(b.mask);  // smallest label
    });
    std::string text = "(";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) text += ',';
      text += items[i].text;
    }
    text += "):" + format_double(tree.clades().at(c));
    children[parent_of(c, k)].push_back(Item{c, 0, text});
  }
  auto& top = children[root];
  std::sort(top.begin(), top.end(), [](const Item& a, const Item& b) {
    return std::countr_zero(a.mask) < std::countr_zero(b.mask);
  });
  std::string out = "(";
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (i) out += ',';
    out += top[i].text;
  }
  out += ");";
  return out;
}

// Tree-list file: one Newick per line; '#' lines and blank lines are
// skipped.  Errors are tagged with the line number.
inline std::vector<PhyloTree> read_tree_file(
    std::istream& in, int expected_leaves = 0,
    std::vector<std::string>* warnings = nullptr) {
  std::vector<PhyloTree> trees;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      std::vector<std::string> local;
      trees.push_back(parse_newick(line, expected_leaves, &local));
      if (warnings)
        for (const auto& w : local)
          warnings->push_back("line " + std::to_string(lineno) + ": " + w);
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  if (trees.empty()) throw std::runtime_error("tree file: no trees");
  return trees;
}

}  // namespace mmtest
