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
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mmtest/distance_matrix.hpp"

// Empirical ball volume processes.  For a sample x_1..x_n with distance
// matrix d, the process seen from center i is
//
//   S_i(t) = #{k != i : d(i, k) <= t} / (n - 1),
//
// the fraction of the remaining sample inside the closed ball of radius t.

namespace mmtest {

struct BallProcessPath {
  std::vector<double> grid;    // strictly increasing radii
  std::vector<double> values;  // S(t) at each radius, nondecreasing in [0, 1]
};

inline BallProcessPath empirical_ball_process(const DistanceMatrix& d,
                                              std::size_t center,
                                              const std::vector<double>& grid) {
  if (center >= d.size())
    throw std::out_of_range("empirical_ball_process: bad center");
  if (d.size() < 2)
    throw std::invalid_argument("empirical_ball_process: need n >= 2");
  if (grid.empty())
    throw std::invalid_argument("empirical_ball_process: empty grid");
  for (std::size_t m = 0; m < grid.size(); ++m) {
    if (!(grid[m] >= 0.0))
      throw std::invalid_argument("empirical_ball_process: negative radius");
    if (m > 0 && !(grid[m] > grid[m - 1]))
      throw std::invalid_argument(
          "empirical_ball_process: grid must be strictly increasing");
  }
  std::vector<double> row = row_distances(d, center);
  std::sort(row.begin(), row.end());
  BallProcessPath path;
  path.grid = grid;
  path.values.reserve(grid.size());
  double denom = static_cast<double>(row.size());
  for (double t : grid) {
    // closed balls: count row values <= t
    auto it = std::upper_bound(row.begin(), row.end(), t);
    path.values.push_back(static_cast<double>(it - row.begin()) / denom);
  }
  return path;
}

struct MomentEstimates {
  double center_average;  // mean over centers of prod_j S_i(t_j)^{r_j}
  double tuple_average;   // same moment via indicator products over
                          // distinct index tuples
};

// Two estimators of E[prod_j S(t_j)^{r_j}].
//
// The first raises each empirical path to the requested powers and
// averages over centers.  The second averages the product of indicators
// 1{d(i, k) <= t_j} over ordered tuples of *distinct* neighbours k, which
// is the form that concentration arguments apply to.  Closed balls around
// one center are nested, so the tuple count per center is a product of
// falling factorials, smallest radius first; no enumeration is needed.
inline MomentEstimates moment_diagnostic(const DistanceMatrix& d,
                                         const std::vector<double>& thresholds,
                                         const std::vector<int>& powers) {
  if (thresholds.size() != powers.size())
    throw std::invalid_argument("moment_diagnostic: size mismatch");
  if (thresholds.empty())
    throw std::invalid_argument("moment_diagnostic: no thresholds");
  long total_power = 0;
  for (int r : powers) {
    if (r < 1) throw std::invalid_argument("moment_diagnostic: powers >= 1");
    total_power += r;
  }
  std::size_t n = d.size();
  if (static_cast<long>(n) < 1 + total_power)
    throw std::invalid_argument("moment_diagnostic: need n >= 1 + sum powers");

  // (threshold, power) pairs sorted by threshold, ascending.
  std::vector<std::pair<double, int>> groups;
  groups.reserve(thresholds.size());
  for (std::size_t j = 0; j < thresholds.size(); ++j)
    groups.emplace_back(thresholds[j], powers[j]);
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  double denom = static_cast<double>(n - 1);
  double denom_tuples = 1.0;
  for (long s = 0; s < total_power; ++s) denom_tuples *= denom - s;

  double sum_a = 0.0, sum_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row = row_distances(d, i);
    std::sort(row.begin(), row.end());
    double prod_a = 1.0;
    double ways = 1.0;
    long used = 0;
    for (const auto& [t, r] : groups) {
      auto it = std::upper_bound(row.begin(), row.end(), t);
      long c = it - row.begin();
      double s_t = static_cast<double>(c) / denom;
      for (int rep = 0; rep < r; ++rep) {
        prod_a *= s_t;
        ways *= static_cast<double>(std::max<long>(c - used, 0));
        ++used;
      }
    }
    sum_a += prod_a;
    sum_b += ways / denom_tuples;
  }
  return MomentEstimates{sum_a / static_cast<double>(n),
                         sum_b / static_cast<double>(n)};
}

}  // namespace mmtest
