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

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mmtest/distance_matrix.hpp"
#include "mmtest/random.hpp"
#include "mmtest/tree.hpp"
#include "mmtest/geodesic.hpp"
#include "mmtest/two_sample.hpp"

// Monte-Carlo power studies: how often do the KS and energy tests reject
// across a grid of alternatives?  Every replicate runs on random
// substreams derived from (seed, replicate index), and rejections are
// aggregated as counts, so the numbers do not depend on execution order
// or thread count.

namespace mmtest {

struct PowerStudyConfig {
  std::size_t n = 40;        // points per group
  std::size_t n_mc = 1000;   // Monte-Carlo replicates per grid entry
  std::size_t B = 1000;      // permutations per energy test
  double alpha = 0.05;
  std::vector<double> grid = {1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4};
  std::uint64_t seed = 20260819;
  unsigned threads = 0;      // 0: hardware concurrency
};

// Quick mode exists so CI can exercise the full pipeline in well under a
// minute; its estimates carry roughly twice the standard error.
inline PowerStudyConfig quick_mode(PowerStudyConfig cfg) {
  cfg.n_mc = 200;
  cfg.B = 200;
  return cfg;
}

inline PowerStudyConfig full_mode(PowerStudyConfig cfg) {
  cfg.n_mc = 1000;
  cfg.B = 1000;
  return cfg;
}

struct PowerRow {
  double param = 0.0;  // grid value (variance, scale, ...)
  double ks_power = 0.0;
  double ks_se = 0.0;
  double energy_power = 0.0;
  double energy_se = 0.0;
};

struct PowerTable {
  std::string param_name = "sigma_sq";
  std::vector<PowerRow> rows;
};

namespace detail {

// Runs fn(i) for i in [0, count) across a fixed number of threads.
// Safe because every replicate writes only its own slots.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline double power_se(double p, std::size_t n_mc) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n_mc));
}

}  // namespace detail

// Generic power engine: for each replicate, sample_x/sample_y produce the
// two groups of points, metric turns them into distance matrices, and
// both tests run at level alpha.  stream_base keys this row's substreams
// within the study, two per replicate (data, permutations).
template <typename Point, typename SamplerX, typename SamplerY, typename Metric>
PowerRow run_power_row(double param, const PowerStudyConfig& cfg,
                       std::uint64_t stream_base, SamplerX&& sample_x,
                       SamplerY&& sample_y, Metric&& metric) {
  std::vector<std::uint8_t> ks_reject(cfg.n_mc, 0), energy_reject(cfg.n_mc, 0);
  detail::parallel_for(cfg.n_mc, cfg.threads, [&](std::size_t rep) {
    std::mt19937_64 data_gen =
        seeded_substream(cfg.seed, stream_base + 2 * rep);
    std::vector<Point> xs = sample_x(data_gen);
    std::vector<Point> ys = sample_y(data_gen);

    DistanceMatrix dx = pairwise_distances(xs, metric);
    DistanceMatrix dy = pairwise_distances(ys, metric);
    ks_reject[rep] = ks_row_test(dx, dy, cfg.alpha).reject ? 1 : 0;

    std::vector<Point> pooled = xs;
    pooled.insert(pooled.end(), ys.begin(), ys.end());
    std::vector<int> labels(pooled.size(), 0);
    for (std::size_t i = xs.size(); i < pooled.size(); ++i) labels[i] = 1;
    DistanceMatrix dp = pairwise_distances(pooled, metric);
    // distinct seed per replicate, so permutation noise is independent
    // across replicates
    std::uint64_t perm_seed = detail::splitmix64(
        cfg.seed + (stream_base + 2 * rep + 1) * 0x9e3779b97f4a7c15ull);
    energy_reject[rep] =
        energy_permutation_test(dp, labels, cfg.alpha, cfg.B, perm_seed).reject
            ? 1
            : 0;
  });
  std::size_t ks_count = 0, energy_count = 0;
  for (std::size_t rep = 0; rep < cfg.n_mc; ++rep) {
    ks_count += ks_reject[rep];
    energy_count += energy_reject[rep];
  }
  PowerRow row;
  row.param = param;
  row.ks_power = static_cast<double>(ks_count) / static_cast<double>(cfg.n_mc);
  row.energy_power =
      static_cast<double>(energy_count) / static_cast<double>(cfg.n_mc);
  row.ks_se = detail::power_se(row.ks_power, cfg.n_mc);
  row.energy_se = detail::power_se(row.energy_power, cfg.n_mc);
  return row;
}

// Scale study on the real line: X ~ N(0,1)^n against Y = s·Z with Z
// standard normal, for each grid value s, under the metric |x - y|.
// The output column keeps the conventional sigma_sq label.
inline PowerTable run_power_study(const PowerStudyConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("run_power_study: need n >= 2");
  if (cfg.n_mc < 1 || cfg.B < 1)
    throw std::invalid_argument("run_power_study: need n_mc >= 1 and B >= 1");
  PowerTable table;
  table.param_name = "sigma_sq";
  auto metric = [](double a, double b) { return std::abs(a - b); };
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    double sigma_sq = cfg.grid[g];
    if (!(sigma_sq > 0.0))
      throw std::invalid_argument("run_power_study: grid values must be > 0");
    double sigma = sigma_sq;
    auto sample_std = [&cfg](std::mt19937_64& gen) {
      std::vector<double> v(cfg.n);
      for (double& x : v) x = standard_normal(gen);
      return v;
    };
    auto sample_alt = [&cfg, sigma](std::mt19937_64& gen) {
      std::vector<double> v(cfg.n);
      for (double& x : v) x = sigma * standard_normal(gen);
      return v;
    };
    table.rows.push_back(run_power_row<double>(
        sigma_sq, cfg, static_cast<std::uint64_t>(g) * 2 * cfg.n_mc,
        sample_std, sample_alt, metric));
  }
  return table;
}

using TreeGenerator = std::function<PhyloTree(std::mt19937_64&)>;

// One power row for trees: generator_null vs generator_alt under the BHV
// metric, cfg.n trees per group.  param labels the row in tables.
inline PowerRow run_tree_power_study(const PowerStudyConfig& cfg,
                                     const TreeGenerator& generator_null,
                                     const TreeGenerator& generator_alt,
                                     double param = 0.0,
                                     std::uint64_t stream_base = 0) {
  auto sample_null = [&](std::mt19937_64& gen) {
    std::vector<PhyloTree> v;
    v.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) v.push_back(generator_null(gen));
    return v;
  };
  auto sample_alt = [&](std::mt19937_64& gen) {
    std::vector<PhyloTree> v;
    v.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) v.push_back(generator_alt(gen));
    return v;
  };
  return run_power_row<PhyloTree>(param, cfg, stream_base, sample_null,
                                  sample_alt,
                                  [](const PhyloTree& a, const PhyloTree& b) {
                                    return bhv_distance(a, b);
                                  });
}

inline void write_power_csv(std::ostream& out, const PowerTable& table,
                            const std::vector<std::string>& header_comments) {
  for (const auto& c : header_comments) out << "# " << c << '\n';
  out << table.param_name << ",ks_power,ks_se,energy_power,energy_se\n";
  for (const PowerRow& r : table.rows) {
    out << format_double(r.param) << ',' << format_double(r.ks_power) << ','
        << format_double(r.ks_se) << ',' << format_double(r.energy_power)
        << ',' << format_double(r.energy_se) << '\n';
  }
}

inline void write_power_markdown(std::ostream& out, const PowerTable& table) {
  out << "| " << table.param_name
      << " | ks_power | ks_se | energy_power | energy_se |\n"
      << "|---|---|---|---|---|\n";
  for (const PowerRow& r : table.rows) {
    out << "| " << format_double(r.param) << " | " << format_double(r.ks_power)
        << " | " << format_double(r.ks_se) << " | "
        << format_double(r.energy_power) << " | " << format_double(r.energy_se)
        << " |\n";
  }
}

}  // namespace mmtest
