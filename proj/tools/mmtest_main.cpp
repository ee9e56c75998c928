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

// Command-line frontend.  Exit codes are a scripting contract:
//   0  success (for tests: the null was accepted)
//   3  the test rejected
//   1  usage error
//   2  data error (unreadable, unparsable, or inconsistent inputs)

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "mmtest/ball_process.hpp"
#include "mmtest/distance_matrix.hpp"
#include "mmtest/gaussian.hpp"
#include "mmtest/geodesic.hpp"
#include "mmtest/newick.hpp"
#include "mmtest/power_study.hpp"
#include "mmtest/serialize.hpp"
#include "mmtest/tree.hpp"
#include "mmtest/two_sample.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitReject = 3;

struct SpaceOptions {
  std::string space = "euclidean";
  int leaves = 0;        // bhv: expected leaf count, 0 = infer
  bool zero_mean = false;  // gaussian: reject nonzero means
  bool strict = false;     // matrix: triangle violations are fatal
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

// Rows of equal-length numeric vectors; '#' lines and blank lines skipped.
std::vector<std::vector<double>> read_vectors_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    const char* p = line.c_str();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc())
        throw std::runtime_error("vector csv: bad number at line " +
                                 std::to_string(lineno));
      p = res.ptr;
      row.push_back(v);
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p < end) {
        if (*p != ',')
          throw std::runtime_error("vector csv: expected ',' at line " +
                                   std::to_string(lineno));
        ++p;
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(
          "vector csv: row at line " + std::to_string(lineno) + " has " +
          std::to_string(row.size()) + " values, expected " +
          std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("vector csv: no data rows");
  return rows;
}

// Rows of mean,sigma pairs.
std::vector<mmtest::GaussianParam> read_gaussians_csv(std::istream& in,
                                                      bool zero_mean) {
  std::vector<std::vector<double>> rows = read_vectors_csv(in);
  std::vector<mmtest::GaussianParam> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2)
      throw std::runtime_error("gaussian csv: expected mean,sigma rows");
    if (zero_mean && rows[i][0] != 0.0)
      throw std::runtime_error("gaussian csv: row " + std::to_string(i + 1) +
                               " has nonzero mean with --zero-mean set");
    if (!(rows[i][1] > 0.0))
      throw std::runtime_error("gaussian csv: row " + std::to_string(i + 1) +
                               " needs sigma > 0");
    out.push_back({rows[i][0], rows[i][1]});
  }
  return out;
}

// One 0/1 label per line.
std::vector<int> read_labels(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    if (line[first] != '0' && line[first] != '1')
      throw std::runtime_error("labels: expected 0 or 1 at line " +
                               std::to_string(lineno));
    labels.push_back(line[first] - '0');
  }
  if (labels.empty()) throw std::runtime_error("labels: no entries");
  return labels;
}

double euclidean_metric(const std::vector<double>& a,
                        const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Distance matrix of the points in `path` under the selected space.
mmtest::DistanceMatrix matrix_from_points_file(const std::string& path,
                                               const SpaceOptions& opt) {
  std::ifstream in = open_input(path);
  if (opt.space == "euclidean") {
    return mmtest::pairwise_distances(read_vectors_csv(in), euclidean_metric);
  }
  if (opt.space == "gaussian") {
    return mmtest::pairwise_distances(
        read_gaussians_csv(in, opt.zero_mean),
        [](const mmtest::GaussianParam& a, const mmtest::GaussianParam& b) {
          return mmtest::hellinger_distance(a, b);
        });
  }
  if (opt.space == "bhv") {
    std::vector<std::string> warnings;
    std::vector<mmtest::PhyloTree> trees =
        mmtest::read_tree_file(in, opt.leaves, &warnings);
    for (const auto& w : warnings) std::cerr << path << ": " << w << '\n';
    return mmtest::pairwise_distances(
        trees, [](const mmtest::PhyloTree& a, const mmtest::PhyloTree& b) {
          return mmtest::bhv_distance(a, b);
        });
  }
  throw std::runtime_error("'" + opt.space + "' input is not a point file");
}

mmtest::DistanceMatrix load_matrix(const std::string& path,
                                   const SpaceOptions& opt) {
  if (opt.space == "matrix") {
    std::ifstream in = open_input(path);
    mmtest::MatrixReadOptions mopt;
    mopt.strict = opt.strict;
    return mmtest::read_distance_matrix_csv(in, mopt);
  }
  return matrix_from_points_file(path, opt);
}

// Pooled matrix over the concatenation of two point files.
mmtest::DistanceMatrix load_pooled_two(const std::string& path_x,
                                       const std::string& path_y,
                                       const SpaceOptions& opt,
                                       std::size_t* n_x, std::size_t* n_y) {
  if (opt.space == "matrix")
    throw std::runtime_error(
        "energy needs cross-distances: pass one pooled matrix via --pooled "
        "instead of two per-group matrices");
  auto pool = [&](auto reader, auto metric) {
    std::ifstream in_x = open_input(path_x);
    std::ifstream in_y = open_input(path_y);
    auto xs = reader(in_x);
    auto ys = reader(in_y);
    *n_x = xs.size();
    *n_y = ys.size();
    xs.insert(xs.end(), ys.begin(), ys.end());
    return mmtest::pairwise_distances(xs, metric);
  };
  if (opt.space == "euclidean")
    return pool([](std::istream& in) { return read_vectors_csv(in); },
                euclidean_metric);
  if (opt.space == "gaussian")
    return pool(
        [&](std::istream& in) { return read_gaussians_csv(in, opt.zero_mean); },
        [](const mmtest::GaussianParam& a, const mmtest::GaussianParam& b) {
          return mmtest::hellinger_distance(a, b);
        });
  if (opt.space == "bhv")
    return pool(
        [&](std::istream& in) {
          return mmtest::read_tree_file(in, opt.leaves, nullptr);
        },
        [](const mmtest::PhyloTree& a, const mmtest::PhyloTree& b) {
          return mmtest::bhv_distance(a, b);
        });
  throw std::runtime_error("unknown space '" + opt.space + "'");
}

// Submatrices of the label-0 and label-1 groups.
std::pair<mmtest::DistanceMatrix, mmtest::DistanceMatrix> split_by_labels(
    const mmtest::DistanceMatrix& d, const std::vector<int>& labels) {
  if (labels.size() != d.size())
    throw std::runtime_error("labels: " + std::to_string(labels.size()) +
                             " entries for a matrix of size " +
                             std::to_string(d.size()));
  std::vector<std::size_t> g0, g1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw std::runtime_error("labels must be 0 or 1");
    (labels[i] == 0 ? g0 : g1).push_back(i);
  }
  mmtest::DistanceMatrix dx(g0.size()), dy(g1.size());
  for (std::size_t i = 0; i < g0.size(); ++i)
    for (std::size_t j = i + 1; j < g0.size(); ++j)
      dx.set(i, j, d(g0[i], g0[j]));
  for (std::size_t i = 0; i < g1.size(); ++i)
    for (std::size_t j = i + 1; j < g1.size(); ++j)
      dy.set(i, j, d(g1[i], g1[j]));
  return {std::move(dx), std::move(dy)};
}

std::vector<int> default_half_labels(std::size_t n) {
  std::vector<int> labels(n, 0);
  for (std::size_t i = n / 2; i < n; ++i) labels[i] = 1;
  return labels;
}

void write_result(const mmtest::TestResult& result, const std::string& out) {
  std::string text = mmtest::to_json(result).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    open_output(out) << text;
  }
}

int finish_test(const mmtest::TestResult& result, const std::string& out) {
  write_result(result, out);
  std::cerr << (result.reject ? "reject" : "accept") << " (statistic "
            << mmtest::format_double(result.statistic) << ", critical "
            << mmtest::format_double(result.critical_value) << ")\n";
  return result.reject ? kExitReject : kExitOk;
}

std::vector<double> parse_grid(const std::string& spec, double diameter) {
  std::vector<double> grid;
  if (spec.empty()) {
    // default: 25 radii up to the diameter
    if (!(diameter > 0.0))
      throw std::runtime_error("all distances are zero; pass --grid");
    for (int k = 1; k <= 25; ++k) grid.push_back(diameter * k / 25.0);
    return grid;
  }
  if (spec.find(':') != std::string::npos) {
    // lo:hi:count, endpoints included
    double lo = 0.0, hi = 0.0;
    int count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' ||
        !ss.eof() || count < 2 || !(hi > lo))
      throw std::runtime_error("bad grid spec '" + spec +
                               "' (want lo:hi:count)");
    for (int k = 0; k < count; ++k)
      grid.push_back(lo + (hi - lo) * k / (count - 1));
    return grid;
  }
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::runtime_error("bad grid value '" + item + "'");
    }
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-sample testing on metric measure spaces"};
  app.require_subcommand(1);

  SpaceOptions space_opt;
  auto add_space_flags = [&](CLI::App* cmd, bool with_matrix) {
    std::vector<std::string> spaces = {"euclidean", "bhv", "gaussian"};
    if (with_matrix) spaces.push_back("matrix");
    cmd->add_option("--space", space_opt.space, "input space")
        ->check(CLI::IsMember(spaces))
        ->capture_default_str();
    cmd->add_option("--leaves", space_opt.leaves,
                    "bhv: expected leaf count (0 = infer)");
    cmd->add_flag("--zero-mean", space_opt.zero_mean,
                  "gaussian: reject rows with nonzero mean");
    if (with_matrix)
      cmd->add_flag("--strict", space_opt.strict,
                    "matrix: treat triangle violations as errors");
  };

  // dist: points file -> distance matrix CSV
  std::string dist_in, dist_out;
  CLI::App* dist = app.add_subcommand("dist", "compute a distance matrix");
  dist->add_option("--in", dist_in, "points file")->required();
  dist->add_option("--out", dist_out, "matrix CSV (default stdout)");
  add_space_flags(dist, false);

  // test: two-sample test
  std::string test_which = "ks";
  std::string test_x, test_y, test_pooled, test_labels, test_out;
  double alpha = 0.05;
  std::size_t B = 1000;
  std::uint64_t seed = 0;
  CLI::App* test = app.add_subcommand("test", "two-sample test");
  test->add_option("--which", test_which, "test statistic")
      ->check(CLI::IsMember({"ks", "energy"}))
      ->capture_default_str();
  test->add_option("--x", test_x, "group X points/matrix file");
  test->add_option("--y", test_y, "group Y points/matrix file");
  test->add_option("--pooled", test_pooled, "pooled points/matrix file");
  test->add_option("--labels", test_labels,
                   "0/1 labels for --pooled (default: halves)");
  test->add_option("--alpha", alpha, "significance level")
      ->capture_default_str();
  test->add_option("--B", B, "permutation replicates (energy)")
      ->capture_default_str();
  test->add_option("--seed", seed, "permutation seed (energy)")
      ->capture_default_str();
  test->add_option("--out", test_out, "result JSON (default stdout)");
  add_space_flags(test, true);

  // selftest: split-half sanity check of one sample
  std::string self_in, self_out;
  CLI::App* self = app.add_subcommand(
      "selftest", "split one sample in half and test the halves");
  self->add_option("--in", self_in, "points/matrix file")->required();
  self->add_option("--alpha", alpha, "significance level")
      ->capture_default_str();
  self->add_option("--out", self_out, "result JSON (default stdout)");
  add_space_flags(self, true);

  // power: Monte-Carlo power study on the normal scale family
  std::string power_mode = "full", power_out, power_md;
  mmtest::PowerStudyConfig power_cfg;
  CLI::App* power = app.add_subcommand(
      "power", "power study: N(0,1) vs scaled normal, |x-y| metric");
  power->add_option("--mode", power_mode, "budget preset")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();
  power->add_option("--n", power_cfg.n, "points per group")
      ->capture_default_str();
  power->add_option("--alpha", power_cfg.alpha, "significance level")
      ->capture_default_str();
  power->add_option("--seed", power_cfg.seed, "master seed")
      ->capture_default_str();
  power->add_option("--threads", power_cfg.threads,
                    "worker threads (0 = hardware)");
  power->add_option("--out", power_out, "table CSV (default stdout)");
  power->add_option("--md", power_md, "also write a Markdown table here");

  // sprocess: empirical ball volume path from one center
  std::string sp_in, sp_out, sp_center = "medoid", sp_grid;
  CLI::App* sprocess = app.add_subcommand(
      "sprocess", "empirical ball volumes around one point");
  sprocess->add_option("--in", sp_in, "points/matrix file")->required();
  sprocess->add_option("--center", sp_center,
                       "'medoid' or a 0-based point index")
      ->capture_default_str();
  sprocess->add_option("--grid", sp_grid,
                       "radii: 'lo:hi:count' or comma list "
                       "(default: 25 steps to the diameter)");
  sprocess->add_option("--out", sp_out, "path CSV (default stdout)");
  add_space_flags(sprocess, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (dist->parsed()) {
      mmtest::DistanceMatrix d = matrix_from_points_file(dist_in, space_opt);
      mmtest::TriangleAudit audit = mmtest::audit_triangles(d);
      std::ostringstream body;
      body << "# mmtest dist space=" << space_opt.space
           << " n=" << d.size() << '\n';
      mmtest::write_distance_matrix_csv(body, d);
      if (dist_out.empty()) {
        std::cout << body.str();
      } else {
        open_output(dist_out) << body.str();
      }
      std::cerr << "n=" << d.size() << "  triangle audit: " << audit.checked
                << " triples, " << audit.violations << " violations\n";
      return kExitOk;
    }

    if (test->parsed()) {
      bool two_files = !test_x.empty() && !test_y.empty();
      bool pooled_file = !test_pooled.empty();
      bool mixed = pooled_file && (!test_x.empty() || !test_y.empty());
      if (two_files == pooled_file || mixed) {
        std::cerr << "pass either --x and --y, or --pooled\n";
        return kExitUsage;
      }
      if (test_which == "ks") {
        mmtest::DistanceMatrix dx, dy;
        if (two_files) {
          dx = load_matrix(test_x, space_opt);
          dy = load_matrix(test_y, space_opt);
        } else {
          mmtest::DistanceMatrix pooled = load_matrix(test_pooled, space_opt);
          std::vector<int> labels =
              test_labels.empty()
                  ? default_half_labels(pooled.size())
                  : [&] {
                      std::ifstream in = open_input(test_labels);
                      return read_labels(in);
                    }();
          std::tie(dx, dy) = split_by_labels(pooled, labels);
        }
        return finish_test(mmtest::ks_row_test(dx, dy, alpha), test_out);
      }
      // energy
      mmtest::DistanceMatrix pooled;
      std::vector<int> labels;
      if (two_files) {
        std::size_t n_x = 0, n_y = 0;
        pooled = load_pooled_two(test_x, test_y, space_opt, &n_x, &n_y);
        labels.assign(n_x + n_y, 0);
        for (std::size_t i = n_x; i < n_x + n_y; ++i) labels[i] = 1;
      } else {
        pooled = load_matrix(test_pooled, space_opt);
        if (test_labels.empty()) {
          labels = default_half_labels(pooled.size());
        } else {
          std::ifstream in = open_input(test_labels);
          labels = read_labels(in);
        }
      }
      return finish_test(
          mmtest::energy_permutation_test(pooled, labels, alpha, B, seed),
          test_out);
    }

    if (self->parsed()) {
      mmtest::DistanceMatrix d = load_matrix(self_in, space_opt);
      return finish_test(mmtest::split_half_self_test(d, alpha), self_out);
    }

    if (power->parsed()) {
      mmtest::PowerStudyConfig cfg = power_mode == "quick"
                                         ? mmtest::quick_mode(power_cfg)
                                         : mmtest::full_mode(power_cfg);
      mmtest::PowerTable table = mmtest::run_power_study(cfg);
      std::vector<std::string> header = {
          "mmtest power mode=" + power_mode,
          "n=" + std::to_string(cfg.n) + " n_mc=" + std::to_string(cfg.n_mc) +
              " B=" + std::to_string(cfg.B) +
              " alpha=" + mmtest::format_double(cfg.alpha) +
              " seed=" + std::to_string(cfg.seed)};
      std::ostringstream body;
      mmtest::write_power_csv(body, table, header);
      if (power_out.empty()) {
        std::cout << body.str();
      } else {
        open_output(power_out) << body.str();
      }
      if (!power_md.empty()) {
        std::ofstream md = open_output(power_md);
        mmtest::write_power_markdown(md, table);
      }
      return kExitOk;
    }

    if (sprocess->parsed()) {
      mmtest::DistanceMatrix d = load_matrix(sp_in, space_opt);
      std::size_t center;
      if (sp_center == "medoid") {
        center = mmtest::medoid_index(d);
      } else {
        try {
          std::size_t used = 0;
          long long idx = std::stoll(sp_center, &used);
          if (used != sp_center.size() || idx < 0) throw std::exception();
          center = static_cast<std::size_t>(idx);
        } catch (const std::exception&) {
          std::cerr << "--center must be 'medoid' or a point index\n";
          return kExitUsage;
        }
      }
      double diameter = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j)
          diameter = std::max(diameter, d(i, j));
      std::vector<double> grid = parse_grid(sp_grid, diameter);
      mmtest::BallProcessPath path =
          mmtest::empirical_ball_process(d, center, grid);
      std::ostringstream body;
      body << "# mmtest sprocess space=" << space_opt.space
           << " center=" << center << " n=" << d.size() << '\n'
           << "radius,value\n";
      for (std::size_t k = 0; k < path.grid.size(); ++k)
        body << mmtest::format_double(path.grid[k]) << ','
             << mmtest::format_double(path.values[k]) << '\n';
      if (sp_out.empty()) {
        std::cout << body.str();
      } else {
        open_output(sp_out) << body.str();
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
