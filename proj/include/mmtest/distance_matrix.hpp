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
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "mmtest/random.hpp"

// Symmetric pairwise distance matrices and the handful of summaries the
// tests are built from (medoid, medoid row, triangle audit).

namespace mmtest {

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  double operator()(std::size_t i, std::size_t j) const {
    return d_[i * n_ + j];
  }

  // Sets both (i, j) and (j, i); the diagonal stays zero.
  void set(std::size_t i, std::size_t j, double value) {
    if (i >= n_ || j >= n_) throw std::out_of_range("DistanceMatrix::set");
    if (!(value >= 0.0))  // also rejects NaN
      throw std::invalid_argument("distance values must be >= 0");
    if (i == j) {
      if (value != 0.0)
        throw std::invalid_argument("diagonal entries must be zero");
      return;
    }
    d_[i * n_ + j] = value;
    d_[j * n_ + i] = value;
  }

  const std::vector<double>& data() const { return d_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// Distance matrix of `points` under `metric`.  The metric is evaluated
// once per unordered pair; symmetry and the zero diagonal hold by
// construction.
template <typename Point, typename Metric>
DistanceMatrix pairwise_distances(const std::vector<Point>& points,
                                  Metric&& metric) {
  DistanceMatrix d(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double v = metric(points[i], points[j]);
      if (!(v >= 0.0))
        throw std::invalid_argument("metric returned a negative or NaN value");
      d.set(i, j, v);
    }
  }
  return d;
}

// Index minimising the row sum; ties resolve to the lowest index.
inline std::size_t medoid_index(const DistanceMatrix& d) {
  if (d.empty()) throw std::invalid_argument("medoid of an empty matrix");
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) s += d(i, j);
    if (s < best_sum) {
      best_sum = s;
      best = i;
    }
  }
  return best;
}

// Distances from point i to every other point, in index order (j < i
// first, then j > i).  Not sorted.
inline std::vector<double> row_distances(const DistanceMatrix& d,
                                         std::size_t i) {
  if (i >= d.size()) throw std::out_of_range("row_distances: bad index");
  std::vector<double> row;
  row.reserve(d.size() - 1);
  for (std::size_t j = 0; j < d.size(); ++j)
    if (j != i) row.push_back(d(i, j));
  return row;
}

struct TriangleAudit {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst = 0.0;  // largest d(i,k) - d(i,j) - d(j,k) seen
};

// Spot-check of the triangle inequality.  All triples when there are at
// most `max_triples` of them, otherwise a fixed-seed random sample, so
// the audit itself is reproducible.  Violations are reported, not fixed:
// matrices assembled from rounded external data may fail by harmless
// amounts, and the caller decides whether that is fatal.
inline TriangleAudit audit_triangles(const DistanceMatrix& d,
                                     std::size_t max_triples = 1000,
                                     double tol = 1e-9) {
  TriangleAudit audit;
  std::size_t n = d.size();
  if (n < 3) return audit;
  auto check = [&](std::size_t i, std::size_t j, std::size_t k) {
    // Each permutation of a triple gives one inequality; cover all three.
    double dij = d(i, j), djk = d(j, k), dik = d(i, k);
    double excess = std::max({dik - dij - djk, dij - dik - djk,
                              djk - dij - dik});
    ++audit.checked;
    if (excess > tol) {
      ++audit.violations;
      audit.worst = std::max(audit.worst, excess);
    }
  };
  std::size_t total = n * (n - 1) / 2 * (n - 2) / 3;
  if (total <= max_triples) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) check(i, j, k);
  } else {
    std::mt19937_64 gen(0x747269616e676c65ull);  // fixed: audit is deterministic
    for (std::size_t t = 0; t < max_triples; ++t) {
      std::size_t i = uniform_index(gen, n);
      std::size_t j = uniform_index(gen, n);
      std::size_t k = uniform_index(gen, n);
      if (i == j || j == k || i == k) {
        --t;  // resample degenerate triples
        continue;
      }
      check(i, j, k);
    }
  }
  return audit;
}

struct MatrixReadOptions {
  bool strict = false;    // triangle violations become errors
  double tol = 1e-9;      // symmetry / diagonal / triangle tolerance
};

// CSV layout: n rows of n comma-separated values, no column header.
// Lines starting with '#' and blank lines are skipped so tool output can
// carry a config comment up top.
inline DistanceMatrix read_distance_matrix_csv(
    std::istream& in, const MatrixReadOptions& options = {},
    TriangleAudit* audit_out = nullptr) {
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
        throw std::runtime_error("matrix csv: bad number at line " +
                                 std::to_string(lineno));
      p = res.ptr;
      row.push_back(v);
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p < end) {
        if (*p != ',')
          throw std::runtime_error("matrix csv: expected ',' at line " +
                                   std::to_string(lineno));
        ++p;
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  std::size_t n = rows.size();
  if (n == 0) throw std::runtime_error("matrix csv: no data rows");
  for (std::size_t i = 0; i < n; ++i)
    if (rows[i].size() != n)
      throw std::runtime_error("matrix csv: not square (row " +
                               std::to_string(i + 1) + " has " +
                               std::to_string(rows[i].size()) + " of " +
                               std::to_string(n) + " values)");
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(rows[i][i]) > options.tol)
      throw std::runtime_error("matrix csv: nonzero diagonal at row " +
                               std::to_string(i + 1));
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = rows[i][j], b = rows[j][i];
      if (std::abs(a - b) > options.tol)
        throw std::runtime_error("matrix csv: asymmetric at (" +
                                 std::to_string(i + 1) + "," +
                                 std::to_string(j + 1) + ")");
      double v = (a == b) ? a : 0.5 * (a + b);
      if (!(v >= 0.0))
        throw std::runtime_error("matrix csv: negative distance at (" +
                                 std::to_string(i + 1) + "," +
                                 std::to_string(j + 1) + ")");
      d.set(i, j, v);
    }
  }
  TriangleAudit audit = audit_triangles(d, 1000, options.tol);
  if (audit_out) *audit_out = audit;
  if (options.strict && audit.violations > 0)
    throw std::runtime_error(
        "matrix csv: triangle inequality violated (worst excess " +
        format_double(audit.worst) + ")");
  return d;
}

// Writes the matrix in the layout read_distance_matrix_csv expects.
// Values are shortest round-trip decimals, so write/read is lossless.
inline void write_distance_matrix_csv(std::ostream& out,
                                      const DistanceMatrix& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (j) out << ',';
      out << format_double(d(i, j));
    }
    out << '\n';
  }
}

}  // namespace mmtest
