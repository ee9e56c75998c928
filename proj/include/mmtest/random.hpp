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
#include <random>
#include <vector>

// Reproducible random numbers.
//
// Everything downstream (permutation tests, power studies) must produce
// bit-identical results for a given seed regardless of platform, compiler
// or thread count.  The standard <random> distributions are
// implementation-defined, so we only use std::mt19937_64 as the raw bit
// source and do the value mapping ourselves.

namespace mmtest {

namespace detail {

// One step of the splitmix64 sequence.  Used for seed derivation only.
inline std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Independent generator for replicate `index` of a run keyed by
// `master_seed`.  Replicates can then execute in any order (or in
// parallel) without changing results.
inline std::mt19937_64 seeded_substream(std::uint64_t master_seed,
                                        std::uint64_t index) {
  // Two mixing rounds keep nearby (seed, index) pairs well separated.
  std::uint64_t s =
      detail::splitmix64(master_seed + index * 0x9e3779b97f4a7c15ull);
  return std::mt19937_64(detail::splitmix64(s));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).  Masked rejection sampling; exact.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t mask = n - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  for (;;) {
    std::uint64_t r = gen() & mask;
    if (r < n) return r;
  }
}

// Standard normal via Box-Muller (cosine branch only, so each call
// consumes exactly two generator words).
inline double standard_normal(std::mt19937_64& gen) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  double u1 = 1.0 - uniform01(gen);  // (0, 1], keeps log() finite
  double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Standard exponential (rate 1) by inversion.
inline double standard_exponential(std::mt19937_64& gen) {
  return -std::log1p(-uniform01(gen));
}

// Fisher-Yates shuffle driven by uniform_index, so the permutation for a
// given generator state is the same everywhere.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& gen) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_index(gen, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace mmtest
