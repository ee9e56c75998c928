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
#include <stdexcept>
#include <utility>
#include <vector>

#include "mmtest/random.hpp"

// The space of univariate Gaussian laws under the Hellinger distance.
//
// For N(mu1, s1^2) and N(mu2, s2^2),
//
//   d^2 = 1 - sqrt(2 s1 s2 / (s1^2 + s2^2))
//             * exp(-(mu1 - mu2)^2 / (4 (s1^2 + s2^2))).
//
// On the zero-mean slice the map sigma -> 1/sigma is an isometry: the
// ratio 2 s1 s2 / (s1^2 + s2^2) is invariant under inverting both
// arguments, so no statistic computed from pairwise distances can tell a
// sample of sigmas from the sample of their reciprocals.

namespace mmtest {

struct GaussianParam {
  double mean = 0.0;
  double sigma = 1.0;  // standard deviation, > 0
};

inline double hellinger_distance(const GaussianParam& a,
                                 const GaussianParam& b) {
  if (!(a.sigma > 0.0) || !(b.sigma > 0.0))
    throw std::invalid_argument("hellinger_distance: sigma must be > 0");
  double v = a.sigma * a.sigma + b.sigma * b.sigma;
  double dmu = a.mean - b.mean;
  double d2 = 1.0 - std::sqrt(2.0 * a.sigma * b.sigma / v) *
                        std::exp(-0.25 * dmu * dmu / v);
  return std::sqrt(std::max(d2, 0.0));  // clamp -0.0 from rounding
}

// sigma -> 1/sigma on the zero-mean slice.  Refuses nonzero means: with a
// mean offset the map is no longer distance preserving.
inline GaussianParam reciprocal_isometry(const GaussianParam& p) {
  if (p.mean != 0.0)
    throw std::invalid_argument("reciprocal_isometry: requires mean == 0");
  if (!(p.sigma > 0.0))
    throw std::invalid_argument("reciprocal_isometry: sigma must be > 0");
  return GaussianParam{0.0, 1.0 / p.sigma};
}

// Interval of sigmas whose overlap ratio with sigma0 exceeds u:
//
//   { sigma > 0 : 2 sigma0 sigma / (sigma0^2 + sigma^2) > u },  0 < u < 1,
//
// an open interval around sigma0 with endpoints sigma0 (1 -+ sqrt(1-u^2))/u.
inline std::pair<double, double> ball_interval(double sigma0, double u) {
  if (!(sigma0 > 0.0))
    throw std::invalid_argument("ball_interval: sigma0 must be > 0");
  if (!(u > 0.0) || !(u < 1.0))
    throw std::invalid_argument("ball_interval: need 0 < u < 1");
  double c = std::sqrt(1.0 / (u * u) - 1.0);
  return {sigma0 / u - sigma0 * c, sigma0 / u + sigma0 * c};
}

// Endpoints of the sigma interval integrated by ball_mass_exponential:
// x/s^2 -+ x sqrt(1/s^2 - 1) with s = 1 - t^2.
inline std::pair<double, double> ball_mass_interval(double x, double t) {
  if (!(x > 0.0)) throw std::invalid_argument("ball_mass_interval: x > 0");
  if (!(t > 0.0) || !(t < 1.0))
    throw std::invalid_argument("ball_mass_interval: need 0 < t < 1");
  double s = 1.0 - t * t;
  double c = std::sqrt(1.0 / (s * s) - 1.0);
  return {x / (s * s) - x * c, x / (s * s) + x * c};
}

// Mass assigned to the radius-t ball around the zero-mean Gaussian with
// scale x when sigma is drawn standard-exponentially:
//
//   2 exp(-x/s^2) sinh(x sqrt(1/s^2 - 1)),   s = 1 - t^2,
//
// equivalently exp(-lo) - exp(-hi) over the ball_mass_interval endpoints.
// Evaluated in the exp-difference form: for small radii hi - lo is tiny
// and the sinh product would cancel badly.
inline double ball_mass_exponential(double x, double t) {
  auto [lo, hi] = ball_mass_interval(x, t);
  // exp(-lo) - exp(-hi) = exp(-lo) * -expm1(lo - hi), stable for hi ~ lo.
  return -std::exp(-lo) * std::expm1(lo - hi);
}

// n draws with sigma ~ Exp(1), conditioned away from underflow; means are
// zero.  Used by generators in simulations.
inline std::vector<GaussianParam> sample_gaussians(std::size_t n,
                                                   std::mt19937_64& gen) {
  std::vector<GaussianParam> out;
  out.reserve(n);
  while (out.size() < n) {
    double s = standard_exponential(gen);
    if (s > 0.0) out.push_back(GaussianParam{0.0, s});
  }
  return out;
}

}  // namespace mmtest
