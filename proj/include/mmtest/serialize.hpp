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

#include "json.hpp"
#include "mmtest/two_sample.hpp"

// JSON serialization of test results, kept out of two_sample.hpp so the
// core headers do not depend on the JSON library.

namespace mmtest {

inline nlohmann::ordered_json to_json(const TestResult& r) {
  nlohmann::ordered_json j;
  j["test"] = r.test;
  j["statistic"] = r.statistic;
  j["critical_value"] = r.critical_value;
  if (r.p_value)
    j["p_value"] = *r.p_value;
  else
    j["p_value"] = nullptr;
  j["reject"] = r.reject;
  j["alpha"] = r.alpha;
  j["n_x"] = r.n_x;
  j["n_y"] = r.n_y;
  j["seed"] = r.seed;
  j["samples_x"] = r.samples_x;
  j["samples_y"] = r.samples_y;
  return j;
}

}  // namespace mmtest
