// Copyright 2026 The irelab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one PASS/FAIL line per criterion, followed by the
// individual checks. Optional arguments select criterion ids.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "irelab/verify.hpp"

using namespace irelab::verify;

int main(int argc, char** argv) {
  using Fn = CriterionReport (*)(const Options&);
  const std::vector<Fn> criteria{toy_sharpness,   toy_divergence,  mask_properties,        fisher_unbiasedness,
                                 estimator_overhead, drift_average, drift_standard,         long_horizon_stability,
                                 sde_dynamics,    lemma_properties, infrastructure};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  Options options;
  options.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto r = criteria[i](options);
    ++ran;
    if (!r.passed()) ++failed;
    std::cout << (r.passed() ? "PASS" : "FAIL") << "  criterion " << id << ": " << r.title << " (" << r.seconds
              << " s)\n";
    if (!r.error.empty()) std::cout << "      error: " << r.error << '\n';
    for (const auto& c : r.checks)
      std::cout << "      " << (c.pass ? "ok  " : "FAIL") << ' ' << c.name << " = " << c.measured << " (want "
                << c.expectation << ")\n";
    std::cout.flush();
  }
  std::cout << ran - failed << "/" << ran << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
