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

// Verification suites. Each criterion runs a fixed experiment and compares
// measured quantities against pinned thresholds, including its wall-clock
// budget.

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace irelab::verify {

struct Check {
  std::string name;
  double measured = 0.0;
  /// Human-readable threshold, e.g. "<= 0.05" or "in [8, 12]".
  std::string expectation;
  bool pass = false;
};

struct CriterionReport {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  /// Set when the experiment itself threw; the criterion then fails.
  std::string error;

  bool passed() const noexcept;
};

struct SuiteReport {
  std::string suite;
  std::vector<CriterionReport> criteria;

  bool passed() const noexcept;
};

struct Options {
  int jobs = 1;
  std::uint64_t seed = 1;
};

CriterionReport toy_sharpness(const Options& options);
CriterionReport toy_divergence(const Options& options);
CriterionReport mask_properties(const Options& options);
CriterionReport fisher_unbiasedness(const Options& options);
CriterionReport estimator_overhead(const Options& options);
CriterionReport drift_average(const Options& options);
CriterionReport drift_standard(const Options& options);
CriterionReport long_horizon_stability(const Options& options);
CriterionReport sde_dynamics(const Options& options);
CriterionReport lemma_properties(const Options& options);
CriterionReport infrastructure(const Options& options);

/// masks, fisher, toy, drift-average, drift-standard, stability, sde, lemmas,
/// overhead, infra.
const std::vector<std::string>& suite_names();

/// std::invalid_argument listing the valid names for an unknown suite.
SuiteReport run_suite(std::string_view name, const Options& options);

/// One line per criterion followed by one indented line per check.
void write_report(const SuiteReport& report, std::ostream& out);

/// CSV with columns suite, criterion, check, measured, expectation, status.
void write_report_csv(const std::vector<SuiteReport>& reports, std::ostream& out);

}  // namespace irelab::verify
