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

// Experiment configuration: a flat "section.key = value" text format. The
// schema is documented in docs/formats.md.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "irelab/ire.hpp"
#include "irelab/landscape.hpp"
#include "irelab/optim.hpp"

namespace irelab::expcli {

struct LandscapeSpec {
  /// toy2d, valley, regression or softmax.
  std::string kind = "toy2d";
  /// Initial point; empty selects the landscape's default.
  std::vector<double> init;
  /// valley: total dimension and a_i (m = a.size()).
  std::int64_t valley_p = 10;
  std::vector<double> valley_a{1.0, 2.0, 3.0};
  /// valley: shifted_norm (lambda_i = a_i + ||u||^2) or constant.
  std::string valley_profile = "shifted_norm";
  /// softmax: data and initialization seeds, initialization scale.
  std::uint64_t data_seed = 20240611;
  std::uint64_t init_seed = 0;
  double init_scale = 0.5;
  double radius = kDefaultAdmissibleRadius;

  friend bool operator==(const LandscapeSpec&, const LandscapeSpec&) = default;
};

struct RunSpec {
  std::int64_t steps = 100;
  std::int64_t log_every = 1;
  std::uint64_t seed = 0;
  /// CSV path; empty means <output dir>/run.csv.
  std::string output;
  /// Logged coordinates of theta; empty logs all of them when p <= 10 and
  /// none otherwise.
  std::vector<std::int64_t> track;
  bool log_trace = true;
  bool log_distance = true;
  /// Final status is "converged" when the final loss is at most this.
  double converge_loss = 1e-10;

  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

struct SweepSpec {
  std::vector<double> kappa;
  std::vector<double> gamma;
  std::vector<std::int64_t> refresh_period;
  std::vector<double> lr;
  std::vector<double> rho;

  bool empty() const noexcept {
    return kappa.empty() && gamma.empty() && refresh_period.empty() && lr.empty() && rho.empty();
  }
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ExperimentConfig {
  LandscapeSpec landscape;
  optim::OptimizerConfig optimizer;
  std::optional<ire::IreConfig> ire;
  RunSpec run;
  SweepSpec sweep;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses the flat format. Unknown keys, duplicate keys, malformed lines and
/// out-of-domain values raise ConfigError carrying the 1-based line number.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(to_text(c)) reproduces c exactly.
std::string to_text(const ExperimentConfig& config);

/// All keys accepted by parse_config, in canonical order.
const std::vector<std::string>& config_keys();

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b);

/// Builds the landscape named by spec.
std::unique_ptr<Landscape> make_landscape(const LandscapeSpec& spec);

/// spec.init when given, else the default start for the landscape kind.
Vector initial_point(const LandscapeSpec& spec, const Landscape& landscape);

/// $IRELAB_OUTPUT_DIR when set and non-empty, else "irelab_out".
std::filesystem::path default_output_dir();

}  // namespace irelab::expcli
