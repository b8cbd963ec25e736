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

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "irelab/config.hpp"

namespace irelab::expcli {

enum class RunStatus { Completed, Converged, Diverged };

std::string_view to_string(RunStatus status);

struct LogRow {
  std::int64_t step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  std::optional<double> trace;
  std::optional<double> dist;
  std::vector<double> coords;
  std::int64_t grad_evals = 0;
};

struct TrajectoryLog {
  /// CSV header; a pure function of the config and landscape capabilities.
  std::vector<std::string> columns;
  std::vector<std::int64_t> tracked;
  std::vector<LogRow> rows;
  RunStatus status = RunStatus::Completed;
  /// Step index reached (the divergence step when diverged).
  std::int64_t final_step = 0;
  std::string message;
  Vector final_theta;
  std::int64_t grad_evals = 0;
  std::vector<std::string> warnings;
};

/// Runs config.run.steps optimizer steps (IRE-wrapped when config.ire is set)
/// from the configured initial point with rng stream (run.seed, 0). Rows are
/// logged at step 0, every log_every steps and at the last step. Divergence
/// ends the run early with status Diverged.
TrajectoryLog run(const ExperimentConfig& config);

/// Header, one row per logged step, then a status row whose step field is
/// final_step, status field is the run status and other fields are empty.
void write_csv(const TrajectoryLog& log, std::ostream& out);
std::string to_csv(const TrajectoryLog& log);

struct SweepCell {
  std::int64_t index = 0;
  std::optional<double> kappa;
  std::optional<double> gamma;
  std::optional<std::int64_t> refresh_period;
  std::optional<double> lr;
  std::optional<double> rho;
  std::string status;
  std::int64_t steps = 0;
  double final_loss = 0.0;
  double final_trace = 0.0;
  std::int64_t grad_evals = 0;
  std::string error;
};

/// Configurations of the cartesian product of the non-empty sweep axes in
/// the order kappa, gamma, refresh_period, lr, rho (last axis fastest). An
/// empty grid has no cells.
std::vector<ExperimentConfig> sweep_cells(const ExperimentConfig& base);

/// One run per cell on up to `jobs` threads. Per-cell failures are recorded
/// in SweepCell::error and the sweep continues.
std::vector<SweepCell> sweep(const ExperimentConfig& base, int jobs);

void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out);
std::string to_sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace irelab::expcli
