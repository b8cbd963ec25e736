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

#include "irelab/experiment.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "irelab/format.hpp"
#include "irelab/parallel.hpp"
#include "irelab/theory.hpp"

namespace irelab::expcli {

namespace {

constexpr std::uint64_t kEstimatorStreamSalt = 0x6a09e667f3bcc909ULL;

std::string opt_field(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

LogRow measure(const Landscape& landscape, const Vector& theta, std::int64_t step,
               std::int64_t grad_evals, bool log_trace, bool log_dist,
               const std::vector<std::int64_t>& tracked, std::vector<std::string>& warnings) {
  LogRow row;
  row.step = step;
  row.loss = landscape.loss(theta);
  row.grad_norm = landscape.grad(theta).norm();
  if (log_trace) row.trace = theory::trace_hessian(landscape, theta);
  if (log_dist) {
    try {
      row.dist = theory::dist_to_manifold(landscape, theta);
    } catch (const NonConvergenceError& e) {
      warnings.push_back("step " + std::to_string(step) + ": dist_to_manifold unavailable: " + e.what());
    }
  }
  for (auto i : tracked) row.coords.push_back(theta[static_cast<Index>(i)]);
  row.grad_evals = grad_evals;
  return row;
}

}  // namespace

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed:
      return "completed";
    case RunStatus::Converged:
      return "converged";
    case RunStatus::Diverged:
      return "diverged";
  }
  return "unknown";
}

TrajectoryLog run(const ExperimentConfig& config) {
  config.validate();
  const auto landscape = make_landscape(config.landscape);
  const Index p = landscape->dim();
  Vector theta = initial_point(config.landscape, *landscape);

  TrajectoryLog log;
  if (config.run.track.empty()) {
    if (p <= 10)
      for (Index i = 0; i < p; ++i) log.tracked.push_back(i);
  } else {
    for (auto i : config.run.track)
      if (i >= p)
        throw ConfigError("run.track: index " + std::to_string(i) + " out of range for p = " +
                          std::to_string(p));
    log.tracked = config.run.track;
  }
  const bool log_trace = config.run.log_trace;
  const bool log_dist = config.run.log_distance && landscape->capabilities().zero_loss_minima;
  log.columns = {"step", "loss", "grad_norm"};
  if (log_trace) log.columns.push_back("trace_hessian");
  if (log_dist) log.columns.push_back("dist_to_manifold");
  for (auto i : log.tracked) log.columns.push_back("theta_" + std::to_string(i));
  log.columns.push_back("grad_evals");
  log.columns.push_back("status");

  if (config.ire) log.warnings = config.ire->warnings();

  CounterRng rng = CounterRng::stream(config.run.seed, 0);
  optim::OptimizerState base_state(p);
  std::optional<ire::IreState> ire_state;
  if (config.ire) ire_state.emplace(p, config.run.seed ^ kEstimatorStreamSalt);
  auto evals = [&] { return ire_state ? ire_state->total_grad_evals() : base_state.grad_evals; };

  const std::int64_t steps = config.run.steps;
  try {
    log.rows.push_back(measure(*landscape, theta, 0, 0, log_trace, log_dist, log.tracked, log.warnings));
    for (std::int64_t t = 0; t < steps; ++t) {
      log.final_step = t + 1;
      theta = ire_state ? ire::ire_step(*config.ire, config.optimizer, *ire_state, *landscape, theta, t, rng)
                        : optim::base_step(config.optimizer, base_state, *landscape, theta, t, rng);
      landscape->check_point(theta);
      if ((t + 1) % config.run.log_every == 0 || t + 1 == steps)
        log.rows.push_back(
            measure(*landscape, theta, t + 1, evals(), log_trace, log_dist, log.tracked, log.warnings));
    }
    const double final_loss = landscape->loss(theta);
    log.status = final_loss <= config.run.converge_loss ? RunStatus::Converged : RunStatus::Completed;
  } catch (const DivergenceError& e) {
    log.status = RunStatus::Diverged;
    log.message = e.what();
  }
  log.final_theta = theta;
  log.grad_evals = evals();
  if (ire_state && ire_state->degenerate_cut_seen)
    log.warnings.push_back("spectral projector cut a numerically degenerate eigenvalue cluster");
  return log;
}

void write_csv(const TrajectoryLog& log, std::ostream& out) {
  write_csv_row(out, log.columns);
  const std::size_t width = log.columns.size();
  const bool has_trace = std::find(log.columns.begin(), log.columns.end(), "trace_hessian") != log.columns.end();
  const bool has_dist = std::find(log.columns.begin(), log.columns.end(), "dist_to_manifold") != log.columns.end();
  for (const auto& row : log.rows) {
    std::vector<std::string> fields;
    fields.reserve(width);
    fields.push_back(std::to_string(row.step));
    fields.push_back(format_double(row.loss));
    fields.push_back(format_double(row.grad_norm));
    if (has_trace) fields.push_back(opt_field(row.trace));
    if (has_dist) fields.push_back(opt_field(row.dist));
    for (double c : row.coords) fields.push_back(format_double(c));
    fields.push_back(std::to_string(row.grad_evals));
    fields.emplace_back();
    write_csv_row(out, fields);
  }
  std::vector<std::string> status(width);
  status.front() = std::to_string(log.final_step);
  status.back() = std::string(to_string(log.status));
  write_csv_row(out, status);
}

std::string to_csv(const TrajectoryLog& log) {
  std::ostringstream out;
  write_csv(log, out);
  return out.str();
}

std::vector<ExperimentConfig> sweep_cells(const ExperimentConfig& base) {
  std::vector<ExperimentConfig> cells;
  if (base.sweep.empty()) return cells;
  cells.push_back(base);
  cells.front().sweep = {};

  auto expand = [&cells](const auto& values, auto apply) {
    if (values.empty()) return;
    std::vector<ExperimentConfig> next;
    next.reserve(cells.size() * values.size());
    for (const auto& cell : cells)
      for (const auto& v : values) {
        ExperimentConfig c = cell;
        apply(c, v);
        next.push_back(std::move(c));
      }
    cells = std::move(next);
  };
  expand(base.sweep.kappa, [](ExperimentConfig& c, double v) { c.ire->kappa = v; });
  expand(base.sweep.gamma, [](ExperimentConfig& c, double v) { c.ire->gamma = v; });
  expand(base.sweep.refresh_period, [](ExperimentConfig& c, std::int64_t v) { c.ire->refresh_period = v; });
  expand(base.sweep.lr, [](ExperimentConfig& c, double v) { c.optimizer.lr.base = v; });
  expand(base.sweep.rho, [](ExperimentConfig& c, double v) { c.optimizer.sam_rho = v; });
  return cells;
}

std::vector<SweepCell> sweep(const ExperimentConfig& base, int jobs) {
  base.validate();
  const auto configs = sweep_cells(base);
  std::vector<SweepCell> cells(configs.size());
  parallel_for(static_cast<std::int64_t>(configs.size()), jobs, [&](std::int64_t i) {
    const ExperimentConfig& c = configs[static_cast<std::size_t>(i)];
    SweepCell& cell = cells[static_cast<std::size_t>(i)];
    cell.index = i;
    if (!base.sweep.kappa.empty()) cell.kappa = c.ire->kappa;
    if (!base.sweep.gamma.empty()) cell.gamma = c.ire->gamma;
    if (!base.sweep.refresh_period.empty()) cell.refresh_period = c.ire->refresh_period;
    if (!base.sweep.lr.empty()) cell.lr = c.optimizer.lr.base;
    if (!base.sweep.rho.empty()) cell.rho = c.optimizer.sam_rho;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      const TrajectoryLog log = run(c);
      cell.status = std::string(to_string(log.status));
      cell.steps = log.final_step;
      cell.grad_evals = log.grad_evals;
      if (log.status == RunStatus::Diverged) {
        cell.final_loss = nan;
        cell.final_trace = nan;
        cell.error = log.message;
      } else {
        const auto landscape = make_landscape(c.landscape);
        cell.final_loss = landscape->loss(log.final_theta);
        cell.final_trace = theory::trace_hessian(*landscape, log.final_theta);
      }
    } catch (const std::exception& e) {
      cell.status = "error";
      cell.final_loss = nan;
      cell.final_trace = nan;
      cell.error = e.what();
    }
  });
  return cells;
}

void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out) {
  write_csv_row(out, {"cell", "kappa", "gamma", "refresh_period", "lr", "rho", "status", "steps",
                      "final_loss", "final_trace", "grad_evals", "error"});
  for (const auto& c : cells) {
    write_csv_row(out, {std::to_string(c.index), opt_field(c.kappa), opt_field(c.gamma),
                        c.refresh_period ? std::to_string(*c.refresh_period) : std::string(),
                        opt_field(c.lr), opt_field(c.rho), c.status, std::to_string(c.steps),
                        format_double(c.final_loss), format_double(c.final_trace),
                        std::to_string(c.grad_evals), c.error});
  }
}

std::string to_sweep_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  write_sweep_csv(cells, out);
  return out.str();
}

}  // namespace irelab::expcli
