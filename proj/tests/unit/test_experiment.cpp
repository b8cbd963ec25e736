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

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "irelab/experiment.hpp"
#include "irelab/verify.hpp"

using namespace irelab;
using namespace irelab::expcli;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

ExperimentConfig toy_ire(double lr) {
  auto c = parse_config("ire.gamma = 0.5\nire.estimator = exact_diag\nire.refresh_period = 1\n");
  c.optimizer.lr.base = lr;
  return c;
}

}  // namespace

TEST_CASE("toy GD with lr 1 converges onto the manifold") {
  auto c = parse_config("optimizer.lr = 1\nrun.steps = 500\nrun.seed = 7\n");
  const auto log = run(c);
  CHECK(log.status == RunStatus::Converged);
  CHECK(std::abs(log.final_theta[1]) <= 1e-6);
  CHECK(log.grad_evals == 500);
}

TEST_CASE("trajectory log schema and invariants") {
  auto c = toy_ire(0.1);
  c.run.steps = 25;
  c.run.log_every = 10;
  const auto log = run(c);
  CHECK(log.columns == std::vector<std::string>{"step", "loss", "grad_norm", "trace_hessian", "dist_to_manifold",
                                                "theta_0", "theta_1", "grad_evals", "status"});
  std::vector<std::int64_t> steps;
  for (const auto& r : log.rows) steps.push_back(r.step);
  CHECK(steps == std::vector<std::int64_t>{0, 10, 20, 25});
  for (std::size_t i = 1; i < log.rows.size(); ++i) CHECK(log.rows[i].grad_evals >= log.rows[i - 1].grad_evals);

  const auto text = lines(to_csv(log));
  REQUIRE(text.size() == 6);
  CHECK(text.front() == "step,loss,grad_norm,trace_hessian,dist_to_manifold,theta_0,theta_1,grad_evals,status");
  CHECK(text.back() == "25,,,,,,,,completed");
  CHECK(text[1].rfind("0,2.5,", 0) == 0);

  // The header depends on capabilities, not on values.
  c.landscape.kind = "softmax";
  c.ire->estimator = ire::Estimator::Fisher;
  c.run.steps = 2;
  const auto soft = run(c);
  CHECK(soft.columns == std::vector<std::string>{"step", "loss", "grad_norm", "trace_hessian", "grad_evals", "status"});
}

TEST_CASE("runs are byte-identical for the same config") {
  auto c = parse_config("landscape.kind = softmax\noptimizer.kind = sgd\noptimizer.batch_size = 4\n"
                        "ire.refresh_period = 3\nrun.steps = 20\nrun.seed = 99\nrun.log_trace = false\n");
  CHECK(to_csv(run(c)) == to_csv(run(c)));
  auto other = c;
  other.run.seed = 100;
  CHECK(to_csv(run(c)) != to_csv(run(other)));
}

TEST_CASE("divergence truncates the log") {
  auto c = parse_config("optimizer.lr = 3\nrun.steps = 500\nlandscape.init = 0.5, 0.5\n");
  const auto log = run(c);
  CHECK(log.status == RunStatus::Diverged);
  CHECK(log.final_step < 500);
  CHECK(lines(to_csv(log)).back() == std::to_string(log.final_step) + ",,,,,,,,diverged");
}

TEST_CASE("kappa sweep on the toy gives non-increasing final sharpness") {
  auto c = toy_ire(0.1);
  c.run.steps = 2000;
  c.run.log_every = 2000;
  c.sweep.kappa = {0.0, 1.0, 5.0, 10.0};
  const auto cells = sweep(c, 2);
  REQUIRE(cells.size() == 4);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].index == static_cast<std::int64_t>(i));
    CHECK(cells[i].kappa == c.sweep.kappa[i]);
    CHECK(cells[i].status != "diverged");
  }
  for (std::size_t i = 1; i < cells.size(); ++i) CHECK(cells[i].final_trace <= cells[i - 1].final_trace);
}

TEST_CASE("gamma sweep completes without divergence") {
  auto c = parse_config("landscape.kind = valley\noptimizer.lr = 0.1\nire.kappa = 2\nire.estimator = exact_diag\n"
                        "run.steps = 300\nrun.log_every = 300\nsweep.gamma = 0.8, 0.9, 0.95\n");
  const auto cells = sweep(c, 1);
  REQUIRE(cells.size() == 3);
  for (const auto& cell : cells) {
    CHECK(cell.status != "diverged");
    CHECK(cell.status != "error");
  }
}

TEST_CASE("sweep grid order, per-cell errors and empty grids") {
  auto c = toy_ire(0.1);
  c.run.steps = 5;
  c.sweep.kappa = {0.0, 1.0};
  c.sweep.lr = {0.1, 0.2, 0.3};
  const auto configs = sweep_cells(c);
  REQUIRE(configs.size() == 6);
  CHECK(configs[1].ire->kappa == 0.0);
  CHECK(configs[1].optimizer.lr.base == 0.2);
  CHECK(configs[3].ire->kappa == 1.0);
  CHECK(configs[3].optimizer.lr.base == 0.1);

  c.sweep = {};
  c.sweep.lr = {0.1, 3.0};
  c.landscape.init = {0.5, 0.5};
  c.run.steps = 200;
  const auto cells = sweep(c, 1);
  CHECK(cells[1].status == "diverged");
  CHECK_FALSE(cells[1].error.empty());
  CHECK(std::isnan(cells[1].final_loss));

  c.sweep = {};
  CHECK(sweep(c, 4).empty());
  CHECK(lines(to_sweep_csv({})).size() == 1);
}

TEST_CASE("sweep output does not depend on the thread count") {
  auto c = toy_ire(0.1);
  c.run.steps = 50;
  c.sweep.kappa = {0.0, 0.5, 2.0};
  c.sweep.gamma = {0.5, 0.7};
  CHECK(to_sweep_csv(sweep(c, 1)) == to_sweep_csv(sweep(c, 3)));
}

TEST_CASE("verify rejects unknown suites with the list of valid names") {
  CHECK_THROWS_WITH_AS(verify::run_suite("nope", {}),
                       doctest::Contains("masks, fisher, toy, drift-average, drift-standard, stability, sde, lemmas"),
                       std::invalid_argument);
  const auto report = verify::run_suite("masks", {});
  CHECK(report.passed());
  std::ostringstream out;
  verify::write_report_csv({report}, out);
  CHECK(lines(out.str()).front() == "suite,criterion,check,measured,expectation,status");
}
