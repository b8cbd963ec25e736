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

#include <cstdlib>
#include <string>

#include "doctest.h"
#include "irelab/config.hpp"
#include "irelab/format.hpp"

using namespace irelab;
using namespace irelab::expcli;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("parse a full config") {
  const auto c = parse_config(R"(# toy run
landscape.kind = valley
landscape.valley_p = 8
landscape.valley_a = 1, 2.5

optimizer.kind = adamw   # trailing comment
optimizer.lr = 0.003
optimizer.schedule = step
optimizer.milestones = 10, 20
optimizer.weight_decay = 0.01

ire.kappa = 2
ire.gamma = 0.75
ire.estimator = exact_diag
ire.warmup_loss = 1e-3

run.steps = 40
run.seed = 18446744073709551615
run.track = 0, 7
sweep.kappa = 0, 1
)");
  CHECK(c.landscape.kind == "valley");
  CHECK(c.landscape.valley_p == 8);
  CHECK(c.landscape.valley_a == std::vector<double>{1.0, 2.5});
  CHECK(c.optimizer.kind == optim::OptimizerKind::AdamW);
  CHECK(c.optimizer.lr.milestones == std::vector<std::int64_t>{10, 20});
  REQUIRE(c.ire);
  CHECK(c.ire->kappa == 2.0);
  CHECK(c.ire->estimator == ire::Estimator::ExactDiag);
  CHECK(*c.ire->warmup_loss == 1e-3);
  CHECK_FALSE(c.ire->warmup_steps);
  CHECK(c.run.seed == 18446744073709551615ULL);
  CHECK(c.run.track == std::vector<std::int64_t>{0, 7});
  CHECK(c.sweep.kappa == std::vector<double>{0.0, 1.0});
}

TEST_CASE("canonical text round-trips") {
  ExperimentConfig c;
  c.landscape.kind = "softmax";
  c.landscape.init_scale = 0.1 + 0.2;
  c.optimizer.lr.base = 1.0 / 3.0;
  c.optimizer.kind = optim::OptimizerKind::SamStandard;
  ire::IreConfig ic;
  ic.gamma = 0.9;
  ic.warmup_steps = 17;
  c.ire = ic;
  c.run.output = "out/x.csv";
  c.sweep.lr = {0.1, 1e-7};
  const std::string text = to_text(c);
  const auto back = parse_config(text);
  CHECK(same_config(c, back));
  CHECK(to_text(back) == text);
  CHECK(back.optimizer.lr.base == 1.0 / 3.0);
  CHECK(back.landscape.init_scale == 0.1 + 0.2);
  CHECK(back.ire->warmup_steps == 17);

  ExperimentConfig plain;
  CHECK(same_config(parse_config(to_text(plain)), plain));
  CHECK_FALSE(parse_config(to_text(plain)).ire);
}

TEST_CASE("every documented key parses") {
  CHECK(config_keys().size() == 46);
  for (const auto& k : config_keys()) CHECK(k.find('.') != std::string::npos);
}

TEST_CASE("errors carry the line number") {
  CHECK(error_line("run.steps = 5\nrun.stepz = 3\n") == 2);
  CHECK(error_line("run.steps = 5\n\nrun.steps = 6\n") == 3);
  CHECK(error_line("# c\nrun.steps 5\n") == 2);
  CHECK(error_line("optimizer.lr = fast\n") == 1);
  CHECK(error_line("run.steps = 1.5\n") == 1);
  CHECK(error_line("run.log_trace = yes\n") == 1);
  CHECK_THROWS_WITH_AS(parse_config("a.b = 1"), "line 1: unknown key 'a.b'", ConfigError);
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(parse_config("landscape.kind = torus\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("optimizer.lr = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("ire.gamma = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sweep.kappa = 1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("landscape.kind = valley\nlandscape.valley_p = 3\nlandscape.valley_a = 1, 2, 3\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("run.steps = -3\n"), ConfigError);
}

TEST_CASE("ire.enabled = false wins over other ire keys") {
  CHECK_FALSE(parse_config("ire.kappa = 3\nire.enabled = false\n").ire);
  CHECK_FALSE(parse_config("ire.enabled = false\nire.kappa = 3\n").ire);
  CHECK(parse_config("ire.kappa = 3\n").ire);
  CHECK(parse_config("ire.enabled = true\n").ire);
}

TEST_CASE("landscape construction and initial points") {
  ExperimentConfig c;
  auto L = make_landscape(c.landscape);
  CHECK(L->name() == "toy2d");
  CHECK(initial_point(c.landscape, *L) == Vector{{2.0, 1.0}});
  c.landscape.kind = "valley";
  L = make_landscape(c.landscape);
  CHECK(L->dim() == 10);
  CHECK(initial_point(c.landscape, *L) == initial_point(c.landscape, *L));
  c.landscape.init = {1.0, 2.0};
  CHECK_THROWS_AS(initial_point(c.landscape, *L), ConfigError);
  c.landscape.kind = "softmax";
  c.landscape.init.clear();
  L = make_landscape(c.landscape);
  CHECK(L->dim() == 67);
  c.landscape.radius = 5.0;
  CHECK(make_landscape(c.landscape)->admissible_radius() == 5.0);
}

TEST_CASE("default output directory follows the environment") {
  ::setenv("IRELAB_OUTPUT_DIR", "/tmp/irelab-test-out", 1);
  CHECK(default_output_dir() == "/tmp/irelab-test-out");
  ::setenv("IRELAB_OUTPUT_DIR", "", 1);
  CHECK(default_output_dir() == "irelab_out");
  ::unsetenv("IRELAB_OUTPUT_DIR");
  CHECK(default_output_dir() == "irelab_out");
}

TEST_CASE("number formatting and CSV quoting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}
