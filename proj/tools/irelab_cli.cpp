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

// irelab command-line tool: run, sweep, verify, toy.
//
// Exit codes: 0 success, 1 check failure or runtime error, 2 configuration
// error, 3 divergence (run only).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "irelab/config.hpp"
#include "irelab/experiment.hpp"
#include "irelab/format.hpp"
#include "irelab/landscape.hpp"
#include "irelab/theory.hpp"
#include "irelab/types.hpp"
#include "irelab/verify.hpp"

namespace fs = std::filesystem;
using namespace irelab;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kConfigError = 2;
constexpr int kDiverged = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

expcli::ExperimentConfig load(const Common& common) {
  auto config = expcli::load_config(common.config);
  if (common.seed) config.run.seed = *common.seed;
  config.validate();
  return config;
}

fs::path output_file(const Common& common, const std::string& configured, const char* name) {
  if (!common.out.empty()) return common.out;
  if (!configured.empty()) return configured;
  return expcli::default_output_dir() / name;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_run(const Common& common) {
  const auto config = load(common);
  const auto log = expcli::run(config);
  print_warnings(log.warnings);
  const fs::path path = output_file(common, config.run.output, "run.csv");
  auto out = open_output(path);
  expcli::write_csv(log, out);
  std::cout << "status " << expcli::to_string(log.status) << " after " << log.final_step << " steps, "
            << log.grad_evals << " gradient evaluations -> " << path.string() << '\n';
  if (log.status == expcli::RunStatus::Diverged) {
    std::cerr << "diverged: " << log.message << '\n';
    return kDiverged;
  }
  return kOk;
}

int cmd_sweep(const Common& common) {
  const auto config = load(common);
  const auto cells = expcli::sweep(config, common.jobs);
  const fs::path path = output_file(common, "", "sweep.csv");
  auto out = open_output(path);
  expcli::write_sweep_csv(cells, out);
  int failed = 0;
  for (const auto& c : cells)
    if (c.status == "error") ++failed;
  std::cout << cells.size() << " cells, " << failed << " errors -> " << path.string() << '\n';
  return kOk;
}

int cmd_verify(const Common& common, const std::vector<std::string>& suites) {
  std::vector<std::string> names = suites;
  if (names.size() == 1 && names.front() == "all") names = verify::suite_names();
  verify::Options options;
  options.jobs = common.jobs;
  if (common.seed) options.seed = *common.seed;

  std::vector<verify::SuiteReport> reports;
  for (const auto& name : names) {
    reports.push_back(verify::run_suite(name, options));
    verify::write_report(reports.back(), std::cout);
  }
  if (!common.out.empty()) {
    auto out = open_output(common.out);
    verify::write_report_csv(reports, out);
  }
  for (const auto& r : reports)
    if (!r.passed()) return kCheckFailure;
  return kOk;
}

int cmd_toy(const Common& common) {
  const fs::path dir = common.out.empty() ? expcli::default_output_dir() : fs::path(common.out);
  const std::uint64_t seed = common.seed.value_or(0);

  auto gd = [&](double lr) {
    expcli::ExperimentConfig c;
    c.landscape.init = {0.5, 0.5};
    c.optimizer.lr.base = lr;
    c.run.steps = 500;
    c.run.seed = seed;
    return c;
  };
  int status = kOk;
  for (const auto& [lr, name] : {std::pair{1.0, "toy_gd_lr1.csv"}, std::pair{2.0, "toy_gd_lr2.csv"}}) {
    const auto log = expcli::run(gd(lr));
    auto out = open_output(dir / name);
    expcli::write_csv(log, out);
    std::cout << name << ": " << expcli::to_string(log.status) << " after " << log.final_step << " steps\n";
  }

  expcli::ExperimentConfig base;
  base.landscape.init = {2.0, 1.0};
  base.optimizer.lr.base = 0.5;
  base.run.steps = 2000;
  base.run.seed = seed;
  auto out = open_output(dir / "toy_ire_kappa.csv");
  bool header = false;
  for (double kappa : {0.0, 1.0, 5.0, 10.0, 100.0}) {
    auto c = base;
    ire::IreConfig ic;
    ic.kappa = kappa;
    ic.gamma = 0.5;
    ic.refresh_period = 1;
    ic.estimator = ire::Estimator::ExactDiag;
    c.ire = ic;
    const auto log = expcli::run(c);
    std::istringstream csv(expcli::to_csv(log));
    std::string line;
    std::getline(csv, line);
    if (!header) {
      out << "kappa," << line << '\n';
      header = true;
    }
    while (std::getline(csv, line)) out << format_double(kappa) << ',' << line << '\n';
    std::cout << "toy_ire_kappa.csv: kappa " << kappa << " " << expcli::to_string(log.status) << '\n';
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"irelab: implicit regularization enhancement lab"};
  app.require_subcommand(1);
  Common common;
  std::vector<std::string> suites;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", common.config, "Experiment config file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Master seed (overrides run.seed)");
    sub->add_option("--out", common.out, "Output path");
    sub->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "Run one configured trajectory and write its CSV log");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "Run the configured grid and write a summary CSV");
  add_common(sweep, true);
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
  add_common(verify_cmd, false);
  verify_cmd->add_option("suites", suites, "Suite names, or 'all'")->required();
  auto* toy = app.add_subcommand("toy", "Write the Toy2D reproduction CSVs");
  add_common(toy, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(common);
    if (sweep->parsed()) return cmd_sweep(common);
    if (verify_cmd->parsed()) return cmd_verify(common, suites);
    return cmd_toy(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
}
