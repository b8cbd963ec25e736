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

#include "irelab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "irelab/config.hpp"
#include "irelab/experiment.hpp"
#include "irelab/format.hpp"
#include "irelab/ire.hpp"
#include "irelab/landscapes.hpp"
#include "irelab/linalg.hpp"
#include "irelab/parallel.hpp"
#include "irelab/rng.hpp"
#include "irelab/theory.hpp"

namespace irelab::verify {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

Check at_most(std::string name, double x, double bound) {
  return {std::move(name), x, "<= " + num(bound), x <= bound};
}

Check at_least(std::string name, double x, double bound) {
  return {std::move(name), x, ">= " + num(bound), x >= bound};
}

Check within(std::string name, double x, double lo, double hi) {
  return {std::move(name), x, "in [" + num(lo) + ", " + num(hi) + "]", x >= lo && x <= hi};
}

Check equals(std::string name, double x, double expected) {
  return {std::move(name), x, "== " + num(expected), x == expected};
}

Check relative(std::string name, double x, double target, double tol) {
  const double rel = std::abs(x / target - 1.0);
  return {std::move(name), x, "within " + num(100.0 * tol) + "% of " + num(target), rel <= tol};
}

using Body = std::function<void(CriterionReport&)>;

CriterionReport timed(int id, std::string title, double budget_seconds, const Body& body) {
  CriterionReport report;
  report.id = id;
  report.title = std::move(title);
  const auto start = std::chrono::steady_clock::now();
  try {
    body(report);
  } catch (const std::exception& e) {
    report.error = e.what();
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.checks.push_back(at_most("runtime_s", report.seconds, budget_seconds));
  return report;
}

expcli::ExperimentConfig toy_config(double lr, std::int64_t steps, Vector init) {
  expcli::ExperimentConfig c;
  c.landscape.kind = "toy2d";
  c.landscape.init.assign(init.data(), init.data() + init.size());
  c.optimizer.kind = optim::OptimizerKind::GD;
  c.optimizer.lr.base = lr;
  c.run.steps = steps;
  c.run.log_every = steps;
  c.run.log_trace = false;
  c.run.log_distance = false;
  return c;
}

}  // namespace

bool CriterionReport::passed() const noexcept {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool SuiteReport::passed() const noexcept {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionReport& c) { return c.passed(); });
}

CriterionReport toy_sharpness(const Options&) {
  return timed(1, "toy: final trace non-increasing in kappa", 1.0, [](CriterionReport& r) {
    const std::vector<double> kappas{0.0, 1.0, 5.0, 10.0, 100.0};
    const Toy2D toy;
    std::vector<double> traces, u;
    for (double kappa : kappas) {
      auto c = toy_config(0.5, 2000, Vector{{2.0, 1.0}});
      ire::IreConfig ic;
      ic.kappa = kappa;
      ic.gamma = 0.5;
      ic.refresh_period = 1;
      ic.estimator = ire::Estimator::ExactDiag;
      c.ire = ic;
      const auto log = expcli::run(c);
      const bool ok = log.status != expcli::RunStatus::Diverged;
      traces.push_back(ok ? theory::trace_hessian(toy, log.final_theta) : kNaN);
      u.push_back(ok ? log.final_theta[0] : kNaN);
      r.checks.push_back({"final_trace_kappa_" + num(kappa), traces.back(), "finite", std::isfinite(traces.back())});
    }
    double increases = 0.0;
    for (std::size_t i = 1; i < traces.size(); ++i)
      if (!(traces[i] <= traces[i - 1])) increases += 1.0;
    r.checks.push_back(equals("trace_increases", increases, 0.0));
    r.checks.push_back(at_most("abs_u_final_kappa_100", std::abs(u.back()), 0.05));
    r.checks.push_back(at_least("abs_u_final_kappa_0", std::abs(u.front()), 0.5));
  });
}

CriterionReport toy_divergence(const Options&) {
  return timed(2, "toy: lr 2 diverges, lr 1 converges", 1.0, [](CriterionReport& r) {
    const auto unstable = expcli::run(toy_config(2.0, 500, Vector{{0.5, 0.5}}));
    const bool diverged = unstable.status == expcli::RunStatus::Diverged;
    r.checks.push_back({"lr2_diverged_by_step", diverged ? static_cast<double>(unstable.final_step) : kNaN,
                        "diverged within 500 steps", diverged && unstable.final_step <= 500});
    const Toy2D toy;
    const auto stable = expcli::run(toy_config(1.0, 500, Vector{{0.5, 0.5}}));
    const double loss = stable.status == expcli::RunStatus::Diverged ? kNaN : toy.loss(stable.final_theta);
    r.checks.push_back(at_most("lr1_final_loss", loss, 1e-10));
  });
}

CriterionReport mask_properties(const Options& options) {
  return timed(3, "masks: random cases against a sort oracle", 1.0, [&](CriterionReport& r) {
    constexpr int kCases = 1000;
    int failures = 0, rejected = 0;
    for (int c = 0; c < kCases; ++c) {
      CounterRng rng = CounterRng::stream(options.seed, static_cast<std::uint64_t>(c));
      const auto p = static_cast<Index>(1 + rng.below(64));
      Vector h(p);
      const auto mode = rng.below(3);
      for (Index i = 0; i < p; ++i) {
        if (mode == 0) h[i] = rng.normal();
        else if (mode == 1) h[i] = static_cast<double>(rng.below(7)) - 3.0;
        else h[i] = (rng.below(2) ? 1.0 : -1.0) * 0.5;
      }
      double gamma;
      if (p > 1 && rng.below(4) == 0)
        gamma = static_cast<double>(1 + rng.below(static_cast<std::uint64_t>(p - 1))) / static_cast<double>(p);
      else
        gamma = rng.uniform();

      Index k = 0;
      while (static_cast<double>(k + 1) <= static_cast<double>(p) * gamma + 1e-9) ++k;
      std::vector<Index> order(static_cast<std::size_t>(p));
      std::iota(order.begin(), order.end(), Index{0});
      std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double ha = std::abs(h[a]), hb = std::abs(h[b]);
        return ha != hb ? ha < hb : a < b;
      });

      bool ok = true;
      try {
        const auto mask = ire::build_mask(h, gamma);
        if (k == 0 || gamma <= 0.0) {
          ok = false;
        } else {
          std::vector<bool> expected(static_cast<std::size_t>(p), false);
          for (Index j = 0; j < k; ++j) expected[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] = true;
          ok = mask.count == k && mask.selected == expected &&
               mask.threshold == std::abs(h[order[static_cast<std::size_t>(k - 1)]]);
        }
      } catch (const std::invalid_argument&) {
        ok = k == 0 || gamma <= 0.0;
        ++rejected;
      }
      if (!ok) ++failures;
    }
    r.checks.push_back(equals("failed_cases", failures, 0.0));
    r.checks.push_back({"rejected_cases", static_cast<double>(rejected), "informational", true});
  });
}

CriterionReport fisher_unbiasedness(const Options& options) {
  return timed(4, "fisher: effective and per-sample diagonal Fisher agree", 60.0, [&](CriterionReport& r) {
    const SoftmaxModel model = SoftmaxModel::default_instance();
    const Vector theta = model.initial_point(0, 0.5);
    const Index p = model.dim();
    const Index batch = model.num_samples();
    constexpr std::int64_t kDraws = 100000, kChunk = 1000, kChunks = kDraws / kChunk;

    struct Partial {
      Vector sum_diff, sum_diff_sq, sum_eff, sum_per_sample;
    };
    std::vector<Partial> partials(static_cast<std::size_t>(kChunks));
    parallel_for(kChunks, options.jobs, [&](std::int64_t chunk) {
      Partial acc{Vector::Zero(p), Vector::Zero(p), Vector::Zero(p), Vector::Zero(p)};
      for (std::int64_t d = chunk * kChunk; d < (chunk + 1) * kChunk; ++d) {
        CounterRng rng = CounterRng::stream(options.seed, static_cast<std::uint64_t>(d));
        const auto labels = model.sample_labels(theta, rng);
        Vector mean_grad = Vector::Zero(p);
        Vector per_sample = Vector::Zero(p);
        for (Index b = 0; b < batch; ++b) {
          const Vector g = model.label_grad(b, theta, labels[static_cast<std::size_t>(b)]);
          mean_grad += g;
          per_sample += g.cwiseProduct(g);
        }
        mean_grad /= static_cast<double>(batch);
        per_sample /= static_cast<double>(batch);
        const Vector eff = static_cast<double>(batch) * mean_grad.cwiseProduct(mean_grad);
        const Vector diff = eff - per_sample;
        acc.sum_diff += diff;
        acc.sum_diff_sq += diff.cwiseProduct(diff);
        acc.sum_eff += eff;
        acc.sum_per_sample += per_sample;
      }
      partials[static_cast<std::size_t>(chunk)] = std::move(acc);
    });

    Partial total{Vector::Zero(p), Vector::Zero(p), Vector::Zero(p), Vector::Zero(p)};
    for (const auto& part : partials) {
      total.sum_diff += part.sum_diff;
      total.sum_diff_sq += part.sum_diff_sq;
      total.sum_eff += part.sum_eff;
      total.sum_per_sample += part.sum_per_sample;
    }
    const double n = static_cast<double>(kDraws);
    double outside = 0.0, worst = 0.0;
    for (Index i = 0; i < p; ++i) {
      const double mean = total.sum_diff[i] / n;
      const double var = std::max(0.0, (total.sum_diff_sq[i] / n - mean * mean) * n / (n - 1.0));
      const double se = std::sqrt(var / n);
      const double z = se > 0.0 ? std::abs(mean) / se : (mean == 0.0 ? 0.0 : kNaN);
      if (!(z <= 3.0)) outside += 1.0;
      worst = std::max(worst, std::isnan(z) ? std::numeric_limits<double>::infinity() : z);
    }
    r.checks.push_back(equals("coordinates_outside_3se", outside, 0.0));
    r.checks.push_back({"max_abs_z", worst, "informational", true});
  });
}

CriterionReport estimator_overhead(const Options& options) {
  return timed(5, "overhead: Fisher refreshes cost one gradient each", 30.0, [&](CriterionReport& r) {
    constexpr std::int64_t kSteps = 10000, kPeriod = 10;
    expcli::ExperimentConfig base;
    base.landscape.kind = "softmax";
    base.optimizer.kind = optim::OptimizerKind::GD;
    base.optimizer.lr.base = 0.1;
    base.run.steps = kSteps;
    base.run.log_every = kSteps;
    base.run.log_trace = false;
    base.run.log_distance = false;
    base.run.seed = options.seed;

    const auto plain = expcli::run(base);
    r.checks.push_back(equals("base_grad_evals", static_cast<double>(plain.grad_evals), kSteps));

    for (std::int64_t warmup : {std::int64_t{0}, std::int64_t{500}}) {
      auto c = base;
      ire::IreConfig ic;
      ic.estimator = ire::Estimator::Fisher;
      ic.refresh_period = kPeriod;
      if (warmup > 0) ic.warmup_steps = warmup;
      c.ire = ic;
      const auto log = expcli::run(c);
      const std::int64_t expected = kSteps + (kSteps - warmup + kPeriod - 1) / kPeriod;
      r.checks.push_back(equals("ire_grad_evals_warmup_" + std::to_string(warmup),
                                static_cast<double>(log.grad_evals), static_cast<double>(expected)));
    }
  });
}

namespace {

CriterionReport drift_criterion(int id, std::string title, double budget, theory::SamVariant variant,
                                double min_cosine, double ratio_lo, double ratio_hi, const Options& options) {
  return timed(id, std::move(title), budget, [&](CriterionReport& r) {
    theory::DriftConfig cfg;
    cfg.base.variant = variant;
    cfg.base.lr = 0.01;
    cfg.base.rho = 0.05;
    cfg.base.seed = options.seed;
    cfg.kappas = {0.0, 4.0, 9.0};
    cfg.repetitions = 2000;
    cfg.jobs = options.jobs;

    theory::DriftReport report;
    if (variant == theory::SamVariant::Average) {
      const auto valley = QuadraticValley::default_instance();
      report = theory::measure_drift(valley, QuadraticValley::default_start(), cfg);
    } else {
      const auto regression = InterpolatingRegression::default_instance();
      report = theory::measure_drift(regression, InterpolatingRegression::default_start(), cfg);
    }
    std::vector<double> magnitudes;
    for (const auto& e : report.estimates) {
      r.checks.push_back(at_least("cosine_kappa_" + num(e.kappa), e.cosine, min_cosine));
      magnitudes.push_back(e.magnitude);
    }
    r.checks.push_back(within("magnitude_ratio_kappa9_kappa0", magnitudes.back() / magnitudes.front(), ratio_lo,
                              ratio_hi));
    r.checks.push_back(at_least("origin_fit_r2", theory::origin_fit_r2(cfg.kappas, magnitudes), 0.95));
  });
}

}  // namespace

CriterionReport drift_average(const Options& options) {
  return drift_criterion(6, "drift-average: valley drift follows the Riemannian trace gradient", 300.0,
                         theory::SamVariant::Average, 0.9, 8.0, 12.0, options);
}

CriterionReport drift_standard(const Options& options) {
  return drift_criterion(7, "drift-standard: regression drift follows the Riemannian trace gradient", 600.0,
                         theory::SamVariant::Standard, 0.85, 7.0, 13.0, options);
}

CriterionReport long_horizon_stability(const Options& options) {
  return timed(8, "stability: kappa = floor(1/rho) stays near the manifold", 300.0, [&](CriterionReport& r) {
    const auto valley = QuadraticValley::default_instance();
    constexpr double kRho = 0.05;
    std::vector<double> max_dist;
    std::vector<bool> diverged;
    for (double kappa : {0.0, std::floor(1.0 / kRho)}) {
      theory::TwoPhaseConfig cfg;
      cfg.lr = 0.01;
      cfg.rho = kRho;
      cfg.kappa = kappa;
      cfg.steps = 10000;
      cfg.seed = options.seed;
      const auto result = theory::two_phase_run(valley, QuadraticValley::default_start(), cfg);
      double m = 0.0;
      for (const auto& row : result.rows) m = std::max(m, row.dist);
      max_dist.push_back(result.diverged ? kNaN : m);
      diverged.push_back(result.diverged);
    }
    r.checks.push_back({"max_dist_kappa_0", max_dist[0], "informational", true});
    r.checks.push_back(at_most("max_dist_kappa_20", max_dist[1], 2.0 * max_dist[0]));
    r.checks.push_back(equals("diverged_kappa_20", diverged[1] ? 1.0 : 0.0, 0.0));
  });
}

CriterionReport sde_dynamics(const Options& options) {
  return timed(9, "sde: equilibrium variance and drift of u", 120.0, [&](CriterionReport& r) {
    constexpr int kPaths = 200;
    constexpr double kLr = 0.01, kSigma = 1.0, kBurn = 5.0, kWindow = 20.0;

    struct PathStats {
      double v_sq = 0.0;
      std::int64_t v_count = 0;
      double du = 0.0;
      double u_mean = 0.0;
    };
    auto ensemble = [&](double kappa) {
      std::vector<PathStats> stats(kPaths);
      parallel_for(kPaths, options.jobs, [&](std::int64_t i) {
        theory::SdeConfig cfg;
        cfg.h = [](double u) { return 1.0 + u * u; };
        cfg.dh = [](double u) { return 2.0 * u; };
        cfg.sigma = kSigma;
        cfg.lr = kLr;
        cfg.kappa = kappa;
        cfg.dt = kLr / 20.0;
        cfg.horizon = kBurn + kWindow;
        cfg.record_every = 20;
        CounterRng rng = CounterRng::stream(options.seed, static_cast<std::uint64_t>(i));
        const auto path = theory::sde_simulate(cfg, rng);
        PathStats& s = stats[static_cast<std::size_t>(i)];
        double u_start = kNaN, u_sum = 0.0;
        for (std::size_t k = 0; k < path.time.size(); ++k) {
          if (path.time[k] < kBurn - 1e-9) continue;
          if (std::isnan(u_start)) u_start = path.u[k];
          s.v_sq += path.v[k] * path.v[k];
          u_sum += path.u[k];
          ++s.v_count;
        }
        s.du = (path.u.back() - u_start) / kWindow;
        s.u_mean = u_sum / static_cast<double>(s.v_count);
      });
      return stats;
    };

    // Drift rate c with du/dt = c u, estimated from ensemble means over the window.
    auto rate = [](const std::vector<PathStats>& stats) {
      double du = 0.0, u = 0.0;
      for (const auto& s : stats) {
        du += s.du;
        u += s.u_mean;
      }
      return du / u;
    };

    const auto still = ensemble(0.0);
    const auto boosted = ensemble(9.0);
    double v_sq = 0.0;
    std::int64_t count = 0;
    for (const auto& s : still) {
      v_sq += s.v_sq;
      count += s.v_count;
    }
    const double variance = v_sq / static_cast<double>(count);
    r.checks.push_back(relative("equilibrium_variance_v", variance, kLr * kSigma * kSigma, 0.05));
    const double c0 = rate(still), c9 = rate(boosted);
    r.checks.push_back(relative("drift_rate_kappa_0", c0, -1.0, 0.15));
    r.checks.push_back(relative("drift_rate_kappa_9", c9, -10.0, 0.15));
    r.checks.push_back(relative("drift_ratio_kappa9_kappa0", c9 / c0, 10.0, 0.15));
  });
}

CriterionReport lemma_properties(const Options& options) {
  return timed(10, "lemmas: local exponents and the PL sandwich", 60.0, [&](CriterionReport& r) {
    const auto valley = QuadraticValley::default_instance();
    theory::LemmaConfig cfg;
    cfg.seed = options.seed;
    const Vector z = theory::phi_limit(valley, QuadraticValley::default_start(), cfg.phi);
    const auto report = theory::lemma_property_suite(valley, z, cfg);
    r.checks.push_back(within("projector_gap_exponent", report.projector_exponent, 0.8, 1.2));
    r.checks.push_back(within("projected_grad_exponent", report.projected_grad_exponent, 1.8, 2.2));
    r.checks.push_back(at_least("tangency_exponent", report.tangency_exponent, 1.8));
    r.checks.push_back(equals("sandwich_violations", static_cast<double>(report.violations.size()), 0.0));
  });
}

CriterionReport infrastructure(const Options& options) {
  return timed(11, "infra: eigensolver residuals and reproducible CSV output", 30.0, [&](CriterionReport& r) {
    double worst_residual = 0.0, worst_orthonormality = 0.0;
    for (int c = 0; c < 100; ++c) {
      CounterRng rng = CounterRng::stream(options.seed ^ 0xe16e45ULL, static_cast<std::uint64_t>(c));
      const auto p = static_cast<Index>(1 + rng.below(64));
      Matrix a(p, p);
      for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
      const linalg::SymMatrix s(a);
      const auto e = linalg::sym_eigh(s);
      worst_residual = std::max(worst_residual, linalg::reconstruction_residual(s, e));
      worst_orthonormality = std::max(worst_orthonormality, linalg::orthonormality_residual(e));
    }
    r.checks.push_back(at_most("max_eigen_residual", worst_residual, 1e-8));
    r.checks.push_back(at_most("max_orthonormality_residual", worst_orthonormality, 1e-8));

    auto c = toy_config(0.5, 200, Vector{{2.0, 1.0}});
    c.run.log_every = 1;
    c.run.log_trace = true;
    c.run.log_distance = true;
    c.run.seed = options.seed;
    ire::IreConfig ic;
    ic.kappa = 1.0;
    ic.gamma = 0.5;
    ic.estimator = ire::Estimator::ExactDiag;
    c.ire = ic;
    const std::string first = expcli::to_csv(expcli::run(c));
    const std::string second = expcli::to_csv(expcli::run(c));
    r.checks.push_back(equals("run_csv_differs", first == second ? 0.0 : 1.0, 0.0));

    c.run.steps = 100;
    c.run.log_every = 100;
    c.sweep.kappa = {0.0, 0.5, 1.0, 2.0};
    c.sweep.gamma = {0.5, 0.9};
    const std::string serial = expcli::to_sweep_csv(expcli::sweep(c, 1));
    const std::string parallel = expcli::to_sweep_csv(expcli::sweep(c, std::max(options.jobs, 4)));
    r.checks.push_back(equals("sweep_csv_differs_across_jobs", serial == parallel ? 0.0 : 1.0, 0.0));
  });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"masks",  "fisher",    "toy",  "drift-average", "drift-standard",
                                              "stability", "sde",    "lemmas", "overhead",    "infra"};
  return names;
}

SuiteReport run_suite(std::string_view name, const Options& options) {
  using Fn = CriterionReport (*)(const Options&);
  std::vector<Fn> fns;
  if (name == "masks") fns = {mask_properties};
  else if (name == "fisher") fns = {fisher_unbiasedness};
  else if (name == "toy") fns = {toy_sharpness, toy_divergence};
  else if (name == "drift-average") fns = {drift_average};
  else if (name == "drift-standard") fns = {drift_standard};
  else if (name == "stability") fns = {long_horizon_stability};
  else if (name == "sde") fns = {sde_dynamics};
  else if (name == "lemmas") fns = {lemma_properties};
  else if (name == "overhead") fns = {estimator_overhead};
  else if (name == "infra") fns = {infrastructure};
  else {
    std::string valid;
    for (const auto& n : suite_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown suite '" + std::string(name) + "' (valid: " + valid + ")");
  }
  SuiteReport report;
  report.suite = std::string(name);
  for (Fn fn : fns) report.criteria.push_back(fn(options));
  return report;
}

void write_report(const SuiteReport& report, std::ostream& out) {
  for (const auto& c : report.criteria) {
    out << (c.passed() ? "PASS" : "FAIL") << " [" << report.suite << "] criterion " << c.id << ": " << c.title
        << " (" << num(c.seconds) << " s)\n";
    if (!c.error.empty()) out << "    error: " << c.error << '\n';
    for (const auto& k : c.checks)
      out << "    " << (k.pass ? "ok  " : "FAIL") << ' ' << k.name << " = " << num(k.measured) << " (want "
          << k.expectation << ")\n";
  }
}

void write_report_csv(const std::vector<SuiteReport>& reports, std::ostream& out) {
  write_csv_row(out, {"suite", "criterion", "check", "measured", "expectation", "status"});
  for (const auto& s : reports)
    for (const auto& c : s.criteria) {
      if (!c.error.empty())
        write_csv_row(out, {s.suite, std::to_string(c.id), "error", "", c.error, "fail"});
      for (const auto& k : c.checks)
        write_csv_row(out, {s.suite, std::to_string(c.id), k.name, format_double(k.measured), k.expectation,
                            k.pass ? "pass" : "fail"});
    }
}

}  // namespace irelab::verify
