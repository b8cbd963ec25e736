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

#include "irelab/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "irelab/format.hpp"
#include "irelab/landscapes.hpp"

namespace irelab::expcli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("expected a number, got '" + std::string(s) + "'");
  return x;
}

template <class Int>
Int parse_int(std::string_view s) {
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("expected an integer, got '" + std::string(s) + "'");
  return x;
}

bool parse_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + std::string(s) + "'");
}

template <class T, class Parse>
std::vector<T> parse_list(std::string_view s, Parse parse) {
  std::vector<T> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(parse(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_doubles(std::string_view s) { return parse_list<double>(s, parse_double); }
std::vector<std::int64_t> parse_ints(std::string_view s) {
  return parse_list<std::int64_t>(s, parse_int<std::int64_t>);
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

ire::IreConfig& ire_of(ExperimentConfig& c) {
  if (!c.ire) c.ire.emplace();
  return *c.ire;
}

struct Field {
  std::string key;
  /// Value in canonical form, or nullopt when the key is omitted.
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

using Opt = std::optional<std::string>;

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    auto add = [&](std::string key, auto get, auto set) {
      f.push_back({std::move(key), get, set});
    };
    // landscape
    add("landscape.kind", [](const ExperimentConfig& c) -> Opt { return c.landscape.kind; },
        [](ExperimentConfig& c, std::string_view v) { c.landscape.kind = v; });
    add("landscape.init", [](const ExperimentConfig& c) -> Opt { return join(c.landscape.init); },
        [](ExperimentConfig& c, std::string_view v) { c.landscape.init = parse_doubles(v); });
    add("landscape.valley_p",
        [](const ExperimentConfig& c) -> Opt { return std::to_string(c.landscape.valley_p); },
        [](ExperimentConfig& c, std::string_view v) { c.landscape.valley_p = parse_int<std::int64_t>(v); });
    add("landscape.valley_a", [](const ExperimentConfig& c) -> Opt { return join(c.landscape.valley_a); },
        [](ExperimentConfig& c, std::string_view v) { c.landscape.valley_a = parse_doubles(v); });
    add("landscape.valley_profile",
        [](const ExperimentConfig& c) -> Opt { return c.landscape.valley_profile; },
        [](ExperimentConfig& c, std::string_view v) { c.landscape.valley_profile = v; });
    add("landscape.data_seed",
        [](const ExperimentConfig& c) -> Opt { return std::to_string(c.landscape.data_seed); },
        [](ExperimentConfig& c, std::string_view v) { c.landscape.data_seed = parse_int<std::uint64_t>(v); });
    add("landscape.init_seed",
        [](const ExperimentConfig& c) -> Opt { return std::to_string(c.landscape.init_seed); },
        [](ExperimentConfig& c, std::string_view v) { c.landscape.init_seed = parse_int<std::uint64_t>(v); });
    add("landscape.init_scale",
        [](const ExperimentConfig& c) -> Opt { return format_double(c.landscape.init_scale); },
        [](ExperimentConfig& c, std::string_view v) { c.landscape.init_scale = parse_double(v); });
    add("landscape.radius", [](const ExperimentConfig& c) -> Opt { return format_double(c.landscape.radius); },
        [](ExperimentConfig& c, std::string_view v) { c.landscape.radius = parse_double(v); });

    // optimizer
    add("optimizer.kind",
        [](const ExperimentConfig& c) -> Opt { return std::string(optim::to_string(c.optimizer.kind)); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.kind = optim::parse_optimizer_kind(v); });
    add("optimizer.lr", [](const ExperimentConfig& c) -> Opt { return format_double(c.optimizer.lr.base); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.lr.base = parse_double(v); });
    add("optimizer.schedule",
        [](const ExperimentConfig& c) -> Opt { return std::string(optim::to_string(c.optimizer.lr.kind)); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.lr.kind = optim::parse_schedule_kind(v); });
    add("optimizer.lr_factor",
        [](const ExperimentConfig& c) -> Opt { return format_double(c.optimizer.lr.factor); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.lr.factor = parse_double(v); });
    add("optimizer.milestones",
        [](const ExperimentConfig& c) -> Opt { return join(c.optimizer.lr.milestones); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.lr.milestones = parse_ints(v); });
    add("optimizer.warmup_steps",
        [](const ExperimentConfig& c) -> Opt { return std::to_string(c.optimizer.lr.warmup_steps); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.lr.warmup_steps = parse_int<std::int64_t>(v); });
    add("optimizer.total_steps",
        [](const ExperimentConfig& c) -> Opt { return std::to_string(c.optimizer.lr.total_steps); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.lr.total_steps = parse_int<std::int64_t>(v); });
    add("optimizer.min_lr", [](const ExperimentConfig& c) -> Opt { return format_double(c.optimizer.lr.min_lr); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.lr.min_lr = parse_double(v); });
    add("optimizer.momentum", [](const ExperimentConfig& c) -> Opt { return format_double(c.optimizer.momentum); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.momentum = parse_double(v); });
    add("optimizer.beta1", [](const ExperimentConfig& c) -> Opt { return format_double(c.optimizer.beta1); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.beta1 = parse_double(v); });
    add("optimizer.beta2", [](const ExperimentConfig& c) -> Opt { return format_double(c.optimizer.beta2); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.beta2 = parse_double(v); });
    add("optimizer.eps", [](const ExperimentConfig& c) -> Opt { return format_double(c.optimizer.eps); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.eps = parse_double(v); });
    add("optimizer.weight_decay",
        [](const ExperimentConfig& c) -> Opt { return format_double(c.optimizer.weight_decay); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.weight_decay = parse_double(v); });
    add("optimizer.rho", [](const ExperimentConfig& c) -> Opt { return format_double(c.optimizer.sam_rho); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.sam_rho = parse_double(v); });
    add("optimizer.batch_size",
        [](const ExperimentConfig& c) -> Opt { return std::to_string(c.optimizer.batch_size); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.batch_size = parse_int<std::int64_t>(v); });
    add("optimizer.grad_clip", [](const ExperimentConfig& c) -> Opt { return format_double(c.optimizer.grad_clip); },
        [](ExperimentConfig& c, std::string_view v) { c.optimizer.grad_clip = parse_double(v); });

    // ire (present only when enabled)
    add("ire.enabled", [](const ExperimentConfig& c) -> Opt { return c.ire ? Opt("true") : std::nullopt; },
        [](ExperimentConfig& c, std::string_view v) {
          if (parse_bool(v))
            ire_of(c);
          else
            c.ire.reset();
        });
    add("ire.kappa", [](const ExperimentConfig& c) -> Opt { return c.ire ? Opt(format_double(c.ire->kappa)) : std::nullopt; },
        [](ExperimentConfig& c, std::string_view v) { ire_of(c).kappa = parse_double(v); });
    add("ire.gamma", [](const ExperimentConfig& c) -> Opt { return c.ire ? Opt(format_double(c.ire->gamma)) : std::nullopt; },
        [](ExperimentConfig& c, std::string_view v) { ire_of(c).gamma = parse_double(v); });
    add("ire.refresh_period",
        [](const ExperimentConfig& c) -> Opt { return c.ire ? Opt(std::to_string(c.ire->refresh_period)) : std::nullopt; },
        [](ExperimentConfig& c, std::string_view v) { ire_of(c).refresh_period = parse_int<std::int64_t>(v); });
    add("ire.warmup_steps",
        [](const ExperimentConfig& c) -> Opt {
          return c.ire && c.ire->warmup_steps ? Opt(std::to_string(*c.ire->warmup_steps)) : std::nullopt;
        },
        [](ExperimentConfig& c, std::string_view v) { ire_of(c).warmup_steps = parse_int<std::int64_t>(v); });
    add("ire.warmup_loss",
        [](const ExperimentConfig& c) -> Opt {
          return c.ire && c.ire->warmup_loss ? Opt(format_double(*c.ire->warmup_loss)) : std::nullopt;
        },
        [](ExperimentConfig& c, std::string_view v) { ire_of(c).warmup_loss = parse_double(v); });
    add("ire.estimator",
        [](const ExperimentConfig& c) -> Opt {
          return c.ire ? Opt(std::string(ire::to_string(c.ire->estimator))) : std::nullopt;
        },
        [](ExperimentConfig& c, std::string_view v) { ire_of(c).estimator = ire::parse_estimator(v); });
    add("ire.sharp_dim",
        [](const ExperimentConfig& c) -> Opt { return c.ire ? Opt(std::to_string(c.ire->sharp_dim)) : std::nullopt; },
        [](ExperimentConfig& c, std::string_view v) { ire_of(c).sharp_dim = parse_int<std::int64_t>(v); });

    // run
    add("run.steps", [](const ExperimentConfig& c) -> Opt { return std::to_string(c.run.steps); },
        [](ExperimentConfig& c, std::string_view v) { c.run.steps = parse_int<std::int64_t>(v); });
    add("run.log_every", [](const ExperimentConfig& c) -> Opt { return std::to_string(c.run.log_every); },
        [](ExperimentConfig& c, std::string_view v) { c.run.log_every = parse_int<std::int64_t>(v); });
    add("run.seed", [](const ExperimentConfig& c) -> Opt { return std::to_string(c.run.seed); },
        [](ExperimentConfig& c, std::string_view v) { c.run.seed = parse_int<std::uint64_t>(v); });
    add("run.output", [](const ExperimentConfig& c) -> Opt { return c.run.output; },
        [](ExperimentConfig& c, std::string_view v) { c.run.output = v; });
    add("run.track", [](const ExperimentConfig& c) -> Opt { return join(c.run.track); },
        [](ExperimentConfig& c, std::string_view v) { c.run.track = parse_ints(v); });
    add("run.log_trace", [](const ExperimentConfig& c) -> Opt { return bool_text(c.run.log_trace); },
        [](ExperimentConfig& c, std::string_view v) { c.run.log_trace = parse_bool(v); });
    add("run.log_distance", [](const ExperimentConfig& c) -> Opt { return bool_text(c.run.log_distance); },
        [](ExperimentConfig& c, std::string_view v) { c.run.log_distance = parse_bool(v); });
    add("run.converge_loss", [](const ExperimentConfig& c) -> Opt { return format_double(c.run.converge_loss); },
        [](ExperimentConfig& c, std::string_view v) { c.run.converge_loss = parse_double(v); });

    // sweep
    add("sweep.kappa", [](const ExperimentConfig& c) -> Opt { return join(c.sweep.kappa); },
        [](ExperimentConfig& c, std::string_view v) { c.sweep.kappa = parse_doubles(v); });
    add("sweep.gamma", [](const ExperimentConfig& c) -> Opt { return join(c.sweep.gamma); },
        [](ExperimentConfig& c, std::string_view v) { c.sweep.gamma = parse_doubles(v); });
    add("sweep.refresh_period", [](const ExperimentConfig& c) -> Opt { return join(c.sweep.refresh_period); },
        [](ExperimentConfig& c, std::string_view v) { c.sweep.refresh_period = parse_ints(v); });
    add("sweep.lr", [](const ExperimentConfig& c) -> Opt { return join(c.sweep.lr); },
        [](ExperimentConfig& c, std::string_view v) { c.sweep.lr = parse_doubles(v); });
    add("sweep.rho", [](const ExperimentConfig& c) -> Opt { return join(c.sweep.rho); },
        [](ExperimentConfig& c, std::string_view v) { c.sweep.rho = parse_doubles(v); });
    return f;
  }();
  return table;
}

const std::set<std::string> kLandscapeKinds{"toy2d", "valley", "regression", "softmax"};

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& what) {
    throw ConfigError(field + ": " + what);
  };
  if (!kLandscapeKinds.count(landscape.kind))
    fail("landscape.kind", "unknown landscape '" + landscape.kind +
                               "' (expected toy2d, valley, regression, softmax)");
  if (landscape.kind == "valley") {
    if (landscape.valley_a.empty() ||
        static_cast<std::int64_t>(landscape.valley_a.size()) >= landscape.valley_p)
      fail("landscape.valley_a", "need 1 <= len(valley_a) < valley_p");
    for (double a : landscape.valley_a)
      if (!(a > 0.0)) fail("landscape.valley_a", "entries must be positive");
    if (landscape.valley_profile != "shifted_norm" && landscape.valley_profile != "constant")
      fail("landscape.valley_profile", "expected shifted_norm or constant");
  }
  if (!(landscape.radius > 0.0)) fail("landscape.radius", "must be positive");
  if (!(landscape.init_scale > 0.0)) fail("landscape.init_scale", "must be positive");
  try {
    optimizer.validate();
  } catch (const std::invalid_argument& e) {
    fail("optimizer", e.what());
  }
  if (ire) {
    try {
      ire->validate();
    } catch (const std::invalid_argument& e) {
      fail("ire", e.what());
    }
  }
  if (run.steps < 0) fail("run.steps", "must be >= 0");
  if (run.log_every < 1) fail("run.log_every", "must be >= 1");
  for (auto i : run.track)
    if (i < 0) fail("run.track", "indices must be >= 0");
  if (!ire && (!sweep.kappa.empty() || !sweep.gamma.empty() || !sweep.refresh_period.empty()))
    fail("sweep", "sweeping kappa, gamma or refresh_period requires ire.enabled = true");
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string_view, const Field*> by_key;
  for (const auto& f : fields()) by_key.emplace(f.key, &f);

  ExperimentConfig config;
  std::set<std::string> seen;
  bool ire_disabled = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'section.key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw ConfigError("unknown key '" + key + "'", line_no);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line_no);
    try {
      if (key == "ire.enabled") ire_disabled = !parse_bool(value);
      it->second->set(config, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what(), line_no);
    }
  }
  // ire.enabled = false wins over other ire.* keys regardless of order.
  if (ire_disabled) config.ire.reset();
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    const auto value = f.get(config);
    if (!value) continue;
    const std::string this_section = f.key.substr(0, f.key.find('.'));
    if (!section.empty() && this_section != section) out += '\n';
    section = this_section;
    out += f.key + " = " + *value + '\n';
  }
  return out;
}

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) { return to_text(a) == to_text(b); }

std::unique_ptr<Landscape> make_landscape(const LandscapeSpec& spec) {
  std::unique_ptr<Landscape> out;
  if (spec.kind == "toy2d") {
    out = std::make_unique<Toy2D>();
  } else if (spec.kind == "valley") {
    Vector a = Eigen::Map<const Vector>(spec.valley_a.data(), static_cast<Index>(spec.valley_a.size()));
    out = std::make_unique<QuadraticValley>(spec.valley_profile == "constant"
                                                ? QuadraticValley::constant(spec.valley_p, a)
                                                : QuadraticValley::shifted_norm(spec.valley_p, a));
  } else if (spec.kind == "regression") {
    out = std::make_unique<InterpolatingRegression>(InterpolatingRegression::default_instance());
  } else if (spec.kind == "softmax") {
    out = std::make_unique<SoftmaxModel>(SoftmaxModel::default_instance(spec.data_seed));
  } else {
    throw ConfigError("landscape.kind: unknown landscape '" + spec.kind + "'");
  }
  out->set_admissible_radius(spec.radius);
  return out;
}

Vector initial_point(const LandscapeSpec& spec, const Landscape& landscape) {
  if (!spec.init.empty()) {
    if (static_cast<Index>(spec.init.size()) != landscape.dim())
      throw ConfigError("landscape.init: expected " + std::to_string(landscape.dim()) +
                        " values, got " + std::to_string(spec.init.size()));
    return Eigen::Map<const Vector>(spec.init.data(), static_cast<Index>(spec.init.size()));
  }
  if (spec.kind == "toy2d") return Vector{{2.0, 1.0}};
  if (spec.kind == "valley") {
    CounterRng rng = CounterRng::stream(spec.init_seed, 1);
    return spec.init_scale * rng.normal_vector(landscape.dim());
  }
  if (spec.kind == "regression") return InterpolatingRegression::default_start();
  return dynamic_cast<const SoftmaxModel&>(landscape).initial_point(spec.init_seed, spec.init_scale);
}

std::filesystem::path default_output_dir() {
  const char* env = std::getenv("IRELAB_OUTPUT_DIR");
  if (env && *env) return env;
  return "irelab_out";
}

}  // namespace irelab::expcli
