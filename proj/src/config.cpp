#include "frameflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "frameflow/errors.hpp"

namespace frameflow {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool is_known_key(const std::string& key) {
  const auto& keys = config_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

[[noreturn]] void bad_value(const std::string& key, const std::string& reason) {
  throw ConfigError(key + ": " + reason);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) bad_value(key, "'" + t + "' is not a number");
  if (!std::isfinite(value)) bad_value(key, "value must be finite");
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) bad_value(key, "'" + t + "' is not an integer");
  return value;
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    bad_value(key, "'" + t + "' is not an unsigned 64-bit integer");
  }
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) bad_value(key, "empty list");
  return out;
}

Vec parse_e0(const std::string& text, int n) {
  const std::string t = trim(text);
  if (!t.empty() && t[0] == 'e' && t.find(',') == std::string::npos) {
    const long long k = parse_integer("e0", t.substr(1));
    if (k < 1 || k > n) bad_value("e0", "index must be between 1 and " + std::to_string(n));
    return unit_vector(n, static_cast<int>(k - 1));
  }
  const std::vector<double> v = parse_list("e0", t);
  if (static_cast<int>(v.size()) != n) bad_value("e0", "expected " + std::to_string(n) + " components");
  Vec e(n);
  for (int i = 0; i < n; ++i) e(i) = v[static_cast<std::size_t>(i)];
  if (std::abs(e.norm() - 1.0) > 1e-9) bad_value("e0", "must be a unit vector");
  return e;
}

AlgebraVec parse_abar(const std::string& text, int n) {
  const int count = algebra_dim(n);
  const std::string t = trim(text);
  if (t == "0") return AlgebraVec::Zero(count);
  const std::vector<double> v = parse_list("abar", t);
  if (static_cast<int>(v.size()) != count) {
    bad_value("abar", "expected " + std::to_string(count) + " coefficients in the canonical so(n) basis, or 0");
  }
  AlgebraVec a(count);
  for (int k = 0; k < count; ++k) a(k) = v[static_cast<std::size_t>(k)];
  return a;
}

const std::string* find(const KeyMap& keys, const std::string& key) {
  const auto it = keys.find(key);
  return it == keys.end() ? nullptr : &it->second;
}

void require(const KeyMap& keys, const std::string& key, const std::string& command) {
  if (!find(keys, key)) throw ConfigError(key + ": required for '" + command + "' but missing");
}

KeyMap command_defaults(const std::string& command) {
  KeyMap d{{"e0", "e1"}, {"abar", "0"}, {"h0", "0.1"}, {"renorm_every", "1"}, {"output_times", "21"},
           {"output_dir", "frameflow_out"}};
  if (command == "homogenize") {
    d.merge(KeyMap{{"manifold", "euclidean:2"}, {"epsilon", "0.01"}, {"t_final", "1"}, {"paths", "2000"}});
  } else if (command == "sweep") {
    d.merge(KeyMap{{"manifold", "euclidean:2"}, {"epsilon_list", "0.2,0.1,0.05,0.02"}, {"t_final", "1"},
                   {"paths", "2000"}});
  } else if (command == "simulate") {
    d.merge(KeyMap{{"paths", "1"}});
  } else if (command == "ergodic") {
    d.merge(KeyMap{{"t_final", "400"}, {"paths", "200"}});
  }
  return d;
}

}  // namespace

KeyMap parse_config_text(const std::string& text) {
  KeyMap out;
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (!is_known_key(key)) throw ConfigError(key + ": unknown key (line " + std::to_string(number) + ")");
    if (out.contains(key)) throw ConfigError(key + ": duplicate key (line " + std::to_string(number) + ")");
    out.emplace(key, value);
  }
  return out;
}

KeyMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

KeyMap merge_keys(KeyMap base, const KeyMap& overrides) {
  for (const auto& [k, v] : overrides) base.insert_or_assign(k, v);
  return base;
}

SimConfig RunConfig::sim_config() const {
  SimConfig cfg = SimConfig::defaults(chart, epsilon, t_final, seed);
  cfg.e0 = e0;
  cfg.drift = drift;
  cfg.h0 = h0;
  cfg.renorm_every = renorm_every;
  cfg.output_times = output_times;
  return cfg;
}

EnsembleSpec RunConfig::ensemble_spec() const {
  EnsembleSpec spec;
  spec.base = sim_config();
  spec.paths = paths;
  spec.epsilon_list = epsilon_list;
  spec.oracle = oracle;
  return spec;
}

RunConfig build_run_config(const std::string& command, const KeyMap& given, const std::optional<std::string>& env_seed) {
  for (const auto& [k, v] : given) {
    if (!is_known_key(k)) throw ConfigError(k + ": unknown key");
  }
  const KeyMap keys = merge_keys(command_defaults(command), given);
  RunConfig rc;
  rc.command = command;

  const bool algebraic = command == "verify-algebra" || command == "haar" || command == "ergodic";
  if (const auto* v = find(given, "dim")) {
    const long long d = parse_integer("dim", *v);
    if (d < 2 || d > kMaxDim) bad_value("dim", "must be between 2 and " + std::to_string(kMaxDim));
    rc.dim = static_cast<int>(d);
    rc.dim_given = true;
  }

  if (algebraic) {
    if (!rc.dim_given) rc.dim = 3;
  } else {
    require(keys, "manifold", command);
    rc.manifold = keys.at("manifold");
    rc.chart = resolve_chart(rc.manifold);
    if (rc.dim_given && rc.dim != rc.chart->dim()) {
      bad_value("dim", "conflicts with manifold " + rc.manifold + " of dimension " + std::to_string(rc.chart->dim()));
    }
    rc.dim = rc.chart->dim();
  }
  const int n = rc.dim;

  if (const auto* v = find(keys, "seed")) {
    rc.seed = parse_seed("seed", *v);
  } else if (env_seed) {
    rc.seed = parse_seed("FRAMEFLOW_SEED", *env_seed);
  }

  rc.e0 = parse_e0(keys.at("e0"), n);
  rc.abar = parse_abar(keys.at("abar"), n);
  rc.drift = SkewMatrix(canonical_basis(n).combine(rc.abar));
  rc.h0 = parse_double("h0", keys.at("h0"));
  if (!(rc.h0 > 0.0) || rc.h0 > 0.1) bad_value("h0", "must lie in (0, 0.1]");
  const long long renorm = parse_integer("renorm_every", keys.at("renorm_every"));
  if (renorm < 1) bad_value("renorm_every", "must be at least 1");
  rc.renorm_every = static_cast<int>(renorm);
  rc.output_dir = keys.at("output_dir");
  if (const auto* v = find(keys, "oracle")) {
    if (*v != "auto") rc.oracle = parse_oracle(*v);
  }
  if (const auto* v = find(keys, "paths")) {
    const long long p = parse_integer("paths", *v);
    if (p < 1) bad_value("paths", "must be positive");
    rc.paths = static_cast<int>(p);
  }

  if (command == "simulate" || command == "homogenize") {
    require(keys, "epsilon", command);
    require(keys, "t_final", command);
    rc.epsilon = parse_double("epsilon", keys.at("epsilon"));
    if (!(rc.epsilon > 0.0)) bad_value("epsilon", "epsilon must be positive");
  } else if (command == "sweep") {
    require(keys, "epsilon_list", command);
    require(keys, "t_final", command);
    rc.epsilon_list = parse_list("epsilon_list", keys.at("epsilon_list"));
    for (std::size_t k = 0; k < rc.epsilon_list.size(); ++k) {
      if (!(rc.epsilon_list[k] > 0.0)) bad_value("epsilon_list", "entries must be positive");
      if (k > 0 && !(rc.epsilon_list[k] < rc.epsilon_list[k - 1])) bad_value("epsilon_list", "must be strictly decreasing");
    }
    rc.epsilon = rc.epsilon_list.front();
  }
  if (const auto* v = find(keys, "t_final")) {
    rc.t_final = parse_double("t_final", *v);
    if (!(rc.t_final > 0.0)) bad_value("t_final", "must be positive");
  }

  if (!algebraic) {
    const std::string& ot = keys.at("output_times");
    if (ot.find(',') == std::string::npos) {
      const long long count = parse_integer("output_times", ot);
      if (count < 2) bad_value("output_times", "a count must be at least 2");
      rc.output_times = equispaced_times(rc.t_final, static_cast<int>(count));
    } else {
      rc.output_times = parse_list("output_times", ot);
    }
    if (command == "simulate") {
      rc.sim_config().validate();
      make_time_grid(rc.sim_config());
    } else {
      const EnsembleSpec spec = rc.ensemble_spec();
      spec.validate();
      make_time_grid(spec.base);
    }
  }
  return rc;
}

}  // namespace frameflow
