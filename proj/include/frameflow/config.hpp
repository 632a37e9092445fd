#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "frameflow/homogenize.hpp"

namespace frameflow {

/// Flat key set shared by config files and flags.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"manifold", "dim",        "epsilon", "epsilon_list", "e0",
                                             "abar",     "t_final",    "h0",      "renorm_every", "seed",
                                             "paths",    "output_times", "output_dir", "oracle"};
  return keys;
}

using KeyMap = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, duplicate
/// keys and lines without '=' are ConfigErrors naming the line.
KeyMap parse_config_text(const std::string& text);
KeyMap read_config_file(const std::string& path);

/// `overrides` wins over `base`.
KeyMap merge_keys(KeyMap base, const KeyMap& overrides);

struct RunConfig {
  std::string command;
  std::string manifold;
  std::shared_ptr<const Chart> chart;
  int dim = 0;
  double epsilon = 0.0;
  std::vector<double> epsilon_list;
  Vec e0;
  AlgebraVec abar;  // coefficients in the canonical basis
  SkewMatrix drift = SkewMatrix::zero(2);
  double t_final = 0.0;
  double h0 = 0.1;
  int renorm_every = 1;
  std::uint64_t seed = 0;
  int paths = 1;
  std::vector<double> output_times;
  std::string output_dir = "frameflow_out";
  std::optional<OracleKind> oracle;

  // Flag-only settings.
  int jobs = 0;
  int verbosity = 0;
  bool write_frames = false;
  int samples = 100000;
  bool dim_given = false;

  SimConfig sim_config() const;
  EnsembleSpec ensemble_spec() const;
};

/// Builds a validated configuration for `command` from the merged key map.
/// `env_seed` is the lowest-priority seed source (FRAMEFLOW_SEED).
RunConfig build_run_config(const std::string& command, const KeyMap& keys,
                           const std::optional<std::string>& env_seed = std::nullopt);

}  // namespace frameflow
