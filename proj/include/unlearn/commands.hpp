// Copyright 2026 The unlearn Authors
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

#ifndef UNLEARN_COMMANDS_HPP_
#define UNLEARN_COMMANDS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace unlearn::commands {

// Configuration shared by all subcommands. Negative numeric values and
// empty strings mean "not set"; each command validates the fields it needs
// and reports the missing field by name. File values are overridden by
// command-line flags before dispatch.
struct ExperimentConfig {
  // Input files (CSV).
  std::string x_path;
  std::string y_path;
  std::string x_test_path;
  std::string y_test_path;
  std::string audit_p_path;  // representation rows of unlearned runs
  std::string audit_q_path;  // representation rows of retrained runs
  std::string out_dir = ".";

  // Objective and dynamics.
  double lambda = -1.0;
  int t = -1;
  int k = -1;
  double sigma_learn = -1.0;
  bool append_bias = false;
  bool conservative_m = false;

  // Privacy budget. delta defaults to 1/n once the dataset is known,
  // delta_s to delta / 2.
  double epsilon = -1.0;
  std::vector<double> epsilon_grid;
  double delta = -1.0;
  double delta_s = -1.0;

  // Point selection: explicit indices, or quantiles of the pointwise
  // gradient norm at the end of one reference training run. Empty means
  // every point. `point` names the single deletion target of `unlearn`.
  std::vector<int> points;
  std::vector<double> point_quantiles;
  int point = -1;

  // Monte Carlo and seeding.
  int runs = 1;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;

  // Sweep grid and utility metric ("accuracy" decodes argmax over the d
  // outputs, "mse" reports per-row squared error).
  std::vector<int> k_grid;
  std::string metric = "accuracy";

  // Oracle uniform baseline: a single global sensitivity bound C.
  std::string baseline;
  double baseline_c = -1.0;

  // Trade-off curve grid for the auditor.
  int audit_grid = 99;
};

// Builds a config from parsed "key = value" pairs. Unknown keys, duplicate
// meanings, and malformed numbers are rejected with the offending field
// named. Throws std::invalid_argument.
ExperimentConfig parse_config(
    const std::map<std::string, std::string>& values);

// read_key_value_file followed by parse_config.
ExperimentConfig load_config(const std::string& path);

// Renders a config as sorted "key = value" lines with round-trip numeric
// formatting. Unset fields are omitted. parse_config(serialize_config(c))
// reproduces c.
std::string serialize_config(const ExperimentConfig& config);

// Each command writes its files under config.out_dir (created if missing)
// plus a report.json, and returns the report. Reports embed the resolved
// configuration and a report_hash over every field except the wall time;
// rerunning a command from its embedded config reproduces the hash.
nlohmann::json cmd_calibrate(const ExperimentConfig& config);
nlohmann::json cmd_unlearn(const ExperimentConfig& config);
nlohmann::json cmd_sensitivity_map(const ExperimentConfig& config);
nlohmann::json cmd_sweep(const ExperimentConfig& config);
nlohmann::json cmd_audit(const ExperimentConfig& config);
nlohmann::json cmd_loo_check(const ExperimentConfig& config);

}  // namespace unlearn::commands

#endif  // UNLEARN_COMMANDS_HPP_
