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

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "unlearn/commands.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string baseline;
  double C = -1.0;
  bool append_bias = false;
  int point = -1;
};

void add_common_options(CLI::App* cmd, Overrides& overrides) {
  cmd->add_option("--config", overrides.config_path,
                  "key = value configuration file");
  cmd->add_option("--seed", overrides.seed, "master seed (overrides config)");
  cmd->add_option("--out-dir", overrides.out_dir,
                  "output directory (overrides config)");
  cmd->add_option("--baseline", overrides.baseline,
                  "'uniform' adds the single-global-bound baseline")
      ->check(CLI::IsMember({"uniform"}));
  cmd->add_option("--C", overrides.C,
                  "global per-step gradient-norm bound for --baseline uniform");
  cmd->add_flag("--append-bias", overrides.append_bias,
                "append a constant-1 feature column to X (and X_test)");
}

unlearn::commands::ExperimentConfig resolve(CLI::App* cmd,
                                            const Overrides& overrides) {
  unlearn::commands::ExperimentConfig config;
  if (!overrides.config_path.empty()) {
    config = unlearn::commands::load_config(overrides.config_path);
  }
  if (cmd->count("--seed") > 0) config.seed = overrides.seed;
  if (cmd->count("--out-dir") > 0) config.out_dir = overrides.out_dir;
  if (cmd->count("--baseline") > 0) config.baseline = overrides.baseline;
  if (cmd->count("--C") > 0) config.baseline_c = overrides.C;
  if (cmd->count("--append-bias") > 0) config.append_bias = true;
  if (cmd->get_option_no_throw("--point") != nullptr &&
      cmd->count("--point") > 0) {
    config.point = overrides.point;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Certified per-instance unlearning for ridge regression trained by "
      "noisy gradient descent"};
  app.require_subcommand(1);

  Overrides overrides;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "Per-point unlearning-noise calibration (analytic)");
  CLI::App* unlearn_cmd = app.add_subcommand(
      "unlearn", "Learn, then unlearn one point with a certificate");
  unlearn_cmd->add_option("--point", overrides.point,
                          "index of the point to delete");
  CLI::App* sensitivity_map = app.add_subcommand(
      "sensitivity-map", "Per-point per-step sensitivity bound matrix");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Utility and noise across (point, epsilon, K) grids");
  CLI::App* audit = app.add_subcommand(
      "audit", "Empirical trade-off curve, AUC, and GDP fit from run files");
  CLI::App* loo_check = app.add_subcommand(
      "loo-check", "Closed-form leave-one-out versus explicit retraining");
  for (CLI::App* cmd :
       {calibrate, unlearn_cmd, sensitivity_map, sweep, audit, loo_check}) {
    add_common_options(cmd, overrides);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    const unlearn::commands::ExperimentConfig config =
        resolve(active, overrides);
    nlohmann::json report;
    if (active == calibrate) {
      report = unlearn::commands::cmd_calibrate(config);
      std::cout << "calibrated " << report["records"].size() << " rows";
    } else if (active == unlearn_cmd) {
      report = unlearn::commands::cmd_unlearn(config);
      std::cout << "unlearned point " << config.point << ": sigma_unlearn = "
                << report["certificate"]["sigma_unlearn"].get<double>()
                << ", achieved epsilon = "
                << report["certificate"]["epsilon_achieved"].get<double>();
    } else if (active == sensitivity_map) {
      report = unlearn::commands::cmd_sensitivity_map(config);
      std::cout << "sensitivity map written";
    } else if (active == sweep) {
      report = unlearn::commands::cmd_sweep(config);
      std::cout << "swept " << report["records"].size() << " cells";
    } else if (active == audit) {
      report = unlearn::commands::cmd_audit(config);
      std::cout << "audit: auc = " << report["auc"].get<double>()
                << ", mu_hat = " << report["mu_hat"].get<double>()
                << ", epsilon_hat = " << report["epsilon_hat"].get<double>();
    } else {
      report = unlearn::commands::cmd_loo_check(config);
      std::cout << "loo-check: max relative deviation = "
                << report["max_relative_deviation"].get<double>();
    }
    std::cout << "\nreport: " << config.out_dir << "/report.json\n";
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return 0;
}
