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

#include "unlearn/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "unlearn/accounting.hpp"
#include "unlearn/audit.hpp"
#include "unlearn/io.hpp"
#include "unlearn/langevin.hpp"
#include "unlearn/parallel.hpp"
#include "unlearn/ridge.hpp"
#include "unlearn/sensitivity.hpp"

namespace unlearn::commands {
namespace {

using nlohmann::json;

// Stream layout per command, on top of config.stream:
//   + 0              point-selection reference run (quantile strategy)
//   + 1 ...          trajectory streams, laid out by each command
// so resolving quantiles to explicit indices never shifts the streams of
// the actual experiment.
constexpr std::uint64_t kTrajectoryStreamBase = 1;

[[noreturn]] void field_error(const std::string& field,
                              const std::string& message) {
  throw std::invalid_argument("config field '" + field + "': " + message);
}

double parse_double_field(const std::string& field, const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    field_error(field, "cannot parse '" + text + "' as a number");
  }
  return value;
}

long long parse_int_field(const std::string& field, const std::string& text) {
  long long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    field_error(field, "cannot parse '" + text + "' as an integer");
  }
  return value;
}

std::uint64_t parse_uint_field(const std::string& field,
                               const std::string& text) {
  std::uint64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    field_error(field, "cannot parse '" + text + "' as an unsigned integer");
  }
  return value;
}

bool parse_bool_field(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  field_error(field, "expected true/false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto is_space = [](char ch) { return ch == ' ' || ch == '\t'; };
    while (!item.empty() && is_space(item.front())) item.erase(item.begin());
    while (!item.empty() && is_space(item.back())) item.pop_back();
    items.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

std::vector<double> parse_double_list(const std::string& field,
                                      const std::string& text) {
  std::vector<double> values;
  for (const std::string& item : split_list(text)) {
    values.push_back(parse_double_field(field, item));
  }
  return values;
}

std::vector<int> parse_int_list(const std::string& field,
                                const std::string& text) {
  std::vector<int> values;
  for (const std::string& item : split_list(text)) {
    values.push_back(static_cast<int>(parse_int_field(field, item)));
  }
  return values;
}

template <typename T>
std::string join_list(const std::vector<T>& values,
                      std::string (*render)(T)) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += render(values[i]);
  }
  return out;
}

std::string render_double(double value) { return io::format_double(value); }
std::string render_int(int value) { return std::to_string(value); }

// The serialized view of a config: sorted (key, value) pairs, unset fields
// omitted. parse_config of these pairs reproduces the config exactly, which
// is what makes embedded resolved configs rerunnable.
std::vector<std::pair<std::string, std::string>> config_pairs(
    const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> pairs;
  const auto put = [&](const char* key, std::string value) {
    pairs.emplace_back(key, std::move(value));
  };
  if (!c.x_path.empty()) put("x", c.x_path);
  if (!c.y_path.empty()) put("y", c.y_path);
  if (!c.x_test_path.empty()) put("x_test", c.x_test_path);
  if (!c.y_test_path.empty()) put("y_test", c.y_test_path);
  if (!c.audit_p_path.empty()) put("audit_p", c.audit_p_path);
  if (!c.audit_q_path.empty()) put("audit_q", c.audit_q_path);
  put("out_dir", c.out_dir);
  if (c.lambda >= 0.0) put("lambda", render_double(c.lambda));
  if (c.t >= 0) put("t", std::to_string(c.t));
  if (c.k >= 0) put("k", std::to_string(c.k));
  if (c.sigma_learn >= 0.0) put("sigma_learn", render_double(c.sigma_learn));
  put("append_bias", c.append_bias ? "true" : "false");
  put("conservative_m", c.conservative_m ? "true" : "false");
  if (c.epsilon >= 0.0) put("epsilon", render_double(c.epsilon));
  if (!c.epsilon_grid.empty()) {
    put("epsilon_grid", join_list(c.epsilon_grid, render_double));
  }
  if (c.delta >= 0.0) put("delta", render_double(c.delta));
  if (c.delta_s >= 0.0) put("delta_s", render_double(c.delta_s));
  if (!c.points.empty()) put("points", join_list(c.points, render_int));
  if (!c.point_quantiles.empty()) {
    put("point_quantiles", join_list(c.point_quantiles, render_double));
  }
  if (c.point >= 0) put("point", std::to_string(c.point));
  put("runs", std::to_string(c.runs));
  put("seed", std::to_string(c.seed));
  put("stream", std::to_string(c.stream));
  if (!c.k_grid.empty()) put("k_grid", join_list(c.k_grid, render_int));
  put("metric", c.metric);
  if (!c.baseline.empty()) put("baseline", c.baseline);
  if (c.baseline_c >= 0.0) put("baseline_c", render_double(c.baseline_c));
  put("audit_grid", std::to_string(c.audit_grid));
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

json config_json(const ExperimentConfig& config) {
  json object = json::object();
  for (const auto& [key, value] : config_pairs(config)) object[key] = value;
  return object;
}

// ---------------------------------------------------------------------------
// Shared command stages.

struct Instance {
  ridge::Dataset data;
  ridge::RidgeSpec spec;
};

void require_field(bool present, const std::string& command,
                   const std::string& field) {
  if (!present) {
    throw std::invalid_argument(command + ": config field '" + field +
                                "' is required");
  }
}

Eigen::MatrixXd append_bias_column(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd out(X.rows(), X.cols() + 1);
  out.leftCols(X.cols()) = X;
  out.col(X.cols()).setOnes();
  return out;
}

Instance load_instance(const ExperimentConfig& config,
                       const std::string& command) {
  require_field(!config.x_path.empty(), command, "x");
  require_field(!config.y_path.empty(), command, "y");
  require_field(config.lambda >= 0.0, command, "lambda");
  Instance instance;
  instance.data.X = io::read_csv_matrix(config.x_path);
  instance.data.Y = io::read_csv_matrix(config.y_path);
  if (config.append_bias) {
    instance.data.X = append_bias_column(instance.data.X);
  }
  if (instance.data.X.rows() != instance.data.Y.rows()) {
    throw std::invalid_argument(
        command + ": " + config.x_path + " has " +
        std::to_string(instance.data.X.rows()) + " rows but " +
        config.y_path + " has " + std::to_string(instance.data.Y.rows()));
  }
  ridge::SpecOptions options;
  options.conservative_m = config.conservative_m;
  instance.spec = ridge::build_spec(instance.data, config.lambda, options);
  return instance;
}

// delta defaults to 1/n, delta_s to delta/2; the mechanism share is the
// remainder. epsilon stays unset here because some commands sweep a grid.
accounting::PrivacyBudget resolve_budget(const ExperimentConfig& config,
                                         Eigen::Index n,
                                         const std::string& command) {
  accounting::PrivacyBudget budget;
  budget.delta =
      config.delta >= 0.0 ? config.delta : 1.0 / static_cast<double>(n);
  budget.delta_s = config.delta_s >= 0.0 ? config.delta_s : 0.5 * budget.delta;
  budget.delta_m = budget.delta - budget.delta_s;
  if (!(budget.delta > 0.0) || !(budget.delta < 1.0)) {
    throw std::invalid_argument(command + ": delta must lie in (0, 1)");
  }
  if (!(budget.delta_s > 0.0) || !(budget.delta_s < budget.delta)) {
    throw std::invalid_argument(command +
                                ": delta_s must lie in (0, delta)");
  }
  return budget;
}

void validate_point_indices(const std::vector<int>& points, Eigen::Index n,
                            const std::string& command) {
  for (const int i : points) {
    if (i < 0 || i >= n) {
      throw std::invalid_argument(command + ": point index " +
                                  std::to_string(i) + " outside [0, " +
                                  std::to_string(n) + ")");
    }
  }
}

// Explicit indices win; quantiles rank all points by the pointwise gradient
// norm at the end of one reference training run (stream config.stream + 0)
// and pick positions round(q * (n - 1)) of the ascending order, ties broken
// by index. Defaults to every point.
std::vector<int> select_points(const ExperimentConfig& config,
                               const Instance& instance,
                               const std::string& command) {
  const Eigen::Index n = instance.data.n();
  if (!config.points.empty()) {
    if (!config.point_quantiles.empty()) {
      throw std::invalid_argument(
          command + ": give either 'points' or 'point_quantiles', not both");
    }
    validate_point_indices(config.points, n, command);
    return config.points;
  }
  if (!config.point_quantiles.empty()) {
    require_field(config.t >= 1, command, "t");
    require_field(config.sigma_learn > 0.0, command, "sigma_learn");
    langevin::TrajectoryConfig reference;
    reference.T = config.t;
    reference.sigma_learn = config.sigma_learn;
    reference.theta0 =
        Eigen::MatrixXd::Zero(instance.data.p(), instance.data.d());
    reference.seed = {config.seed, config.stream};
    const Eigen::MatrixXd theta_end =
        langevin::run_learn(instance.spec, instance.data, reference)
            .final_theta;

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> norms(order.size());
    for (const int i : order) {
      norms[static_cast<std::size_t>(i)] =
          ridge::pointwise_gradient_norm(instance.data, theta_end, i);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double na = norms[static_cast<std::size_t>(a)];
      const double nb = norms[static_cast<std::size_t>(b)];
      return na != nb ? na < nb : a < b;
    });

    std::vector<int> selected;
    for (const double q : config.point_quantiles) {
      if (!(q >= 0.0) || !(q <= 1.0)) {
        field_error("point_quantiles", "quantile " + io::format_double(q) +
                                           " outside [0, 1]");
      }
      const auto pos = static_cast<std::size_t>(
          std::llround(q * static_cast<double>(n - 1)));
      selected.push_back(order[pos]);
    }
    return selected;
  }
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  return all;
}

std::vector<double> resolve_epsilon_grid(const ExperimentConfig& config,
                                         const std::string& command) {
  std::vector<double> grid =
      config.epsilon_grid.empty() ? std::vector<double>{config.epsilon}
                                  : config.epsilon_grid;
  require_field(!config.epsilon_grid.empty() || config.epsilon >= 0.0,
                command, "epsilon");
  for (const double epsilon : grid) {
    if (!(epsilon > 0.0)) {
      field_error("epsilon", "targets must be > 0");
    }
  }
  return grid;
}

double evaluate_metric(const std::string& metric, const Eigen::MatrixXd& theta,
                       const Eigen::MatrixXd& X_test,
                       const Eigen::MatrixXd& Y_test) {
  const Eigen::MatrixXd predictions = X_test * theta;
  if (metric == "mse") {
    return (predictions - Y_test).squaredNorm() /
           static_cast<double>(X_test.rows());
  }
  Eigen::Index correct = 0;
  for (Eigen::Index r = 0; r < predictions.rows(); ++r) {
    Eigen::Index predicted = 0;
    Eigen::Index truth = 0;
    predictions.row(r).maxCoeff(&predicted);
    Y_test.row(r).maxCoeff(&truth);
    if (predicted == truth) ++correct;
  }
  return static_cast<double>(correct) /
         static_cast<double>(predictions.rows());
}

std::string output_path(const ExperimentConfig& config,
                        const std::string& name) {
  return (std::filesystem::path(config.out_dir) / name).string();
}

void write_json_file(const std::string& path, const json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << value.dump(2) << '\n';
  if (!out) {
    throw std::runtime_error(path + ": write failed");
  }
}

// Stamps command + resolved config + config hash into the report, hashes
// everything except the wall time, and writes out_dir/report.json.
json finalize_report(const std::string& command,
                     const ExperimentConfig& resolved, json report,
                     std::chrono::steady_clock::time_point started) {
  std::filesystem::create_directories(resolved.out_dir);
  report["command"] = command;
  report["resolved_config"] = config_json(resolved);
  report["config_hash"] =
      io::to_hex(io::fnv1a64(serialize_config(resolved)));
  report["seed"] = resolved.seed;
  report["report_hash"] = io::to_hex(io::fnv1a64(report.dump()));
  report["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  write_json_file(output_path(resolved, "report.json"), report);
  return report;
}

json calibration_json(const accounting::CalibrationResult& result,
                      double epsilon) {
  return json{{"point_index", result.point_index},
              {"epsilon", epsilon},
              {"sigma_unlearn", result.sigma_unlearn},
              {"mu_achieved", result.mu_achieved},
              {"epsilon_achieved", result.epsilon_achieved}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration.

ExperimentConfig parse_config(
    const std::map<std::string, std::string>& values) {
  ExperimentConfig config;
  for (const auto& [key, value] : values) {
    if (key == "x") {
      config.x_path = value;
    } else if (key == "y") {
      config.y_path = value;
    } else if (key == "x_test") {
      config.x_test_path = value;
    } else if (key == "y_test") {
      config.y_test_path = value;
    } else if (key == "audit_p") {
      config.audit_p_path = value;
    } else if (key == "audit_q") {
      config.audit_q_path = value;
    } else if (key == "out_dir") {
      config.out_dir = value;
    } else if (key == "lambda") {
      config.lambda = parse_double_field(key, value);
    } else if (key == "t") {
      config.t = static_cast<int>(parse_int_field(key, value));
    } else if (key == "k") {
      config.k = static_cast<int>(parse_int_field(key, value));
    } else if (key == "sigma_learn") {
      config.sigma_learn = parse_double_field(key, value);
    } else if (key == "append_bias") {
      config.append_bias = parse_bool_field(key, value);
    } else if (key == "conservative_m") {
      config.conservative_m = parse_bool_field(key, value);
    } else if (key == "epsilon") {
      config.epsilon = parse_double_field(key, value);
    } else if (key == "epsilon_grid") {
      config.epsilon_grid = parse_double_list(key, value);
    } else if (key == "delta") {
      config.delta = parse_double_field(key, value);
    } else if (key == "delta_s") {
      config.delta_s = parse_double_field(key, value);
    } else if (key == "points") {
      config.points = parse_int_list(key, value);
    } else if (key == "point_quantiles") {
      config.point_quantiles = parse_double_list(key, value);
    } else if (key == "point") {
      config.point = static_cast<int>(parse_int_field(key, value));
    } else if (key == "runs") {
      config.runs = static_cast<int>(parse_int_field(key, value));
    } else if (key == "seed") {
      config.seed = parse_uint_field(key, value);
    } else if (key == "stream") {
      config.stream = parse_uint_field(key, value);
    } else if (key == "k_grid") {
      config.k_grid = parse_int_list(key, value);
    } else if (key == "metric") {
      if (value != "accuracy" && value != "mse") {
        field_error(key, "expected 'accuracy' or 'mse', got '" + value + "'");
      }
      config.metric = value;
    } else if (key == "baseline") {
      if (value != "uniform") {
        field_error(key, "the only supported baseline is 'uniform'");
      }
      config.baseline = value;
    } else if (key == "baseline_c") {
      config.baseline_c = parse_double_field(key, value);
    } else if (key == "audit_grid") {
      config.audit_grid = static_cast<int>(parse_int_field(key, value));
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(io::read_key_value_file(path));
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string text;
  for (const auto& [key, value] : config_pairs(config)) {
    text += key;
    text += " = ";
    text += value;
    text += '\n';
  }
  return text;
}

// ---------------------------------------------------------------------------
// calibrate: analytic bounds plus noise calibration per (point, epsilon).

json cmd_calibrate(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const std::string command = "calibrate";
  const Instance instance = load_instance(config, command);
  require_field(config.t >= 1, command, "t");
  require_field(config.k >= 1, command, "k");
  require_field(config.sigma_learn > 0.0, command, "sigma_learn");

  accounting::PrivacyBudget budget =
      resolve_budget(config, instance.data.n(), command);
  const std::vector<double> epsilons = resolve_epsilon_grid(config, command);
  const std::vector<int> points = select_points(config, instance, command);

  const bool uniform_baseline = config.baseline == "uniform";
  if (uniform_baseline) {
    require_field(config.baseline_c > 0.0, command, "baseline_c");
  }

  ExperimentConfig resolved = config;
  resolved.points = points;
  resolved.point_quantiles.clear();
  resolved.epsilon_grid = epsilons;
  resolved.epsilon = -1.0;
  resolved.delta = budget.delta;
  resolved.delta_s = budget.delta_s;

  const Eigen::MatrixXd theta0 =
      Eigen::MatrixXd::Zero(instance.data.p(), instance.data.d());
  const std::vector<sensitivity::ResidualStats> stats =
      sensitivity::residual_stats_multi(instance.spec, instance.data, theta0,
                                        config.sigma_learn, config.t, points);
  std::vector<sensitivity::SensitivityProfile> profiles(points.size());
  parallel_for(points.size(), [&](std::size_t s) {
    profiles[s] = sensitivity::hp_bounds(
        stats[s], instance.spec,
        instance.data.X.row(points[s]).norm(), budget.delta_s, config.t,
        static_cast<int>(instance.data.d()));
  });
  if (uniform_baseline) {
    profiles.push_back(accounting::uniform_baseline_profile(
        config.baseline_c, instance.spec.eta, config.t));
  }

  const std::size_t cells = profiles.size() * epsilons.size();
  std::vector<accounting::CalibrationResult> results(cells);
  parallel_for(cells, [&](std::size_t cell) {
    const std::size_t s = cell / epsilons.size();
    const std::size_t e = cell % epsilons.size();
    accounting::AccountingInputs inputs;
    inputs.profile = profiles[s];
    inputs.c = instance.spec.c;
    inputs.eta = instance.spec.eta;
    inputs.T = config.t;
    inputs.K = config.k;
    inputs.sigma_learn = config.sigma_learn;
    accounting::PrivacyBudget cell_budget = budget;
    cell_budget.epsilon = epsilons[e];
    results[cell] = accounting::calibrate_sigma(inputs, cell_budget);
  });

  json records = json::array();
  Eigen::MatrixXd table(static_cast<Eigen::Index>(cells), 5);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const double epsilon = epsilons[cell % epsilons.size()];
    records.push_back(calibration_json(results[cell], epsilon));
    table(static_cast<Eigen::Index>(cell), 0) = results[cell].point_index;
    table(static_cast<Eigen::Index>(cell), 1) = epsilon;
    table(static_cast<Eigen::Index>(cell), 2) = results[cell].sigma_unlearn;
    table(static_cast<Eigen::Index>(cell), 3) = results[cell].mu_achieved;
    table(static_cast<Eigen::Index>(cell), 4) = results[cell].epsilon_achieved;
  }

  std::filesystem::create_directories(resolved.out_dir);
  io::write_csv_matrix(output_path(resolved, "sigma_curves.csv"), table,
                       {"point_index", "epsilon", "sigma_unlearn",
                        "mu_achieved", "epsilon_achieved"});

  json report;
  report["records"] = records;
  report["outputs"] = {{"report", "report.json"},
                       {"sigma_curves", "sigma_curves.csv"}};
  return finalize_report(command, resolved, std::move(report), started);
}

// ---------------------------------------------------------------------------
// unlearn: learn, calibrate for one point, unlearn, certify.

json cmd_unlearn(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const std::string command = "unlearn";
  const Instance instance = load_instance(config, command);
  require_field(config.t >= 1, command, "t");
  require_field(config.k >= 0, command, "k");
  require_field(config.sigma_learn > 0.0, command, "sigma_learn");
  require_field(config.epsilon > 0.0, command, "epsilon");
  require_field(config.point >= 0, command, "point");
  if (config.point >= instance.data.n()) {
    throw std::invalid_argument(command + ": point index " +
                                std::to_string(config.point) +
                                " outside [0, " +
                                std::to_string(instance.data.n()) + ")");
  }

  accounting::PrivacyBudget budget =
      resolve_budget(config, instance.data.n(), command);
  budget.epsilon = config.epsilon;

  ExperimentConfig resolved = config;
  resolved.delta = budget.delta;
  resolved.delta_s = budget.delta_s;

  const Eigen::MatrixXd theta0 =
      Eigen::MatrixXd::Zero(instance.data.p(), instance.data.d());
  langevin::TrajectoryConfig learn;
  learn.T = config.t;
  learn.sigma_learn = config.sigma_learn;
  learn.theta0 = theta0;
  learn.seed = {config.seed, config.stream + kTrajectoryStreamBase};
  const Eigen::MatrixXd theta_learned =
      langevin::run_learn(instance.spec, instance.data, learn).final_theta;

  const sensitivity::ResidualStats stats = sensitivity::residual_stats(
      instance.spec, instance.data, theta0, config.sigma_learn, config.t,
      config.point);
  const sensitivity::SensitivityProfile profile = sensitivity::hp_bounds(
      stats, instance.spec, instance.data.X.row(config.point).norm(),
      budget.delta_s, config.t, static_cast<int>(instance.data.d()));

  accounting::AccountingInputs inputs;
  inputs.profile = profile;
  inputs.c = instance.spec.c;
  inputs.eta = instance.spec.eta;
  inputs.T = config.t;
  inputs.K = config.k;
  inputs.sigma_learn = config.sigma_learn;

  accounting::CalibrationResult calibration;
  if (config.k >= 1) {
    calibration = accounting::calibrate_sigma(inputs, budget);
  } else {
    // No unlearning steps: certification stands or falls with the budget at
    // sigma_unlearn = 0.
    calibration.sigma_unlearn = 0.0;
    calibration.mu_achieved = accounting::gdp_mu(inputs, 0.0);
    calibration.epsilon_achieved =
        accounting::epsilon_gdp(calibration.mu_achieved, budget.delta_m);
    calibration.point_index = config.point;
    if (calibration.epsilon_achieved > budget.epsilon) {
      throw std::runtime_error(
          command + ": K = 0 leaves the budget unmet (achieved epsilon " +
          io::format_double(calibration.epsilon_achieved) + ", target " +
          io::format_double(budget.epsilon) + ")");
    }
  }

  const Eigen::MatrixXd theta_final = langevin::run_unlearn(
      instance.spec, instance.data, theta_learned, config.point, config.k,
      calibration.sigma_unlearn,
      {config.seed, config.stream + kTrajectoryStreamBase + 1});

  std::filesystem::create_directories(resolved.out_dir);
  io::write_csv_matrix(output_path(resolved, "theta_final.csv"), theta_final);
  json certificate{{"point_index", config.point},
                   {"epsilon", budget.epsilon},
                   {"epsilon_achieved", calibration.epsilon_achieved},
                   {"delta", budget.delta},
                   {"delta_s", budget.delta_s},
                   {"delta_m", budget.delta_m},
                   {"mu", calibration.mu_achieved},
                   {"sigma_unlearn", calibration.sigma_unlearn}};
  write_json_file(output_path(resolved, "certificate.json"), certificate);

  json report;
  report["certificate"] = certificate;
  report["outputs"] = {{"report", "report.json"},
                       {"certificate", "certificate.json"},
                       {"theta_final", "theta_final.csv"}};
  return finalize_report(command, resolved, std::move(report), started);
}

// ---------------------------------------------------------------------------
// sensitivity-map: analytic bound matrix, optional empirical overlay.

json cmd_sensitivity_map(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const std::string command = "sensitivity-map";
  const Instance instance = load_instance(config, command);
  require_field(config.t >= 1, command, "t");
  require_field(config.sigma_learn > 0.0, command, "sigma_learn");
  const accounting::PrivacyBudget budget =
      resolve_budget(config, instance.data.n(), command);

  // Overlay trajectories are only simulated for an explicit selection; a
  // whole-dataset map stays analytic.
  const bool overlay =
      !config.points.empty() || !config.point_quantiles.empty();
  const std::vector<int> points = select_points(config, instance, command);

  ExperimentConfig resolved = config;
  resolved.points = points;
  resolved.point_quantiles.clear();
  resolved.delta = budget.delta;
  resolved.delta_s = budget.delta_s;

  const Eigen::MatrixXd theta0 =
      Eigen::MatrixXd::Zero(instance.data.p(), instance.data.d());
  const sensitivity::SensitivityMap map = sensitivity::sensitivity_map(
      instance.spec, instance.data, theta0, config.sigma_learn, config.t,
      budget.delta_s, points, /*sort_by_final=*/true);

  Eigen::MatrixXd table(map.bounds.rows(), map.bounds.cols() + 1);
  std::vector<std::string> header{"point_index"};
  for (int k = 0; k < config.t; ++k) header.push_back("k=" + std::to_string(k));
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    table(r, 0) = map.point_order[static_cast<std::size_t>(r)];
    table.row(r).tail(map.bounds.cols()) = map.bounds.row(r);
  }
  std::filesystem::create_directories(resolved.out_dir);
  io::write_csv_matrix(output_path(resolved, "sensitivity_map.csv"), table,
                       header);

  json report;
  report["outputs"] = {{"report", "report.json"},
                       {"sensitivity_map", "sensitivity_map.csv"}};

  if (overlay) {
    require_field(config.runs >= 1, command, "runs");
    // Row index of each selected point in the (sorted) analytic map.
    std::vector<Eigen::Index> map_row(points.size());
    for (std::size_t s = 0; s < map.point_order.size(); ++s) {
      for (std::size_t t = 0; t < points.size(); ++t) {
        if (map.point_order[s] == points[t]) {
          map_row[t] = static_cast<Eigen::Index>(s);
        }
      }
    }
    Eigen::MatrixXd long_table(
        static_cast<Eigen::Index>(points.size()) * config.runs * config.t, 4);
    json coverage = json::array();
    Eigen::Index row = 0;
    for (std::size_t s = 0; s < points.size(); ++s) {
      langevin::TrajectoryConfig sweep_config;
      sweep_config.T = config.t;
      sweep_config.sigma_learn = config.sigma_learn;
      sweep_config.theta0 = theta0;
      sweep_config.seed = {config.seed,
                           config.stream + kTrajectoryStreamBase +
                               static_cast<std::uint64_t>(s) *
                                   static_cast<std::uint64_t>(config.runs)};
      const Eigen::MatrixXd sweep = langevin::empirical_sensitivity_sweep(
          instance.spec, instance.data, sweep_config, points[s], config.runs);
      Eigen::Index covered = 0;
      for (int r = 0; r < config.runs; ++r) {
        for (int k = 0; k < config.t; ++k) {
          long_table(row, 0) = points[s];
          long_table(row, 1) = r;
          long_table(row, 2) = k;
          long_table(row, 3) = sweep(r, k);
          if (sweep(r, k) <= map.bounds(map_row[s], k)) ++covered;
          ++row;
        }
      }
      coverage.push_back(
          {{"point_index", points[s]},
           {"covered_fraction", static_cast<double>(covered) /
                                    static_cast<double>(sweep.size())}});
    }
    io::write_csv_matrix(output_path(resolved, "sensitivity_overlay.csv"),
                         long_table, {"point_index", "run", "k", "delta"});
    report["overlay_coverage"] = coverage;
    report["outputs"]["sensitivity_overlay"] = "sensitivity_overlay.csv";
  }
  return finalize_report(command, resolved, std::move(report), started);
}

// ---------------------------------------------------------------------------
// sweep: utility and noise across (point, epsilon, K) cells.

json cmd_sweep(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const std::string command = "sweep";
  const Instance instance = load_instance(config, command);
  require_field(config.t >= 1, command, "t");
  require_field(config.sigma_learn > 0.0, command, "sigma_learn");
  require_field(config.runs >= 1, command, "runs");

  std::vector<int> k_grid = config.k_grid;
  if (k_grid.empty()) {
    require_field(config.k >= 1, command, "k");
    k_grid.push_back(config.k);
  }
  for (const int K : k_grid) {
    if (K < 1) field_error("k_grid", "horizons must be >= 1");
  }
  const std::vector<double> epsilons = resolve_epsilon_grid(config, command);
  accounting::PrivacyBudget budget =
      resolve_budget(config, instance.data.n(), command);
  const std::vector<int> points = select_points(config, instance, command);

  const bool with_test =
      !config.x_test_path.empty() || !config.y_test_path.empty();
  Eigen::MatrixXd X_test;
  Eigen::MatrixXd Y_test;
  if (with_test) {
    require_field(!config.x_test_path.empty(), command, "x_test");
    require_field(!config.y_test_path.empty(), command, "y_test");
    X_test = io::read_csv_matrix(config.x_test_path);
    Y_test = io::read_csv_matrix(config.y_test_path);
    if (config.append_bias) X_test = append_bias_column(X_test);
    if (X_test.rows() != Y_test.rows() ||
        X_test.cols() != instance.data.p() ||
        Y_test.cols() != instance.data.d()) {
      throw std::invalid_argument(command +
                                  ": test set shapes do not match the "
                                  "training data");
    }
  }

  ExperimentConfig resolved = config;
  resolved.points = points;
  resolved.point_quantiles.clear();
  resolved.epsilon_grid = epsilons;
  resolved.epsilon = -1.0;
  resolved.k_grid = k_grid;
  resolved.k = -1;
  resolved.delta = budget.delta;
  resolved.delta_s = budget.delta_s;

  const Eigen::MatrixXd theta0 =
      Eigen::MatrixXd::Zero(instance.data.p(), instance.data.d());
  const std::vector<sensitivity::ResidualStats> stats =
      sensitivity::residual_stats_multi(instance.spec, instance.data, theta0,
                                        config.sigma_learn, config.t, points);
  std::vector<sensitivity::SensitivityProfile> profiles(points.size());
  parallel_for(points.size(), [&](std::size_t s) {
    profiles[s] = sensitivity::hp_bounds(
        stats[s], instance.spec, instance.data.X.row(points[s]).norm(),
        budget.delta_s, config.t, static_cast<int>(instance.data.d()));
  });

  // Cell (s, e, kk) = point s, epsilon e, horizon kk; each of the
  // runs-many repetitions owns streams base + 2 task and base + 2 task + 1.
  const std::size_t n_eps = epsilons.size();
  const std::size_t n_k = k_grid.size();
  const std::size_t cells = points.size() * n_eps * n_k;
  std::vector<accounting::CalibrationResult> calibrations(cells);
  parallel_for(cells, [&](std::size_t cell) {
    const std::size_t s = cell / (n_eps * n_k);
    const std::size_t e = (cell / n_k) % n_eps;
    const std::size_t kk = cell % n_k;
    accounting::AccountingInputs inputs;
    inputs.profile = profiles[s];
    inputs.c = instance.spec.c;
    inputs.eta = instance.spec.eta;
    inputs.T = config.t;
    inputs.K = k_grid[kk];
    inputs.sigma_learn = config.sigma_learn;
    accounting::PrivacyBudget cell_budget = budget;
    cell_budget.epsilon = epsilons[e];
    calibrations[cell] = accounting::calibrate_sigma(inputs, cell_budget);
  });

  const std::size_t tasks = cells * static_cast<std::size_t>(config.runs);
  std::vector<double> metric_values(with_test ? tasks : 0, 0.0);
  if (with_test) {
    parallel_for(tasks, [&](std::size_t task) {
      const std::size_t cell = task / static_cast<std::size_t>(config.runs);
      const std::size_t s = cell / (n_eps * n_k);
      const std::size_t kk = cell % n_k;
      langevin::TrajectoryConfig learn;
      learn.T = config.t;
      learn.sigma_learn = config.sigma_learn;
      learn.theta0 = theta0;
      learn.seed = {config.seed, config.stream + kTrajectoryStreamBase +
                                     2 * static_cast<std::uint64_t>(task)};
      const Eigen::MatrixXd theta_learned =
          langevin::run_learn(instance.spec, instance.data, learn).final_theta;
      const Eigen::MatrixXd theta_final = langevin::run_unlearn(
          instance.spec, instance.data, theta_learned, points[s], k_grid[kk],
          calibrations[cell].sigma_unlearn,
          {config.seed, config.stream + kTrajectoryStreamBase +
                            2 * static_cast<std::uint64_t>(task) + 1});
      metric_values[task] =
          evaluate_metric(config.metric, theta_final, X_test, Y_test);
    });
  }

  json records = json::array();
  const Eigen::Index n_cols = with_test ? 8 : 6;
  Eigen::MatrixXd table(static_cast<Eigen::Index>(cells), n_cols);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const std::size_t s = cell / (n_eps * n_k);
    const std::size_t e = (cell / n_k) % n_eps;
    const std::size_t kk = cell % n_k;
    json record = calibration_json(calibrations[cell], epsilons[e]);
    record["point_index"] = points[s];
    record["k"] = k_grid[kk];
    const Eigen::Index row = static_cast<Eigen::Index>(cell);
    table(row, 0) = points[s];
    table(row, 1) = epsilons[e];
    table(row, 2) = k_grid[kk];
    table(row, 3) = calibrations[cell].sigma_unlearn;
    table(row, 4) = calibrations[cell].mu_achieved;
    table(row, 5) = calibrations[cell].epsilon_achieved;
    if (with_test) {
      double mean = 0.0;
      for (int r = 0; r < config.runs; ++r) {
        mean += metric_values[cell * config.runs + r];
      }
      mean /= config.runs;
      double variance = 0.0;
      for (int r = 0; r < config.runs; ++r) {
        const double dev = metric_values[cell * config.runs + r] - mean;
        variance += dev * dev;
      }
      const double std_dev =
          config.runs > 1 ? std::sqrt(variance / (config.runs - 1)) : 0.0;
      record["metric_mean"] = mean;
      record["metric_std"] = std_dev;
      record["metric"] = config.metric;
      table(row, 6) = mean;
      table(row, 7) = std_dev;
    }
    records.push_back(std::move(record));
  }

  std::vector<std::string> header{"point_index",   "epsilon",
                                  "k",             "sigma_unlearn",
                                  "mu_achieved",   "epsilon_achieved"};
  if (with_test) {
    header.push_back("metric_mean");
    header.push_back("metric_std");
  }

  // privacy_utility.csv: epsilon varies fastest within a (point, K) block.
  // k_ablation.csv: K varies fastest within a (point, epsilon) block.
  const auto write_ordered = [&](const std::string& name, bool k_fastest) {
    Eigen::MatrixXd ordered(table.rows(), table.cols());
    Eigen::Index out_row = 0;
    for (std::size_t s = 0; s < points.size(); ++s) {
      for (std::size_t outer = 0; outer < (k_fastest ? n_eps : n_k); ++outer) {
        for (std::size_t inner = 0; inner < (k_fastest ? n_k : n_eps);
             ++inner) {
          const std::size_t e = k_fastest ? outer : inner;
          const std::size_t kk = k_fastest ? inner : outer;
          ordered.row(out_row++) =
              table.row(static_cast<Eigen::Index>((s * n_eps + e) * n_k + kk));
        }
      }
    }
    io::write_csv_matrix(output_path(resolved, name), ordered, header);
  };
  std::filesystem::create_directories(resolved.out_dir);
  write_ordered("privacy_utility.csv", /*k_fastest=*/false);
  write_ordered("k_ablation.csv", /*k_fastest=*/true);

  json report;
  report["records"] = records;
  report["outputs"] = {{"report", "report.json"},
                       {"privacy_utility", "privacy_utility.csv"},
                       {"k_ablation", "k_ablation.csv"}};
  return finalize_report(command, resolved, std::move(report), started);
}

// ---------------------------------------------------------------------------
// audit: distinguisher, trade-off curve, GDP fit.

json cmd_audit(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const std::string command = "audit";
  require_field(!config.audit_p_path.empty(), command, "audit_p");
  require_field(!config.audit_q_path.empty(), command, "audit_q");
  // No dataset here, so no 1/n fallback: the conversion level must be given.
  require_field(config.delta > 0.0, command, "delta");
  if (!(config.delta < 1.0)) {
    field_error("delta", "must lie in (0, 1)");
  }
  if (config.audit_grid < 2) {
    field_error("audit_grid", "need at least 2 grid points");
  }

  audit::RunRepresentations reps;
  reps.group_p = io::read_csv_matrix(config.audit_p_path);
  reps.group_q = io::read_csv_matrix(config.audit_q_path);

  const audit::DistinguisherScores scores =
      audit::train_distinguisher(reps, {config.seed, config.stream});
  const audit::TradeoffCurve curve = audit::tradeoff_curve(
      scores.scores_p, scores.scores_q, config.audit_grid);
  const audit::GdpFit fit = audit::fit_gdp(curve, config.delta);

  ExperimentConfig resolved = config;

  Eigen::MatrixXd curve_table(static_cast<Eigen::Index>(curve.alphas.size()),
                              2);
  for (std::size_t g = 0; g < curve.alphas.size(); ++g) {
    curve_table(static_cast<Eigen::Index>(g), 0) = curve.alphas[g];
    curve_table(static_cast<Eigen::Index>(g), 1) = curve.betas[g];
  }
  std::filesystem::create_directories(resolved.out_dir);
  io::write_csv_matrix(output_path(resolved, "tradeoff_curve.csv"),
                       curve_table, {"alpha", "beta"});

  json report;
  report["auc"] = curve.auc;
  report["mu_hat"] = fit.mu_hat;
  report["fit_mse"] = fit.fit_mse;
  report["epsilon_hat"] = fit.epsilon_hat;
  report["delta"] = fit.delta_used;
  report["saturated"] = fit.saturated;
  report["runs_p"] = reps.group_p.rows();
  report["runs_q"] = reps.group_q.rows();
  report["outputs"] = {{"report", "report.json"},
                       {"tradeoff_curve", "tradeoff_curve.csv"}};
  return finalize_report(command, resolved, std::move(report), started);
}

// ---------------------------------------------------------------------------
// loo-check: closed-form leave-one-out versus explicit retraining.

json cmd_loo_check(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const std::string command = "loo-check";
  const Instance instance = load_instance(config, command);
  const Eigen::Index n = instance.data.n();
  if (n < 2) {
    throw std::invalid_argument(command + ": need at least 2 rows");
  }

  ExperimentConfig resolved = config;

  struct Row {
    double h_ii = 0.0;
    double deviation = 0.0;
    bool degenerate = false;
  };
  std::vector<Row> rows(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
    const int i = static_cast<int>(ui);
    Row& row = rows[ui];

    ridge::Dataset held_out;
    held_out.X.resize(n - 1, instance.data.p());
    held_out.Y.resize(n - 1, instance.data.d());
    held_out.X.topRows(i) = instance.data.X.topRows(i);
    held_out.Y.topRows(i) = instance.data.Y.topRows(i);
    held_out.X.bottomRows(n - 1 - i) = instance.data.X.bottomRows(n - 1 - i);
    held_out.Y.bottomRows(n - 1 - i) = instance.data.Y.bottomRows(n - 1 - i);
    ridge::SpecOptions options;
    options.conservative_m = config.conservative_m;
    const ridge::RidgeSpec held_out_spec =
        ridge::build_spec(held_out, config.lambda, options);
    const Eigen::VectorXd retrained =
        (instance.data.X.row(i) *
         ridge::exact_solution(held_out_spec, held_out))
            .transpose();

    try {
      const ridge::LooPrediction loo =
          ridge::loo_prediction(instance.spec, instance.data, i);
      row.h_ii = loo.h_ii;
      // The tiny floor keeps near-zero predictions from reading as huge
      // relative errors.
      row.deviation = (loo.y_hat_loo - retrained).norm() /
                      std::max(retrained.norm(), 1e-8);
    } catch (const std::runtime_error&) {
      row.degenerate = true;
      const Eigen::VectorXd x = instance.data.X.row(i).transpose();
      row.h_ii =
          x.dot(instance.spec.A.llt().solve(x));
    }
  });

  double max_deviation = 0.0;
  json degenerate_indices = json::array();
  Eigen::MatrixXd table(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Row& row = rows[static_cast<std::size_t>(i)];
    table(i, 0) = static_cast<double>(i);
    table(i, 1) = row.h_ii;
    table(i, 2) = row.deviation;
    table(i, 3) = row.degenerate ? 1.0 : 0.0;
    if (row.degenerate) {
      degenerate_indices.push_back(i);
    } else {
      max_deviation = std::max(max_deviation, row.deviation);
    }
  }

  std::filesystem::create_directories(resolved.out_dir);
  io::write_csv_matrix(output_path(resolved, "loo_check.csv"), table,
                       {"index", "h_ii", "relative_deviation", "degenerate"});

  json report;
  report["max_relative_deviation"] = max_deviation;
  report["degenerate_indices"] = degenerate_indices;
  report["points_checked"] = n;
  report["outputs"] = {{"report", "report.json"},
                       {"loo_check", "loo_check.csv"}};
  return finalize_report(command, resolved, std::move(report), started);
}

}  // namespace unlearn::commands
