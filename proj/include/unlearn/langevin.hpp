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

#ifndef UNLEARN_LANGEVIN_HPP_
#define UNLEARN_LANGEVIN_HPP_

#include <vector>

#include <Eigen/Dense>

#include "unlearn/numerics.hpp"
#include "unlearn/ridge.hpp"

namespace unlearn::langevin {

// Noisy gradient descent: theta <- theta - eta * grad + sqrt(2 eta) * sigma * Xi
// with Xi a fresh p x d standard normal matrix each step, filled from the
// stream in column-major order.
struct TrajectoryConfig {
  int T = 1;                   // learning steps, >= 1
  int K = 0;                   // unlearning steps, >= 0
  double sigma_learn = 0.0;    // > 0
  double sigma_unlearn = 0.0;  // >= 0
  Eigen::MatrixXd theta0;      // p x d start
  numerics::RngSeed seed;
};

struct RecordOptions {
  // Record iterates theta_k at k % stride == 0 plus the final iterate.
  bool record_iterates = false;
  int stride = 1;
  // When >= 0, record this point's per-step sensitivity
  // Delta_k = eta * |x_i| * |x_i' theta_k - y_i| at each pre-step iterate
  // theta_k, k = 0..T-1.
  int record_for = -1;
};

struct TrajectoryRecord {
  Eigen::MatrixXd final_theta;
  std::vector<Eigen::MatrixXd> iterates;
  std::vector<double> empirical_sensitivities;
};

// T learning steps on the full data from config.theta0, driven by the
// precomputed map theta -> M theta + eta B. Deterministic given the seed.
// Throws std::runtime_error naming the step if an iterate goes non-finite.
TrajectoryRecord run_learn(const ridge::RidgeSpec& spec,
                           const ridge::Dataset& data,
                           const TrajectoryConfig& config,
                           const RecordOptions& record = {});

// K noisy steps on the leave-one-out objective (point i removed), starting
// from `start`, noise scale sigma_unlearn. K = 0 returns `start` unchanged
// without consuming randomness. Requires n >= 2.
Eigen::MatrixXd run_unlearn(const ridge::RidgeSpec& spec,
                            const ridge::Dataset& data,
                            const Eigen::MatrixXd& start, int i, int K,
                            double sigma_unlearn, numerics::RngSeed seed);

// `runs` independent learning trajectories; row r holds the recorded
// sensitivities of point i for the run seeded with stream_index
// config.seed.stream_index + r, so runs = 1 reproduces run_learn with
// config.seed exactly. Executed in parallel. Result is runs x T.
Eigen::MatrixXd empirical_sensitivity_sweep(const ridge::RidgeSpec& spec,
                                            const ridge::Dataset& data,
                                            const TrajectoryConfig& config,
                                            int i, int runs);

}  // namespace unlearn::langevin

#endif  // UNLEARN_LANGEVIN_HPP_
