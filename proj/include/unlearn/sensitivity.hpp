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

#ifndef UNLEARN_SENSITIVITY_HPP_
#define UNLEARN_SENSITIVITY_HPP_

#include <vector>

#include <Eigen/Dense>

#include "unlearn/ridge.hpp"

namespace unlearn::sensitivity {

// Law of point i's residual along the learning trajectory: at step k the
// residual x_i' theta_k - y_i is Gaussian with mean mu[k] (a d-vector) and
// isotropic per-coordinate variance v[k], where
//   mu[k] = x_i' m_k - y_i,          m_{k+1} = M m_k + eta B,
//   v[k]  = 2 eta sigma^2 * sum_{j<k} |M'^j x_i|^2.
struct ResidualStats {
  int point_index = -1;
  std::vector<Eigen::VectorXd> mu;  // k = 0..T
  std::vector<double> v;            // k = 0..T, v[0] = 0
};

ResidualStats residual_stats(const ridge::RidgeSpec& spec,
                             const ridge::Dataset& data,
                             const Eigen::MatrixXd& theta0,
                             double sigma_learn, int T, int i);

// Shared-trajectory variant: one pass over the mean recursion serves every
// requested point.
std::vector<ResidualStats> residual_stats_multi(
    const ridge::RidgeSpec& spec, const ridge::Dataset& data,
    const Eigen::MatrixXd& theta0, double sigma_learn, int T,
    const std::vector<int>& points);

// Per-step sensitivity bounds s_k, k = 0..T-1, each holding with
// probability 1 - delta_s / T so the whole profile holds with probability
// 1 - delta_s by a union bound.
struct SensitivityProfile {
  int point_index = -1;  // -1 when not tied to a point (uniform baseline)
  double delta_s = 0.0;  // tail mass spent; 0 for deterministic bounds
  std::vector<double> bounds;
};

// s_k = eta |x_i| sqrt(v_k * q_k) with q_k the (1 - delta_s/T)-quantile of
// the noncentral chi-square with d degrees of freedom and noncentrality
// |mu_k|^2 / v_k; the v_k = 0 steps use the deterministic residual norm
// eta |x_i| |mu_k| instead. Throws std::runtime_error when delta_s / T
// is below double precision (the quantile argument would round to 1).
SensitivityProfile hp_bounds(const ResidualStats& stats,
                             const ridge::RidgeSpec& spec, double x_norm,
                             double delta_s, int T, int d);

struct SensitivityMap {
  // Row r = profile of point point_order[r]; columns k = 0..T-1.
  Eigen::MatrixXd bounds;
  std::vector<int> point_order;
};

// Profiles for a set of points, sharing the mean-trajectory recursion, each
// point's quantile work running in parallel. With sort_by_final the rows are
// ordered by increasing bound at the last step.
SensitivityMap sensitivity_map(const ridge::RidgeSpec& spec,
                               const ridge::Dataset& data,
                               const Eigen::MatrixXd& theta0,
                               double sigma_learn, int T, double delta_s,
                               const std::vector<int>& points,
                               bool sort_by_final = false);

}  // namespace unlearn::sensitivity

#endif  // UNLEARN_SENSITIVITY_HPP_
