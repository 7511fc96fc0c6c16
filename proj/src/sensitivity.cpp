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

#include "unlearn/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "unlearn/numerics.hpp"
#include "unlearn/parallel.hpp"

namespace unlearn::sensitivity {
namespace {

void check_inputs(const ridge::RidgeSpec& spec, const ridge::Dataset& data,
                  const Eigen::MatrixXd& theta0, double sigma_learn, int T,
                  const std::vector<int>& points) {
  if (spec.A.rows() != data.p()) {
    throw std::invalid_argument("residual_stats: spec and data disagree on p");
  }
  if (theta0.rows() != data.p() || theta0.cols() != data.d()) {
    throw std::invalid_argument("residual_stats: theta0 has wrong shape");
  }
  if (T < 1) throw std::invalid_argument("residual_stats: T must be >= 1");
  if (!(sigma_learn > 0.0)) {
    throw std::invalid_argument("residual_stats: sigma_learn must be > 0");
  }
  for (int i : points) {
    if (i < 0 || i >= data.n()) {
      throw std::invalid_argument("residual_stats: point index " +
                                  std::to_string(i) + " out of range");
    }
  }
}

}  // namespace

std::vector<ResidualStats> residual_stats_multi(
    const ridge::RidgeSpec& spec, const ridge::Dataset& data,
    const Eigen::MatrixXd& theta0, double sigma_learn, int T,
    const std::vector<int>& points) {
  check_inputs(spec, data, theta0, sigma_learn, T, points);
  const std::size_t npts = points.size();
  const double noise_var = 2.0 * spec.eta * sigma_learn * sigma_learn;

  std::vector<ResidualStats> out(npts);
  std::vector<Eigen::VectorXd> u(npts);  // u_j = M'^j x_i per point
  for (std::size_t s = 0; s < npts; ++s) {
    out[s].point_index = points[s];
    out[s].mu.reserve(T + 1);
    out[s].v.assign(1, 0.0);
    out[s].v.reserve(T + 1);
    u[s] = data.X.row(points[s]).transpose();
  }

  Eigen::MatrixXd mean = theta0;  // m_k
  for (std::size_t s = 0; s < npts; ++s) {
    out[s].mu.push_back(
        (data.X.row(points[s]) * mean - data.Y.row(points[s])).transpose());
  }
  Eigen::MatrixXd next_mean(mean.rows(), mean.cols());
  for (int k = 1; k <= T; ++k) {
    next_mean.noalias() = spec.M * mean;
    next_mean.noalias() += spec.eta * spec.B;
    mean.swap(next_mean);
    for (std::size_t s = 0; s < npts; ++s) {
      out[s].v.push_back(out[s].v.back() + noise_var * u[s].squaredNorm());
      u[s] = spec.M.transpose() * u[s];
      out[s].mu.push_back(
          (data.X.row(points[s]) * mean - data.Y.row(points[s])).transpose());
    }
  }
  return out;
}

ResidualStats residual_stats(const ridge::RidgeSpec& spec,
                             const ridge::Dataset& data,
                             const Eigen::MatrixXd& theta0, double sigma_learn,
                             int T, int i) {
  return residual_stats_multi(spec, data, theta0, sigma_learn, T, {i})[0];
}

SensitivityProfile hp_bounds(const ResidualStats& stats,
                             const ridge::RidgeSpec& spec, double x_norm,
                             double delta_s, int T, int d) {
  if (T < 1 || static_cast<int>(stats.v.size()) < T) {
    throw std::invalid_argument("hp_bounds: stats cover fewer than T steps");
  }
  if (d < 1) throw std::invalid_argument("hp_bounds: d must be >= 1");
  if (!(delta_s > 0.0 && delta_s < 1.0)) {
    throw std::invalid_argument("hp_bounds: delta_s must lie in (0, 1)");
  }
  if (!(x_norm >= 0.0) || !std::isfinite(x_norm)) {
    throw std::invalid_argument("hp_bounds: invalid x_norm");
  }
  const double p = 1.0 - delta_s / T;
  if (p == 1.0) {
    throw std::runtime_error(
        "hp_bounds: delta_s / T underflows double precision");
  }

  SensitivityProfile profile;
  profile.point_index = stats.point_index;
  profile.delta_s = delta_s;
  profile.bounds.resize(T);
  for (int k = 0; k < T; ++k) {
    const double v = stats.v[k];
    const double mu_norm2 = stats.mu[k].squaredNorm();
    if (v == 0.0 || x_norm == 0.0) {
      // Deterministic residual (no noise accumulated yet, or a zero point).
      profile.bounds[k] = spec.eta * x_norm * std::sqrt(mu_norm2);
      continue;
    }
    const double q = numerics::noncentral_chisq_quantile(p, d, mu_norm2 / v);
    profile.bounds[k] = spec.eta * x_norm * std::sqrt(v * q);
  }
  return profile;
}

SensitivityMap sensitivity_map(const ridge::RidgeSpec& spec,
                               const ridge::Dataset& data,
                               const Eigen::MatrixXd& theta0,
                               double sigma_learn, int T, double delta_s,
                               const std::vector<int>& points,
                               bool sort_by_final) {
  const std::vector<ResidualStats> stats =
      residual_stats_multi(spec, data, theta0, sigma_learn, T, points);
  const int d = static_cast<int>(data.d());

  std::vector<std::vector<double>> rows(points.size());
  parallel_for(points.size(), [&](std::size_t s) {
    rows[s] = hp_bounds(stats[s], spec, data.X.row(points[s]).norm(), delta_s,
                        T, d)
                  .bounds;
  });

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  if (sort_by_final) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return rows[a].back() < rows[b].back();
                     });
  }

  SensitivityMap map;
  map.bounds.resize(static_cast<Eigen::Index>(points.size()), T);
  map.point_order.resize(points.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    map.point_order[r] = points[order[r]];
    for (int k = 0; k < T; ++k) {
      map.bounds(static_cast<Eigen::Index>(r), k) = rows[order[r]][k];
    }
  }
  return map;
}

}  // namespace unlearn::sensitivity
