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

#include "unlearn/langevin.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "unlearn/parallel.hpp"

namespace unlearn::langevin {
namespace {

void check_shapes(const ridge::RidgeSpec& spec, const ridge::Dataset& data,
                  const Eigen::MatrixXd& theta, const char* what) {
  if (spec.A.rows() != data.p()) {
    throw std::invalid_argument(std::string(what) + ": spec and data disagree on p");
  }
  if (theta.rows() != data.p() || theta.cols() != data.d()) {
    throw std::invalid_argument(std::string(what) + ": theta has wrong shape");
  }
}

void check_finite(const Eigen::MatrixXd& theta, int step, const char* what) {
  if (!theta.allFinite()) {
    throw std::runtime_error(std::string(what) + ": non-finite iterate at step " +
                             std::to_string(step));
  }
}

}  // namespace

TrajectoryRecord run_learn(const ridge::RidgeSpec& spec,
                           const ridge::Dataset& data,
                           const TrajectoryConfig& config,
                           const RecordOptions& record) {
  check_shapes(spec, data, config.theta0, "run_learn");
  if (config.T < 1) throw std::invalid_argument("run_learn: T must be >= 1");
  if (!(config.sigma_learn > 0.0)) {
    throw std::invalid_argument("run_learn: sigma_learn must be > 0");
  }
  if (record.record_iterates && record.stride < 1) {
    throw std::invalid_argument("run_learn: stride must be >= 1");
  }
  if (record.record_for >= 0 && record.record_for >= data.n()) {
    throw std::invalid_argument("run_learn: record_for index out of range");
  }

  const Eigen::Index p = data.p();
  const Eigen::Index d = data.d();
  const double noise_scale = std::sqrt(2.0 * spec.eta) * config.sigma_learn;
  numerics::GaussianStream stream(config.seed);

  TrajectoryRecord out;
  if (record.record_for >= 0) {
    out.empirical_sensitivities.reserve(config.T);
  }
  Eigen::MatrixXd theta = config.theta0;
  Eigen::MatrixXd xi(p, d);
  Eigen::MatrixXd next(p, d);
  for (int k = 0; k < config.T; ++k) {
    if (record.record_iterates && k % record.stride == 0) {
      out.iterates.push_back(theta);
    }
    if (record.record_for >= 0) {
      out.empirical_sensitivities.push_back(
          spec.eta *
          ridge::pointwise_gradient_norm(data, theta, record.record_for));
    }
    stream.fill(xi.data(), static_cast<std::size_t>(p * d));
    next.noalias() = spec.M * theta;
    next.noalias() += spec.eta * spec.B;
    next.noalias() += noise_scale * xi;
    theta.swap(next);
    check_finite(theta, k + 1, "run_learn");
  }
  if (record.record_iterates) out.iterates.push_back(theta);
  out.final_theta = std::move(theta);
  return out;
}

Eigen::MatrixXd run_unlearn(const ridge::RidgeSpec& spec,
                            const ridge::Dataset& data,
                            const Eigen::MatrixXd& start, int i, int K,
                            double sigma_unlearn, numerics::RngSeed seed) {
  check_shapes(spec, data, start, "run_unlearn");
  if (K < 0) throw std::invalid_argument("run_unlearn: K must be >= 0");
  if (sigma_unlearn < 0.0 || !std::isfinite(sigma_unlearn)) {
    throw std::invalid_argument("run_unlearn: sigma_unlearn must be >= 0");
  }
  if (K == 0) return start;
  if (data.n() < 2) {
    throw std::invalid_argument("run_unlearn: need n >= 2 rows");
  }
  if (i < 0 || i >= data.n()) {
    throw std::invalid_argument("run_unlearn: point index out of range");
  }

  const Eigen::Index p = data.p();
  const Eigen::Index d = data.d();
  const double noise_scale = std::sqrt(2.0 * spec.eta) * sigma_unlearn;
  numerics::GaussianStream stream(seed);
  const Eigen::VectorXd x = data.X.row(i).transpose();
  const Eigen::RowVectorXd y = data.Y.row(i);

  Eigen::MatrixXd theta = start;
  Eigen::MatrixXd xi(p, d);
  Eigen::MatrixXd next(p, d);
  for (int k = 0; k < K; ++k) {
    // theta - eta * grad_{-i} = M theta + eta B + eta x (x' theta - y).
    const Eigen::RowVectorXd residual = x.transpose() * theta - y;
    stream.fill(xi.data(), static_cast<std::size_t>(p * d));
    next.noalias() = spec.M * theta;
    next.noalias() += spec.eta * spec.B;
    next.noalias() += (spec.eta * x) * residual;
    next.noalias() += noise_scale * xi;
    theta.swap(next);
    check_finite(theta, k + 1, "run_unlearn");
  }
  return theta;
}

Eigen::MatrixXd empirical_sensitivity_sweep(const ridge::RidgeSpec& spec,
                                            const ridge::Dataset& data,
                                            const TrajectoryConfig& config,
                                            int i, int runs) {
  if (runs < 1) throw std::invalid_argument("empirical_sensitivity_sweep: runs >= 1");
  if (i < 0 || i >= data.n()) {
    throw std::invalid_argument("empirical_sensitivity_sweep: point index out of range");
  }
  Eigen::MatrixXd out(runs, config.T);
  parallel_for(static_cast<std::size_t>(runs), [&](std::size_t r) {
    TrajectoryConfig run_config = config;
    run_config.seed.stream_index = config.seed.stream_index + r;
    RecordOptions record;
    record.record_for = i;
    const TrajectoryRecord rec = run_learn(spec, data, run_config, record);
    for (int k = 0; k < config.T; ++k) {
      out(static_cast<Eigen::Index>(r), k) = rec.empirical_sensitivities[k];
    }
  });
  return out;
}

}  // namespace unlearn::langevin
