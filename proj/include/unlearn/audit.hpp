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

#ifndef UNLEARN_AUDIT_HPP_
#define UNLEARN_AUDIT_HPP_

#include <vector>

#include <Eigen/Dense>

#include "unlearn/numerics.hpp"

namespace unlearn::audit {

// Row-per-run feature representations of the two mechanisms the auditor
// tries to tell apart: group_p from unlearned runs, group_q from retrained
// runs. Same feature width, at least 10 runs each.
struct RunRepresentations {
  Eigen::MatrixXd group_p;
  Eigen::MatrixXd group_q;

  void validate() const;
};

struct DistinguisherScores {
  std::vector<double> scores_p;
  std::vector<double> scores_q;
};

// Splits each group 50/50 with a permutation seeded by split_seed, fits a
// ridge-regularized Fisher direction on the train halves (regularizer
// 1e-3 * trace(pooled covariance) / q), and returns the held-out halves'
// projections. Deterministic given the seed. Throws std::runtime_error
// when the covariance is degenerate even after regularization.
DistinguisherScores train_distinguisher(const RunRepresentations& reps,
                                        numerics::RngSeed split_seed);

// Empirical type-I/type-II trade-off: alphas is a uniform grid in (0, 1),
// betas the step-function interpolation of the achievable type-II error,
// auc the trapezoidal area under the full empirical ROC.
struct TradeoffCurve {
  std::vector<double> alphas;
  std::vector<double> betas;
  double auc = 0.0;
};

// alpha = false-positive rate on scores_p, beta = false-negative rate on
// scores_q; scores are sign-flipped if needed so auc >= 0.5.
TradeoffCurve tradeoff_curve(std::vector<double> scores_p,
                             std::vector<double> scores_q, int grid_size);

struct GdpFit {
  double mu_hat = 0.0;
  double fit_mse = 0.0;
  double epsilon_hat = 0.0;
  double delta_used = 0.0;
  // Perfect separation: mu_hat pinned at the bracket max.
  bool saturated = false;
};

// Least-squares fit of the Gaussian trade-off family
// beta(alpha) = Phi(Phi^{-1}(1 - alpha) - mu) against the empirical curve
// over alpha in [0.01, 0.99], by golden-section search on mu in [0, 20]
// (tolerance 1e-6), then converts mu_hat to epsilon_hat at `delta`.
GdpFit fit_gdp(const TradeoffCurve& curve, double delta);

}  // namespace unlearn::audit

#endif  // UNLEARN_AUDIT_HPP_
