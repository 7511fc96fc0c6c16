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

#include "unlearn/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "unlearn/accounting.hpp"

namespace unlearn::audit {
namespace {

constexpr double kFitAlphaMin = 0.01;
constexpr double kFitAlphaMax = 0.99;
constexpr double kMuBracketMax = 20.0;

std::vector<int> shuffled_indices(Eigen::Index count, std::mt19937_64& engine) {
  std::vector<int> idx(static_cast<std::size_t>(count));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), engine);
  return idx;
}

// Trapezoidal area under the empirical ROC (false-positive rate on p vs
// true-positive rate on q, threshold "score > t" swept over all values).
// Ties contribute diagonal segments, matching the rank-statistic AUC.
double roc_auc(const std::vector<double>& sorted_p,
               const std::vector<double>& sorted_q) {
  const double np = static_cast<double>(sorted_p.size());
  const double nq = static_cast<double>(sorted_q.size());
  double auc = 0.0;
  double prev_fpr = 0.0, prev_tpr = 0.0;
  auto ip = sorted_p.rbegin();
  auto iq = sorted_q.rbegin();
  std::size_t count_p = 0, count_q = 0;
  while (ip != sorted_p.rend() || iq != sorted_q.rend()) {
    const double value = (ip == sorted_p.rend())  ? *iq
                         : (iq == sorted_q.rend()) ? *ip
                                                   : std::max(*ip, *iq);
    while (ip != sorted_p.rend() && *ip == value) {
      ++count_p;
      ++ip;
    }
    while (iq != sorted_q.rend() && *iq == value) {
      ++count_q;
      ++iq;
    }
    const double fpr = count_p / np;
    const double tpr = count_q / nq;
    auc += (fpr - prev_fpr) * 0.5 * (tpr + prev_tpr);
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  auc += (1.0 - prev_fpr) * 0.5 * (prev_tpr + 1.0);
  return auc;
}

}  // namespace

void RunRepresentations::validate() const {
  if (group_p.cols() != group_q.cols() || group_p.cols() < 1) {
    throw std::invalid_argument(
        "RunRepresentations: groups must share a positive feature width");
  }
  if (group_p.rows() < 10 || group_q.rows() < 10) {
    throw std::invalid_argument("RunRepresentations: need >= 10 runs per group");
  }
  if (!group_p.allFinite() || !group_q.allFinite()) {
    throw std::invalid_argument("RunRepresentations: non-finite entry");
  }
}

DistinguisherScores train_distinguisher(const RunRepresentations& reps,
                                        numerics::RngSeed split_seed) {
  reps.validate();
  const Eigen::Index q = reps.group_p.cols();

  std::mt19937_64 engine = numerics::make_engine(split_seed);
  const std::vector<int> perm_p = shuffled_indices(reps.group_p.rows(), engine);
  const std::vector<int> perm_q = shuffled_indices(reps.group_q.rows(), engine);
  const std::size_t train_p = perm_p.size() / 2;
  const std::size_t train_q = perm_q.size() / 2;

  Eigen::VectorXd mean_p = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd mean_q = Eigen::VectorXd::Zero(q);
  for (std::size_t r = 0; r < train_p; ++r) {
    mean_p += reps.group_p.row(perm_p[r]).transpose();
  }
  for (std::size_t r = 0; r < train_q; ++r) {
    mean_q += reps.group_q.row(perm_q[r]).transpose();
  }
  mean_p /= static_cast<double>(train_p);
  mean_q /= static_cast<double>(train_q);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(q, q);
  for (std::size_t r = 0; r < train_p; ++r) {
    const Eigen::VectorXd centered =
        reps.group_p.row(perm_p[r]).transpose() - mean_p;
    cov.noalias() += centered * centered.transpose();
  }
  for (std::size_t r = 0; r < train_q; ++r) {
    const Eigen::VectorXd centered =
        reps.group_q.row(perm_q[r]).transpose() - mean_q;
    cov.noalias() += centered * centered.transpose();
  }
  cov /= static_cast<double>(train_p + train_q - 2);
  cov.diagonal().array() += 1e-3 * cov.trace() / static_cast<double>(q);

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "train_distinguisher: covariance degenerate after regularization");
  }
  const Eigen::VectorXd w = llt.solve(mean_p - mean_q);

  DistinguisherScores scores;
  scores.scores_p.reserve(perm_p.size() - train_p);
  scores.scores_q.reserve(perm_q.size() - train_q);
  for (std::size_t r = train_p; r < perm_p.size(); ++r) {
    scores.scores_p.push_back(reps.group_p.row(perm_p[r]).dot(w));
  }
  for (std::size_t r = train_q; r < perm_q.size(); ++r) {
    scores.scores_q.push_back(reps.group_q.row(perm_q[r]).dot(w));
  }
  return scores;
}

TradeoffCurve tradeoff_curve(std::vector<double> scores_p,
                             std::vector<double> scores_q, int grid_size) {
  if (scores_p.empty() || scores_q.empty()) {
    throw std::invalid_argument("tradeoff_curve: empty score list");
  }
  if (grid_size < 1) {
    throw std::invalid_argument("tradeoff_curve: grid_size must be >= 1");
  }
  for (const auto* scores : {&scores_p, &scores_q}) {
    for (double s : *scores) {
      if (!std::isfinite(s)) {
        throw std::invalid_argument("tradeoff_curve: non-finite score");
      }
    }
  }

  std::sort(scores_p.begin(), scores_p.end());
  std::sort(scores_q.begin(), scores_q.end());
  double auc = roc_auc(scores_p, scores_q);
  if (auc < 0.5) {
    // Orient the distinguisher so larger scores point to group_q.
    for (double& s : scores_p) s = -s;
    for (double& s : scores_q) s = -s;
    std::reverse(scores_p.begin(), scores_p.end());
    std::reverse(scores_q.begin(), scores_q.end());
    auc = roc_auc(scores_p, scores_q);
  }

  const std::size_t np = scores_p.size();
  TradeoffCurve curve;
  curve.auc = auc;
  curve.alphas.resize(grid_size);
  curve.betas.resize(grid_size);
  for (int g = 0; g < grid_size; ++g) {
    const double alpha = static_cast<double>(g + 1) / (grid_size + 1);
    // Largest threshold with false-positive rate <= alpha: the (k+1)-th
    // largest p-score rejects at most k of the np null scores.
    const auto k = static_cast<std::size_t>(alpha * static_cast<double>(np));
    const double t = scores_p[np - 1 - std::min(k, np - 1)];
    const auto below = std::upper_bound(scores_q.begin(), scores_q.end(), t) -
                       scores_q.begin();
    curve.alphas[g] = alpha;
    curve.betas[g] = static_cast<double>(below) / scores_q.size();
  }
  return curve;
}

GdpFit fit_gdp(const TradeoffCurve& curve, double delta) {
  if (curve.alphas.size() != curve.betas.size() || curve.alphas.empty()) {
    throw std::invalid_argument("fit_gdp: malformed curve");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("fit_gdp: delta must lie in (0, 1)");
  }

  std::vector<std::pair<double, double>> pts;  // (Phi^{-1}(1 - alpha), beta)
  pts.reserve(curve.alphas.size());
  for (std::size_t g = 0; g < curve.alphas.size(); ++g) {
    const double alpha = curve.alphas[g];
    if (alpha < kFitAlphaMin || alpha > kFitAlphaMax) continue;
    pts.emplace_back(numerics::std_normal_quantile(1.0 - alpha),
                     curve.betas[g]);
  }
  if (pts.empty()) {
    throw std::invalid_argument(
        "fit_gdp: no grid points inside the fit window [0.01, 0.99]");
  }

  const auto objective = [&pts](double mu) {
    double sse = 0.0;
    for (const auto& [z, beta] : pts) {
      const double diff = numerics::std_normal_cdf(z - mu) - beta;
      sse += diff * diff;
    }
    return sse / static_cast<double>(pts.size());
  };

  // Golden-section search; the squared misfit of the one-parameter Gaussian
  // family is unimodal in mu on this bracket for monotone curves.
  const double invphi = 0.6180339887498949;
  double a = 0.0, b = kMuBracketMax;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (b - a > 1e-6) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = objective(x2);
    }
  }

  GdpFit fit;
  fit.mu_hat = 0.5 * (a + b);
  if (fit.mu_hat > kMuBracketMax - 1e-3) {
    fit.mu_hat = kMuBracketMax;
    fit.saturated = true;
  }
  fit.fit_mse = objective(fit.mu_hat);
  fit.delta_used = delta;
  fit.epsilon_hat = accounting::epsilon_gdp(fit.mu_hat, delta);
  return fit;
}

}  // namespace unlearn::audit
