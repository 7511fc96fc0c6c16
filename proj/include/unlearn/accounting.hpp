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

#ifndef UNLEARN_ACCOUNTING_HPP_
#define UNLEARN_ACCOUNTING_HPP_

#include "unlearn/sensitivity.hpp"

namespace unlearn::accounting {

// (epsilon, delta) target with the split delta = delta_s + delta_m:
// delta_s pays for the high-probability sensitivity profile, delta_m for
// the Gaussian mechanism conversion.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  double delta_s = 0.0;
  double delta_m = 0.0;

  void validate() const;
};

// Everything the trajectory accountant needs besides the unlearning noise:
// per-step sensitivity bounds s_k (k = 0..T-1), the contraction factor c,
// step size eta, horizons T and K, and the learning noise.
struct AccountingInputs {
  sensitivity::SensitivityProfile profile;
  double c = 0.0;
  double eta = 0.0;
  int T = 0;
  int K = 0;
  double sigma_learn = 0.0;

  // K >= 1 is only required when calibrating.
  void validate(bool for_calibration) const;
};

// Gaussian-DP parameter of the unlearning mechanism after T learning and K
// unlearning steps:
//   mu = sum_{k<T} c^(T+K-k) s_k
//        / sqrt( sum_{k<T} 2 eta sigma_learn^2 c^(2(T+K-k))
//              + sum_{j<K} 2 eta sigma_unlearn^2 c^(2j) ).
// Returns 0 when the numerator vanishes (all-zero bounds, or c = 0).
double gdp_mu(const AccountingInputs& inputs, double sigma_unlearn);

// Smallest delta for which mu-GDP implies (epsilon, delta)-DP:
//   delta(eps) = Phi(-eps/mu + mu/2) - e^eps Phi(-eps/mu - mu/2),
// clamped to [0, 1]; 0 when mu = 0. The e^eps term is evaluated in log
// space, so the conversion stays accurate when the tail probability
// underflows.
double gdp_to_dp_delta(double mu, double epsilon);

// Smallest epsilon >= 0 with gdp_to_dp_delta(mu, epsilon) <= delta; 0 when
// delta is already met at epsilon = 0. Root found by monotone bisection to
// 1e-9 on delta, with the remaining tolerance spent upward so the returned
// epsilon always certifies its delta. For mu > 1e6 the curve cannot be
// resolved in double precision near the crossing and the (conservative)
// first-term inverse mu * (mu/2 - Phi^{-1}(delta)) is returned instead.
// Throws std::overflow_error when mu is so large (> 1e150) that no double
// epsilon can close the budget.
double epsilon_gdp(double mu, double delta);

struct CalibrationResult {
  double sigma_unlearn = 0.0;
  double mu_achieved = 0.0;
  double epsilon_achieved = 0.0;
  int point_index = -1;  // copied from the profile
};

// Smallest sigma_unlearn >= 0 (to 1e-6 absolute) whose accounted epsilon at
// budget.delta_m stays within budget.epsilon. sigma_unlearn = 0 when no
// noise is needed. The bracket starts at [0, sigma_learn] and doubles;
// growth past 2^60 * sigma_learn means the budget is unreachable
// (std::runtime_error).
CalibrationResult calibrate_sigma(const AccountingInputs& inputs,
                                  const PrivacyBudget& budget);

// Constant profile s_k = eta * C from a single global gradient-norm bound C,
// the non-adaptive baseline a per-instance profile is compared against.
sensitivity::SensitivityProfile uniform_baseline_profile(double C, double eta,
                                                         int T);

}  // namespace unlearn::accounting

#endif  // UNLEARN_ACCOUNTING_HPP_
