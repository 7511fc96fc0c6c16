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

#include "unlearn/accounting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "unlearn/numerics.hpp"

namespace unlearn::accounting {

void PrivacyBudget::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("PrivacyBudget: epsilon must be > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("PrivacyBudget: delta must lie in (0, 1)");
  }
  if (!(delta_s > 0.0) || !(delta_m > 0.0)) {
    throw std::invalid_argument("PrivacyBudget: both split parts must be > 0");
  }
  if (std::abs(delta_s + delta_m - delta) > 1e-15 * delta) {
    throw std::invalid_argument("PrivacyBudget: delta_s + delta_m != delta");
  }
}

void AccountingInputs::validate(bool for_calibration) const {
  if (!(c >= 0.0 && c < 1.0)) {
    throw std::invalid_argument("AccountingInputs: c must lie in [0, 1)");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("AccountingInputs: eta must be > 0");
  }
  if (T < 1 || static_cast<int>(profile.bounds.size()) != T) {
    throw std::invalid_argument(
        "AccountingInputs: profile must hold exactly T bounds");
  }
  if (K < 0) throw std::invalid_argument("AccountingInputs: K must be >= 0");
  if (for_calibration && K < 1) {
    throw std::invalid_argument("AccountingInputs: calibration requires K >= 1");
  }
  if (!(sigma_learn > 0.0)) {
    throw std::invalid_argument("AccountingInputs: sigma_learn must be > 0");
  }
  for (double s : profile.bounds) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("AccountingInputs: bounds must be finite and >= 0");
    }
  }
}

double gdp_mu(const AccountingInputs& inputs, double sigma_unlearn) {
  inputs.validate(false);
  if (!(sigma_unlearn >= 0.0) || !std::isfinite(sigma_unlearn)) {
    throw std::invalid_argument("gdp_mu: sigma_unlearn must be >= 0");
  }
  const double c = inputs.c;
  const int T = inputs.T;
  const int K = inputs.K;

  double numerator = 0.0;
  double v_learn = 0.0;
  for (int k = 0; k < T; ++k) {
    const double ck = std::pow(c, T + K - k);
    numerator += ck * inputs.profile.bounds[k];
    v_learn += ck * ck;
  }
  v_learn *= 2.0 * inputs.eta * inputs.sigma_learn * inputs.sigma_learn;

  double v_unlearn = 0.0;
  for (int j = 0; j < K; ++j) v_unlearn += std::pow(c, 2 * j);
  v_unlearn *= 2.0 * inputs.eta * sigma_unlearn * sigma_unlearn;

  if (numerator == 0.0) return 0.0;
  return numerator / std::sqrt(v_learn + v_unlearn);
}

double gdp_to_dp_delta(double mu, double epsilon) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("gdp_to_dp_delta: mu must be finite and >= 0");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("gdp_to_dp_delta: epsilon must be finite and >= 0");
  }
  if (mu == 0.0) return 0.0;
  const double first = numerics::std_normal_cdf(-epsilon / mu + 0.5 * mu);
  const double second =
      std::exp(epsilon + numerics::log_std_normal_cdf(-epsilon / mu - 0.5 * mu));
  return std::clamp(first - second, 0.0, 1.0);
}

double epsilon_gdp(double mu, double delta) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("epsilon_gdp: mu must be finite and >= 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("epsilon_gdp: delta must lie in (0, 1)");
  }
  if (mu == 0.0) return 0.0;
  if (gdp_to_dp_delta(mu, 0.0) <= delta) return 0.0;
  if (mu > 1e150) {
    // The crossing sits near mu^2 / 2, beyond double range.
    throw std::overflow_error("epsilon_gdp: mu too large for a finite epsilon");
  }

  // Dropping the e^eps term overstates delta, so the first factor alone
  // already crosses the target at
  //   eps = mu * (mu / 2 - Phi^{-1}(delta)),
  // an upper bound for the true crossing.
  const double first_term_inverse =
      mu * (0.5 * mu - numerics::std_normal_quantile(delta));
  if (mu > 1e6) {
    // Beyond this scale -eps/mu + mu/2 cancels catastrophically, so the
    // exact curve cannot be bisected in double precision. The neglected
    // e^eps term at the crossing is O(1/mu) of the first, and skipping it
    // overshoots epsilon, which keeps the certificate conservative.
    return first_term_inverse;
  }

  // Starting the bracket at the first-term inverse keeps the search away
  // from the saturated region delta(eps) = 1, where a default bracket
  // cannot see the curve's direction.
  const double hi = first_term_inverse + 1.0;
  double eps = numerics::find_root_monotone(
      [mu](double e) { return gdp_to_dp_delta(mu, e); }, delta, 0.0, hi,
      1e-9);

  // Spend the bisection tolerance on the conservative side: the returned
  // epsilon must certify gdp_to_dp_delta(mu, eps) <= delta.
  double step = 1e-12 * (1.0 + eps);
  while (gdp_to_dp_delta(mu, eps) > delta) {
    eps += step;
    step *= 2.0;
  }
  return eps;
}

CalibrationResult calibrate_sigma(const AccountingInputs& inputs,
                                  const PrivacyBudget& budget) {
  budget.validate();
  inputs.validate(true);

  const auto accounted_epsilon = [&](double sigma) {
    return epsilon_gdp(gdp_mu(inputs, sigma), budget.delta_m);
  };
  const auto result_at = [&](double sigma) {
    CalibrationResult result;
    result.sigma_unlearn = sigma;
    result.mu_achieved = gdp_mu(inputs, sigma);
    result.epsilon_achieved = epsilon_gdp(result.mu_achieved, budget.delta_m);
    result.point_index = inputs.profile.point_index;
    return result;
  };
  if (accounted_epsilon(0.0) <= budget.epsilon) return result_at(0.0);

  double lo = 0.0;
  double hi = inputs.sigma_learn;
  const double cap = std::ldexp(inputs.sigma_learn, 60);
  while (accounted_epsilon(hi) > budget.epsilon) {
    lo = hi;
    hi *= 2.0;
    if (hi > cap) {
      throw std::runtime_error(
          "calibrate_sigma: budget unreachable within 2^60 * sigma_learn");
    }
  }

  // Keep the invariant eps(hi) <= epsilon < eps(lo); stop once hi is within
  // 1e-6 of the crossing and its accounted epsilon has climbed back within
  // 1e-3 of the target (the forward-verification band).
  double eps_hi = accounted_epsilon(hi);
  for (int iter = 0;
       (hi - lo > 1e-6 || eps_hi < budget.epsilon - 1e-3) && iter < 500;
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // double precision exhausted
    const double eps_mid = accounted_epsilon(mid);
    if (eps_mid <= budget.epsilon) {
      hi = mid;
      eps_hi = eps_mid;
    } else {
      lo = mid;
    }
  }
  return result_at(hi);
}

sensitivity::SensitivityProfile uniform_baseline_profile(double C, double eta,
                                                         int T) {
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw std::invalid_argument("uniform_baseline_profile: C must be > 0");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("uniform_baseline_profile: eta must be > 0");
  }
  if (T < 1) throw std::invalid_argument("uniform_baseline_profile: T must be >= 1");
  sensitivity::SensitivityProfile profile;
  profile.point_index = -1;
  profile.delta_s = 0.0;  // deterministic bound, no tail mass spent
  profile.bounds.assign(T, eta * C);
  return profile;
}

}  // namespace unlearn::accounting
