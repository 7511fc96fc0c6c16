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

#ifndef UNLEARN_NUMERICS_HPP_
#define UNLEARN_NUMERICS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace unlearn::numerics {

// Standard normal CDF. Absolute error a few ulp of the result in both tails
// (two-sided erfc form, no cancellation for large |x|). Throws
// std::domain_error on non-finite input.
double std_normal_cdf(double x);

// log(std_normal_cdf(x)), finite for every finite x. Uses the Mills-ratio
// asymptotic expansion for x < -8, where it is accurate to ~1e-14 absolute;
// direct log of the CDF elsewhere. Needed to form exp(eps + log Phi(.))
// without underflow in the privacy-curve conversion.
double log_std_normal_cdf(double x);

// Inverse of std_normal_cdf on the open interval (0, 1), by bisection.
// |std_normal_cdf(result) - p| <= 1e-10. Throws std::domain_error for
// p outside (0, 1) or non-finite p.
double std_normal_quantile(double p);

// CDF of the noncentral chi-square with `dof` degrees of freedom and
// noncentrality parameter `noncentrality` (= squared norm of the mean),
// evaluated by the Poisson-mixture series over central chi-square CDFs.
// The series starts at the modal Poisson index and expands in both
// directions; it is truncated when the unprocessed Poisson mass is below
// 1e-12, so the absolute error is ~1e-12. Throws std::domain_error for
// x < 0, dof < 1, negative or non-finite noncentrality, and
// std::overflow_error when the noncentrality is too large for the series
// (noncentrality > 1e12).
double noncentral_chisq_cdf(double x, int dof, double noncentrality);

// p-quantile of the same law, p in (0, 1). Bracketing starts at
// [0, dof + nc + 10*sqrt(2*dof + 4*nc)], expands geometrically if needed,
// then bisects until |cdf(result) - p| <= 1e-9.
double noncentral_chisq_quantile(double p, int dof, double noncentrality);

// Root of f(x) = target for continuous monotone f, given an initial bracket
// [lo, hi]. The bracket is expanded geometrically on the deficient side
// (at most 200 doublings, else std::runtime_error), then bisected until
// |f(result) - target| <= f_tol. A mid evaluation falling outside the
// bracket's value range signals non-monotone f and throws
// std::runtime_error.
double find_root_monotone(const std::function<double(double)>& f,
                          double target, double lo, double hi, double f_tol);

// Seed material for a deterministic random stream. Distinct stream_index
// values under the same seed give statistically independent streams.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
};

// Engine seeded from (seed, stream_index) via two rounds of the splitmix64
// finalizer. Every random decision in the library (normal draws, shuffles)
// derives its engine through this one function, so results are bit-exact
// within a build.
std::mt19937_64 make_engine(RngSeed seed);

// Stateful stream of i.i.d. standard normal draws over make_engine(seed).
class GaussianStream {
 public:
  explicit GaussianStream(RngSeed seed) : engine_(make_engine(seed)) {}

  double next() { return normal_(engine_); }

  void fill(double* out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) out[i] = normal_(engine_);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// First `count` draws of GaussianStream(seed).
std::vector<double> gaussian_stream(RngSeed seed, std::size_t count);

}  // namespace unlearn::numerics

#endif  // UNLEARN_NUMERICS_HPP_
