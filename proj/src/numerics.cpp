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

#include "unlearn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace unlearn::numerics {
namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kLogSqrt2Pi = 0.9189385332046727418;

// Poisson-mixture truncation: stop once the unprocessed mass is below this.
constexpr double kPoissonTailMass = 1e-12;
// Poisson weights this small cannot move the result at the 1e-12 level even
// summed over the remaining sub-modal tail (the weights decay at least
// geometrically with ratio bounded away from 1 once this far out).
constexpr double kNegligibleWeight = 1e-20;
// Noncentrality cap: beyond this the bidirectional expansion would need more
// iterations than we are willing to spend.
constexpr double kMaxNoncentrality = 1e12;

// Regularized lower incomplete gamma P(a, z), series for z < a + 1 and
// Lentz continued fraction for the complement otherwise.
double gamma_p(double a, double z) {
  if (z <= 0.0) return 0.0;
  const double log_prefactor = a * std::log(z) - z - std::lgamma(a);
  if (z < a + 1.0) {
    // P(a,z) = z^a e^-z / Gamma(a) * sum_k z^k / (a(a+1)...(a+k)) / a
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 100000; ++k) {
      term *= z / (a + k);
      sum += term;
      if (term < sum * 1e-17) {
        return std::min(1.0, std::exp(log_prefactor) * sum);
      }
    }
    throw std::runtime_error("gamma_p: series did not converge");
  }
  // Q(a,z) = z^a e^-z / Gamma(a) * CF, modified Lentz.
  const double tiny = 1e-300;
  double b = z + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) {
      const double q = std::exp(log_prefactor) * h;
      return std::max(0.0, 1.0 - q);
    }
  }
  throw std::runtime_error("gamma_p: continued fraction did not converge");
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(what) + ": non-finite input");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  // Evaluate erfc at a nonnegative argument on both sides so the result
  // carries only the rounding of erfc itself, never tail cancellation.
  if (x <= 0.0) return 0.5 * std::erfc(-x * kInvSqrt2);
  return 1.0 - 0.5 * std::erfc(x * kInvSqrt2);
}

double log_std_normal_cdf(double x) {
  require_finite(x, "log_std_normal_cdf");
  if (x >= -8.0) return std::log(std_normal_cdf(x));
  // Mills-ratio asymptotic series: Phi(-t) = phi(t)/t * sum_j (-1)^j (2j-1)!!/t^2j.
  // The terms alternate and eventually grow; truncating at the smallest term
  // leaves an error below the first omitted term, ~1e-14 at t = 8.
  const double t = -x;
  const double t2 = t * t;
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double next = term * -(2.0 * j - 1.0) / t2;
    if (std::abs(next) >= std::abs(term)) break;
    sum += next;
    term = next;
    if (std::abs(next) < 1e-19 * std::abs(sum)) break;
  }
  return -0.5 * t2 - std::log(t) - kLogSqrt2Pi + std::log(sum);
}

double std_normal_quantile(double p) {
  require_finite(p, "std_normal_quantile");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("std_normal_quantile: p must lie in the open interval (0, 1)");
  }
  // The smallest positive double still has its quantile inside (-39, 39).
  double lo = -40.0, hi = 40.0;
  while (hi - lo > 1e-13 * (1.0 + std::min(std::abs(lo), std::abs(hi)))) {
    const double mid = 0.5 * (lo + hi);
    (std_normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double noncentral_chisq_cdf(double x, int dof, double noncentrality) {
  require_finite(x, "noncentral_chisq_cdf");
  require_finite(noncentrality, "noncentral_chisq_cdf");
  if (x < 0.0) throw std::domain_error("noncentral_chisq_cdf: x must be >= 0");
  if (dof < 1) throw std::domain_error("noncentral_chisq_cdf: dof must be >= 1");
  if (noncentrality < 0.0) {
    throw std::domain_error("noncentral_chisq_cdf: noncentrality must be >= 0");
  }
  if (noncentrality > kMaxNoncentrality) {
    throw std::overflow_error(
        "noncentral_chisq_cdf: noncentrality exceeds the series limit 1e12");
  }
  if (x == 0.0) return 0.0;

  const double half_dof = 0.5 * dof;
  const double z = 0.5 * x;
  const double a = 0.5 * noncentrality;  // Poisson mean of the mixture
  if (a == 0.0) return gamma_p(half_dof, z);

  // Modal start: weights near the mode are ~1/sqrt(2*pi*a), never underflow.
  const double j0 = std::floor(a);
  const double s0 = half_dof + j0;
  const double w0 = std::exp(-a + j0 * std::log(a) - std::lgamma(j0 + 1.0));
  const double g0 = gamma_p(s0, z);
  // t_j = z^{s_j} e^{-z} / Gamma(s_j + 1) steps the central CDF in j:
  // gamma_p(s+1, z) = gamma_p(s, z) - t(s).
  const double t0 = std::exp(s0 * std::log(z) - z - std::lgamma(s0 + 1.0));

  double sum = w0 * g0;
  double processed = w0;

  // Upward sweep. g decreases toward 0, so once it is negligible the whole
  // remaining upper tail contributes less than g itself.
  {
    double w = w0, g = g0, t = t0;
    double s = s0;
    double j = j0;
    while (1.0 - processed > kPoissonTailMass) {
      w *= a / (j + 1.0);
      g = std::max(0.0, g - t);
      t *= z / (s + 1.0);
      j += 1.0;
      s += 1.0;
      sum += w * g;
      processed += w;
      if (g <= 1e-18 || (j > a && w <= kNegligibleWeight)) break;
      if (j - j0 > 1e8) {
        throw std::overflow_error("noncentral_chisq_cdf: series exhausted upward");
      }
    }
  }

  // Downward sweep to j = 0 or negligible mass.
  {
    double w = w0, g = g0, t = t0;
    double s = s0;
    for (double j = j0; j >= 1.0 && 1.0 - processed > kPoissonTailMass; j -= 1.0) {
      t *= s / z;                       // t_{j-1}
      g = std::min(1.0, g + t);         // g_{j-1}
      w *= j / a;                       // w_{j-1}
      s -= 1.0;
      sum += w * g;
      processed += w;
      if (w <= kNegligibleWeight) break;
    }
  }

  return std::clamp(sum, 0.0, 1.0);
}

double noncentral_chisq_quantile(double p, int dof, double noncentrality) {
  require_finite(p, "noncentral_chisq_quantile");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error(
        "noncentral_chisq_quantile: p must lie in the open interval (0, 1)");
  }
  const double hi0 =
      dof + noncentrality + 10.0 * std::sqrt(2.0 * dof + 4.0 * noncentrality);
  return find_root_monotone(
      [dof, noncentrality](double x) {
        return noncentral_chisq_cdf(x, dof, noncentrality);
      },
      p, 0.0, hi0, 1e-9);
}

double find_root_monotone(const std::function<double(double)>& f,
                          double target, double lo, double hi, double f_tol) {
  require_finite(target, "find_root_monotone");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi) || !(f_tol > 0.0)) {
    throw std::domain_error("find_root_monotone: invalid bracket or tolerance");
  }
  double flo = f(lo), fhi = f(hi);
  const bool increasing = fhi >= flo;

  auto bracketed = [&] {
    return increasing ? (flo <= target && target <= fhi)
                      : (fhi <= target && target <= flo);
  };
  for (int expansions = 0; !bracketed(); ++expansions) {
    if (expansions >= 200) {
      throw std::runtime_error("find_root_monotone: bracket expansion exhausted");
    }
    const double width = hi - lo;
    const bool expand_hi = increasing ? (fhi < target) : (fhi > target);
    if (expand_hi) {
      hi += width;
      fhi = f(hi);
    } else {
      lo -= width;
      flo = f(lo);
    }
  }

  for (int iter = 0; iter < 500; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (std::abs(fmid - target) <= f_tol) return mid;
    const double slack = 1e-9 * (1.0 + std::abs(flo) + std::abs(fhi));
    if (fmid < std::min(flo, fhi) - slack || fmid > std::max(flo, fhi) + slack) {
      throw std::runtime_error("find_root_monotone: f is not monotone on the bracket");
    }
    const bool go_right = increasing ? (fmid < target) : (fmid > target);
    if (go_right) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
    if (hi - lo <= 1e-15 * (1.0 + std::abs(mid))) {
      throw std::runtime_error(
          "find_root_monotone: bracket collapsed before reaching f_tol");
    }
  }
  throw std::runtime_error("find_root_monotone: iteration limit reached");
}

std::mt19937_64 make_engine(RngSeed seed) {
  std::uint64_t material = splitmix64(seed.seed);
  material ^= splitmix64(seed.stream_index ^ 0xD1B54A32D192ED03ULL);
  return std::mt19937_64(splitmix64(material));
}

std::vector<double> gaussian_stream(RngSeed seed, std::size_t count) {
  std::vector<double> out(count);
  GaussianStream stream(seed);
  stream.fill(out.data(), out.size());
  return out;
}

}  // namespace unlearn::numerics
