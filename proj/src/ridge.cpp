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

#include "unlearn/ridge.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "unlearn/numerics.hpp"

namespace unlearn::ridge {
namespace {

constexpr int kDenseEigLimit = 512;
constexpr double kEigTol = 1e-10;
constexpr int kEigMaxIter = 10000;

// Deterministic pseudo-random start vector; a fixed vector like all-ones can
// be orthogonal to the extreme eigenvector on structured instances.
Eigen::VectorXd iteration_start(Eigen::Index p) {
  numerics::GaussianStream stream({0x9D2C5680u, static_cast<std::uint64_t>(p)});
  Eigen::VectorXd v(p);
  stream.fill(v.data(), static_cast<std::size_t>(p));
  if (v.norm() == 0.0) v.setOnes();
  return v / v.norm();
}

double power_iteration_max(const Eigen::MatrixXd& A) {
  Eigen::VectorXd v = iteration_start(A.rows());
  double prev = 0.0;
  for (int iter = 0; iter < kEigMaxIter; ++iter) {
    Eigen::VectorXd w = A * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double est = v.dot(A * v);
    if (std::abs(est - prev) <= kEigTol * std::max(1.0, std::abs(est))) {
      return est;
    }
    prev = est;
  }
  throw std::runtime_error("build_spec: power iteration did not converge");
}

double inverse_iteration_min(const Eigen::MatrixXd& A,
                             const Eigen::LLT<Eigen::MatrixXd>& llt) {
  Eigen::VectorXd v = iteration_start(A.rows());
  double prev = 0.0;
  for (int iter = 0; iter < kEigMaxIter; ++iter) {
    Eigen::VectorXd w = llt.solve(v);
    const double norm = w.norm();
    if (norm == 0.0) {
      throw std::runtime_error("build_spec: inverse iteration broke down");
    }
    v = w / norm;
    const double est = v.dot(A * v);
    if (std::abs(est - prev) <= kEigTol * std::max(1.0, std::abs(est))) {
      return est;
    }
    prev = est;
  }
  throw std::runtime_error("build_spec: inverse iteration did not converge");
}

void check_point_index(const Dataset& data, int i, const char* what) {
  if (i < 0 || i >= data.n()) {
    throw std::invalid_argument(std::string(what) + ": point index " +
                                std::to_string(i) + " outside [0, " +
                                std::to_string(data.n()) + ")");
  }
}

}  // namespace

void Dataset::validate() const {
  if (X.rows() != Y.rows()) {
    throw std::invalid_argument("Dataset: X and Y row counts differ");
  }
  if (X.rows() < 1 || X.cols() < 1 || Y.cols() < 1) {
    throw std::invalid_argument("Dataset: need at least one row and column");
  }
  if (!X.allFinite() || !Y.allFinite()) {
    throw std::invalid_argument("Dataset: non-finite entry");
  }
}

RidgeSpec build_spec(const Dataset& data, double lambda,
                     const SpecOptions& options) {
  data.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("build_spec: lambda must be positive");
  }

  RidgeSpec spec;
  spec.lambda = lambda;
  const Eigen::Index p = data.p();
  spec.A.noalias() = data.X.transpose() * data.X;
  spec.A.diagonal().array() += lambda;
  spec.B.noalias() = data.X.transpose() * data.Y;

  if (p <= kDenseEigLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spec.A,
                                                       Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
      throw std::runtime_error("build_spec: eigendecomposition failed");
    }
    spec.m = eig.eigenvalues()(0);
    spec.L = eig.eigenvalues()(p - 1);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(spec.A);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("build_spec: A is numerically singular");
    }
    spec.L = power_iteration_max(spec.A);
    spec.m = inverse_iteration_min(spec.A, llt);
  }

  if (!(spec.L > 0.0) || !std::isfinite(spec.L)) {
    throw std::runtime_error("build_spec: invalid largest eigenvalue");
  }
  if (spec.m < 0.0) {
    // A = X'X + lambda I is positive definite; a negative estimate is
    // eigensolver noise around a tiny m.
    spec.m = std::max(spec.m, 0.0);
  }
  if (options.conservative_m) spec.m = lambda;

  spec.eta = 1.0 / spec.L;
  spec.c = 1.0 - spec.m * spec.eta;
  spec.M = -spec.eta * spec.A;
  spec.M.diagonal().array() += 1.0;
  return spec;
}

Eigen::MatrixXd full_gradient(const RidgeSpec& spec, const Dataset& data,
                              const Eigen::MatrixXd& theta, int exclude) {
  if (theta.rows() != spec.A.rows() || theta.cols() != spec.B.cols()) {
    throw std::invalid_argument("full_gradient: theta has wrong shape");
  }
  Eigen::MatrixXd grad = spec.A * theta - spec.B;
  if (exclude >= 0) {
    check_point_index(data, exclude, "full_gradient");
    const auto x = data.X.row(exclude);
    const Eigen::RowVectorXd residual = x * theta - data.Y.row(exclude);
    grad.noalias() -= x.transpose() * residual;
  }
  return grad;
}

double pointwise_gradient_norm(const Dataset& data,
                               const Eigen::MatrixXd& theta, int i) {
  check_point_index(data, i, "pointwise_gradient_norm");
  const Eigen::RowVectorXd residual = data.X.row(i) * theta - data.Y.row(i);
  return data.X.row(i).norm() * residual.norm();
}

Eigen::MatrixXd exact_solution(const RidgeSpec& spec, const Dataset& data) {
  if (spec.A.rows() != data.p() || spec.B.cols() != data.d()) {
    throw std::invalid_argument(
        "exact_solution: spec and data dimensions disagree");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(spec.A);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("exact_solution: Cholesky factorization failed");
  }
  Eigen::MatrixXd theta = llt.solve(spec.B);
  const double residual = (spec.A * theta - spec.B).norm();
  if (residual > 1e-8 * spec.B.norm()) {
    throw std::runtime_error("exact_solution: solve residual " +
                             std::to_string(residual) + " exceeds tolerance");
  }
  return theta;
}

LooPrediction loo_prediction(const RidgeSpec& spec, const Dataset& data,
                             int i) {
  check_point_index(data, i, "loo_prediction");
  if (data.n() < 2) {
    throw std::invalid_argument("loo_prediction: need n >= 2 rows");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(spec.A);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("loo_prediction: Cholesky factorization failed");
  }
  const Eigen::VectorXd x = data.X.row(i).transpose();
  const double h_ii = x.dot(llt.solve(x));
  if (h_ii >= 1.0 - 1e-12) {
    throw std::runtime_error("loo_prediction: degenerate leverage h_ii = " +
                             std::to_string(h_ii) + " at index " +
                             std::to_string(i));
  }
  LooPrediction out;
  out.h_ii = h_ii;
  const Eigen::MatrixXd theta = llt.solve(spec.B);
  out.y_hat = (data.X.row(i) * theta).transpose();
  const Eigen::VectorXd y_i = data.Y.row(i).transpose();
  out.y_hat_loo = y_i - (y_i - out.y_hat) / (1.0 - h_ii);
  return out;
}

}  // namespace unlearn::ridge
