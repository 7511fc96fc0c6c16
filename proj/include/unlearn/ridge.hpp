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

#ifndef UNLEARN_RIDGE_HPP_
#define UNLEARN_RIDGE_HPP_

#include <Eigen/Dense>

namespace unlearn::ridge {

// Multi-output regression data: n rows of features X (n x p) and targets
// Y (n x d). The loss is sum_j 0.5 * |x_j' theta - y_j|^2 plus the ridge
// term 0.5 * lambda * |theta|_F^2.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
  Eigen::Index d() const { return Y.cols(); }

  // Row counts equal, every entry finite, at least one row and one column
  // on each side. Throws std::invalid_argument.
  void validate() const;
};

// Precomputed quadratic structure of the ridge objective. The gradient is
// A theta - B with A = X'X + lambda I and B = X'Y; one gradient step of
// size eta = 1 / L is theta -> M theta + eta B with M = I - eta A, a
// contraction with factor c = 1 - m / L.
struct RidgeSpec {
  double lambda = 0.0;
  Eigen::MatrixXd A;  // p x p
  Eigen::MatrixXd B;  // p x d
  Eigen::MatrixXd M;  // p x p
  double m = 0.0;     // smallest eigenvalue of A
  double L = 0.0;     // largest eigenvalue of A
  double eta = 0.0;   // 1 / L
  double c = 0.0;     // 1 - m / L
};

struct SpecOptions {
  // Replace the computed m = lambda_min(A) by the conservative lower bound
  // lambda. The bound stays valid for every leave-one-out subset, at the
  // price of a larger contraction factor.
  bool conservative_m = false;
};

// Builds the quadratic structure. Eigenvalue extremes come from a dense
// symmetric eigendecomposition for p <= 512 and from power iteration (L)
// plus inverse iteration (m) beyond that, both to relative tolerance 1e-10
// with at most 10000 iterations. Throws std::invalid_argument for
// lambda <= 0 or invalid data, std::runtime_error on solver failure.
RidgeSpec build_spec(const Dataset& data, double lambda,
                     const SpecOptions& options = {});

// Gradient of the full objective at theta, or of the leave-one-out
// objective when exclude >= 0 names a row of the data.
Eigen::MatrixXd full_gradient(const RidgeSpec& spec, const Dataset& data,
                              const Eigen::MatrixXd& theta, int exclude = -1);

// |x_i| * |x_i' theta - y_i|, the norm of point i's loss-gradient
// contribution at theta.
double pointwise_gradient_norm(const Dataset& data,
                               const Eigen::MatrixXd& theta, int i);

// Ridge minimizer A^{-1} B by Cholesky solve. The data argument is checked
// for shape consistency with the spec. The residual |A theta - B|_F must
// come out below 1e-8 * |B|_F, else std::runtime_error.
Eigen::MatrixXd exact_solution(const RidgeSpec& spec, const Dataset& data);

struct LooPrediction {
  Eigen::VectorXd y_hat;      // full-data prediction x_i' theta_hat
  Eigen::VectorXd y_hat_loo;  // leave-one-out prediction, closed form
  double h_ii = 0.0;          // leverage x_i' A^{-1} x_i
};

// Closed-form leave-one-out prediction for row i:
// y_hat_loo = y_i - (y_i - y_hat) / (1 - h_ii), the rank-one-downdate
// identity. Requires n >= 2 and h_ii < 1 - 1e-12 (degenerate leverage
// throws std::runtime_error).
LooPrediction loo_prediction(const RidgeSpec& spec, const Dataset& data, int i);

}  // namespace unlearn::ridge

#endif  // UNLEARN_RIDGE_HPP_
