// Copyright 2026 The IPP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include "ipp/env.hpp"

namespace ipp {

/// Anisotropic squared-exponential kernel
///   k(x, y) = variance * exp(-0.5 * sum_i (x_i - y_i)^2 / l_i^2).
/// Spatio-temporal inputs use the same form with one extra lengthscale for
/// time.
class RbfKernel {
 public:
  RbfKernel(double variance, Eigen::VectorXd lengthscales);

  [[nodiscard]] double variance() const { return variance_; }
  [[nodiscard]] const Eigen::VectorXd& lengthscales() const { return lengthscales_; }
  [[nodiscard]] int dims() const { return static_cast<int>(lengthscales_.size()); }

  [[nodiscard]] double eval(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& y) const;

  /// |A| x |B| covariance matrix.
  [[nodiscard]] Eigen::MatrixXd cov(const Eigen::Ref<const Points>& a,
                                    const Eigen::Ref<const Points>& b) const;

  /// Symmetric K_AA.
  [[nodiscard]] Eigen::MatrixXd cov(const Eigen::Ref<const Points>& a) const;

  /// Backward pass through cov(A, B) with respect to A: given the covariance
  /// `k` = cov(A, B) and an upstream gradient `upstream` dF/dK of the same
  /// shape, returns dF/dA (|A| x dims) treating B as constant.
  [[nodiscard]] Points grad_lhs(const Eigen::Ref<const Points>& a,
                                const Eigen::Ref<const Points>& b,
                                const Eigen::Ref<const Eigen::MatrixXd>& k,
                                const Eigen::Ref<const Eigen::MatrixXd>& upstream) const;

 private:
  void check_dims(Eigen::Index cols) const;

  double variance_;
  Eigen::VectorXd lengthscales_;
  Eigen::VectorXd inv_sq_;  // 1 / l_i^2
};

/// Convenience wrapper matching the functional form used in the tools.
Eigen::MatrixXd cov_matrix(const RbfKernel& k, const Eigen::Ref<const Points>& a,
                           const Eigen::Ref<const Points>& b);

}  // namespace ipp
