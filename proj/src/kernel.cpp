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

#include "ipp/kernel.hpp"

#include <cmath>
#include <string>

#include "ipp/error.hpp"

namespace ipp {

RbfKernel::RbfKernel(double variance, Eigen::VectorXd lengthscales)
    : variance_(variance), lengthscales_(std::move(lengthscales)) {
  require(variance_ > 0.0, "kernel variance must be positive");
  require(lengthscales_.size() >= 1, "kernel needs at least one lengthscale");
  require((lengthscales_.array() > 0.0).all(), "kernel lengthscales must be positive");
  inv_sq_ = lengthscales_.array().square().inverse().matrix();
}

void RbfKernel::check_dims(Eigen::Index cols) const {
  require(cols == lengthscales_.size(),
          "input dimension " + std::to_string(cols) + " does not match kernel lengthscales (" +
              std::to_string(lengthscales_.size()) + ")");
}

double RbfKernel::eval(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y) const {
  check_dims(x.size());
  check_dims(y.size());
  const double r2 = ((x - y).array().square() * inv_sq_.array()).sum();
  return variance_ * std::exp(-0.5 * r2);
}

Eigen::MatrixXd RbfKernel::cov(const Eigen::Ref<const Points>& a,
                               const Eigen::Ref<const Points>& b) const {
  require(a.rows() >= 1 && b.rows() >= 1, "covariance needs non-empty point sets");
  check_dims(a.cols());
  check_dims(b.cols());
  const Eigen::Index dims = a.cols();
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      double r2 = 0.0;
      for (Eigen::Index d = 0; d < dims; ++d) {
        const double diff = a(i, d) - b(j, d);
        r2 += diff * diff * inv_sq_[d];
      }
      k(i, j) = variance_ * std::exp(-0.5 * r2);
    }
  }
  return k;
}

Eigen::MatrixXd RbfKernel::cov(const Eigen::Ref<const Points>& a) const {
  require(a.rows() >= 1, "covariance needs a non-empty point set");
  check_dims(a.cols());
  const Eigen::Index dims = a.cols();
  Eigen::MatrixXd k(a.rows(), a.rows());
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    k(j, j) = variance_;
    for (Eigen::Index i = j + 1; i < a.rows(); ++i) {
      double r2 = 0.0;
      for (Eigen::Index d = 0; d < dims; ++d) {
        const double diff = a(i, d) - a(j, d);
        r2 += diff * diff * inv_sq_[d];
      }
      k(i, j) = k(j, i) = variance_ * std::exp(-0.5 * r2);
    }
  }
  return k;
}

Points RbfKernel::grad_lhs(const Eigen::Ref<const Points>& a, const Eigen::Ref<const Points>& b,
                           const Eigen::Ref<const Eigen::MatrixXd>& k,
                           const Eigen::Ref<const Eigen::MatrixXd>& upstream) const {
  // d k(a_i, b_j) / d a_id = -k_ij (a_id - b_jd) / l_d^2, so with W = G .* K:
  //   dF/da_id = -(a_id * rowsum(W)_i - (W b)_id) / l_d^2.
  const Eigen::MatrixXd weighted = upstream.cwiseProduct(k);
  const Eigen::VectorXd row_sum = weighted.rowwise().sum();
  Points grad = weighted * b;
  for (Eigen::Index d = 0; d < a.cols(); ++d) {
    grad.col(d) = (grad.col(d) - a.col(d).cwiseProduct(row_sum)) * inv_sq_[d];
  }
  return grad;
}

Eigen::MatrixXd cov_matrix(const RbfKernel& k, const Eigen::Ref<const Points>& a,
                           const Eigen::Ref<const Points>& b) {
  return k.cov(a, b);
}

}  // namespace ipp
