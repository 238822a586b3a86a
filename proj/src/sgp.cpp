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

#include "ipp/sgp.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ipp/error.hpp"

namespace ipp {

SgpModel::SgpModel(RbfKernel kernel, Points train_x, double noise_variance)
    : kernel_(std::move(kernel)), train_x_(std::move(train_x)), noise_variance_(noise_variance) {
  require(train_x_.rows() >= 1, "sparse GP needs at least one training input");
  require(train_x_.cols() == kernel_.dims(), "training inputs do not match kernel dimension");
  require(noise_variance_ > 0.0, "noise variance must be positive");
}

Eigen::MatrixXd Nystrom::dense_qnn() const {
  const Eigen::MatrixXd half = chol.triangularView<Eigen::Lower>().solve(kun);
  return half.transpose() * half;
}

Eigen::VectorXd Nystrom::diag_qnn() const {
  const Eigen::MatrixXd half = chol.triangularView<Eigen::Lower>().solve(kun);
  return half.colwise().squaredNorm().transpose();
}

namespace {

// Lower Cholesky factor of k + jitter I, escalating jitter by decades.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& k, double variance, double* jitter) {
  for (double level = kJitterStart; level <= kJitterMax * 1.0000001; level *= 10.0) {
    const double j = level * variance;
    Eigen::MatrixXd shifted = k;
    shifted.diagonal().array() += j;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd l = llt.matrixL();
    const auto diag = l.diagonal().array();
    if (!(diag > 0.0).all() || !diag.isFinite().all()) continue;
    *jitter = j;
    return l;
  }
  throw Error(ErrorKind::kNumericalFailure,
              "inducing covariance is not positive definite even with jitter " +
                  std::to_string(kJitterMax) + " x variance");
}

// Covariances between the inducing set and the training inputs, before and
// after aggregation.
struct Covariances {
  Eigen::MatrixXd kzn;  // expanded x n
  Eigen::MatrixXd kzz;  // expanded x expanded
  Nystrom nystrom;
};

Covariances build(const SgpModel& model, const Eigen::Ref<const Points>& z,
                  const Aggregation* agg) {
  require(z.rows() >= 1, "need at least one inducing point");
  if (agg) {
    require(agg->expanded() == static_cast<std::size_t>(z.rows()),
            "aggregation rows (" + std::to_string(agg->expanded()) +
                ") do not match expanded point count (" + std::to_string(z.rows()) + ")");
  }
  const bool pooled = agg && !agg->is_identity();
  Covariances c;
  c.kzn = model.kernel().cov(z, model.train_x());
  c.kzz = model.kernel().cov(z);
  const Eigen::MatrixXd kuu = pooled ? agg->pool_both(c.kzz) : c.kzz;
  c.nystrom.kun = pooled ? agg->pool_rows(c.kzn) : c.kzn;
  c.nystrom.chol = cholesky_with_jitter(kuu, model.kernel().variance(), &c.nystrom.jitter);
  return c;
}

// Whitened quantities shared by the value and the gradient:
//   A = L^{-1} K_un / s,  B = I + A A^T.
struct Whitened {
  Eigen::MatrixXd a;
  Eigen::MatrixXd aat;
  Eigen::LLT<Eigen::MatrixXd> b;
  double logdet_b = 0.0;
};

Whitened whiten(const Nystrom& nys, double noise_variance) {
  Whitened w;
  w.a = nys.chol.triangularView<Eigen::Lower>().solve(nys.kun) / std::sqrt(noise_variance);
  const Eigen::Index g = w.a.rows();
  w.aat = Eigen::MatrixXd::Zero(g, g);
  w.aat.selfadjointView<Eigen::Lower>().rankUpdate(w.a);
  w.aat.triangularView<Eigen::StrictlyUpper>() = w.aat.transpose();
  Eigen::MatrixXd b = w.aat;
  b.diagonal().array() += 1.0;
  w.b.compute(b);
  if (w.b.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumericalFailure, "I + A A^T factorization failed");
  }
  w.logdet_b = 2.0 * w.b.matrixLLT().diagonal().array().log().sum();
  return w;
}

ElboTerms terms_from(const SgpModel& model, const Whitened& w) {
  const double n = static_cast<double>(model.n());
  const double s2 = model.noise_variance();
  ElboTerms t;
  t.constant = -0.5 * n * std::log(2.0 * std::numbers::pi);
  t.data_fit = 0.0;  // y = 0
  t.complexity = -0.5 * (n * std::log(s2) + w.logdet_b);
  const double trace_q = s2 * w.aat.trace();
  t.trace_residual = n * model.kernel().variance() - trace_q;
  t.trace = -t.trace_residual / (2.0 * s2);
  t.value = t.constant + t.data_fit + t.complexity + t.trace;
  return t;
}

}  // namespace

Nystrom compute_qnn(const SgpModel& model, const Eigen::Ref<const Points>& inducing) {
  return build(model, inducing, nullptr).nystrom;
}

Nystrom qnn_aggregated(const SgpModel& model, const Eigen::Ref<const Points>& expanded,
                       const Aggregation& aggregation) {
  return build(model, expanded, &aggregation).nystrom;
}

ElboTerms elbo_terms(const SgpModel& model, const Eigen::Ref<const Points>& inducing,
                     const Aggregation* aggregation) {
  const Covariances c = build(model, inducing, aggregation);
  return terms_from(model, whiten(c.nystrom, model.noise_variance()));
}

double elbo(const SgpModel& model, const Eigen::Ref<const Points>& inducing) {
  return elbo_terms(model, inducing).value;
}

double elbo(const SgpModel& model, const Eigen::Ref<const Points>& expanded,
            const Aggregation& aggregation) {
  return elbo_terms(model, expanded, &aggregation).value;
}

ElboGradient elbo_and_grad(const SgpModel& model, const Eigen::Ref<const Points>& inducing,
                           const Aggregation* aggregation) {
  const Covariances c = build(model, inducing, aggregation);
  const Whitened w = whiten(c.nystrom, model.noise_variance());
  const auto& l = c.nystrom.chol;
  const Eigen::Index g = l.rows();
  const double s = std::sqrt(model.noise_variance());

  // With R = I - B^{-1}:
  //   dF/dK_un = L^{-T} R A / s
  //   dF/dK_uu = -1/2 L^{-T} (A A^T - R) L^{-1}
  const Eigen::MatrixXd r =
      Eigen::MatrixXd::Identity(g, g) - w.b.solve(Eigen::MatrixXd::Identity(g, g));
  Eigen::MatrixXd g_un = l.transpose().triangularView<Eigen::Upper>().solve(r * w.a) / s;
  const Eigen::MatrixXd inner = w.aat - r;
  const Eigen::MatrixXd half = l.transpose().triangularView<Eigen::Upper>().solve(inner);
  Eigen::MatrixXd g_uu =
      -0.5 * l.transpose().triangularView<Eigen::Upper>().solve(half.transpose());
  g_uu = 0.5 * (g_uu + g_uu.transpose()).eval();

  const bool pooled = aggregation && !aggregation->is_identity();
  if (pooled) {
    g_un = aggregation->spread_rows(g_un);
    g_uu = aggregation->spread_both(g_uu);
  }

  ElboGradient out;
  out.value = terms_from(model, w).value;
  out.grad = model.kernel().grad_lhs(inducing, model.train_x(), c.kzn, g_un) +
             2.0 * model.kernel().grad_lhs(inducing, inducing, c.kzz, g_uu);
  return out;
}

Points elbo_grad(const SgpModel& model, const Eigen::Ref<const Points>& inducing,
                 const FreezeMask& frozen) {
  require(frozen.rows() == inducing.rows() && frozen.cols() == inducing.cols(),
          "freeze mask shape does not match inducing points");
  Points grad = elbo_and_grad(model, inducing).grad;
  for (Eigen::Index i = 0; i < grad.rows(); ++i) {
    for (Eigen::Index j = 0; j < grad.cols(); ++j) {
      if (frozen(i, j)) grad(i, j) = 0.0;
    }
  }
  return grad;
}

std::size_t default_train_samples(int input_dims) { return input_dims <= 2 ? 1000 : 2000; }

}  // namespace ipp
