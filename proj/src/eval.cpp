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

#include "ipp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ipp/error.hpp"
#include "ipp/rng.hpp"

namespace ipp {

namespace {

std::size_t lattice_size(const std::vector<int>& resolution) {
  std::size_t total = 1;
  for (int r : resolution) total *= static_cast<std::size_t>(r);
  return total;
}

void check_resolution(const Environment& env, const std::vector<int>& resolution) {
  require(static_cast<int>(resolution.size()) == env.input_dims(),
          "field resolution needs one entry per input dimension (" +
              std::to_string(env.input_dims()) + ")");
  for (int r : resolution) require(r >= 2, "field resolution must be at least 2 per axis");
}

double axis_value(const Environment& env, const std::vector<int>& res, int axis, int i) {
  const double lo = env.lo(axis);
  const double hi = env.hi(axis);
  if (i == res[axis] - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(res[axis] - 1);
}

}  // namespace

Points grid_points(const Environment& env, const std::vector<int>& resolution) {
  check_resolution(env, resolution);
  const int d = env.input_dims();
  const std::size_t total = lattice_size(resolution);
  Points g(static_cast<Eigen::Index>(total), d);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t row = 0; row < total; ++row) {
    for (int a = 0; a < d; ++a) {
      g(static_cast<Eigen::Index>(row), a) = axis_value(env, resolution, a, idx[a]);
    }
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < resolution[a]) break;
      idx[a] = 0;
    }
  }
  return g;
}

Field::Field(Environment env, std::vector<int> resolution, Eigen::VectorXd values,
             RbfKernel kernel, std::uint64_t seed)
    : env_(std::move(env)),
      resolution_(std::move(resolution)),
      grid_(grid_points(env_, resolution_)),
      values_(std::move(values)),
      kernel_(std::move(kernel)),
      seed_(seed) {
  require(values_.size() == grid_.rows(),
          "field has " + std::to_string(values_.size()) + " values for " +
              std::to_string(grid_.rows()) + " grid points");
  require(values_.allFinite(), "field values must be finite");
  require(kernel_.dims() == env_.input_dims(), "field kernel does not match its environment");
}

bool Field::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dims()) return false;
  for (int a = 0; a < dims(); ++a) {
    const double slack = 1e-9 * std::max(1.0, env_.hi(a) - env_.lo(a));
    if (!(x[a] >= env_.lo(a) - slack && x[a] <= env_.hi(a) + slack)) return false;
  }
  return true;
}

double Field::value_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require(contains(x), "point lies outside the field bounds");
  const int d = dims();
  std::vector<int> base(static_cast<std::size_t>(d));
  std::vector<double> frac(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const double lo = env_.lo(a);
    const double hi = env_.hi(a);
    const double u = std::clamp((x[a] - lo) / (hi - lo), 0.0, 1.0) * (resolution_[a] - 1);
    const int i = std::min(static_cast<int>(std::floor(u)), resolution_[a] - 2);
    base[a] = i;
    frac[a] = u - i;
  }
  double total = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a) {
      const int bit = (corner >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      flat = flat * static_cast<std::size_t>(resolution_[a]) + static_cast<std::size_t>(base[a] + bit);
    }
    if (w != 0.0) total += w * values_[static_cast<Eigen::Index>(flat)];
  }
  return total;
}

Field sample_gp_field(const RbfKernel& kernel, const Environment& env,
                      const std::vector<int>& resolution, std::uint64_t seed) {
  check_resolution(env, resolution);
  require(kernel.dims() == env.input_dims(), "kernel does not match the environment");
  const std::size_t total = lattice_size(resolution);
  if (total > kMaxFieldPoints) {
    throw Error(ErrorKind::kResourceLimit,
                "field grid has " + std::to_string(total) + " points, the limit is " +
                    std::to_string(kMaxFieldPoints) + "; lower the field resolution");
  }
  const Points g = grid_points(env, resolution);
  Eigen::MatrixXd k = kernel.cov(g);
  // Lattices finer than the lengthscale are numerically rank deficient.
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool ok = false;
  for (double level = 1e-10; level <= 1.0001e-4; level *= 10.0) {
    Eigen::MatrixXd shifted = k;
    shifted.diagonal().array() += level * kernel.variance();
    llt.compute(shifted);
    if (llt.info() == Eigen::Success && (llt.matrixLLT().diagonal().array() > 0.0).all()) {
      ok = true;
      break;
    }
  }
  if (!ok) throw Error(ErrorKind::kNumericalFailure, "field covariance factorization failed");
  Rng rng(seed);
  Eigen::VectorXd z(static_cast<Eigen::Index>(total));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  Eigen::VectorXd values = llt.matrixL() * z;
  return Field(env, resolution, std::move(values), kernel, seed);
}

Posterior gp_posterior(const RbfKernel& kernel, double noise_variance,
                       const Eigen::Ref<const Points>& obs_x,
                       const Eigen::Ref<const Eigen::VectorXd>& obs_y,
                       const Eigen::Ref<const Points>& query_x) {
  require(obs_x.rows() >= 1, "GP posterior needs at least one observation");
  require(obs_x.rows() == obs_y.size(), "observation inputs and values differ in count");
  require(noise_variance > 0.0, "noise variance must be positive");
  if (static_cast<std::size_t>(obs_x.rows()) > kMaxObservations) {
    throw Error(ErrorKind::kResourceLimit,
                std::to_string(obs_x.rows()) + " observations exceed the dense limit of " +
                    std::to_string(kMaxObservations) + "; use a coarser sensing step");
  }
  Eigen::MatrixXd koo = kernel.cov(obs_x);
  koo.diagonal().array() += noise_variance;
  const Eigen::LLT<Eigen::MatrixXd> llt(koo);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumericalFailure, "observation covariance factorization failed");
  }
  const Eigen::MatrixXd kqo = kernel.cov(query_x, obs_x);
  Posterior post;
  post.mean = kqo * llt.solve(obs_y);
  const Eigen::MatrixXd v = llt.matrixL().solve(kqo.transpose());
  post.variance = (kernel.variance() - v.colwise().squaredNorm().array()).matrix().transpose();
  for (Eigen::Index i = 0; i < post.variance.size(); ++i) {
    if (post.variance[i] < -1e-10) {
      throw Error(ErrorKind::kNumericalFailure, "negative posterior variance");
    }
    post.variance[i] = std::max(post.variance[i], 0.0);
  }
  return post;
}

double rmse(const Eigen::Ref<const Eigen::VectorXd>& pred,
            const Eigen::Ref<const Eigen::VectorXd>& truth) {
  require(pred.size() == truth.size(), "rmse needs vectors of equal length");
  require(pred.size() >= 1, "rmse needs at least one value");
  return std::sqrt((pred - truth).squaredNorm() / static_cast<double>(pred.size()));
}

Points collect_observations(const Field& field, const std::vector<Path>& paths,
                            const EvalSensing& sensing) {
  const int sd = field.env().spatial_dims();
  const bool timed = field.env().has_time();
  double step = sensing.step;
  if (sensing.kind == EvalSensing::Kind::kContinuous && step <= 0.0) {
    step = field.kernel().lengthscales().head(sd).minCoeff() / 5.0;
  }

  std::vector<Eigen::VectorXd> obs;
  auto to_field = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd x(field.dims());
    x.head(sd) = w.head(sd);
    if (timed) x[sd] = w[w.size() - 1];
    return x;
  };
  for (std::size_t j = 0; j < paths.size(); ++j) {
    const Points& w = paths[j].waypoints;
    require(w.cols() >= sd + (timed ? 1 : 0),
            "robot " + std::to_string(paths[j].robot_id) + " waypoints have too few coordinates");
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      if (!field.contains(to_field(w.row(i).transpose()))) {
        throw Error(ErrorKind::kInfeasibleConstraint,
                    "robot " + std::to_string(paths[j].robot_id) + " waypoint " +
                        std::to_string(i) + " lies outside the field bounds");
      }
    }
    if (sensing.kind == EvalSensing::Kind::kDiscrete || w.rows() == 1) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) obs.push_back(to_field(w.row(i).transpose()));
      continue;
    }
    // Samples at arc length 0, step, 2 step, ... along the spatial polyline.
    double seg_start = 0.0;
    double next = 0.0;
    for (Eigen::Index i = 0; i + 1 < w.rows(); ++i) {
      const double len = (w.row(i + 1).head(sd) - w.row(i).head(sd)).norm();
      const double seg_end = seg_start + len;
      while (next <= seg_end) {
        const double f = len > 0.0 ? (next - seg_start) / len : 0.0;
        const Eigen::VectorXd p = (1.0 - f) * w.row(i).transpose() + f * w.row(i + 1).transpose();
        obs.push_back(to_field(p));
        next += step;
      }
      seg_start = seg_end;
    }
  }
  Points out(static_cast<Eigen::Index>(obs.size()), field.dims());
  for (std::size_t k = 0; k < obs.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = obs[k];
  return out;
}

EvalResult evaluate_paths(const Field& field, const std::vector<Path>& paths,
                          const EvalSensing& sensing, double noise_variance, const Points& extra) {
  const Points sensed = collect_observations(field, paths, sensing);
  Points x(sensed.rows() + extra.rows(), field.dims());
  x.topRows(sensed.rows()) = sensed;
  if (extra.rows() > 0) {
    require(extra.cols() == field.dims(), "extra observations do not match the field dimension");
    x.bottomRows(extra.rows()) = extra;
  }
  require(x.rows() >= 1, "no observations to evaluate");
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y[i] = field.value_at(x.row(i).transpose());
  const Posterior post = gp_posterior(field.kernel(), noise_variance, x, y, field.grid());
  EvalResult res;
  res.predictions = post.mean;
  res.rmse = rmse(post.mean, field.values());
  res.observations = static_cast<std::size_t>(x.rows());
  return res;
}

MiPlacement greedy_mi_placement(const RbfKernel& kernel, const Eigen::Ref<const Points>& candidates,
                                std::size_t k, double noise_variance) {
  const auto n = static_cast<std::size_t>(candidates.rows());
  require(k < n, "greedy MI needs k smaller than the candidate count");
  require(noise_variance >= 0.0, "noise variance must be non-negative");
  if (n > kMaxMiCandidates) {
    throw Error(ErrorKind::kResourceLimit, "greedy MI supports at most " +
                                               std::to_string(kMaxMiCandidates) + " candidates");
  }
  Eigen::MatrixXd kfull = kernel.cov(candidates);
  kfull.diagonal().array() += noise_variance;

  MiPlacement out;
  std::vector<char> chosen(n, 0);
  for (std::size_t step = 0; step < k; ++step) {
    // sigma^2_{y|A}: conditional on the selected set.
    Eigen::VectorXd cond_a = kfull.diagonal();
    if (!out.indices.empty()) {
      const auto m = static_cast<Eigen::Index>(out.indices.size());
      Eigen::MatrixXd kaa(m, m);
      Eigen::MatrixXd kan(m, static_cast<Eigen::Index>(n));
      for (Eigen::Index a = 0; a < m; ++a) {
        kan.row(a) = kfull.row(static_cast<Eigen::Index>(out.indices[a]));
        for (Eigen::Index b = 0; b < m; ++b) {
          kaa(a, b) = kfull(static_cast<Eigen::Index>(out.indices[a]),
                            static_cast<Eigen::Index>(out.indices[b]));
        }
      }
      const Eigen::LLT<Eigen::MatrixXd> llt(kaa);
      if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::kNumericalFailure, "selected-set covariance is singular");
      }
      const Eigen::MatrixXd v = llt.matrixL().solve(kan);
      cond_a -= v.colwise().squaredNorm().transpose();
    }
    // sigma^2_{y|U\y} = 1 / (K_UU^{-1})_yy over the unselected set U.
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i]) rest.push_back(i);
    }
    const auto u = static_cast<Eigen::Index>(rest.size());
    Eigen::MatrixXd kuu(u, u);
    for (Eigen::Index a = 0; a < u; ++a) {
      for (Eigen::Index b = 0; b < u; ++b) {
        kuu(a, b) = kfull(static_cast<Eigen::Index>(rest[a]), static_cast<Eigen::Index>(rest[b]));
      }
    }
    const Eigen::LLT<Eigen::MatrixXd> lu(kuu);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorKind::kNumericalFailure,
                  "candidate covariance is singular; use a positive noise variance");
    }
    const Eigen::MatrixXd linv = lu.matrixL().solve(Eigen::MatrixXd::Identity(u, u));
    const Eigen::VectorXd inv_diag = linv.colwise().squaredNorm().transpose();

    std::size_t best = n;
    double best_gain = -1.0;
    for (Eigen::Index a = 0; a < u; ++a) {
      const std::size_t y = rest[static_cast<std::size_t>(a)];
      const double gain = std::max(cond_a[static_cast<Eigen::Index>(y)], 0.0) * inv_diag[a];
      if (gain > best_gain) {
        best_gain = gain;
        best = y;
      }
    }
    chosen[best] = 1;
    out.indices.push_back(best);
    out.gains.push_back(best_gain);
  }
  return out;
}

}  // namespace ipp
