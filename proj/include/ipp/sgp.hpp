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

// Zero-label variational sparse GP. With y = 0 the collapsed bound reduces to
//
//   F = -n/2 log(2 pi) - 1/2 log|Q_nn + s2 I| - 1/(2 s2) Tr(K_nn - Q_nn),
//   Q_nn = K_nu K_uu^{-1} K_un,
//
// which only depends on where the inducing points are. Maximizing F over the
// inducing points spreads them to explain as much of the prior variance at
// the unlabeled training inputs as possible. Every quantity is computed from
// the (groups x groups) factorization; the n x n matrix is never formed
// except by Nystrom::dense_qnn(), which exists for checks on small problems.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ipp/env.hpp"
#include "ipp/kernel.hpp"
#include "ipp/penalty.hpp"
#include "ipp/transform.hpp"

namespace ipp {

/// Jitter ladder, relative to the kernel variance.
inline constexpr double kJitterStart = 1e-6;
inline constexpr double kJitterMax = 1e-2;

class SgpModel {
 public:
  SgpModel(RbfKernel kernel, Points train_x, double noise_variance);

  [[nodiscard]] const RbfKernel& kernel() const { return kernel_; }
  [[nodiscard]] const Points& train_x() const { return train_x_; }
  [[nodiscard]] double noise_variance() const { return noise_variance_; }
  [[nodiscard]] Eigen::Index n() const { return train_x_.rows(); }

 private:
  RbfKernel kernel_;
  Points train_x_;
  double noise_variance_;
};

/// Nystrom factor Q_nn = K_un^T (K_uu + jitter I)^{-1} K_un, where u are the
/// (possibly aggregated) inducing variables.
struct Nystrom {
  Eigen::MatrixXd kun;   // groups x n
  Eigen::MatrixXd chol;  // lower Cholesky factor of K_uu + jitter I
  double jitter = 0.0;   // absolute jitter that succeeded

  [[nodiscard]] Eigen::Index groups() const { return chol.rows(); }
  /// Dense n x n Q_nn. O(n^2 m); for checks only.
  [[nodiscard]] Eigen::MatrixXd dense_qnn() const;
  /// diag(Q_nn) without forming the matrix.
  [[nodiscard]] Eigen::VectorXd diag_qnn() const;
};

Nystrom compute_qnn(const SgpModel& model, const Eigen::Ref<const Points>& inducing);

/// Aggregated variant: K_un = T^T K_{zn}, K_uu = T^T K_zz T.
Nystrom qnn_aggregated(const SgpModel& model, const Eigen::Ref<const Points>& expanded,
                       const Aggregation& aggregation);

/// Individual terms of the bound. `trace_residual` is Tr(K_nn - Q_nn) and the
/// `trace` term equals -trace_residual / (2 s2).
struct ElboTerms {
  double constant = 0.0;
  double data_fit = 0.0;
  double complexity = 0.0;
  double trace = 0.0;
  double trace_residual = 0.0;
  double value = 0.0;
};

ElboTerms elbo_terms(const SgpModel& model, const Eigen::Ref<const Points>& inducing,
                     const Aggregation* aggregation = nullptr);

double elbo(const SgpModel& model, const Eigen::Ref<const Points>& inducing);
double elbo(const SgpModel& model, const Eigen::Ref<const Points>& expanded,
            const Aggregation& aggregation);

struct ElboGradient {
  double value = 0.0;
  Points grad;  // dF / d(inducing or expanded points)
};

/// F and its analytic gradient with respect to every (expanded) point.
ElboGradient elbo_and_grad(const SgpModel& model, const Eigen::Ref<const Points>& inducing,
                           const Aggregation* aggregation = nullptr);

using FreezeMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// dF/dXm with frozen coordinates zeroed.
Points elbo_grad(const SgpModel& model, const Eigen::Ref<const Points>& inducing,
                 const FreezeMask& frozen);

/// Inducing points organized as r robots x t waypoints, robot-major: rows
/// [j*t, (j+1)*t) hold robot j in visiting order. `auxiliary` rows are extra
/// inducing points (kernel-input coordinates) that are never updated and are
/// not part of any path.
struct InducingPaths {
  Points points;
  FreezeMask frozen;
  int robots = 1;
  int waypoints = 0;
  Points auxiliary;

  InducingPaths() = default;
  InducingPaths(Points pts, int robot_count);

  [[nodiscard]] auto robot(int j) const { return points.middleRows(j * waypoints, waypoints); }
  [[nodiscard]] auto robot(int j) { return points.middleRows(j * waypoints, waypoints); }
  void freeze_waypoint(int robot_index, int waypoint, int first_col, int cols);
  void validate() const;
};

struct ObjectiveConfig {
  SensingModel sensing;
  PenaltyConfig penalties;
  double learning_rate = 1e-2;  // in coordinates normalized by the environment extent
  int max_iters = 2000;
  double tolerance = 1e-6;
  int window = 20;
  // Shared per-timestep time coordinate across robots when a horizon exists.
  bool decompose_space_time = true;

  void validate() const;
};

/// Penalized objective used by the optimizer: F / n minus the summed path
/// penalties, with its gradient with respect to every waypoint coordinate.
struct ObjectiveValue {
  double value = 0.0;
  double elbo = 0.0;
  double penalty = 0.0;
  Points grad;
};

ObjectiveValue evaluate_objective(const SgpModel& model, const InducingPaths& paths,
                                  const WaypointLayout& layout, const ObjectiveConfig& cfg);

struct OptimizeResult {
  InducingPaths paths;
  std::vector<double> trace;  // objective at every evaluated iterate
  double objective = 0.0;     // best-seen objective (the returned iterate)
  double elbo = 0.0;
  bool warning = false;
  std::string warning_message;
  int iterations = 0;
};

/// Adaptive-moment gradient ascent with projection onto the environment.
/// Returns the best iterate seen; frozen coordinates are never written.
OptimizeResult optimize(const SgpModel& model, const InducingPaths& initial,
                        const ObjectiveConfig& cfg, const Environment& env);

/// Unlabeled training-set size used when the caller does not choose one.
std::size_t default_train_samples(int input_dims);

inline constexpr double kDefaultNoiseVariance = 1e-2;

struct PlacementResult {
  Points points;
  std::vector<double> trace;
  double objective = 0.0;
  double elbo = 0.0;
  int iterations = 0;
  bool warning = false;
  std::string warning_message;
};

/// Unconstrained placement: n uniform unlabeled samples, s of them as the
/// initial inducing points, then optimize with no penalties.
PlacementResult continuous_sgp_placement(const RbfKernel& kernel, const Environment& env,
                                         std::size_t s, std::size_t n, std::uint64_t seed,
                                         double noise_variance = kDefaultNoiseVariance,
                                         const ObjectiveConfig& cfg = {});

}  // namespace ipp
