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

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ipp/env.hpp"
#include "ipp/kernel.hpp"

namespace ipp {

inline constexpr std::size_t kMaxFieldPoints = 10000;
inline constexpr std::size_t kMaxObservations = 5000;
inline constexpr std::size_t kMaxMiCandidates = 1000;

/// Values on a regular lattice over the environment (time is the last axis).
/// Grid rows are ordered with the first coordinate varying slowest.
class Field {
 public:
  Field(Environment env, std::vector<int> resolution, Eigen::VectorXd values, RbfKernel kernel,
        std::uint64_t seed);

  [[nodiscard]] const Environment& env() const { return env_; }
  [[nodiscard]] const std::vector<int>& resolution() const { return resolution_; }
  [[nodiscard]] const Points& grid() const { return grid_; }
  [[nodiscard]] const Eigen::VectorXd& values() const { return values_; }
  [[nodiscard]] const RbfKernel& kernel() const { return kernel_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] int dims() const { return env_.input_dims(); }

  /// Multilinear interpolation. Throws invalid-argument outside the bounds.
  [[nodiscard]] double value_at(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  [[nodiscard]] bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  Environment env_;
  std::vector<int> resolution_;
  Points grid_;
  Eigen::VectorXd values_;
  RbfKernel kernel_;
  std::uint64_t seed_;
};

/// Lattice points over env with `resolution[i]` points on axis i.
Points grid_points(const Environment& env, const std::vector<int>& resolution);

/// Exact draw from the zero-mean GP prior on the lattice.
Field sample_gp_field(const RbfKernel& kernel, const Environment& env,
                      const std::vector<int>& resolution, std::uint64_t seed);

struct Posterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

Posterior gp_posterior(const RbfKernel& kernel, double noise_variance,
                       const Eigen::Ref<const Points>& obs_x,
                       const Eigen::Ref<const Eigen::VectorXd>& obs_y,
                       const Eigen::Ref<const Points>& query_x);

double rmse(const Eigen::Ref<const Eigen::VectorXd>& pred,
            const Eigen::Ref<const Eigen::VectorXd>& truth);

struct EvalSensing {
  enum class Kind { kDiscrete, kContinuous };
  Kind kind = Kind::kDiscrete;
  /// Arc-length spacing for continuous sensing; <= 0 picks the smallest
  /// spatial lengthscale / 5.
  double step = 0.0;

  static EvalSensing discrete() { return {}; }
  static EvalSensing continuous(double step = 0.0) { return {Kind::kContinuous, step}; }
};

/// Field-space locations sensed along the paths. A waypoint maps to its
/// spatial coordinates plus, for spatio-temporal fields, its last column.
Points collect_observations(const Field& field, const std::vector<Path>& paths,
                            const EvalSensing& sensing);

struct EvalResult {
  double rmse = 0.0;
  Eigen::VectorXd predictions;  // posterior mean on field.grid()
  std::size_t observations = 0;
};

/// Observes the field along the paths (plus any `extra` field-space points),
/// reconstructs the grid with a full GP, and scores it.
EvalResult evaluate_paths(const Field& field, const std::vector<Path>& paths,
                          const EvalSensing& sensing, double noise_variance,
                          const Points& extra = Points(0, 0));

struct MiPlacement {
  std::vector<std::size_t> indices;  // in selection order
  std::vector<double> gains;         // variance ratio of each pick
};

/// Classic greedy mutual-information placement over a discrete candidate set.
/// Covariances include `noise_variance` on the diagonal.
MiPlacement greedy_mi_placement(const RbfKernel& kernel, const Eigen::Ref<const Points>& candidates,
                                std::size_t k, double noise_variance);

}  // namespace ipp
