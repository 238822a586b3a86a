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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ipp/env.hpp"
#include "ipp/kernel.hpp"
#include "ipp/sgp.hpp"

namespace ipp {

/// Previously collected sample locations; the time coordinate (last column)
/// is minutes before now and must be <= 0.
struct PastData {
  Points points;

  [[nodiscard]] bool empty() const { return points.rows() == 0; }
  void validate(const Environment& env) const;
};

struct PlanOptions {
  /// Fixed spatial start/end shared by every robot. Frozen during optimization.
  std::optional<Eigen::VectorXd> start;
  std::optional<Eigen::VectorXd> end;
  PastData past;
  /// Unlabeled training inputs; defaults to default_train_samples(dims).
  std::optional<std::size_t> train_samples;
  double noise_variance = kDefaultNoiseVariance;
};

struct PlanResult {
  std::vector<Path> paths;  // one per robot, waypoints in visiting order
  double objective = 0.0;
  double elbo = 0.0;
  std::vector<double> trace;
  bool warning = false;
  std::string warning_message;
  int iterations = 0;
};

/// Single-robot planner. Waypoint columns follow WaypointLayout: spatial,
/// then heading/height for FoV sensors, then time.
PlanResult plan_single(const RbfKernel& kernel, const Environment& env, std::size_t s,
                       const ObjectiveConfig& cfg, std::uint64_t seed,
                       const PlanOptions& options = {});

/// r robots with s waypoints each. r = 1 runs exactly plan_single.
PlanResult plan_multi(const RbfKernel& kernel, const Environment& env, std::size_t s, int robots,
                      const ObjectiveConfig& cfg, std::uint64_t seed,
                      const PlanOptions& options = {});

/// Appends the past samples as frozen auxiliary inducing points.
InducingPaths attach_past_data(const SgpModel& model, InducingPaths paths, const PastData& past);

}  // namespace ipp
