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

#include <optional>

#include <Eigen/Dense>

#include "ipp/env.hpp"

namespace ipp {

/// Route constraints enforced as ReLU penalties on each ordered path.
struct PenaltyConfig {
  std::optional<double> distance_budget;     // meters per robot
  std::optional<double> velocity_limit;      // meters / minute
  std::optional<double> acceleration_limit;  // meters / minute^2, off unless set
  double weight = 100.0;                     // alpha

  void validate() const;
  [[nodiscard]] bool any() const {
    return distance_budget || velocity_limit || acceleration_limit;
  }
  /// Some limit is set and carries weight.
  [[nodiscard]] bool active() const { return any() && weight > 0.0; }
};

/// Penalty value with its gradient with respect to the waypoint array.
struct PenaltyValue {
  double value = 0.0;
  Points grad;
};

/// alpha * max(length - budget, 0) over the spatial columns.
PenaltyValue distance_penalty(const Eigen::Ref<const Points>& waypoints, int spatial_dims,
                              double budget, double weight);

/// alpha * sum_i max(|dx_i| / dt_i - v_max, 0). Time increments are floored
/// at kMinTimeStep.
PenaltyValue velocity_penalty(const Eigen::Ref<const Points>& waypoints,
                              const WaypointLayout& layout, double v_max, double weight);

/// alpha * sum_i max(|v_{i+1} - v_i| / tau_i - a_max, 0) with per-segment
/// velocities v_i and tau_i the mean of the two adjacent time steps.
PenaltyValue acceleration_penalty(const Eigen::Ref<const Points>& waypoints,
                                  const WaypointLayout& layout, double a_max, double weight);

/// Sum of every configured penalty on one path.
PenaltyValue path_penalties(const Eigen::Ref<const Points>& waypoints,
                            const WaypointLayout& layout, const PenaltyConfig& cfg);

inline constexpr double kMinTimeStep = 1e-6;

}  // namespace ipp
