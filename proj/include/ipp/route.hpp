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
#include <vector>

#include <Eigen/Dense>

#include "ipp/env.hpp"

namespace ipp {

/// Visiting order over point indices. Routes here are always open paths.
struct Tour {
  std::vector<std::size_t> order;
  bool open = true;
  std::optional<std::size_t> fixed_start;
  std::optional<std::size_t> fixed_end;
};

/// Length of `order` through `points` (all columns), no return leg.
double tour_length(const Eigen::Ref<const Points>& points, const std::vector<std::size_t>& order);

/// Open-path TSP heuristic: nearest-neighbour construction (best over all
/// starts when the start is free) followed by first-improvement 2-opt until
/// no improving move remains. Fixed endpoints stay in the first/last slot.
/// The seed only matters above 64 points, where the candidate starts are a
/// seeded sample.
Tour tsp_order(const Eigen::Ref<const Points>& points,
               std::optional<std::size_t> fixed_start = {},
               std::optional<std::size_t> fixed_end = {}, std::uint64_t seed = 0);

/// Nearest-neighbour construction only (the starting point of tsp_order).
std::vector<std::size_t> nearest_neighbor_order(const Eigen::MatrixXd& dist,
                                                std::size_t start,
                                                std::optional<std::size_t> fixed_end);

/// Partitions the points into r routes: seeded balanced k-means (capacity
/// ceil(n / r)) followed by tsp_order per cluster. r = 1 is tsp_order.
std::vector<Tour> vrp_routes(const Eigen::Ref<const Points>& points, int robots,
                             std::uint64_t seed = 0);

/// Exact linear assignment (Hungarian method). Returns, for every row, the
/// assigned column, minimizing the summed cost.
std::vector<std::size_t> solve_assignment(const Eigen::Ref<const Eigen::MatrixXd>& cost);

/// Reindexes robot waypoints timestep by timestep so each transition i -> i+1
/// uses the minimum-cost matching between the robots' spatial positions.
/// `waypoints` is robot-major: (robots * steps) x dims.
Points assign_waypoints(const Eigen::Ref<const Points>& waypoints, int robots, int spatial_dims);

/// Per-timestep transition costs of a robot-major array under identity
/// matching (sum over robots of the spatial step length).
std::vector<double> transition_costs(const Eigen::Ref<const Points>& waypoints, int robots,
                                     int spatial_dims);

}  // namespace ipp
