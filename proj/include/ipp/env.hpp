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
#include <utility>

#include <Eigen/Dense>

namespace ipp {

/// Row-per-point storage used throughout: row i is point i.
using Points = Eigen::MatrixXd;

/// Axis-aligned box in d spatial dimensions (meters), optionally extended
/// with a time horizon (minutes) that becomes the last input coordinate.
class Environment {
 public:
  Environment(Eigen::VectorXd lower, Eigen::VectorXd upper,
              std::optional<std::pair<double, double>> time_horizon = {});

  /// Unit box [0,1]^d.
  static Environment unit(int dims);

  [[nodiscard]] const Eigen::VectorXd& lower() const { return lower_; }
  [[nodiscard]] const Eigen::VectorXd& upper() const { return upper_; }
  [[nodiscard]] const std::optional<std::pair<double, double>>& time_horizon() const {
    return horizon_;
  }

  [[nodiscard]] int spatial_dims() const { return static_cast<int>(lower_.size()); }
  [[nodiscard]] bool has_time() const { return horizon_.has_value(); }
  /// Spatial dims plus one when a time horizon is present.
  [[nodiscard]] int input_dims() const { return spatial_dims() + (has_time() ? 1 : 0); }

  /// Lower/upper bound of input coordinate i (time is the last coordinate).
  [[nodiscard]] double lo(int i) const;
  [[nodiscard]] double hi(int i) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  std::optional<std::pair<double, double>> horizon_;
};

/// Column layout of a waypoint parameter vector: spatial coordinates first,
/// then an optional sensor coordinate (heading or height), then time.
struct WaypointLayout {
  int spatial_dims = 0;
  int extra_col = -1;
  int time_col = -1;
  int dims = 0;

  static WaypointLayout make(const Environment& env, bool extra);
  [[nodiscard]] bool has_time() const { return time_col >= 0; }
};

/// Ordered waypoints of one robot. Columns beyond spatial_dims (time, heading,
/// height) are carried along but ignored by length computations.
struct Path {
  Points waypoints;
  int robot_id = 0;
  int spatial_dims = 0;

  Path() = default;
  Path(Points w, int id, int spatial);
  /// All columns treated as spatial.
  explicit Path(Points w, int id = 0);
};

/// n points uniform over the box (and horizon). Deterministic for a seed.
Points sample_uniform(const Environment& env, std::size_t n, std::uint64_t seed);

/// Sum of Euclidean lengths between consecutive waypoints over the first
/// `spatial_dims` coordinates.
double path_length(const Path& path);
double path_length(const Eigen::Ref<const Points>& waypoints, int spatial_dims);

/// s points at equal spatial arc-length spacing along the polyline; all
/// columns are linearly interpolated. Endpoints are copied exactly.
Path resample_path(const Path& path, std::size_t s);

/// Coordinate-wise clamp into the box (and time horizon).
Points project_to_bounds(const Eigen::Ref<const Points>& points, const Environment& env);

}  // namespace ipp
