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

// Expansion transformations map waypoint parameters to the point sets that
// approximate what a sensor observes (an arc between waypoints, a line FoV,
// a height-dependent square FoV). Aggregation averages covariances over each
// group of expanded points so only a group-sized matrix is ever factorized.
//
// Every expansion is smooth in its inputs and ships with an explicit
// backward pass (vector-Jacobian product) used by the optimizer.

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ipp/env.hpp"

namespace ipp {

struct SensingModel {
  enum class Kind { kPoint, kArc, kLineFov, kSquareFovHeight };

  Kind kind = Kind::kPoint;
  int points = 1;              // p: points per arc segment or per line FoV
  double line_length = 1.0;    // meters
  double half_angle = 0.5;     // radians, square FoV
  int grid = 2;                // g: square FoV is g x g points
  double min_height = 0.1;     // meters, bounds on the height coordinate
  double max_height = 10.0;

  static SensingModel point();
  static SensingModel arc(int p);
  static SensingModel line_fov(double length, int p);
  static SensingModel square_fov_height(double half_angle, int g, double min_height,
                                        double max_height);

  /// Throws invalid-argument when the invariants for `kind` do not hold.
  void validate() const;

  /// Extra per-waypoint parameter (heading or height), if any.
  [[nodiscard]] bool has_extra_coordinate() const {
    return kind == Kind::kLineFov || kind == Kind::kSquareFovHeight;
  }
};

/// Mean aggregation over contiguous groups of expanded points. Equivalent to
/// the (expanded x groups) matrix with entry 1/|group| where row i belongs to
/// group j, but applied as pooling so the matrix is never stored.
class Aggregation {
 public:
  Aggregation() = default;

  /// `groups` groups of `p` consecutive points each.
  static Aggregation uniform(std::size_t groups, std::size_t p);
  /// One group per point.
  static Aggregation identity(std::size_t n);

  /// Appends `other`'s groups after this one's.
  void append(const Aggregation& other);

  [[nodiscard]] std::size_t groups() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  [[nodiscard]] std::size_t expanded() const { return offsets_.empty() ? 0 : offsets_.back(); }
  [[nodiscard]] bool is_identity() const { return groups() == expanded(); }
  [[nodiscard]] std::size_t group_begin(std::size_t g) const { return offsets_[g]; }
  [[nodiscard]] std::size_t group_size(std::size_t g) const { return offsets_[g + 1] - offsets_[g]; }

  /// Dense T (expanded x groups).
  [[nodiscard]] Eigen::MatrixXd dense() const;

  /// T^T * m: averages rows within each group.
  [[nodiscard]] Eigen::MatrixXd pool_rows(const Eigen::Ref<const Eigen::MatrixXd>& m) const;
  /// T * m: copies group row g, scaled by 1/|g|, to each member row.
  [[nodiscard]] Eigen::MatrixXd spread_rows(const Eigen::Ref<const Eigen::MatrixXd>& m) const;
  /// T^T * m * T for square m.
  [[nodiscard]] Eigen::MatrixXd pool_both(const Eigen::Ref<const Eigen::MatrixXd>& m) const;
  /// T * m * T^T for square m.
  [[nodiscard]] Eigen::MatrixXd spread_both(const Eigen::Ref<const Eigen::MatrixXd>& m) const;

 private:
  std::vector<std::size_t> offsets_{0};
};

/// groups*p x groups mean-aggregation.
Aggregation aggregation_matrix(std::size_t groups, std::size_t p);

/// Inclusive linear interpolation of p points across every consecutive
/// waypoint pair: (m-1)*p points, segment-major.
Points expand_interpolate(const Eigen::Ref<const Points>& waypoints, int p);
Points expand_interpolate_backward(const Eigen::Ref<const Points>& waypoints, int p,
                                   const Eigen::Ref<const Points>& grad_expanded);

/// (x, y, theta) -> p points from (x, y) to (x, y) + l (cos theta, sin theta).
Points expand_line_fov(const Eigen::Ref<const Points>& waypoints, double length, int p);
Points expand_line_fov_backward(const Eigen::Ref<const Points>& waypoints, double length, int p,
                                const Eigen::Ref<const Points>& grad_expanded);

/// (x, y, h) -> g x g grid centered at (x, y), side 2 h tan(half_angle).
Points expand_square_fov_height(const Eigen::Ref<const Points>& waypoints, double half_angle,
                                int g);
Points expand_square_fov_height_backward(const Eigen::Ref<const Points>& waypoints,
                                         double half_angle, int g,
                                         const Eigen::Ref<const Points>& grad_expanded);

/// Expanded points plus their aggregation for one ordered waypoint sequence.
struct Expansion {
  Points points;
  Aggregation aggregation;
};

/// Dispatches on the sensing kind. For FoV sensors the extra coordinate is
/// consumed by the map; otherwise every column is a kernel input.
Expansion expand(const SensingModel& sensing, const Eigen::Ref<const Points>& waypoints);
Points expand_backward(const SensingModel& sensing, const Eigen::Ref<const Points>& waypoints,
                       const Eigen::Ref<const Points>& grad_expanded);

}  // namespace ipp
