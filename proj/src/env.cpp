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

#include "ipp/env.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "ipp/error.hpp"
#include "ipp/rng.hpp"

namespace ipp {

Environment::Environment(Eigen::VectorXd lower, Eigen::VectorXd upper,
                         std::optional<std::pair<double, double>> time_horizon)
    : lower_(std::move(lower)), upper_(std::move(upper)), horizon_(time_horizon) {
  require(lower_.size() >= 1, "environment needs at least one spatial dimension");
  require(lower_.size() == upper_.size(), "environment bounds differ in dimension");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    require(lower_[i] < upper_[i],
            "environment lower bound must be below upper bound in dim " + std::to_string(i));
  }
  if (horizon_) require(horizon_->first < horizon_->second, "time horizon must satisfy t0 < t1");
}

Environment Environment::unit(int dims) {
  return {Eigen::VectorXd::Zero(dims), Eigen::VectorXd::Ones(dims)};
}

double Environment::lo(int i) const {
  if (i < spatial_dims()) return lower_[i];
  require(has_time() && i == spatial_dims(), "coordinate index out of range");
  return horizon_->first;
}

double Environment::hi(int i) const {
  if (i < spatial_dims()) return upper_[i];
  require(has_time() && i == spatial_dims(), "coordinate index out of range");
  return horizon_->second;
}

WaypointLayout WaypointLayout::make(const Environment& env, bool extra) {
  WaypointLayout l;
  l.spatial_dims = env.spatial_dims();
  int next = l.spatial_dims;
  if (extra) l.extra_col = next++;
  if (env.has_time()) l.time_col = next++;
  l.dims = next;
  return l;
}

Path::Path(Points w, int id, int spatial)
    : waypoints(std::move(w)), robot_id(id), spatial_dims(spatial) {
  require(waypoints.rows() >= 1, "path needs at least one waypoint");
  require(spatial_dims >= 1 && spatial_dims <= waypoints.cols(),
          "path spatial dimension out of range");
}

Path::Path(Points w, int id) : Path(w, id, static_cast<int>(w.cols())) {}

Points sample_uniform(const Environment& env, std::size_t n, std::uint64_t seed) {
  require(n >= 1, "sample_uniform needs n >= 1");
  Rng rng(seed);
  const int dims = env.input_dims();
  Points out(static_cast<Eigen::Index>(n), dims);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < dims; ++c) out(r, c) = rng.uniform(env.lo(c), env.hi(c));
  }
  return out;
}

double path_length(const Eigen::Ref<const Points>& waypoints, int spatial_dims) {
  double total = 0.0;
  for (Eigen::Index i = 1; i < waypoints.rows(); ++i) {
    total += (waypoints.row(i).head(spatial_dims) - waypoints.row(i - 1).head(spatial_dims)).norm();
  }
  return total;
}

double path_length(const Path& path) { return path_length(path.waypoints, path.spatial_dims); }

Path resample_path(const Path& path, std::size_t s) {
  require(s >= 2, "resample_path needs s >= 2");
  const Points& w = path.waypoints;
  if (w.rows() < 2) throw Error(ErrorKind::kDegeneratePath, "cannot resample a single-point path");

  std::vector<double> cumulative(static_cast<std::size_t>(w.rows()), 0.0);
  for (Eigen::Index i = 1; i < w.rows(); ++i) {
    cumulative[i] = cumulative[i - 1] +
                    (w.row(i).head(path.spatial_dims) - w.row(i - 1).head(path.spatial_dims)).norm();
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) throw Error(ErrorKind::kDegeneratePath, "cannot resample a zero-length path");

  Points out(static_cast<Eigen::Index>(s), w.cols());
  out.row(0) = w.row(0);
  out.row(out.rows() - 1) = w.row(w.rows() - 1);
  std::size_t seg = 1;
  for (std::size_t k = 1; k + 1 < s; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(s - 1);
    // Earliest segment whose end reaches the target, so junction ties stay on
    // the earlier segment.
    while (seg + 1 < cumulative.size() && cumulative[seg] < target) ++seg;
    const double seg_len = cumulative[seg] - cumulative[seg - 1];
    const double frac = seg_len > 0.0 ? (target - cumulative[seg - 1]) / seg_len : 1.0;
    out.row(static_cast<Eigen::Index>(k)) =
        w.row(seg - 1) + std::clamp(frac, 0.0, 1.0) * (w.row(seg) - w.row(seg - 1));
  }
  return Path(std::move(out), path.robot_id, path.spatial_dims);
}

Points project_to_bounds(const Eigen::Ref<const Points>& points, const Environment& env) {
  require(points.cols() == env.input_dims(),
          "point dimension " + std::to_string(points.cols()) + " does not match environment (" +
              std::to_string(env.input_dims()) + ")");
  Points out = points;
  for (int c = 0; c < env.input_dims(); ++c) {
    out.col(c) = out.col(c).cwiseMax(env.lo(c)).cwiseMin(env.hi(c));
  }
  return out;
}

}  // namespace ipp
