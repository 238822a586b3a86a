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

#include "ipp/penalty.hpp"

#include <algorithm>
#include <vector>

#include "ipp/error.hpp"

namespace ipp {

void PenaltyConfig::validate() const {
  require(!distance_budget || *distance_budget > 0.0, "distance budget must be positive");
  require(!velocity_limit || *velocity_limit > 0.0, "velocity limit must be positive");
  require(!acceleration_limit || *acceleration_limit > 0.0, "acceleration limit must be positive");
  require(weight >= 0.0, "penalty weight must be non-negative");
}

PenaltyValue distance_penalty(const Eigen::Ref<const Points>& waypoints, int spatial_dims,
                              double budget, double weight) {
  require(budget > 0.0, "distance budget must be positive");
  PenaltyValue out{0.0, Points::Zero(waypoints.rows(), waypoints.cols())};
  const double excess = path_length(waypoints, spatial_dims) - budget;
  if (!(excess > 0.0)) return out;
  out.value = weight * excess;
  for (Eigen::Index i = 0; i + 1 < waypoints.rows(); ++i) {
    const Eigen::VectorXd d =
        (waypoints.row(i + 1).head(spatial_dims) - waypoints.row(i).head(spatial_dims)).transpose();
    const double len = d.norm();
    if (len == 0.0) continue;
    const Eigen::RowVectorXd u = (weight / len) * d.transpose();
    out.grad.row(i + 1).head(spatial_dims) += u;
    out.grad.row(i).head(spatial_dims) -= u;
  }
  return out;
}

namespace {

struct Segment {
  Eigen::VectorXd delta;  // spatial displacement
  double dt;              // floored time step
  bool floored;
};

std::vector<Segment> segments(const Eigen::Ref<const Points>& w, const WaypointLayout& layout) {
  std::vector<Segment> segs;
  for (Eigen::Index i = 0; i + 1 < w.rows(); ++i) {
    const double raw = w(i + 1, layout.time_col) - w(i, layout.time_col);
    segs.push_back({(w.row(i + 1).head(layout.spatial_dims) - w.row(i).head(layout.spatial_dims))
                        .transpose(),
                    std::max(raw, kMinTimeStep), raw <= kMinTimeStep});
  }
  return segs;
}

// Pushes a gradient on segment k's time step back to the time coordinates.
void add_dt_grad(Points& grad, const WaypointLayout& layout, const Segment& seg, Eigen::Index k,
                 double g) {
  if (seg.floored) return;
  grad(k + 1, layout.time_col) += g;
  grad(k, layout.time_col) -= g;
}

}  // namespace

PenaltyValue velocity_penalty(const Eigen::Ref<const Points>& waypoints,
                              const WaypointLayout& layout, double v_max, double weight) {
  require(layout.has_time(), "velocity penalty needs a time coordinate");
  require(v_max > 0.0, "velocity limit must be positive");
  PenaltyValue out{0.0, Points::Zero(waypoints.rows(), waypoints.cols())};
  const auto segs = segments(waypoints, layout);
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const auto& seg = segs[k];
    const double dist = seg.delta.norm();
    const double speed = dist / seg.dt;
    if (!(speed > v_max)) continue;
    out.value += weight * (speed - v_max);
    const auto i = static_cast<Eigen::Index>(k);
    if (dist > 0.0) {
      const Eigen::RowVectorXd u = (weight / (dist * seg.dt)) * seg.delta.transpose();
      out.grad.row(i + 1).head(layout.spatial_dims) += u;
      out.grad.row(i).head(layout.spatial_dims) -= u;
    }
    add_dt_grad(out.grad, layout, seg, i, -weight * dist / (seg.dt * seg.dt));
  }
  return out;
}

PenaltyValue acceleration_penalty(const Eigen::Ref<const Points>& waypoints,
                                  const WaypointLayout& layout, double a_max, double weight) {
  require(layout.has_time(), "acceleration penalty needs a time coordinate");
  require(a_max > 0.0, "acceleration limit must be positive");
  PenaltyValue out{0.0, Points::Zero(waypoints.rows(), waypoints.cols())};
  const auto segs = segments(waypoints, layout);
  if (segs.size() < 2) return out;

  std::vector<Eigen::VectorXd> vel;
  for (const auto& s : segs) vel.push_back(s.delta / s.dt);
  std::vector<Eigen::VectorXd> g_vel(segs.size(), Eigen::VectorXd::Zero(layout.spatial_dims));
  std::vector<double> g_dt(segs.size(), 0.0);

  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const double tau = 0.5 * (segs[i].dt + segs[i + 1].dt);
    const Eigen::VectorXd acc = (vel[i + 1] - vel[i]) / tau;
    const double mag = acc.norm();
    if (!(mag > a_max)) continue;
    out.value += weight * (mag - a_max);
    const Eigen::VectorXd e = acc / mag;
    g_vel[i + 1] += weight * e / tau;
    g_vel[i] -= weight * e / tau;
    const double g_tau = -weight * mag / tau;
    g_dt[i] += 0.5 * g_tau;
    g_dt[i + 1] += 0.5 * g_tau;
  }
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const Eigen::RowVectorXd gx = (g_vel[k] / segs[k].dt).transpose();
    out.grad.row(i + 1).head(layout.spatial_dims) += gx;
    out.grad.row(i).head(layout.spatial_dims) -= gx;
    g_dt[k] -= g_vel[k].dot(vel[k]) / segs[k].dt;
    add_dt_grad(out.grad, layout, segs[k], i, g_dt[k]);
  }
  return out;
}

PenaltyValue path_penalties(const Eigen::Ref<const Points>& waypoints,
                            const WaypointLayout& layout, const PenaltyConfig& cfg) {
  PenaltyValue total{0.0, Points::Zero(waypoints.rows(), waypoints.cols())};
  auto add = [&total](const PenaltyValue& p) {
    total.value += p.value;
    total.grad += p.grad;
  };
  if (cfg.distance_budget) {
    add(distance_penalty(waypoints, layout.spatial_dims, *cfg.distance_budget, cfg.weight));
  }
  if (cfg.velocity_limit) add(velocity_penalty(waypoints, layout, *cfg.velocity_limit, cfg.weight));
  if (cfg.acceleration_limit) {
    add(acceleration_penalty(waypoints, layout, *cfg.acceleration_limit, cfg.weight));
  }
  return total;
}

}  // namespace ipp
