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

#include "ipp/transform.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ipp/error.hpp"

namespace ipp {

SensingModel SensingModel::point() { return {}; }

SensingModel SensingModel::arc(int p) {
  SensingModel s;
  s.kind = Kind::kArc;
  s.points = p;
  s.validate();
  return s;
}

SensingModel SensingModel::line_fov(double length, int p) {
  SensingModel s;
  s.kind = Kind::kLineFov;
  s.line_length = length;
  s.points = p;
  s.validate();
  return s;
}

SensingModel SensingModel::square_fov_height(double half_angle, int g, double min_height,
                                             double max_height) {
  SensingModel s;
  s.kind = Kind::kSquareFovHeight;
  s.half_angle = half_angle;
  s.grid = g;
  s.min_height = min_height;
  s.max_height = max_height;
  s.validate();
  return s;
}

void SensingModel::validate() const {
  switch (kind) {
    case Kind::kPoint:
      return;
    case Kind::kArc:
      require(points >= 2, "arc sensing needs p >= 2");
      return;
    case Kind::kLineFov:
      require(points >= 1, "line FoV needs p >= 1");
      require(line_length > 0.0, "line FoV length must be positive");
      return;
    case Kind::kSquareFovHeight:
      require(grid >= 2, "square FoV needs g >= 2");
      require(half_angle > 0.0 && half_angle < std::numbers::pi / 2,
              "square FoV half angle must be in (0, pi/2)");
      require(min_height > 0.0 && min_height < max_height,
              "square FoV height range must satisfy 0 < min < max");
      return;
  }
}

Aggregation Aggregation::uniform(std::size_t groups, std::size_t p) {
  require(groups >= 1 && p >= 1, "aggregation needs groups >= 1 and p >= 1");
  Aggregation a;
  a.offsets_.resize(groups + 1);
  for (std::size_t g = 0; g <= groups; ++g) a.offsets_[g] = g * p;
  return a;
}

Aggregation Aggregation::identity(std::size_t n) {
  Aggregation a;
  a.offsets_.resize(n + 1);
  for (std::size_t g = 0; g <= n; ++g) a.offsets_[g] = g;
  return a;
}

void Aggregation::append(const Aggregation& other) {
  const std::size_t base = expanded();
  for (std::size_t g = 1; g < other.offsets_.size(); ++g) {
    offsets_.push_back(base + other.offsets_[g]);
  }
}

Eigen::MatrixXd Aggregation::dense() const {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(expanded()),
                                            static_cast<Eigen::Index>(groups()));
  for (std::size_t g = 0; g < groups(); ++g) {
    const double w = 1.0 / static_cast<double>(group_size(g));
    for (std::size_t i = offsets_[g]; i < offsets_[g + 1]; ++i) t(i, g) = w;
  }
  return t;
}

Eigen::MatrixXd Aggregation::pool_rows(const Eigen::Ref<const Eigen::MatrixXd>& m) const {
  require(static_cast<std::size_t>(m.rows()) == expanded(), "aggregation row count mismatch");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(groups()), m.cols());
  for (std::size_t g = 0; g < groups(); ++g) {
    const auto size = static_cast<Eigen::Index>(group_size(g));
    out.row(g) = m.middleRows(offsets_[g], size).colwise().sum() / static_cast<double>(size);
  }
  return out;
}

Eigen::MatrixXd Aggregation::spread_rows(const Eigen::Ref<const Eigen::MatrixXd>& m) const {
  require(static_cast<std::size_t>(m.rows()) == groups(), "aggregation group count mismatch");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(expanded()), m.cols());
  for (std::size_t g = 0; g < groups(); ++g) {
    const auto size = static_cast<Eigen::Index>(group_size(g));
    out.middleRows(offsets_[g], size) = (m.row(g) / static_cast<double>(size)).replicate(size, 1);
  }
  return out;
}

Eigen::MatrixXd Aggregation::pool_both(const Eigen::Ref<const Eigen::MatrixXd>& m) const {
  const Eigen::MatrixXd rows = pool_rows(m);
  return pool_rows(rows.transpose()).transpose();
}

Eigen::MatrixXd Aggregation::spread_both(const Eigen::Ref<const Eigen::MatrixXd>& m) const {
  const Eigen::MatrixXd rows = spread_rows(m);
  return spread_rows(rows.transpose()).transpose();
}

Aggregation aggregation_matrix(std::size_t groups, std::size_t p) {
  return Aggregation::uniform(groups, p);
}

namespace {

double linspace_weight(int k, int p) {
  return p == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(p - 1);
}

void require_grad_shape(const Eigen::Ref<const Points>& grad, Eigen::Index rows, Eigen::Index cols) {
  require(grad.rows() == rows && grad.cols() == cols, "expanded gradient has the wrong shape");
}

}  // namespace

Points expand_interpolate(const Eigen::Ref<const Points>& waypoints, int p) {
  require(waypoints.rows() >= 2, "interpolation needs at least two waypoints");
  require(p >= 2, "interpolation needs p >= 2");
  const Eigen::Index segments = waypoints.rows() - 1;
  Points out(segments * p, waypoints.cols());
  for (Eigen::Index s = 0; s < segments; ++s) {
    for (int k = 0; k < p; ++k) {
      const double w = linspace_weight(k, p);
      out.row(s * p + k) = (1.0 - w) * waypoints.row(s) + w * waypoints.row(s + 1);
    }
  }
  return out;
}

Points expand_interpolate_backward(const Eigen::Ref<const Points>& waypoints, int p,
                                   const Eigen::Ref<const Points>& grad_expanded) {
  const Eigen::Index segments = waypoints.rows() - 1;
  require_grad_shape(grad_expanded, segments * p, waypoints.cols());
  Points grad = Points::Zero(waypoints.rows(), waypoints.cols());
  for (Eigen::Index s = 0; s < segments; ++s) {
    for (int k = 0; k < p; ++k) {
      const double w = linspace_weight(k, p);
      grad.row(s) += (1.0 - w) * grad_expanded.row(s * p + k);
      grad.row(s + 1) += w * grad_expanded.row(s * p + k);
    }
  }
  return grad;
}

Points expand_line_fov(const Eigen::Ref<const Points>& waypoints, double length, int p) {
  require(waypoints.cols() == 3, "line FoV expects (x, y, theta) inputs");
  require(p >= 1, "line FoV needs p >= 1");
  Points out(waypoints.rows() * p, 2);
  for (Eigen::Index i = 0; i < waypoints.rows(); ++i) {
    const double c = std::cos(waypoints(i, 2));
    const double s = std::sin(waypoints(i, 2));
    for (int k = 0; k < p; ++k) {
      const double reach = length * linspace_weight(k, p);
      out(i * p + k, 0) = waypoints(i, 0) + reach * c;
      out(i * p + k, 1) = waypoints(i, 1) + reach * s;
    }
  }
  return out;
}

Points expand_line_fov_backward(const Eigen::Ref<const Points>& waypoints, double length, int p,
                                const Eigen::Ref<const Points>& grad_expanded) {
  require(waypoints.cols() == 3, "line FoV expects (x, y, theta) inputs");
  require_grad_shape(grad_expanded, waypoints.rows() * p, 2);
  Points grad = Points::Zero(waypoints.rows(), 3);
  for (Eigen::Index i = 0; i < waypoints.rows(); ++i) {
    const double c = std::cos(waypoints(i, 2));
    const double s = std::sin(waypoints(i, 2));
    for (int k = 0; k < p; ++k) {
      const double reach = length * linspace_weight(k, p);
      const double gx = grad_expanded(i * p + k, 0);
      const double gy = grad_expanded(i * p + k, 1);
      grad(i, 0) += gx;
      grad(i, 1) += gy;
      grad(i, 2) += reach * (-s * gx + c * gy);
    }
  }
  return grad;
}

Points expand_square_fov_height(const Eigen::Ref<const Points>& waypoints, double half_angle,
                                int g) {
  require(waypoints.cols() == 3, "square FoV expects (x, y, h) inputs");
  require(g >= 2, "square FoV needs g >= 2");
  const double tan_a = std::tan(half_angle);
  const int per = g * g;
  Points out(waypoints.rows() * per, 2);
  for (Eigen::Index i = 0; i < waypoints.rows(); ++i) {
    const double h = waypoints(i, 2);
    require(h > 0.0, "square FoV height must be positive (waypoint " + std::to_string(i) + ")");
    const double half_side = h * tan_a;
    for (int a = 0; a < g; ++a) {
      const double ua = -1.0 + 2.0 * a / (g - 1);
      for (int b = 0; b < g; ++b) {
        const double ub = -1.0 + 2.0 * b / (g - 1);
        out(i * per + a * g + b, 0) = waypoints(i, 0) + half_side * ua;
        out(i * per + a * g + b, 1) = waypoints(i, 1) + half_side * ub;
      }
    }
  }
  return out;
}

Points expand_square_fov_height_backward(const Eigen::Ref<const Points>& waypoints,
                                         double half_angle, int g,
                                         const Eigen::Ref<const Points>& grad_expanded) {
  require(waypoints.cols() == 3, "square FoV expects (x, y, h) inputs");
  const int per = g * g;
  require_grad_shape(grad_expanded, waypoints.rows() * per, 2);
  const double tan_a = std::tan(half_angle);
  Points grad = Points::Zero(waypoints.rows(), 3);
  for (Eigen::Index i = 0; i < waypoints.rows(); ++i) {
    for (int a = 0; a < g; ++a) {
      const double ua = -1.0 + 2.0 * a / (g - 1);
      for (int b = 0; b < g; ++b) {
        const double ub = -1.0 + 2.0 * b / (g - 1);
        const double gx = grad_expanded(i * per + a * g + b, 0);
        const double gy = grad_expanded(i * per + a * g + b, 1);
        grad(i, 0) += gx;
        grad(i, 1) += gy;
        grad(i, 2) += tan_a * (ua * gx + ub * gy);
      }
    }
  }
  return grad;
}

Expansion expand(const SensingModel& sensing, const Eigen::Ref<const Points>& waypoints) {
  switch (sensing.kind) {
    case SensingModel::Kind::kPoint:
      return {waypoints, Aggregation::identity(static_cast<std::size_t>(waypoints.rows()))};
    case SensingModel::Kind::kArc:
      return {expand_interpolate(waypoints, sensing.points),
              Aggregation::uniform(static_cast<std::size_t>(waypoints.rows() - 1),
                                   static_cast<std::size_t>(sensing.points))};
    case SensingModel::Kind::kLineFov:
      return {expand_line_fov(waypoints, sensing.line_length, sensing.points),
              Aggregation::uniform(static_cast<std::size_t>(waypoints.rows()),
                                   static_cast<std::size_t>(sensing.points))};
    case SensingModel::Kind::kSquareFovHeight:
      return {expand_square_fov_height(waypoints, sensing.half_angle, sensing.grid),
              Aggregation::uniform(static_cast<std::size_t>(waypoints.rows()),
                                   static_cast<std::size_t>(sensing.grid * sensing.grid))};
  }
  throw_invalid("unknown sensing model");
}

Points expand_backward(const SensingModel& sensing, const Eigen::Ref<const Points>& waypoints,
                       const Eigen::Ref<const Points>& grad_expanded) {
  switch (sensing.kind) {
    case SensingModel::Kind::kPoint:
      return grad_expanded;
    case SensingModel::Kind::kArc:
      return expand_interpolate_backward(waypoints, sensing.points, grad_expanded);
    case SensingModel::Kind::kLineFov:
      return expand_line_fov_backward(waypoints, sensing.line_length, sensing.points,
                                      grad_expanded);
    case SensingModel::Kind::kSquareFovHeight:
      return expand_square_fov_height_backward(waypoints, sensing.half_angle, sensing.grid,
                                               grad_expanded);
  }
  throw_invalid("unknown sensing model");
}

}  // namespace ipp
