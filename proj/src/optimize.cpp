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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ipp/error.hpp"
#include "ipp/rng.hpp"
#include "ipp/sgp.hpp"
#include "ipp/space_time.hpp"

namespace ipp {

InducingPaths::InducingPaths(Points pts, int robot_count)
    : points(std::move(pts)), robots(robot_count) {
  require(robots >= 1, "need at least one robot");
  require(points.rows() % robots == 0, "inducing point count must be a multiple of robots");
  waypoints = static_cast<int>(points.rows() / robots);
  frozen = FreezeMask::Constant(points.rows(), points.cols(), false);
}

void InducingPaths::freeze_waypoint(int robot_index, int waypoint, int first_col, int cols) {
  frozen.block(robot_index * waypoints + waypoint, first_col, 1, cols).setConstant(true);
}

void InducingPaths::validate() const {
  require(robots >= 1 && waypoints >= 1, "inducing paths need robots >= 1 and waypoints >= 1");
  require(points.rows() == static_cast<Eigen::Index>(robots) * waypoints,
          "inducing point count does not match robots x waypoints");
  require(frozen.rows() == points.rows() && frozen.cols() == points.cols(),
          "freeze mask shape does not match inducing points");
}

void ObjectiveConfig::validate() const {
  sensing.validate();
  penalties.validate();
  require(learning_rate > 0.0, "learning rate must be positive");
  require(max_iters >= 1, "max_iters must be at least 1");
  require(tolerance > 0.0, "tolerance must be positive");
  require(window >= 1, "convergence window must be at least 1");
}

ObjectiveValue evaluate_objective(const SgpModel& model, const InducingPaths& paths,
                                  const WaypointLayout& layout, const ObjectiveConfig& cfg) {
  std::vector<Expansion> parts;
  Eigen::Index total = paths.auxiliary.rows();
  for (int j = 0; j < paths.robots; ++j) {
    parts.push_back(expand(cfg.sensing, paths.robot(j)));
    total += parts.back().points.rows();
  }
  Points z(total, model.kernel().dims());
  Aggregation agg;
  Eigen::Index offset = 0;
  for (const auto& part : parts) {
    require(part.points.cols() == z.cols(), "expanded points do not match kernel dimension");
    z.middleRows(offset, part.points.rows()) = part.points;
    agg.append(part.aggregation);
    offset += part.points.rows();
  }
  if (paths.auxiliary.rows() > 0) {
    z.bottomRows(paths.auxiliary.rows()) = paths.auxiliary;
    agg.append(Aggregation::identity(static_cast<std::size_t>(paths.auxiliary.rows())));
  }

  const ElboGradient eg = elbo_and_grad(model, z, &agg);
  const double n = static_cast<double>(model.n());
  ObjectiveValue out;
  out.elbo = eg.value;
  out.grad = Points::Zero(paths.points.rows(), paths.points.cols());
  offset = 0;
  for (int j = 0; j < paths.robots; ++j) {
    const Eigen::Index rows = parts[j].points.rows();
    auto block = out.grad.middleRows(j * paths.waypoints, paths.waypoints);
    block = expand_backward(cfg.sensing, paths.robot(j), eg.grad.middleRows(offset, rows)) / n;
    offset += rows;
    if (cfg.penalties.active()) {
      const PenaltyValue pv = path_penalties(paths.robot(j), layout, cfg.penalties);
      out.penalty += pv.value;
      block -= pv.grad;
    }
  }
  out.value = out.elbo / n - out.penalty;
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Flat optimizer variables: either every waypoint coordinate, or spatial
// coordinates plus one shared temporal point per timestep.
class Parameterization {
 public:
  Parameterization(const InducingPaths& init, const WaypointLayout& layout,
                   const Environment& env, const SensingModel& sensing, bool space_time)
      : layout_(layout), robots_(init.robots), steps_(init.waypoints), space_time_(space_time) {
    const Eigen::Index rows = init.points.rows();
    if (!space_time_) {
      const Eigen::Index size = rows * layout.dims;
      resize(size);
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (int c = 0; c < layout.dims; ++c) {
          const Eigen::Index k = r * layout.dims + c;
          values_[k] = init.points(r, c);
          frozen_[k] = init.frozen(r, c);
          set_bounds(k, c, env, sensing);
        }
      }
      return;
    }
    const int d = layout.spatial_dims;
    resize(rows * d + steps_);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (int c = 0; c < d; ++c) {
        const Eigen::Index k = r * d + c;
        values_[k] = init.points(r, c);
        frozen_[k] = init.frozen(r, c);
        set_bounds(k, c, env, sensing);
      }
    }
    for (int i = 0; i < steps_; ++i) {
      const Eigen::Index k = rows * d + i;
      double sum = 0.0;
      std::optional<double> pinned;
      for (int j = 0; j < robots_; ++j) {
        const Eigen::Index r = static_cast<Eigen::Index>(j) * steps_ + i;
        sum += init.points(r, layout.time_col);
        if (init.frozen(r, layout.time_col) && !pinned) pinned = init.points(r, layout.time_col);
      }
      values_[k] = pinned ? *pinned : sum / robots_;
      frozen_[k] = pinned.has_value();
      set_bounds(k, layout.time_col, env, sensing);
    }
  }

  [[nodiscard]] const Eigen::VectorXd& values() const { return values_; }
  [[nodiscard]] bool frozen(Eigen::Index k) const { return frozen_[k] != 0; }
  [[nodiscard]] double lo(Eigen::Index k) const { return lo_[k]; }
  [[nodiscard]] double hi(Eigen::Index k) const { return hi_[k]; }
  [[nodiscard]] double scale(Eigen::Index k) const { return scale_[k]; }
  [[nodiscard]] Eigen::Index free_count() const {
    return static_cast<Eigen::Index>(std::count(frozen_.begin(), frozen_.end(), 0));
  }

  [[nodiscard]] Points waypoints(const Eigen::VectorXd& x) const {
    const Eigen::Index rows = static_cast<Eigen::Index>(robots_) * steps_;
    if (!space_time_) {
      return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          x.data(), rows, layout_.dims);
    }
    const int d = layout_.spatial_dims;
    const Points space =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            x.data(), rows, d);
    return space_time_combine(space, x.tail(steps_), robots_);
  }

  [[nodiscard]] Eigen::VectorXd backward(const Eigen::VectorXd& x, const Points& grad_w) const {
    Eigen::VectorXd g(x.size());
    if (!space_time_) {
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          g.data(), grad_w.rows(), grad_w.cols()) = grad_w;
      return g;
    }
    const auto [g_space, g_time] = space_time_combine_backward(x.tail(steps_), robots_, grad_w);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        g.data(), g_space.rows(), g_space.cols()) = g_space;
    g.tail(steps_) = g_time;
    return g;
  }

 private:
  void resize(Eigen::Index size) {
    values_.resize(size);
    lo_.resize(size);
    hi_.resize(size);
    scale_.resize(size);
    frozen_.assign(static_cast<std::size_t>(size), 0);
  }

  void set_bounds(Eigen::Index k, int col, const Environment& env, const SensingModel& sensing) {
    if (col == layout_.extra_col) {
      if (sensing.kind == SensingModel::Kind::kLineFov) {
        lo_[k] = -kInf;
        hi_[k] = kInf;
        scale_[k] = 2.0 * std::numbers::pi;
      } else {
        lo_[k] = sensing.min_height;
        hi_[k] = sensing.max_height;
        scale_[k] = sensing.max_height - sensing.min_height;
      }
      return;
    }
    const int env_col = col == layout_.time_col ? env.spatial_dims() : col;
    lo_[k] = env.lo(env_col);
    hi_[k] = env.hi(env_col);
    scale_[k] = hi_[k] - lo_[k];
  }

  WaypointLayout layout_;
  int robots_;
  int steps_;
  bool space_time_;
  Eigen::VectorXd values_, lo_, hi_, scale_;
  std::vector<char> frozen_;
};

void check_inputs(const SgpModel& model, const InducingPaths& initial, const ObjectiveConfig& cfg,
                  const Environment& env, const WaypointLayout& layout) {
  cfg.validate();
  initial.validate();
  require(model.kernel().dims() == env.input_dims(),
          "kernel dimension does not match the environment");
  require(initial.points.cols() == layout.dims,
          "inducing points have " + std::to_string(initial.points.cols()) +
              " coordinates, expected " + std::to_string(layout.dims));
  if (cfg.sensing.has_extra_coordinate()) {
    require(env.spatial_dims() == 2 && !env.has_time(),
            "FoV sensing models need a 2D spatial environment without time");
  }
  if (cfg.sensing.kind == SensingModel::Kind::kArc) {
    require(initial.waypoints >= 2, "arc sensing needs at least two waypoints per robot");
  }
  if (initial.auxiliary.rows() > 0) {
    require(initial.auxiliary.cols() == model.kernel().dims(),
            "auxiliary inducing points do not match kernel dimension");
  }
  if (cfg.penalties.velocity_limit || cfg.penalties.acceleration_limit) {
    require(layout.has_time(), "velocity/acceleration limits need a time horizon");
  }
}

}  // namespace

OptimizeResult optimize(const SgpModel& model, const InducingPaths& initial,
                        const ObjectiveConfig& cfg, const Environment& env) {
  const WaypointLayout layout = WaypointLayout::make(env, cfg.sensing.has_extra_coordinate());
  check_inputs(model, initial, cfg, env, layout);
  const bool space_time = cfg.decompose_space_time && layout.has_time();
  const Parameterization par(initial, layout, env, cfg.sensing, space_time);

  InducingPaths work = initial;
  auto evaluate = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    work.points = par.waypoints(x);
    const ObjectiveValue ov = evaluate_objective(model, work, layout, cfg);
    if (!std::isfinite(ov.value) || !ov.grad.allFinite()) {
      throw Error(ErrorKind::kNumericalFailure, "objective or gradient is not finite");
    }
    *grad = par.backward(x, ov.grad);
    return ov;
  };

  OptimizeResult result;
  Eigen::VectorXd x = par.values();
  Eigen::VectorXd grad;
  ObjectiveValue current = evaluate(x, &grad);
  result.trace.push_back(current.value);
  result.objective = current.value;
  result.elbo = current.elbo;
  result.paths = initial;
  if (par.free_count() == 0) return result;

  Eigen::VectorXd best_x = x;
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    beta1_pow *= kBeta1;
    beta2_pow *= kBeta2;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      if (par.frozen(k)) continue;
      const double g = grad[k] * par.scale(k);
      m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g;
      v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g * g;
      const double m_hat = m[k] / (1.0 - beta1_pow);
      const double v_hat = v[k] / (1.0 - beta2_pow);
      const double step = cfg.learning_rate * m_hat / (std::sqrt(v_hat) + kEps);
      x[k] = std::clamp(x[k] + par.scale(k) * step, par.lo(k), par.hi(k));
    }
    try {
      current = evaluate(x, &grad);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNumericalFailure) throw;
      result.warning = true;
      result.warning_message = std::string("stopped at iteration ") + std::to_string(it) + ": " +
                               e.what();
      break;
    }
    result.iterations = it;
    result.trace.push_back(current.value);
    if (current.value > result.objective) {
      result.objective = current.value;
      result.elbo = current.elbo;
      best_x = x;
    }
    if (it >= cfg.window) {
      const double before = result.trace[result.trace.size() - 1 - cfg.window];
      const double change = std::abs(current.value - before);
      if (change <= cfg.tolerance * std::max(std::abs(before), 1e-300)) break;
    }
  }

  result.paths.points = par.waypoints(best_x);
  return result;
}

PlacementResult continuous_sgp_placement(const RbfKernel& kernel, const Environment& env,
                                         std::size_t s, std::size_t n, std::uint64_t seed,
                                         double noise_variance, const ObjectiveConfig& cfg) {
  require(s >= 1, "placement needs s >= 1");
  require(s <= n, "placement needs s <= n");
  const Points train = sample_uniform(env, n, derive_seed(seed, 0));
  Rng rng(derive_seed(seed, 1));
  const auto idx = rng.subset(n, s);
  Points init(static_cast<Eigen::Index>(s), train.cols());
  for (std::size_t i = 0; i < s; ++i) init.row(static_cast<Eigen::Index>(i)) = train.row(idx[i]);

  ObjectiveConfig c = cfg;
  c.penalties = {};
  c.sensing = SensingModel::point();
  c.decompose_space_time = false;
  const SgpModel model(kernel, train, noise_variance);
  const OptimizeResult r = optimize(model, InducingPaths(init, 1), c, env);
  return {r.paths.points, r.trace, r.objective, r.elbo, r.iterations, r.warning, r.warning_message};
}

}  // namespace ipp
