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

#include "ipp/plan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ipp/error.hpp"
#include "ipp/rng.hpp"
#include "ipp/route.hpp"

namespace ipp {

void PastData::validate(const Environment& env) const {
  if (empty()) return;
  require(env.has_time(), "past data needs a time horizon");
  require(points.cols() == env.input_dims(),
          "past data points need " + std::to_string(env.input_dims()) + " coordinates");
  require(points.allFinite(), "past data contains non-finite values");
  const Eigen::Index t = env.spatial_dims();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    require(points(i, t) <= 0.0,
            "past data point " + std::to_string(i) + " has a positive time coordinate");
  }
}

InducingPaths attach_past_data(const SgpModel& model, InducingPaths paths, const PastData& past) {
  if (past.empty()) return paths;
  require(past.points.cols() == model.kernel().dims(),
          "past data does not match the kernel dimension");
  const Eigen::Index t = past.points.cols() - 1;
  for (Eigen::Index i = 0; i < past.points.rows(); ++i) {
    require(past.points(i, t) <= 0.0,
            "past data point " + std::to_string(i) + " has a positive time coordinate");
  }
  require(model.train_x().col(t).minCoeff() >= 0.0,
          "training inputs must lie on the non-negative timeline when past data is attached");
  const Eigen::Index old = paths.auxiliary.rows();
  Points aux(old + past.points.rows(), past.points.cols());
  if (old > 0) aux.topRows(old) = paths.auxiliary;
  aux.bottomRows(past.points.rows()) = past.points;
  paths.auxiliary = std::move(aux);
  return paths;
}

namespace {

Environment planning_env(const Environment& env, const PastData& past) {
  if (past.empty()) return env;
  const auto [lo, hi] = *env.time_horizon();
  const double start = std::max(lo, 0.0);
  require(hi > start, "time horizon must extend past t = 0 when past data is given");
  return Environment(env.lower(), env.upper(), std::make_pair(start, hi));
}

void check_endpoint(const std::optional<Eigen::VectorXd>& p, const Environment& env,
                    const char* name) {
  if (!p) return;
  require(p->size() == env.spatial_dims(), std::string(name) + " must have " +
                                               std::to_string(env.spatial_dims()) +
                                               " spatial coordinates");
  for (int i = 0; i < env.spatial_dims(); ++i) {
    require((*p)[i] >= env.lo(i) && (*p)[i] <= env.hi(i),
            std::string(name) + " lies outside the environment bounds");
  }
}

bool unconstrained_point_case(const Environment& env, const ObjectiveConfig& cfg,
                              const PlanOptions& opt) {
  return cfg.sensing.kind == SensingModel::Kind::kPoint && !cfg.penalties.active() &&
         !env.has_time() && !opt.start && !opt.end && opt.past.empty();
}

std::vector<std::size_t> time_order(const Points& rows, int time_col) {
  std::vector<std::size_t> order(static_cast<std::size_t>(rows.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows(static_cast<Eigen::Index>(a), time_col) <
           rows(static_cast<Eigen::Index>(b), time_col);
  });
  return order;
}

Points take_rows(const Eigen::Ref<const Points>& src, const std::vector<std::size_t>& idx) {
  Points out(static_cast<Eigen::Index>(idx.size()), src.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = src.row(idx[k]);
  return out;
}

PlanResult from_points(const Points& points, int robots, int steps, int spatial_dims) {
  PlanResult res;
  for (int j = 0; j < robots; ++j) {
    res.paths.emplace_back(points.middleRows(static_cast<Eigen::Index>(j) * steps, steps), j,
                           spatial_dims);
  }
  return res;
}

// Optimize first, order afterwards: with point sensing and no penalties the
// objective does not depend on the visiting order.
PlanResult plan_unconstrained(const RbfKernel& kernel, const Environment& env, std::size_t s,
                              int robots, const ObjectiveConfig& cfg, std::uint64_t seed,
                              std::size_t n, double noise) {
  const auto total = s * static_cast<std::size_t>(robots);
  const PlacementResult placed =
      continuous_sgp_placement(kernel, env, total, n, seed, noise, cfg);
  Points ordered(placed.points.rows(), placed.points.cols());
  const auto tours = vrp_routes(placed.points, robots, derive_seed(seed, 2));
  Eigen::Index row = 0;
  for (const auto& tour : tours) {
    for (auto k : tour.order) ordered.row(row++) = placed.points.row(static_cast<Eigen::Index>(k));
  }
  PlanResult res = from_points(ordered, robots, static_cast<int>(s), env.spatial_dims());
  res.objective = placed.objective;
  res.elbo = placed.elbo;
  res.trace = placed.trace;
  res.iterations = placed.iterations;
  res.warning = placed.warning;
  res.warning_message = placed.warning_message;
  return res;
}

PlanResult plan_impl(const RbfKernel& kernel, const Environment& env_in, std::size_t s,
                     int robots, const ObjectiveConfig& cfg, std::uint64_t seed,
                     const PlanOptions& opt) {
  require(s >= 2, "planning needs at least two waypoints per robot");
  require(robots >= 1, "planning needs at least one robot");
  require(kernel.dims() == env_in.input_dims(),
          "kernel has " + std::to_string(kernel.dims()) + " dimensions, environment has " +
              std::to_string(env_in.input_dims()));
  cfg.validate();
  require(opt.noise_variance > 0.0, "noise variance must be positive");
  opt.past.validate(env_in);
  check_endpoint(opt.start, env_in, "start");
  check_endpoint(opt.end, env_in, "end");
  if (cfg.sensing.has_extra_coordinate()) {
    require(env_in.spatial_dims() == 2 && !env_in.has_time(),
            "FoV sensing models need a 2D spatial environment without time");
  }
  if (cfg.penalties.velocity_limit || cfg.penalties.acceleration_limit) {
    require(env_in.has_time(), "velocity/acceleration limits need a time horizon");
  }
  if (opt.start && opt.end && cfg.penalties.distance_budget && cfg.penalties.active()) {
    const double gap = (*opt.start - *opt.end).norm();
    if (gap > *cfg.penalties.distance_budget) {
      throw Error(ErrorKind::kInfeasibleConstraint,
                  "distance budget " + std::to_string(*cfg.penalties.distance_budget) +
                      " is shorter than the start-end distance " + std::to_string(gap));
    }
  }

  const Environment env = planning_env(env_in, opt.past);
  const std::size_t n = opt.train_samples.value_or(default_train_samples(env.input_dims()));
  if (unconstrained_point_case(env, cfg, opt)) {
    require(s * static_cast<std::size_t>(robots) <= n,
            "need at least robots x waypoints training samples");
    return plan_unconstrained(kernel, env, s, robots, cfg, seed, n, opt.noise_variance);
  }

  const WaypointLayout layout = WaypointLayout::make(env, cfg.sensing.has_extra_coordinate());
  const int d = layout.spatial_dims;
  const std::size_t fixed = (opt.start ? 1 : 0) + (opt.end ? 1 : 0);
  const std::size_t free_per_robot = s - fixed;
  const std::size_t pool = free_per_robot * static_cast<std::size_t>(robots);
  require(pool <= n, "need at least robots x waypoints training samples");

  const Points train = sample_uniform(env, n, derive_seed(seed, 0));
  Rng pick(derive_seed(seed, 1));
  Rng extra(derive_seed(seed, 3));

  // Candidate waypoints in layout columns.
  Points cand(static_cast<Eigen::Index>(pool), layout.dims);
  const auto idx = pick.subset(n, pool);
  for (std::size_t k = 0; k < pool; ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    cand.row(r).head(d) = train.row(static_cast<Eigen::Index>(idx[k])).head(d);
    if (layout.has_time()) cand(r, layout.time_col) = train(static_cast<Eigen::Index>(idx[k]), d);
  }
  auto fill_extra = [&](Eigen::Ref<Points> rows) {
    if (layout.extra_col < 0) return;
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      rows(r, layout.extra_col) =
          cfg.sensing.kind == SensingModel::Kind::kLineFov
              ? extra.uniform(0.0, 2.0 * std::numbers::pi)
              : extra.uniform(cfg.sensing.min_height, cfg.sensing.max_height);
    }
  };
  fill_extra(cand);

  // Split candidates into robots.
  std::vector<std::vector<std::size_t>> groups;
  if (pool == 0) {
    groups.assign(static_cast<std::size_t>(robots), {});
  } else if (robots == 1) {
    groups.emplace_back(pool);
    std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
  } else {
    for (const auto& tour : vrp_routes(cand.leftCols(d), robots, derive_seed(seed, 2))) {
      groups.push_back(tour.order);
    }
  }

  Points init(static_cast<Eigen::Index>(s) * robots, layout.dims);
  for (int j = 0; j < robots; ++j) {
    Points route(static_cast<Eigen::Index>(s), layout.dims);
    Points members = take_rows(cand, groups[static_cast<std::size_t>(j)]);
    if (static_cast<std::size_t>(members.rows()) != free_per_robot) {
      members = resample_path(Path(members, j, d), free_per_robot).waypoints;
    }
    Eigen::Index row = 0;
    if (opt.start) {
      route.row(row).setZero();
      route.row(row).head(d) = opt.start->transpose();
      ++row;
    }
    route.middleRows(row, members.rows()) = members;
    row += members.rows();
    if (opt.end) {
      route.row(row).setZero();
      route.row(row).head(d) = opt.end->transpose();
    }
    if (opt.start) fill_extra(route.topRows(1));
    if (opt.end) fill_extra(route.bottomRows(1));
    if (layout.has_time()) {
      if (opt.start) route(0, layout.time_col) = env.lo(d);
      if (opt.end) route(route.rows() - 1, layout.time_col) = env.hi(d);
      route = take_rows(route, time_order(route, layout.time_col));
    } else if (route.rows() >= 2) {
      std::optional<std::size_t> fs, fe;
      if (opt.start) fs = 0;
      if (opt.end) fe = static_cast<std::size_t>(route.rows() - 1);
      const Tour tour = tsp_order(route.leftCols(d), fs, fe, derive_seed(seed, 4 + j));
      route = take_rows(route, tour.order);
    }
    init.middleRows(static_cast<Eigen::Index>(j) * static_cast<Eigen::Index>(s),
                    static_cast<Eigen::Index>(s)) = route;
  }

  InducingPaths paths(init, robots);
  for (int j = 0; j < robots; ++j) {
    if (opt.start) paths.freeze_waypoint(j, 0, 0, d);
    if (opt.end) paths.freeze_waypoint(j, static_cast<int>(s) - 1, 0, d);
  }
  const SgpModel model(kernel, train, opt.noise_variance);
  paths = attach_past_data(model, std::move(paths), opt.past);

  const OptimizeResult r = optimize(model, paths, cfg, env);
  PlanResult res = from_points(r.paths.points, robots, static_cast<int>(s), d);
  res.objective = r.objective;
  res.elbo = r.elbo;
  res.trace = r.trace;
  res.iterations = r.iterations;
  res.warning = r.warning;
  res.warning_message = r.warning_message;
  return res;
}

}  // namespace

PlanResult plan_single(const RbfKernel& kernel, const Environment& env, std::size_t s,
                       const ObjectiveConfig& cfg, std::uint64_t seed,
                       const PlanOptions& options) {
  return plan_impl(kernel, env, s, 1, cfg, seed, options);
}

PlanResult plan_multi(const RbfKernel& kernel, const Environment& env, std::size_t s, int robots,
                      const ObjectiveConfig& cfg, std::uint64_t seed,
                      const PlanOptions& options) {
  return plan_impl(kernel, env, s, robots, cfg, seed, options);
}

}  // namespace ipp
