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

#include "ipp/route.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "ipp/error.hpp"
#include "ipp/rng.hpp"

namespace ipp {

namespace {

constexpr std::size_t kMaxStarts = 64;
constexpr double kImproveEps = 1e-12;

Eigen::MatrixXd distances(const Eigen::Ref<const Points>& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (points.row(i) - points.row(j)).norm();
  }
  return d;
}

double order_length(const Eigen::MatrixXd& d, const std::vector<std::size_t>& order) {
  double total = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) total += d(order[i - 1], order[i]);
  return total;
}

// First-improvement 2-opt on an open path. Reversing positions [i, j] swaps
// the edges (i-1, i) and (j, j+1); a missing edge at either end costs 0.
void two_opt(const Eigen::MatrixXd& d, std::vector<std::size_t>& p, bool start_fixed,
             bool end_fixed) {
  const std::size_t n = p.size();
  if (n < 3) return;
  const std::size_t first = start_fixed ? 1 : 0;
  const std::size_t last = end_fixed ? n - 2 : n - 1;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = first; i < last && !improved; ++i) {
      for (std::size_t j = i + 1; j <= last; ++j) {
        double delta = 0.0;
        if (i > 0) delta += d(p[i - 1], p[j]) - d(p[i - 1], p[i]);
        if (j + 1 < n) delta += d(p[i], p[j + 1]) - d(p[j], p[j + 1]);
        if (delta < -kImproveEps) {
          std::reverse(p.begin() + static_cast<std::ptrdiff_t>(i),
                       p.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
          break;
        }
      }
    }
  }
}

}  // namespace

double tour_length(const Eigen::Ref<const Points>& points, const std::vector<std::size_t>& order) {
  double total = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    total += (points.row(order[i]) - points.row(order[i - 1])).norm();
  }
  return total;
}

std::vector<std::size_t> nearest_neighbor_order(const Eigen::MatrixXd& dist, std::size_t start,
                                                std::optional<std::size_t> fixed_end) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<char> used(n, 0);
  std::vector<std::size_t> order{start};
  used[start] = 1;
  if (fixed_end) used[*fixed_end] = 1;
  const std::size_t interior = n - (fixed_end && *fixed_end != start ? 1 : 0);
  while (order.size() < interior) {
    const std::size_t cur = order.back();
    std::size_t best = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (!used[k] && (best == n || dist(cur, k) < dist(cur, best))) best = k;
    }
    used[best] = 1;
    order.push_back(best);
  }
  if (fixed_end && *fixed_end != start) order.push_back(*fixed_end);
  return order;
}

Tour tsp_order(const Eigen::Ref<const Points>& points, std::optional<std::size_t> fixed_start,
               std::optional<std::size_t> fixed_end, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.rows());
  require(n >= 2, "tsp_order needs at least two points");
  require(!fixed_start || *fixed_start < n, "fixed start index out of range");
  require(!fixed_end || *fixed_end < n, "fixed end index out of range");
  require(!(fixed_start && fixed_end && *fixed_start == *fixed_end),
          "fixed start and end must be different points");

  const Eigen::MatrixXd d = distances(points);
  std::vector<std::size_t> starts;
  if (fixed_start) {
    starts.push_back(*fixed_start);
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      if (!fixed_end || k != *fixed_end) starts.push_back(k);
    }
    if (starts.size() > kMaxStarts) {
      Rng rng(seed);
      auto pick = rng.subset(starts.size(), kMaxStarts);
      std::sort(pick.begin(), pick.end());
      std::vector<std::size_t> sampled;
      for (auto k : pick) sampled.push_back(starts[k]);
      starts = std::move(sampled);
    }
  }

  std::vector<std::size_t> best;
  double best_len = std::numeric_limits<double>::infinity();
  for (auto s : starts) {
    auto order = nearest_neighbor_order(d, s, fixed_end);
    const double len = order_length(d, order);
    if (len < best_len) {
      best_len = len;
      best = std::move(order);
    }
  }
  two_opt(d, best, fixed_start.has_value(), fixed_end.has_value());
  return {best, true, fixed_start, fixed_end};
}

std::vector<Tour> vrp_routes(const Eigen::Ref<const Points>& points, int robots,
                             std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.rows());
  require(robots >= 1, "vrp_routes needs at least one robot");
  require(n >= static_cast<std::size_t>(robots), "vrp_routes needs at least one point per robot");
  if (robots == 1) return {tsp_order(points, {}, {}, seed)};

  const auto r = static_cast<std::size_t>(robots);
  const std::size_t capacity = (n + r - 1) / r;
  Rng rng(seed);

  // k-means++ seeding.
  Points centers(robots, points.cols());
  centers.row(0) = points.row(rng.index(n));
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < r; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], (points.row(i) - centers.row(c - 1)).squaredNorm());
    }
    const double total = nearest.sum();
    std::size_t pick = n - 1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        u -= nearest[i];
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(n);
    }
    centers.row(c) = points.row(pick);
  }

  std::vector<std::size_t> label(n, r);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<std::size_t> next(n, r);
    std::vector<std::size_t> load(r, 0);
    Eigen::MatrixXd d2(n, r);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < r; ++c) d2(i, c) = (points.row(i) - centers.row(c)).squaredNorm();
    }
    // Every cluster first takes its nearest free point so none ends empty.
    for (std::size_t c = 0; c < r; ++c) {
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (next[i] == r && (best == n || d2(i, c) < d2(best, c))) best = i;
      }
      next[best] = c;
      ++load[c];
    }
    // Remaining points go to their nearest cluster with room, closest pairs first.
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      if (next[i] != r) continue;
      for (std::size_t c = 0; c < r; ++c) pairs.emplace_back(d2(i, c), i, c);
    }
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [dist, i, c] : pairs) {
      if (next[i] == r && load[c] < capacity) {
        next[i] = c;
        ++load[c];
      }
    }
    const bool changed = next != label;
    label = std::move(next);
    for (std::size_t c = 0; c < r; ++c) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(points.cols());
      for (std::size_t i = 0; i < n; ++i) {
        if (label[i] == c) sum += points.row(i);
      }
      centers.row(c) = sum / static_cast<double>(load[c]);
    }
    if (!changed) break;
  }

  std::vector<Tour> tours;
  for (std::size_t c = 0; c < r; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (label[i] == c) members.push_back(i);
    }
    Tour t;
    if (members.size() == 1) {
      t.order = members;
    } else {
      Points sub(static_cast<Eigen::Index>(members.size()), points.cols());
      for (std::size_t k = 0; k < members.size(); ++k) sub.row(k) = points.row(members[k]);
      const Tour local = tsp_order(sub, {}, {}, derive_seed(seed, c));
      for (auto k : local.order) t.order.push_back(members[k]);
    }
    tours.push_back(std::move(t));
  }
  return tours;
}

std::vector<std::size_t> solve_assignment(const Eigen::Ref<const Eigen::MatrixXd>& cost) {
  require(cost.rows() == cost.cols() && cost.rows() >= 1, "assignment needs a square cost matrix");
  // Shortest augmenting path formulation with row/column potentials (1-based).
  const auto n = static_cast<std::size_t>(cost.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;

  // Prefer keeping the current indexing when it is already optimal.
  double best = 0.0;
  double identity = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    best += cost(i, assignment[i]);
    identity += cost(i, i);
  }
  if (identity <= best + 1e-12 * std::max(1.0, std::abs(best))) {
    std::iota(assignment.begin(), assignment.end(), std::size_t{0});
  }
  return assignment;
}

Points assign_waypoints(const Eigen::Ref<const Points>& waypoints, int robots, int spatial_dims) {
  require(robots >= 1, "assign_waypoints needs at least one robot");
  require(waypoints.rows() % robots == 0, "waypoint count must be a multiple of robots");
  const Eigen::Index steps = waypoints.rows() / robots;
  require(steps >= 2, "assign_waypoints needs at least two timesteps");
  require(spatial_dims >= 1 && spatial_dims <= waypoints.cols(), "spatial dims out of range");

  Points out = waypoints;
  Eigen::MatrixXd cost(robots, robots);
  for (Eigen::Index i = 0; i + 1 < steps; ++i) {
    for (int j = 0; j < robots; ++j) {
      for (int k = 0; k < robots; ++k) {
        cost(j, k) = (out.row(j * steps + i).head(spatial_dims) -
                      out.row(k * steps + i + 1).head(spatial_dims))
                         .norm();
      }
    }
    const auto a = solve_assignment(cost);
    Points next(robots, out.cols());
    for (int j = 0; j < robots; ++j) next.row(j) = out.row(static_cast<Eigen::Index>(a[j]) * steps + i + 1);
    for (int j = 0; j < robots; ++j) out.row(j * steps + i + 1) = next.row(j);
  }
  return out;
}

std::vector<double> transition_costs(const Eigen::Ref<const Points>& waypoints, int robots,
                                     int spatial_dims) {
  const Eigen::Index steps = waypoints.rows() / robots;
  std::vector<double> costs;
  for (Eigen::Index i = 0; i + 1 < steps; ++i) {
    double c = 0.0;
    for (int j = 0; j < robots; ++j) {
      c += (waypoints.row(j * steps + i).head(spatial_dims) -
            waypoints.row(j * steps + i + 1).head(spatial_dims))
               .norm();
    }
    costs.push_back(c);
  }
  return costs;
}

}  // namespace ipp
