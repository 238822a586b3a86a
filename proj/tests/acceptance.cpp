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

// Acceptance suite. Prints one PASS/FAIL line per criterion; exit status is
// non-zero if any criterion fails. Pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "ipp/eval.hpp"
#include "ipp/plan.hpp"
#include "ipp/rng.hpp"
#include "ipp/route.hpp"
#include "ipp/sgp.hpp"
#include "oracles.hpp"

#ifndef IPP_CLI_PATH
#define IPP_CLI_PATH "ipp"
#endif

namespace {

using namespace ipp;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Points random_points(Rng& rng, Eigen::Index n, Eigen::Index d, double lo = 0.0, double hi = 1.0) {
  Points p(n, d);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform(lo, hi);
  return p;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// 1. Analytic gradient through expansion and aggregation vs central differences.
Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  double worst = 0.0;
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int kind = trial % 4;  // point, arc, line FoV, square FoV
    const Eigen::Index d = kind >= 2 ? 2 : 1 + static_cast<Eigen::Index>(rng.index(3));
    const Eigen::Index n = 20 + static_cast<Eigen::Index>(rng.index(81));
    Eigen::VectorXd ls(d);
    for (Eigen::Index i = 0; i < d; ++i) ls[i] = rng.uniform(0.2, 0.6);
    const SgpModel model(RbfKernel(rng.uniform(0.5, 2.0), ls), random_points(rng, n, d),
                         rng.uniform(0.01, 0.2));
    SensingModel sensing;
    Points w;
    switch (kind) {
      case 0:
        sensing = SensingModel::point();
        w = random_points(rng, 1 + static_cast<Eigen::Index>(rng.index(20)), d);
        break;
      case 1:
        sensing = SensingModel::arc(2 + static_cast<int>(rng.index(5)));
        w = random_points(rng, 2 + static_cast<Eigen::Index>(rng.index(4)), d);
        break;
      case 2:
        sensing = SensingModel::line_fov(rng.uniform(0.1, 0.4), 1 + static_cast<int>(rng.index(4)));
        w = random_points(rng, 1 + static_cast<Eigen::Index>(rng.index(5)), 3);
        w.col(2) *= 2.0 * std::numbers::pi;
        break;
      default:
        sensing = SensingModel::square_fov_height(rng.uniform(0.2, 0.7), 2 + static_cast<int>(rng.index(2)),
                                                  0.1, 1.0);
        w = random_points(rng, 1 + static_cast<Eigen::Index>(rng.index(4)), 3);
        w.col(2) = w.col(2).array() * 0.4 + 0.1;
        break;
    }
    auto f = [&](const Eigen::MatrixXd& x) {
      const Expansion e = expand(sensing, x);
      return elbo(model, e.points, e.aggregation);
    };
    const Expansion e = expand(sensing, w);
    const ElboGradient g = elbo_and_grad(model, e.points, &e.aggregation);
    const Points analytic = expand_backward(sensing, w, g.grad);
    const Eigen::MatrixXd fd = oracle::central_diff(f, w, 1e-5 * ls.minCoeff());
    const double rel = (analytic - fd).norm() / std::max(fd.norm(), 1e-300);
    worst = std::max(worst, rel);
    if (!(rel < 1e-4)) ++failures;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 60.0,
          fmt("50 instances, worst relative error %.2e (< 1e-4), %d failures, %.1f s (< 60 s)", worst,
              failures, secs)};
}

// 2. VFE collapse with inducing points equal to the training inputs.
Outcome vfe_collapse() {
  Rng rng(7);
  const double var = 1.0;
  const double noise = 1.0;
  const Eigen::Vector2d ls(0.3, 0.3);
  const Points x = random_points(rng, 50, 2);
  const SgpModel model(RbfKernel(var, ls), x, noise);
  const ElboTerms t = elbo_terms(model, x);
  const double full = oracle::full_gp_log_marginal_zero(oracle::rbf_matrix(var, ls, x, x), noise);
  const double trace = std::abs(t.trace_residual);
  const double rel = std::abs(t.value - full) / std::abs(full);
  return {trace < 1e-6 * 50 * var && rel < 1e-6,
          fmt("|Tr(K-Q)| = %.2e (< %.1e), ELBO %.10f vs full GP %.10f, relative gap %.2e (< 1e-6)",
              trace, 1e-6 * 50 * var, t.value, full, rel)};
}

// 3. Placement quality against greedy MI and random placements.
Outcome placement_quality() {
  const RbfKernel k(1.0, Eigen::Vector2d(0.2, 0.2));
  const Environment env = Environment::unit(2);
  const std::vector<int> res = {25, 25};
  const double noise = 0.01;
  const Points grid = grid_points(env, res);
  const MiPlacement mi = greedy_mi_placement(k, grid, 16, noise);
  Points mi_points(16, 2);
  for (int i = 0; i < 16; ++i) mi_points.row(i) = grid.row(static_cast<Eigen::Index>(mi.indices[i]));

  std::vector<double> sgp, greedy, random;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Field field = sample_gp_field(k, env, res, 100 + seed);
    const PlacementResult placed = continuous_sgp_placement(k, env, 16, 1000, seed);
    sgp.push_back(evaluate_paths(field, {Path(placed.points)}, EvalSensing::discrete(), noise).rmse);
    greedy.push_back(evaluate_paths(field, {Path(mi_points)}, EvalSensing::discrete(), noise).rmse);
    std::vector<double> rr;
    for (std::uint64_t r = 0; r < 10; ++r) {
      rr.push_back(evaluate_paths(field, {Path(sample_uniform(env, 16, derive_seed(seed, 50 + r)))},
                                  EvalSensing::discrete(), noise)
                       .rmse);
    }
    random.push_back(mean(rr));
  }
  const double a = mean(sgp), b = mean(greedy), c = mean(random);
  return {a <= 1.10 * b && a <= 0.90 * c,
          fmt("mean RMSE: SGP %.4f, greedy MI %.4f (ratio %.3f <= 1.10), random %.4f (ratio %.3f <= 0.90)",
              a, b, a / b, c, a / c)};
}

// 4. Distance budget saturation.
Outcome budget_saturation() {
  const RbfKernel k(1.0, Eigen::Vector2d(7.70, 19.46));
  const Environment env(Eigen::Vector2d(0, 0), Eigen::Vector2d(50, 50));
  std::string detail;
  bool pass = true;
  for (double c : {10.0, 20.0, 40.0}) {
    int ok = 0;
    std::string lengths;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ObjectiveConfig cfg;
      cfg.penalties.distance_budget = c;
      const PlanResult r = plan_single(k, env, 10, cfg, seed);
      const double len = path_length(r.paths[0]);
      if (len >= 0.9 * c && len <= 1.01 * c) ++ok;
      lengths += fmt("%s%.2f", lengths.empty() ? "" : " ", len);
    }
    pass = pass && ok >= 8;
    detail += fmt("%sc=%g: %d/10 in [%.1f, %.2f] (%s)", detail.empty() ? "" : "; ", c, ok, 0.9 * c,
                  1.01 * c, lengths.c_str());
  }
  return {pass, detail};
}

// 5. RMSE decreases with the number of waypoints.
Outcome rmse_vs_waypoints() {
  const RbfKernel k(1.0, Eigen::Vector2d(0.2, 0.2));
  const Environment env = Environment::unit(2);
  std::vector<double> means;
  for (std::size_t s = 5; s <= 30; s += 5) {
    std::vector<double> v;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Field field = sample_gp_field(k, env, {25, 25}, 300 + seed);
      const PlanResult r = plan_single(k, env, s, ObjectiveConfig{}, seed);
      v.push_back(evaluate_paths(field, r.paths, EvalSensing::continuous(), 0.01).rmse);
    }
    means.push_back(mean(v));
  }
  int inversions = 0;
  std::string list;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (i > 0 && !(means[i] < means[i - 1])) ++inversions;
    list += fmt("%s%.4f", list.empty() ? "" : " ", means[i]);
  }
  return {inversions <= 1, fmt("mean RMSE for s=5..30: %s; %d inversions (<= 1)", list.c_str(), inversions)};
}

// 6. Arc sensing vs point sensing under continuous evaluation.
Outcome arc_vs_point() {
  const RbfKernel k(1.0, Eigen::Vector2d(0.2, 0.2));
  const Environment env = Environment::unit(2);
  int wins = 0;
  std::string pairs;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Field field = sample_gp_field(k, env, {25, 25}, 600 + seed);
    ObjectiveConfig arc;
    arc.sensing = SensingModel::arc(10);
    const PlanResult pa = plan_single(k, env, 10, arc, seed);
    const PlanResult pp = plan_single(k, env, 10, ObjectiveConfig{}, seed);
    const double ra = evaluate_paths(field, pa.paths, EvalSensing::continuous(), 0.01).rmse;
    const double rp = evaluate_paths(field, pp.paths, EvalSensing::continuous(), 0.01).rmse;
    if (ra < rp) ++wins;
    pairs += fmt("%s%.3f/%.3f", pairs.empty() ? "" : " ", ra, rp);
  }
  return {wins >= 7, fmt("arc beats point on %d/10 seeds (>= 7); arc/point RMSE: %s", wins, pairs.c_str())};
}

// 7. Assignment optimality against exhaustive search.
Outcome assignment_optimality() {
  Rng rng(77);
  int failures = 0;
  int checks = 0;
  for (int r = 2; r <= 5; ++r) {
    for (int trial = 0; trial < 100; ++trial) {
      const int steps = 2 + static_cast<int>(rng.index(5));
      const Points w = random_points(rng, r * steps, 3);
      const Points out = assign_waypoints(w, r, 2);
      const auto costs = transition_costs(out, r, 2);
      for (int i = 0; i + 1 < steps; ++i) {
        Eigen::MatrixXd c(r, r);
        for (int j = 0; j < r; ++j) {
          for (int q = 0; q < r; ++q) {
            c(j, q) = (out.row(j * steps + i).head(2) - w.row(q * steps + i + 1).head(2)).norm();
          }
        }
        ++checks;
        if (std::abs(costs[static_cast<std::size_t>(i)] - oracle::brute_force_assignment(c)) > 1e-12) {
          ++failures;
        }
      }
    }
  }
  return {failures == 0, fmt("%d timestep checks over 400 instances, %d failures", checks, failures)};
}

// 8. Aggregation speedup at m=20, p=10.
Outcome aggregation_speedup() {
  Rng rng(8);
  const SgpModel model(RbfKernel(1.0, Eigen::Vector2d(0.2, 0.2)), random_points(rng, 1000, 2), 0.01);
  const Points z = random_points(rng, 200, 2);
  const Aggregation agg = aggregation_matrix(20, 10);
  auto median_time = [&](const std::function<void()>& fn) {
    std::vector<double> t;
    for (int i = 0; i < 20; ++i) {
      const auto t0 = Clock::now();
      fn();
      t.push_back(seconds_since(t0));
    }
    std::sort(t.begin(), t.end());
    return 0.5 * (t[9] + t[10]);
  };
  volatile double sink = 0.0;
  const double aggregated = median_time([&] { sink = sink + elbo_and_grad(model, z, &agg).value; });
  const double free_points = median_time([&] { sink = sink + elbo_and_grad(model, z).value; });
  const double ratio = aggregated / free_points;
  return {ratio <= 0.5, fmt("median ELBO+gradient: aggregated %.2f ms, 200 free points %.2f ms, ratio %.3f (<= 0.5)",
                            1e3 * aggregated, 1e3 * free_points, ratio)};
}

// 9. Past data shifts the path away and improves combined reconstruction.
// Time lengthscale exceeds the mission so old samples still inform it; RMSE is
// scored over the mission window t >= 0.
Outcome past_data() {
  const RbfKernel k(1.0, Eigen::Vector3d(0.2, 0.2, 2.0));
  const Environment field_env(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), std::make_pair(-0.5, 1.0));
  const Environment plan_env(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), std::make_pair(0.0, 1.0));
  int both = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Field field = sample_gp_field(k, field_env, {15, 15, 7}, 900 + seed);
    Rng rng(derive_seed(seed, 99));
    PastData past;
    past.points = random_points(rng, 5, 3);
    past.points.col(2) = past.points.col(2).array() * -0.3;
    PlanOptions with_past;
    with_past.past = past;
    const PlanResult a = plan_single(k, plan_env, 5, ObjectiveConfig{}, seed);
    const PlanResult b = plan_single(k, plan_env, 5, ObjectiveConfig{}, seed, with_past);
    auto min_dist = [&](const PlanResult& r) {
      double best = 1e300;
      for (Eigen::Index i = 0; i < r.paths[0].waypoints.rows(); ++i) {
        for (Eigen::Index j = 0; j < past.points.rows(); ++j) {
          best = std::min(best, (r.paths[0].waypoints.row(i).head(2) - past.points.row(j).head(2)).norm());
        }
      }
      return best;
    };
    const double da = min_dist(a), db = min_dist(b);
    auto mission_rmse = [&](const PlanResult& r) {
      const EvalResult e = evaluate_paths(field, r.paths, EvalSensing::discrete(), 0.01, past.points);
      double sse = 0.0;
      int count = 0;
      for (Eigen::Index i = 0; i < field.grid().rows(); ++i) {
        if (field.grid()(i, 2) < 0.0) continue;
        const double d = e.predictions[i] - field.values()[i];
        sse += d * d;
        ++count;
      }
      return std::sqrt(sse / count);
    };
    const double ra = mission_rmse(a), rb = mission_rmse(b);
    if (db > da && rb < ra) ++both;
    detail += fmt("%s[d %.3f->%.3f, rmse %.3f->%.3f]", detail.empty() ? "" : " ", da, db, ra, rb);
  }
  return {both >= 7, fmt("%d/10 seeds (>= 7) with larger distance and lower RMSE: %s", both, detail.c_str())};
}

// 10. Two robots beat one at equal per-path waypoints.
Outcome multi_robot_benefit() {
  const RbfKernel k(1.0, Eigen::Vector2d(0.2, 0.2));
  const Environment env = Environment::unit(2);
  int wins = 0;
  std::string pairs;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Field field = sample_gp_field(k, env, {25, 25}, 1000 + seed);
    const PlanResult one = plan_multi(k, env, 10, 1, ObjectiveConfig{}, seed);
    const PlanResult two = plan_multi(k, env, 10, 2, ObjectiveConfig{}, seed);
    const double r1 = evaluate_paths(field, one.paths, EvalSensing::discrete(), 0.01).rmse;
    const double r2 = evaluate_paths(field, two.paths, EvalSensing::discrete(), 0.01).rmse;
    if (r2 < r1) ++wins;
    pairs += fmt("%s%.3f/%.3f", pairs.empty() ? "" : " ", r2, r1);
  }
  return {wins >= 8, fmt("r=2 beats r=1 on %d/10 seeds (>= 8); r2/r1 RMSE: %s", wins, pairs.c_str())};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 11. Every CLI subcommand is byte-identical across two runs.
Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / fmt("ipp_acceptance_%d", static_cast<int>(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "config.json";
  std::ofstream(cfg) << R"({
  "environment": {"lower": [0, 0], "upper": [10, 10], "time_horizon": [0, 30]},
  "kernel": {"variance": 1.0, "lengthscales": [2.5, 2.5, 15.0]},
  "noise_variance": 0.01,
  "robots": 2,
  "waypoints": 6,
  "penalties": {"distance_budget": 15.0, "velocity_limit": 2.0},
  "optimizer": {"max_iters": 150},
  "train_samples": 300,
  "field": {"resolution": [11, 11, 4]},
  "seed": 5
})";
  const std::string exe = IPP_CLI_PATH;
  std::vector<std::string> names;
  bool ok = true;
  std::string detail;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = root / fmt("run%d", run);
    fs::create_directories(out);
    const std::string q = "\"";
    const std::vector<std::string> cmds = {
        q + exe + q + " gen-data -c " + q + cfg.string() + q + " -o " + q + out.string() + q + " > /dev/null",
        q + exe + q + " plan -c " + q + cfg.string() + q + " --field " + q + (out / "field.csv").string() + q +
            " -o " + q + out.string() + q + " > " + q + (out / "plan_stdout.json").string() + q,
        q + exe + q + " eval --paths " + q + (out / "paths.json").string() + q + " --field " + q +
            (out / "field.csv").string() + q + " --sensing continuous --step 0.5 -o " + q + out.string() + q + " > /dev/null",
        q + exe + q + " plot --paths " + q + (out / "paths.json").string() + q + " --field " + q +
            (out / "field.csv").string() + q + " -o " + q + out.string() + q + " > /dev/null",
    };
    for (const auto& c : cmds) {
      const int rc = std::system(c.c_str());
      if (rc != 0) {
        ok = false;
        detail += fmt("command failed (%d): %s; ", rc, c.c_str());
      }
    }
  }
  const std::vector<std::string> files = {"field.csv",   "field.meta.json", "paths.json", "trace.csv",
                                          "report.json", "plot.svg",        "plan_stdout.json"};
  int identical = 0;
  for (const auto& f : files) {
    const std::string a = slurp(root / "run0" / f);
    const std::string b = slurp(root / "run1" / f);
    if (!a.empty() && a == b) {
      ++identical;
    } else {
      ok = false;
      detail += f + " differs or is missing; ";
    }
  }
  fs::remove_all(root);
  return {ok, fmt("%d/%zu output files byte-identical across runs of gen-data, plan, eval, plot%s%s", identical,
                  files.size(), detail.empty() ? "" : "; ", detail.c_str())};
}

// 12. TSP heuristic within 1.2x of the brute-force optimum.
Outcome tsp_sanity() {
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(12, seed));
    const Points p = random_points(rng, 8, 2);
    const double h = tour_length(p, tsp_order(p, {}, {}, seed).order);
    const double opt = oracle::brute_force_open_tsp(p);
    worst = std::max(worst, h / opt);
    if (h <= 1.2 * opt + 1e-12) ++ok;
  }
  return {ok == 100, fmt("%d/100 instances within 1.2x of optimum; worst ratio %.4f", ok, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradient_correctness},
      {"VFE collapse", vfe_collapse},
      {"placement quality", placement_quality},
      {"budget saturation", budget_saturation},
      {"RMSE vs waypoints", rmse_vs_waypoints},
      {"arc vs point sensing", arc_vs_point},
      {"assignment optimality", assignment_optimality},
      {"aggregation speedup", aggregation_speedup},
      {"past data", past_data},
      {"multi-robot benefit", multi_robot_benefit},
      {"CLI determinism", cli_determinism},
      {"TSP sanity", tsp_sanity},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
