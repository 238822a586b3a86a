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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <set>
#include <vector>

#include "ipp/error.hpp"
#include "ipp/eval.hpp"
#include "ipp/plan.hpp"
#include "ipp/rng.hpp"
#include "oracles.hpp"

namespace ipp {
namespace {

Points random_points(Rng& rng, Eigen::Index n, Eigen::Index d) {
  Points p(n, d);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform();
  return p;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(GridTest, CoversBoundsWithFirstAxisSlowest) {
  const Environment env(Eigen::Vector2d(-1, 2), Eigen::Vector2d(1, 5));
  const Points g = grid_points(env, {3, 4});
  ASSERT_EQ(g.rows(), 12);
  EXPECT_EQ(g(0, 0), -1.0);
  EXPECT_EQ(g(0, 1), 2.0);
  EXPECT_EQ(g(1, 0), -1.0);
  EXPECT_EQ(g(1, 1), 3.0);
  EXPECT_EQ(g(11, 0), 1.0);
  EXPECT_EQ(g(11, 1), 5.0);
}

TEST(FieldTest, SameSeedSameField) {
  const RbfKernel k(2.0, Eigen::Vector2d(0.3, 0.3));
  const Field a = sample_gp_field(k, Environment::unit(2), {10, 10}, 7);
  const Field b = sample_gp_field(k, Environment::unit(2), {10, 10}, 7);
  const Field c = sample_gp_field(k, Environment::unit(2), {10, 10}, 8);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), c.values());
}

TEST(FieldTest, MonteCarloVarianceAndCorrelation) {
  const double variance = 2.0, l = 0.25;
  const RbfKernel k(variance, Eigen::VectorXd::Constant(1, l));
  const Environment env(Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0));
  // Grid spacing 0.125 puts index 2 and index 4 one lengthscale apart.
  const int samples = 500;
  std::vector<double> a(samples), b(samples);
  for (int s = 0; s < samples; ++s) {
    const Field f = sample_gp_field(k, env, {9}, static_cast<std::uint64_t>(1000 + s));
    a[static_cast<std::size_t>(s)] = f.values()[2];
    b[static_cast<std::size_t>(s)] = f.values()[4];
  }
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  const double ma = mean(a), mb = mean(b);
  double va = 0, vb = 0, cab = 0;
  for (int s = 0; s < samples; ++s) {
    va += (a[s] - ma) * (a[s] - ma);
    vb += (b[s] - mb) * (b[s] - mb);
    cab += (a[s] - ma) * (b[s] - mb);
  }
  va /= samples - 1;
  vb /= samples - 1;
  cab /= samples - 1;
  EXPECT_NEAR(va, variance, 0.15 * variance);
  EXPECT_NEAR(cab / std::sqrt(va * vb), std::exp(-0.5), 0.1);
}

TEST(FieldTest, TooLargeGridIsResourceLimit) {
  const RbfKernel k(1.0, Eigen::Vector2d(0.3, 0.3));
  EXPECT_EQ(kind_of([&] { static_cast<void>(sample_gp_field(k, Environment::unit(2), {101, 100}, 1)); }),
            ErrorKind::kResourceLimit);
}

TEST(FieldTest, MultilinearInterpolation) {
  const Environment env = Environment::unit(2);
  Eigen::VectorXd v(4);
  v << 0.0, 1.0, 2.0, 3.0;  // (0,0) (0,1) (1,0) (1,1)
  const Field f(env, {2, 2}, v, RbfKernel(1.0, Eigen::Vector2d(1, 1)), 0);
  EXPECT_DOUBLE_EQ(f.value_at(Eigen::Vector2d(0.5, 0.5)), 1.5);
  EXPECT_DOUBLE_EQ(f.value_at(Eigen::Vector2d(1.0, 0.0)), 2.0);
  EXPECT_DOUBLE_EQ(f.value_at(Eigen::Vector2d(0.25, 1.0)), 1.5);
  EXPECT_THROW(static_cast<void>(f.value_at(Eigen::Vector2d(1.5, 0.0))), Error);
}

TEST(PosteriorTest, InterpolatesObservations) {
  const RbfKernel k(1.0, Eigen::Vector2d(0.3, 0.3));
  Rng rng(2);
  const Points x = random_points(rng, 6, 2);
  Eigen::VectorXd y(6);
  y << 0.3, -1.2, 0.8, 2.0, -0.5, 0.1;
  const Posterior p = gp_posterior(k, 1e-8, x, y, x);
  EXPECT_LT((p.mean - y).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(PosteriorTest, RevertsToPriorFarAway) {
  const double variance = 1.7, l = 0.2;
  const RbfKernel k(variance, Eigen::Vector2d(l, l));
  Rng rng(3);
  const Points x = random_points(rng, 5, 2);
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(5, -2.0, 2.0);
  Points q(1, 2);
  q << 1.0 + 10 * l, 1.0 + 10 * l;
  const Posterior p = gp_posterior(k, 0.01, x, y, q);
  EXPECT_NEAR(p.mean[0], 0.0, 1e-3 * std::sqrt(variance));
  EXPECT_NEAR(p.variance[0], variance, 1e-3 * variance);
}

TEST(PosteriorTest, ThreeObservationsMatchClosedForm) {
  const RbfKernel k(1.3, Eigen::Vector2d(0.4, 0.7));
  Points x(3, 2);
  x << 0.1, 0.2, 0.5, 0.4, 0.9, 0.1;
  Eigen::VectorXd y(3);
  y << 1.0, -0.5, 0.25;
  Rng rng(4);
  const Points q = random_points(rng, 7, 2);
  const Posterior p = gp_posterior(k, 0.05, x, y, q);
  const auto [mean, var] = oracle::dense_posterior(1.3, k.lengthscales(), 0.05, x, y, q);
  EXPECT_LT((p.mean - mean).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((p.variance - var).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PosteriorTest, VarianceAtObservationsBoundedByNoise) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const RbfKernel k(0.5 + rng.uniform(), Eigen::Vector2d(0.1 + rng.uniform(), 0.1 + rng.uniform()));
    const double noise = 1e-3 + 0.1 * rng.uniform();
    const Points x = random_points(rng, 15, 2);
    const Posterior p = gp_posterior(k, noise, x, Eigen::VectorXd::Zero(15), x);
    EXPECT_LE(p.variance.maxCoeff(), noise + 1e-8);
    EXPECT_GE(p.variance.minCoeff(), 0.0);
  }
}

TEST(PosteriorTest, TooManyObservationsIsResourceLimit) {
  const RbfKernel k(1.0, Eigen::Vector2d(0.3, 0.3));
  const Points x = Points::Zero(static_cast<Eigen::Index>(kMaxObservations) + 1, 2);
  EXPECT_EQ(kind_of([&] {
              static_cast<void>(gp_posterior(k, 0.1, x, Eigen::VectorXd::Zero(x.rows()), Points::Zero(1, 2)));
            }),
            ErrorKind::kResourceLimit);
}

TEST(RmseTest, Examples) {
  const Eigen::Vector3d t(1.0, -2.0, 0.5);
  EXPECT_EQ(rmse(t, t), 0.0);
  EXPECT_DOUBLE_EQ(rmse(t.array() + 1.0, t), 1.0);
  EXPECT_NEAR(rmse(Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)), 3.5355339059327378, 1e-12);
  EXPECT_THROW(static_cast<void>(rmse(Eigen::Vector2d(0, 0), t)), Error);
}

TEST(EvaluateTest, FullGridObservationReconstructsField) {
  const double variance = 1.5;
  const RbfKernel k(variance, Eigen::Vector2d(0.3, 0.3));
  const Field f = sample_gp_field(k, Environment::unit(2), {12, 12}, 3);
  const EvalResult r = evaluate_paths(f, {Path(f.grid(), 0)}, EvalSensing::discrete(), 1e-8);
  EXPECT_EQ(r.observations, 144u);
  EXPECT_LT(r.rmse, 1e-3 * std::sqrt(variance));
}

TEST(EvaluateTest, ContinuousSensingNoWorseThanDiscrete) {
  const RbfKernel k(1.0, Eigen::Vector2d(0.2, 0.2));
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Field f = sample_gp_field(k, Environment::unit(2), {20, 20}, 50 + seed);
    Rng rng(seed);
    const Path p(random_points(rng, 6, 2), 0);
    const double d = evaluate_paths(f, {p}, EvalSensing::discrete(), 0.01).rmse;
    const double c = evaluate_paths(f, {p}, EvalSensing::continuous(), 0.01).rmse;
    if (c > d) ++violations;
  }
  EXPECT_LE(violations, 1);
}

TEST(EvaluateTest, ContinuousObservationCountFollowsArcLength) {
  const RbfKernel k(1.0, Eigen::Vector2d(0.2, 0.2));
  const Field f = sample_gp_field(k, Environment::unit(2), {10, 10}, 1);
  Points w(3, 2);
  w << 0.0, 0.0, 1.0, 0.0, 1.0, 1.0;  // length 2
  Points w2(2, 2);
  w2 << 0.0, 0.5, 0.7, 0.5;  // length 0.7
  const Points obs = collect_observations(f, {Path(w, 0), Path(w2, 1)}, EvalSensing::continuous(0.05));
  const double expected = 2.0 / 0.05 + 0.7 / 0.05;
  EXPECT_NEAR(static_cast<double>(obs.rows()), expected, 2.0);
}

TEST(EvaluateTest, Deterministic) {
  const RbfKernel k(1.0, Eigen::Vector2d(0.2, 0.2));
  const Field f = sample_gp_field(k, Environment::unit(2), {15, 15}, 9);
  Rng rng(9);
  const Path p(random_points(rng, 8, 2), 0);
  EXPECT_EQ(evaluate_paths(f, {p}, EvalSensing::continuous(), 0.01).rmse,
            evaluate_paths(f, {p}, EvalSensing::continuous(), 0.01).rmse);
}

TEST(EvaluateTest, OutOfBoundsWaypointNamesRobotAndIndex) {
  const RbfKernel k(1.0, Eigen::Vector2d(0.2, 0.2));
  const Field f = sample_gp_field(k, Environment::unit(2), {5, 5}, 9);
  Points w(3, 2);
  w << 0.1, 0.1, 0.5, 0.5, 1.5, 0.5;
  try {
    static_cast<void>(evaluate_paths(f, {Path(w, 3)}, EvalSensing::discrete(), 0.01));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasibleConstraint);
    EXPECT_NE(std::string(e.what()).find("robot 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("waypoint 2"), std::string::npos);
  }
}

TEST(EvaluateTest, SpatioTemporalUsesLastColumnAsTime) {
  const RbfKernel k(1.0, Eigen::Vector3d(0.3, 0.3, 1.0));
  const Environment env(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), std::make_pair(0.0, 2.0));
  const Field f = sample_gp_field(k, env, {5, 5, 3}, 2);
  Points w(2, 4);  // x, y, heading, t
  w << 0.5, 0.5, 3.0, 1.0, 0.25, 0.75, 1.0, 2.0;
  const Points obs = collect_observations(f, {Path(w, 0, 2)}, EvalSensing::discrete());
  ASSERT_EQ(obs.cols(), 3);
  EXPECT_EQ(obs(0, 2), 1.0);
  EXPECT_EQ(obs(1, 2), 2.0);
}

TEST(EvaluateTest, MoreRandomWaypointsReduceError) {
  const RbfKernel k(1.0, Eigen::Vector2d(0.2, 0.2));
  std::vector<double> means;
  for (int s = 5; s <= 30; s += 5) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Field f = sample_gp_field(k, Environment::unit(2), {15, 15}, 200 + seed);
      const Path p(sample_uniform(Environment::unit(2), static_cast<std::size_t>(s), seed), 0);
      total += evaluate_paths(f, {p}, EvalSensing::discrete(), 0.01).rmse;
    }
    means.push_back(total / 10.0);
  }
  int inversions = 0;
  for (std::size_t i = 1; i < means.size(); ++i) inversions += !(means[i] < means[i - 1]);
  EXPECT_LE(inversions, 1);
}

TEST(MiTest, PicksCenterOfSymmetricLine) {
  Points g(5, 1);
  g << 0.0, 0.25, 0.5, 0.75, 1.0;
  const RbfKernel k(1.0, Eigen::VectorXd::Constant(1, 0.25));
  const MiPlacement m = greedy_mi_placement(k, g, 1, 1e-6);
  ASSERT_EQ(m.indices.size(), 1u);
  EXPECT_EQ(m.indices[0], 2u);

  // Brute force of the singleton gain sigma^2_y / sigma^2_{y | rest}.
  std::vector<double> gains;
  for (int y = 0; y < 5; ++y) {
    std::vector<int> rest;
    for (int i = 0; i < 5; ++i) {
      if (i != y) rest.push_back(i);
    }
    Points r(4, 1);
    for (int i = 0; i < 4; ++i) r(i, 0) = g(rest[static_cast<std::size_t>(i)], 0);
    Eigen::MatrixXd krr = oracle::rbf_matrix(1.0, k.lengthscales(), r, r);
    krr.diagonal().array() += 1e-6;
    const Eigen::VectorXd kyr = oracle::rbf_matrix(1.0, k.lengthscales(), g.row(y), r).transpose();
    const double cond = 1.0 + 1e-6 - kyr.dot(krr.ldlt().solve(kyr));
    gains.push_back((1.0 + 1e-6) / cond);
  }
  EXPECT_EQ(std::max_element(gains.begin(), gains.end()) - gains.begin(), 2);
}

TEST(MiTest, DistinctPicksAndDiminishingGains) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Points c = random_points(rng, 40, 2);
    const RbfKernel k(1.0, Eigen::Vector2d(0.2 + 0.2 * rng.uniform(), 0.2 + 0.2 * rng.uniform()));
    const MiPlacement m = greedy_mi_placement(k, c, 8, 0.01);
    ASSERT_EQ(m.indices.size(), 8u);
    EXPECT_EQ(std::set<std::size_t>(m.indices.begin(), m.indices.end()).size(), 8u);
    for (std::size_t i = 1; i < m.gains.size(); ++i) EXPECT_LE(m.gains[i], m.gains[i - 1] * (1 + 1e-9)) << seed;
  }
}

TEST(MiTest, RejectsTooManyPicks) {
  const RbfKernel k(1.0, Eigen::Vector2d(0.2, 0.2));
  EXPECT_THROW(static_cast<void>(greedy_mi_placement(k, Points::Zero(3, 2), 3, 0.01)), Error);
}

}  // namespace
}  // namespace ipp
