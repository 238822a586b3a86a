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

#include <numbers>

#include "ipp/error.hpp"
#include "ipp/rng.hpp"
#include "ipp/sgp.hpp"
#include "ipp/transform.hpp"
#include "oracles.hpp"

namespace ipp {
namespace {

Points random_points(Rng& rng, Eigen::Index n, Eigen::Index d) {
  Points p(n, d);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform();
  return p;
}

Eigen::MatrixXd pairwise(const Points& p) {
  Eigen::MatrixXd d(p.rows(), p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.rows(); ++j) d(i, j) = (p.row(i) - p.row(j)).norm();
  }
  return d;
}

TEST(SensingModelTest, Validation) {
  EXPECT_THROW(SensingModel::arc(1).validate(), Error);
  EXPECT_THROW(SensingModel::line_fov(0.0, 3).validate(), Error);
  EXPECT_THROW(SensingModel::line_fov(1.0, 0).validate(), Error);
  EXPECT_THROW(SensingModel::square_fov_height(std::numbers::pi / 2, 2, 0.1, 1).validate(), Error);
  EXPECT_THROW(SensingModel::square_fov_height(0.5, 1, 0.1, 1).validate(), Error);
  EXPECT_NO_THROW(SensingModel::arc(2).validate());
  EXPECT_NO_THROW(SensingModel::point().validate());
}

TEST(ExpandInterpolateTest, InclusiveLinspace) {
  Points w(2, 2);
  w << 0, 0, 3, 0;
  const Points e = expand_interpolate(w, 4);
  ASSERT_EQ(e.rows(), 4);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(e(i, 0), i);
    EXPECT_DOUBLE_EQ(e(i, 1), 0.0);
  }
}

TEST(ExpandInterpolateTest, Counts) {
  Rng rng(1);
  Points w3 = random_points(rng, 3, 2);
  const Points e = expand_interpolate(w3, 2);
  ASSERT_EQ(e.rows(), 4);
  EXPECT_EQ(e.row(0), w3.row(0));
  EXPECT_EQ(e.row(1), w3.row(1));
  EXPECT_EQ(e.row(2), w3.row(1));
  EXPECT_EQ(e.row(3), w3.row(2));
  EXPECT_EQ(expand_interpolate(random_points(rng, 5, 3), 7).rows(), 28);
  EXPECT_THROW(expand_interpolate(random_points(rng, 1, 2), 3), Error);
}

TEST(ExpandLineFovTest, AxisAlignedAndRotated) {
  Points w(1, 3);
  w << 0, 0, 0;
  Points e = expand_line_fov(w, 2.0, 3);
  ASSERT_EQ(e.rows(), 3);
  ASSERT_EQ(e.cols(), 2);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(e(i, 0), i, 1e-15);
    EXPECT_NEAR(e(i, 1), 0, 1e-15);
  }
  w(0, 2) = std::numbers::pi / 2;
  e = expand_line_fov(w, 2.0, 3);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(e(i, 0), 0, 1e-15);
    EXPECT_NEAR(e(i, 1), i, 1e-15);
  }
  EXPECT_THROW(expand_line_fov(Points::Zero(1, 2), 1.0, 3), Error);
}

TEST(ExpandLineFovTest, RigidUnderRotation) {
  Rng rng(2);
  Points w(1, 3);
  w << 0.3, 0.4, 0.0;
  const Eigen::MatrixXd ref = pairwise(expand_line_fov(w, 1.5, 5));
  for (int i = 0; i < 10; ++i) {
    w(0, 2) = rng.uniform(-7.0, 7.0);
    EXPECT_LT((pairwise(expand_line_fov(w, 1.5, 5)) - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ExpandSquareFovTest, CornersCentroidScaling) {
  Points w(1, 3);
  w << 0, 0, 1;
  const Points e = expand_square_fov_height(w, std::numbers::pi / 4, 2);
  ASSERT_EQ(e.rows(), 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(std::abs(e(i, 0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(e(i, 1)), 1.0, 1e-12);
  }
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Points v(1, 3);
    v << rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0.5, 3);
    const Points g = expand_square_fov_height(v, 0.6, 4);
    const Eigen::RowVector2d c = g.colwise().mean();
    EXPECT_NEAR(c[0], v(0, 0), 1e-12);
    EXPECT_NEAR(c[1], v(0, 1), 1e-12);
    Points v2 = v;
    v2(0, 2) *= 2.0;
    EXPECT_LT((pairwise(expand_square_fov_height(v2, 0.6, 4)) - 2.0 * pairwise(g)).cwiseAbs().maxCoeff(),
              1e-12);
  }
  EXPECT_THROW(expand_square_fov_height((Points(1, 3) << 0, 0, 0).finished(), 0.5, 2), Error);
  EXPECT_EQ(expand_square_fov_height(random_points(rng, 5, 3).array() + 0.1, 0.5, 3).rows(), 45);
}

TEST(AggregationTest, PaperMatrix) {
  const Eigen::MatrixXd t = aggregation_matrix(3, 2).dense();
  Eigen::MatrixXd expect(3, 6);
  expect << .5, .5, 0, 0, 0, 0, 0, 0, .5, .5, 0, 0, 0, 0, 0, 0, .5, .5;
  EXPECT_EQ(t.transpose(), expect);
}

TEST(AggregationTest, IdentityAndColumnSums) {
  EXPECT_EQ(aggregation_matrix(4, 1).dense(), Eigen::MatrixXd::Identity(4, 4));
  const Eigen::MatrixXd t = aggregation_matrix(5, 3).dense();
  for (Eigen::Index j = 0; j < t.cols(); ++j) EXPECT_DOUBLE_EQ(t.col(j).sum(), 1.0);
  for (Eigen::Index i = 0; i < t.rows(); ++i) EXPECT_EQ((t.row(i).array() != 0.0).count(), 1);
}

TEST(AggregationTest, PoolingMatchesDenseProducts) {
  Rng rng(4);
  Aggregation agg = Aggregation::uniform(3, 4);
  agg.append(Aggregation::identity(2));
  const Eigen::MatrixXd t = agg.dense();
  ASSERT_EQ(t.rows(), 14);
  ASSERT_EQ(t.cols(), 5);
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(14, 14);
  m = (m + m.transpose()).eval();
  const Eigen::MatrixXd r = Eigen::MatrixXd::Random(14, 7);
  EXPECT_LT((agg.pool_both(m) - t.transpose() * m * t).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((agg.pool_rows(r) - t.transpose() * r).cwiseAbs().maxCoeff(), 1e-14);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Random(5, 5);
  EXPECT_LT((agg.spread_both(g) - t * g * t.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((agg.spread_rows(g) - t * g).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(AggregationTest, BlockMeansOfCovariance) {
  Rng rng(5);
  const RbfKernel k(1.0, Eigen::Vector2d(0.3, 0.3));
  const Points z = random_points(rng, 12, 2);
  const Eigen::MatrixXd kzz = k.cov(z);
  const Eigen::MatrixXd pooled = aggregation_matrix(4, 3).pool_both(kzz);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      EXPECT_NEAR(pooled(a, b), kzz.block(3 * a, 3 * b, 3, 3).mean(), 1e-14);
    }
  }
}

TEST(QnnAggregatedTest, IdentityMatchesPlain) {
  Rng rng(6);
  const SgpModel model(RbfKernel(1.0, Eigen::Vector2d(0.3, 0.3)), random_points(rng, 40, 2), 0.1);
  const Points z = random_points(rng, 6, 2);
  const Aggregation id = aggregation_matrix(6, 1);
  EXPECT_LT((qnn_aggregated(model, z, id).dense_qnn() - compute_qnn(model, z).dense_qnn())
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
  const double a = elbo(model, z, id);
  const double b = elbo(model, z);
  EXPECT_NEAR(a, b, 1e-10 * std::abs(b));
}

TEST(QnnAggregatedTest, FactorSizeIsGroupCount) {
  Rng rng(7);
  const SgpModel model(RbfKernel(1.0, Eigen::Vector2d(0.3, 0.3)), random_points(rng, 40, 2), 0.1);
  for (int p : {2, 5, 10}) {
    const Points z = random_points(rng, 4 * p, 2);
    EXPECT_EQ(qnn_aggregated(model, z, aggregation_matrix(4, p)).groups(), 4);
  }
  EXPECT_THROW(qnn_aggregated(model, random_points(rng, 7, 2), aggregation_matrix(4, 2)), Error);
}

TEST(QnnAggregatedTest, ElboMatchesDenseOracle) {
  Rng rng(8);
  const Eigen::Vector2d ls(0.3, 0.4);
  const Points x = random_points(rng, 60, 2);
  const SgpModel model(RbfKernel(1.0, ls), x, 0.1);
  const Points z = random_points(rng, 15, 2);
  const Aggregation agg = aggregation_matrix(5, 3);
  const double jitter = qnn_aggregated(model, z, agg).jitter;
  const double expect = oracle::dense_elbo_aggregated(1.0, ls, x, z, agg.dense(), 0.1, jitter);
  EXPECT_NEAR(elbo(model, z, agg), expect, 1e-8 * std::abs(expect));
}

// Gradient of the objective with respect to the original waypoint
// coordinates, through expansion and aggregation.
double waypoint_elbo(const SgpModel& model, const SensingModel& s, const Points& w) {
  const Expansion e = expand(s, w);
  return elbo(model, e.points, e.aggregation);
}

Points waypoint_grad(const SgpModel& model, const SensingModel& s, const Points& w) {
  const Expansion e = expand(s, w);
  const ElboGradient g = elbo_and_grad(model, e.points, &e.aggregation);
  return expand_backward(s, w, g.grad);
}

TEST(ExpansionGradientTest, AllSensingModels) {
  Rng rng(9);
  const SgpModel model(RbfKernel(1.0, Eigen::Vector2d(0.3, 0.3)), random_points(rng, 60, 2), 0.05);
  struct Case {
    SensingModel sensing;
    Points w;
  };
  Points fov_line = random_points(rng, 4, 3);
  fov_line.col(2) *= 6.0;
  Points fov_sq = random_points(rng, 4, 3);
  fov_sq.col(2) = fov_sq.col(2).array() * 0.5 + 0.2;
  const std::vector<Case> cases = {
      {SensingModel::arc(5), random_points(rng, 5, 2)},
      {SensingModel::line_fov(0.3, 4), fov_line},
      {SensingModel::square_fov_height(0.4, 3, 0.1, 1.0), fov_sq},
      {SensingModel::point(), random_points(rng, 6, 2)},
  };
  for (const auto& c : cases) {
    auto f = [&](const Eigen::MatrixXd& w) { return waypoint_elbo(model, c.sensing, w); };
    const Points g = waypoint_grad(model, c.sensing, c.w);
    const Eigen::MatrixXd fd = oracle::central_diff(f, c.w, 1e-6);
    EXPECT_LT((g - fd).norm() / fd.norm(), 1e-4) << static_cast<int>(c.sensing.kind);
  }
}

}  // namespace
}  // namespace ipp
