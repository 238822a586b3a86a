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

#include "ipp/space_time.hpp"

#include <algorithm>
#include <numeric>

#include "ipp/error.hpp"

namespace ipp {

std::vector<Eigen::Index> time_order(const Eigen::Ref<const Eigen::VectorXd>& time) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(time.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&time](Eigen::Index a, Eigen::Index b) { return time[a] < time[b]; });
  return order;
}

Points space_time_combine(const Eigen::Ref<const Points>& space,
                          const Eigen::Ref<const Eigen::VectorXd>& time, int robots) {
  require(robots >= 1, "space-time combination needs at least one robot");
  require(time.size() >= 1, "space-time combination needs temporal points");
  require(space.rows() == robots * time.size(),
          "spatial inducing points must number robots x timesteps");
  const Eigen::Index t = time.size();
  const auto order = time_order(time);
  Points out(space.rows(), space.cols() + 1);
  out.leftCols(space.cols()) = space;
  for (int j = 0; j < robots; ++j) {
    for (Eigen::Index i = 0; i < t; ++i) out(j * t + i, space.cols()) = time[order[i]];
  }
  return out;
}

std::pair<Points, Eigen::VectorXd> space_time_combine_backward(
    const Eigen::Ref<const Eigen::VectorXd>& time, int robots,
    const Eigen::Ref<const Points>& grad_combined) {
  const Eigen::Index t = time.size();
  require(grad_combined.rows() == robots * t && grad_combined.cols() >= 2,
          "combined gradient has the wrong shape");
  const Eigen::Index d = grad_combined.cols() - 1;
  const auto order = time_order(time);
  Eigen::VectorXd grad_time = Eigen::VectorXd::Zero(t);
  for (int j = 0; j < robots; ++j) {
    for (Eigen::Index i = 0; i < t; ++i) grad_time[order[i]] += grad_combined(j * t + i, d);
  }
  return {grad_combined.leftCols(d), grad_time};
}

}  // namespace ipp
