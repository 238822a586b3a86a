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

#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ipp/env.hpp"

namespace ipp {

/// Spatial inducing points are stored as r blocks of t rows (robot-major);
/// the t temporal inducing points are shared by all robots. The temporal
/// points are sorted before combination so every path moves forward in time.
/// Output: (r*t) x (d+1), robot-major, time last.
Points space_time_combine(const Eigen::Ref<const Points>& space,
                          const Eigen::Ref<const Eigen::VectorXd>& time, int robots);

/// Backward pass: splits dF/d(combined) into (dF/dspace, dF/dtime), routing
/// time gradients through the sorting permutation.
std::pair<Points, Eigen::VectorXd> space_time_combine_backward(
    const Eigen::Ref<const Eigen::VectorXd>& time, int robots,
    const Eigen::Ref<const Points>& grad_combined);

/// Stable ascending order of the temporal inducing points.
std::vector<Eigen::Index> time_order(const Eigen::Ref<const Eigen::VectorXd>& time);

}  // namespace ipp
