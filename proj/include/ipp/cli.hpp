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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ipp/env.hpp"
#include "ipp/eval.hpp"
#include "ipp/kernel.hpp"
#include "ipp/plan.hpp"
#include "ipp/sgp.hpp"

namespace ipp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitResource = 3,
  kExitConstraint = 4,
  kExitNumerical = 5,
};

/// Everything one batch run needs, parsed from a strict JSON config.
struct RunConfig {
  Environment env = Environment::unit(2);
  RbfKernel kernel{1.0, Eigen::VectorXd::Ones(2)};
  double noise_variance = kDefaultNoiseVariance;
  int robots = 1;
  std::size_t waypoints = 0;
  ObjectiveConfig objective;
  std::uint64_t seed = 0;
  std::optional<std::size_t> train_samples;
  std::optional<std::filesystem::path> past_data_file;
  PastData past;
  std::vector<int> field_resolution;
  std::uint64_t field_seed = 0;
  std::optional<Eigen::VectorXd> start;
  std::optional<Eigen::VectorXd> end;
  std::optional<std::filesystem::path> output_dir;

  [[nodiscard]] PlanOptions plan_options() const;
};

/// Parses config text. Relative file references resolve against `base_dir`.
/// Throws Error(kInvalidArgument) naming the offending key or line.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Config key reference printed by every subcommand's --help.
std::string config_reference();

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

/// Column names of the field lattice: x, y, z (as many as spatial dims), then t.
std::vector<std::string> field_columns(const Environment& env);

/// Column names of planned waypoints, including heading/height.
std::vector<std::string> waypoint_columns(const Environment& env, const SensingModel& sensing);

void write_field(const Field& field, double noise_variance, const std::filesystem::path& csv_path);
/// Reads field.csv plus the field.meta.json stored next to it.
Field read_field(const std::filesystem::path& csv_path, double* noise_variance = nullptr);
std::filesystem::path field_meta_path(const std::filesystem::path& csv_path);

struct PathsFile {
  std::vector<Path> paths;
  std::vector<std::string> columns;
  std::optional<Environment> env;
  std::optional<double> objective;
};
PathsFile read_paths(const std::filesystem::path& path);

/// SVG with one polyline per robot, optional heatmap, legend and time ramp.
std::string render_svg(const PathsFile& paths, const Field* field);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ipp::cli
