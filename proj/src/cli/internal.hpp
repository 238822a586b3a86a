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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ipp/env.hpp"

namespace ipp::cli::detail {

using ojson = nlohmann::ordered_json;

/// Compact JSON with shortest round-trip floats and a trailing newline when
/// `newline` is set. Non-finite numbers become null.
std::string dump(const ojson& j, bool newline = true);

ojson environment_json(const Environment& env);
/// Reads the object written by environment_json; `where` names the file.
Environment environment_from_json(const nlohmann::json& j, const std::string& where);

ojson vector_json(const Eigen::VectorXd& v);
ojson points_json(const Points& p);

/// Whole-file write; throws Error(kResourceLimit) when the file cannot be written.
void write_file(const std::filesystem::path& path, const std::string& content);
/// Whole-file read; throws Error(kInvalidArgument) when the file is missing.
std::string read_file(const std::filesystem::path& path);
/// Parses JSON from a file; syntax errors name the file and line.
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace ipp::cli::detail
