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
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "internal.hpp"
#include "ipp/cli.hpp"
#include "ipp/error.hpp"

namespace ipp::cli {

namespace detail {

namespace {

void dump_into(const ojson& j, std::string& out) {
  switch (j.type()) {
    case ojson::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += ojson(it.key()).dump();
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      return;
    }
    case ojson::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_into(j[i], out);
      }
      out += ']';
      return;
    }
    case ojson::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const ojson& j, bool newline) {
  std::string out;
  dump_into(j, out);
  if (newline) out += '\n';
  return out;
}

ojson environment_json(const Environment& env) {
  ojson j = ojson::object();
  j["lower"] = vector_json(env.lower());
  j["upper"] = vector_json(env.upper());
  if (env.has_time()) j["time_horizon"] = {env.time_horizon()->first, env.time_horizon()->second};
  return j;
}

Environment environment_from_json(const nlohmann::json& j, const std::string& where) {
  auto vec = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty()) {
      throw_invalid(where + ": environment." + key + " must be a non-empty array");
    }
    const auto& a = j.at(key);
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number()) throw_invalid(where + ": environment." + key + " must hold numbers");
      v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    }
    return v;
  };
  if (!j.is_object()) throw_invalid(where + ": environment must be an object");
  std::optional<std::pair<double, double>> horizon;
  if (j.contains("time_horizon") && !j.at("time_horizon").is_null()) {
    const Eigen::VectorXd h = vec("time_horizon");
    if (h.size() != 2) throw_invalid(where + ": environment.time_horizon must have 2 entries");
    horizon = std::make_pair(h[0], h[1]);
  }
  return Environment(vec("lower"), vec("upper"), horizon);
}

ojson vector_json(const Eigen::VectorXd& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ojson points_json(const Points& p) {
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index c = 0; c < p.cols(); ++c) row.push_back(p(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kResourceLimit, "cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw Error(ErrorKind::kResourceLimit, "failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_invalid("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw_invalid(path.string() + ": line " + std::to_string(line) + ": malformed JSON");
  }
}

}  // namespace detail

using detail::ojson;

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> field_columns(const Environment& env) {
  static const char* const kNames[] = {"x", "y", "z"};
  std::vector<std::string> cols;
  for (int i = 0; i < env.spatial_dims(); ++i) cols.emplace_back(kNames[i]);
  if (env.has_time()) cols.emplace_back("t");
  return cols;
}

std::vector<std::string> waypoint_columns(const Environment& env, const SensingModel& sensing) {
  static const char* const kNames[] = {"x", "y", "z"};
  std::vector<std::string> cols;
  for (int i = 0; i < env.spatial_dims(); ++i) cols.emplace_back(kNames[i]);
  if (sensing.kind == SensingModel::Kind::kLineFov) cols.emplace_back("heading");
  if (sensing.kind == SensingModel::Kind::kSquareFovHeight) cols.emplace_back("height");
  if (env.has_time()) cols.emplace_back("t");
  return cols;
}

std::filesystem::path field_meta_path(const std::filesystem::path& csv_path) {
  std::filesystem::path meta = csv_path;
  meta.replace_extension(".meta.json");
  return meta;
}

void write_field(const Field& field, double noise_variance, const std::filesystem::path& csv_path) {
  const auto cols = field_columns(field.env());
  std::string csv;
  for (const auto& c : cols) csv += c + ",";
  csv += "value\n";
  char buf[64];
  const Points& g = field.grid();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.9g,", g(i, c) == 0.0 ? 0.0 : g(i, c));
      csv += buf;
    }
    std::snprintf(buf, sizeof(buf), "%.9g\n", field.values()[i] == 0.0 ? 0.0 : field.values()[i]);
    csv += buf;
  }
  detail::write_file(csv_path, csv);

  ojson meta = ojson::object();
  meta["columns"] = cols;
  meta["environment"] = detail::environment_json(field.env());
  meta["resolution"] = field.resolution();
  meta["kernel"] = {{"variance", field.kernel().variance()},
                    {"lengthscales", detail::vector_json(field.kernel().lengthscales())}};
  meta["noise_variance"] = noise_variance;
  meta["seed"] = field.seed();
  detail::write_file(field_meta_path(csv_path), detail::dump(meta));
}

Field read_field(const std::filesystem::path& csv_path, double* noise_variance) {
  const std::filesystem::path meta_path = field_meta_path(csv_path);
  if (!std::filesystem::exists(csv_path)) throw_invalid("field file " + csv_path.string() + " does not exist");
  if (!std::filesystem::exists(meta_path)) {
    throw_invalid("field metadata " + meta_path.string() + " does not exist");
  }
  const nlohmann::json meta = detail::read_json(meta_path);
  const std::string where = meta_path.string();
  try {
    const Environment env = detail::environment_from_json(meta.at("environment"), where);
    const std::vector<int> res = meta.at("resolution").get<std::vector<int>>();
    const RbfKernel kernel(meta.at("kernel").at("variance").get<double>(),
                           Eigen::Map<const Eigen::VectorXd>(
                               meta.at("kernel").at("lengthscales").get<std::vector<double>>().data(),
                               static_cast<Eigen::Index>(meta.at("kernel").at("lengthscales").size())));
    if (noise_variance) *noise_variance = meta.at("noise_variance").get<double>();
    const std::uint64_t seed = meta.at("seed").get<std::uint64_t>();

    std::istringstream in(detail::read_file(csv_path));
    std::string line;
    if (!std::getline(in, line)) throw_invalid(csv_path.string() + ": empty file");
    const int width = env.input_dims() + 1;
    std::vector<double> values;
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      std::stringstream ss(line);
      std::string cell;
      int col = 0;
      double last = 0.0;
      while (std::getline(ss, cell, ',')) {
        std::size_t used = 0;
        try {
          last = std::stod(cell, &used);
        } catch (const std::exception&) {
          throw_invalid(csv_path.string() + ": line " + std::to_string(line_no) + ": not a number");
        }
        ++col;
      }
      if (col != width) {
        throw_invalid(csv_path.string() + ": line " + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " columns");
      }
      values.push_back(last);
    }
    return Field(env, res, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())),
                 kernel, seed);
  } catch (const nlohmann::json::exception& e) {
    throw_invalid(where + ": " + e.what());
  }
}

PathsFile read_paths(const std::filesystem::path& path) {
  const nlohmann::json j = detail::read_json(path);
  const std::string where = path.string();
  PathsFile pf;
  try {
    if (!j.is_object() || !j.contains("robots") || !j.at("robots").is_array()) {
      throw_invalid(where + ": expected an object with a robots array");
    }
    if (j.contains("environment") && !j.at("environment").is_null()) {
      pf.env = detail::environment_from_json(j.at("environment"), where);
    }
    if (j.contains("columns")) pf.columns = j.at("columns").get<std::vector<std::string>>();
    if (j.contains("objective") && j.at("objective").is_number()) pf.objective = j.at("objective").get<double>();
    int index = 0;
    for (const auto& r : j.at("robots")) {
      const int id = r.contains("id") ? r.at("id").get<int>() : index;
      const auto& w = r.at("waypoints");
      if (!w.is_array() || w.empty()) {
        throw_invalid(where + ": robot " + std::to_string(id) + " has no waypoints");
      }
      const std::size_t cols = w[0].size();
      Points p(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(cols));
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (!w[i].is_array() || w[i].size() != cols) {
          throw_invalid(where + ": robot " + std::to_string(id) + " waypoint " + std::to_string(i) +
                        " has the wrong number of coordinates");
        }
        for (std::size_t c = 0; c < cols; ++c) {
          if (!w[i][c].is_number()) {
            throw_invalid(where + ": robot " + std::to_string(id) + " waypoint " + std::to_string(i) +
                          " is not numeric");
          }
          p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = w[i][c].get<double>();
        }
      }
      int spatial = static_cast<int>(cols);
      if (pf.env) {
        spatial = pf.env->spatial_dims();
      } else if (!pf.columns.empty()) {
        spatial = 0;
        for (const auto& c : pf.columns) spatial += (c == "x" || c == "y" || c == "z");
      }
      if (spatial < 1 || spatial > static_cast<int>(cols)) {
        throw_invalid(where + ": robot " + std::to_string(id) + " waypoints have too few coordinates");
      }
      pf.paths.emplace_back(std::move(p), id, spatial);
      ++index;
    }
  } catch (const nlohmann::json::exception& e) {
    throw_invalid(where + ": " + e.what());
  }
  if (pf.paths.empty()) throw_invalid(where + ": no robots");
  return pf;
}

}  // namespace ipp::cli
