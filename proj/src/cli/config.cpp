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
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ipp/cli.hpp"
#include "ipp/error.hpp"
#include "ipp/rng.hpp"

namespace ipp::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw_invalid("config: " + (key.empty() ? std::string("<root>") : key) + ": " + what);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

/// One JSON object of the config with its dotted path; rejects unknown keys.
class Section {
 public:
  Section(const json& j, std::string path, std::initializer_list<const char*> keys)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_, "expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!allowed.count(it.key())) config_error(join(path_, it.key()), "unknown key");
    }
  }

  [[nodiscard]] bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  [[nodiscard]] std::string key(const char* k) const { return join(path_, k); }

  [[nodiscard]] const json& at(const char* k) const {
    if (!has(k)) config_error(key(k), "missing required key");
    return j_.at(k);
  }

  [[nodiscard]] double number(const char* k) const { return as_number(at(k), key(k)); }
  [[nodiscard]] std::optional<double> opt_number(const char* k) const {
    if (!has(k)) return std::nullopt;
    return number(k);
  }

  [[nodiscard]] long long integer(const char* k, long long min) const {
    const json& v = at(k);
    if (!v.is_number_integer()) config_error(key(k), "expected an integer");
    const long long i = v.get<long long>();
    if (i < min) config_error(key(k), "must be at least " + std::to_string(min));
    return i;
  }

  [[nodiscard]] std::uint64_t unsigned_integer(const char* k) const {
    const json& v = at(k);
    if (!v.is_number_unsigned()) config_error(key(k), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  [[nodiscard]] Eigen::VectorXd vector(const char* k) const {
    const json& v = at(k);
    if (!v.is_array() || v.empty()) config_error(key(k), "expected a non-empty array of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] = as_number(v[i], key(k) + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  [[nodiscard]] std::string string(const char* k) const {
    const json& v = at(k);
    if (!v.is_string()) config_error(key(k), "expected a string");
    return v.get<std::string>();
  }

  [[nodiscard]] Section section(const char* k, std::initializer_list<const char*> keys) const {
    return Section(at(k), key(k), keys);
  }

 private:
  static double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) config_error(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_error(key, "must be finite");
    return d;
  }

  const json& j_;
  std::string path_;
};

/// Runs a library validation step and prefixes its message with the key.
template <class F>
void checked(const std::string& key, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInvalidArgument) throw;
    config_error(key, e.what());
  }
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
    row.push_back(v);
  }
  return row;
}

Points read_past_csv(const std::filesystem::path& file, int dims) {
  std::ifstream in(file);
  if (!in) config_error("past_data", "cannot open " + file.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (rows.empty() && line.find_first_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ") !=
                            std::string::npos &&
        line.find_first_of("0123456789") == std::string::npos) {
      continue;  // header
    }
    std::vector<double> row;
    try {
      row = parse_csv_row(line);
    } catch (const std::exception&) {
      config_error("past_data", file.string() + " line " + std::to_string(line_no) + ": not a numeric row");
    }
    if (static_cast<int>(row.size()) != dims) {
      config_error("past_data", file.string() + " line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(dims) + " columns");
    }
    rows.push_back(std::move(row));
  }
  Points p(static_cast<Eigen::Index>(rows.size()), dims);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int c = 0; c < dims; ++c) p(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
  }
  return p;
}

std::vector<int> default_resolution(const Environment& env) {
  const int d = env.spatial_dims();
  const int per_axis = d == 1 ? 100 : d == 2 ? 30 : 10;
  std::vector<int> res(static_cast<std::size_t>(d), per_axis);
  if (env.has_time()) res.push_back(5);
  return res;
}

SensingModel parse_sensing(const Section& root) {
  SensingModel s;
  if (!root.has("sensing")) return s;
  const Section sec = root.section("sensing", {"kind", "points", "line_length", "half_angle", "grid", "height_range"});
  const std::string kind = sec.string("kind");
  if (kind == "point") {
    s.kind = SensingModel::Kind::kPoint;
  } else if (kind == "arc") {
    s.kind = SensingModel::Kind::kArc;
    s.points = 10;
  } else if (kind == "line_fov") {
    s.kind = SensingModel::Kind::kLineFov;
    s.points = 10;
  } else if (kind == "square_fov_height") {
    s.kind = SensingModel::Kind::kSquareFovHeight;
  } else {
    config_error(sec.key("kind"), "expected point, arc, line_fov or square_fov_height, got '" + kind + "'");
  }
  if (sec.has("points")) s.points = static_cast<int>(sec.integer("points", 1));
  if (sec.has("line_length")) s.line_length = sec.number("line_length");
  if (sec.has("half_angle")) s.half_angle = sec.number("half_angle");
  if (sec.has("grid")) s.grid = static_cast<int>(sec.integer("grid", 1));
  if (sec.has("height_range")) {
    const Eigen::VectorXd h = sec.vector("height_range");
    if (h.size() != 2) config_error(sec.key("height_range"), "expected [min, max]");
    s.min_height = h[0];
    s.max_height = h[1];
  }
  checked(sec.key("kind"), [&] { s.validate(); });
  return s;
}

std::size_t line_of_offset(std::string_view text, std::size_t offset, std::size_t* column) {
  offset = std::min(offset, text.size());
  std::size_t line = 1;
  std::size_t last_nl = 0;
  bool seen = false;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      last_nl = i;
      seen = true;
    }
  }
  *column = seen ? offset - last_nl : offset + 1;
  return line;
}

}  // namespace

PlanOptions RunConfig::plan_options() const {
  PlanOptions o;
  o.start = start;
  o.end = end;
  o.past = past;
  o.train_samples = train_samples;
  o.noise_variance = noise_variance;
  return o;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t col = 0;
    const std::size_t line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1, &col);
    throw_invalid("config: line " + std::to_string(line) + ", column " + std::to_string(col) +
                  ": malformed JSON");
  }

  const Section root(j, "",
                     {"environment", "kernel", "noise_variance", "robots", "waypoints", "sensing", "penalties",
                      "optimizer", "seed", "train_samples", "past_data", "field", "start", "end", "output_dir"});
  RunConfig cfg;

  const Section env = root.section("environment", {"lower", "upper", "time_horizon"});
  const Eigen::VectorXd lower = env.vector("lower");
  const Eigen::VectorXd upper = env.vector("upper");
  if (lower.size() != upper.size()) config_error(env.key("upper"), "must have as many entries as lower");
  if (lower.size() > 3) config_error(env.key("lower"), "at most 3 spatial dimensions are supported");
  std::optional<std::pair<double, double>> horizon;
  if (env.has("time_horizon")) {
    const Eigen::VectorXd h = env.vector("time_horizon");
    if (h.size() != 2) config_error(env.key("time_horizon"), "expected [start, end]");
    horizon = std::make_pair(h[0], h[1]);
  }
  checked("environment", [&] { cfg.env = Environment(lower, upper, horizon); });

  const Section ker = root.section("kernel", {"variance", "lengthscales"});
  const double variance = ker.number("variance");
  const Eigen::VectorXd ls = ker.vector("lengthscales");
  if (ls.size() != cfg.env.input_dims()) {
    config_error(ker.key("lengthscales"), "expected " + std::to_string(cfg.env.input_dims()) +
                                              " entries (spatial axes" +
                                              std::string(cfg.env.has_time() ? ", then time)" : ")"));
  }
  checked("kernel", [&] { cfg.kernel = RbfKernel(variance, ls); });

  if (root.has("noise_variance")) {
    cfg.noise_variance = root.number("noise_variance");
    if (!(cfg.noise_variance > 0.0)) config_error("noise_variance", "must be positive");
  }
  if (root.has("robots")) cfg.robots = static_cast<int>(root.integer("robots", 1));
  cfg.waypoints = static_cast<std::size_t>(root.integer("waypoints", 2));
  if (root.has("seed")) cfg.seed = root.unsigned_integer("seed");
  if (root.has("train_samples")) cfg.train_samples = static_cast<std::size_t>(root.integer("train_samples", 1));

  cfg.objective.sensing = parse_sensing(root);

  if (root.has("penalties")) {
    const Section pen =
        root.section("penalties", {"distance_budget", "velocity_limit", "acceleration_limit", "weight"});
    cfg.objective.penalties.distance_budget = pen.opt_number("distance_budget");
    cfg.objective.penalties.velocity_limit = pen.opt_number("velocity_limit");
    cfg.objective.penalties.acceleration_limit = pen.opt_number("acceleration_limit");
    if (pen.has("weight")) cfg.objective.penalties.weight = pen.number("weight");
    checked("penalties", [&] { cfg.objective.penalties.validate(); });
  }

  if (root.has("optimizer")) {
    const Section opt = root.section("optimizer", {"learning_rate", "max_iters", "tolerance"});
    if (opt.has("learning_rate")) cfg.objective.learning_rate = opt.number("learning_rate");
    if (opt.has("max_iters")) cfg.objective.max_iters = static_cast<int>(opt.integer("max_iters", 1));
    if (opt.has("tolerance")) cfg.objective.tolerance = opt.number("tolerance");
  }
  checked("optimizer", [&] { cfg.objective.validate(); });

  auto point = [&](const char* k) {
    Eigen::VectorXd p = root.vector(k);
    if (p.size() != cfg.env.spatial_dims()) {
      config_error(k, "expected " + std::to_string(cfg.env.spatial_dims()) + " spatial coordinates");
    }
    for (int i = 0; i < p.size(); ++i) {
      if (p[i] < cfg.env.lo(i) || p[i] > cfg.env.hi(i)) config_error(k, "lies outside the environment");
    }
    return p;
  };
  if (root.has("start")) cfg.start = point("start");
  if (root.has("end")) cfg.end = point("end");

  if (root.has("past_data")) {
    std::filesystem::path file = root.string("past_data");
    if (file.is_relative()) file = base_dir / file;
    cfg.past_data_file = file;
    cfg.past.points = read_past_csv(file, cfg.env.input_dims());
    checked("past_data", [&] { cfg.past.validate(cfg.env); });
  }

  cfg.field_resolution = default_resolution(cfg.env);
  cfg.field_seed = derive_seed(cfg.seed, 17);
  if (root.has("field")) {
    const Section field = root.section("field", {"resolution", "seed"});
    if (field.has("resolution")) {
      const json& r = field.at("resolution");
      const std::size_t d = static_cast<std::size_t>(cfg.env.input_dims());
      if (r.is_number_integer()) {
        cfg.field_resolution.assign(d, static_cast<int>(field.integer("resolution", 2)));
      } else if (r.is_array() && r.size() == d) {
        for (std::size_t i = 0; i < d; ++i) {
          if (!r[i].is_number_integer() || r[i].get<long long>() < 2) {
            config_error(field.key("resolution") + "[" + std::to_string(i) + "]", "expected an integer >= 2");
          }
          cfg.field_resolution[i] = r[i].get<int>();
        }
      } else {
        config_error(field.key("resolution"),
                     "expected an integer or an array of " + std::to_string(d) + " integers");
      }
    }
    if (field.has("seed")) cfg.field_seed = field.unsigned_integer("seed");
  }

  if (root.has("output_dir")) {
    std::filesystem::path out = root.string("output_dir");
    if (out.is_relative()) out = base_dir / out;
    cfg.output_dir = out;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_invalid("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return parse_config(ss.str(), base);
}

std::string config_reference() {
  return R"(Config keys (JSON, unknown keys are rejected):
  environment.lower          [m]       array, lower corner, 1 to 3 spatial axes (required)
  environment.upper          [m]       array, upper corner (required)
  environment.time_horizon   [min]     [start, end]; adds time as the last input
  kernel.variance            [unit^2]  signal variance (required)
  kernel.lengthscales        [m, min]  one per spatial axis, then one for time (required)
  noise_variance             [unit^2]  observation noise, default 0.01
  robots                     [count]   default 1
  waypoints                  [count]   per robot, >= 2 (required)
  sensing.kind               [-]       point | arc | line_fov | square_fov_height
  sensing.points             [count]   points per arc segment or line FoV, default 10
  sensing.line_length        [m]       line FoV length, default 1
  sensing.half_angle         [rad]     square FoV half angle, default 0.5
  sensing.grid               [count]   square FoV samples per side, default 2
  sensing.height_range       [m]       [min, max] flight height, default [0.1, 10]
  penalties.distance_budget  [m]       per-robot path length limit
  penalties.velocity_limit   [m/min]   needs a time horizon
  penalties.acceleration_limit [m/min^2] needs a time horizon
  penalties.weight           [-]       penalty weight, default 100
  optimizer.learning_rate    [-]       step in normalized coordinates, default 0.01
  optimizer.max_iters        [count]   default 2000
  optimizer.tolerance        [-]       relative objective change to stop, default 1e-6
  seed                       [-]       non-negative integer, default 0
  train_samples              [count]   unlabeled inputs, default 1000 (2D) or 2000
  past_data                  [path]    CSV of past sample locations x,y[,z],t with t <= 0 [m, min]
  field.resolution           [count]   grid points per axis, integer or array
  field.seed                 [-]       seed of the synthetic field
  start, end                 [m]       fixed spatial start/end shared by all robots
  output_dir                 [path]    used when -o is not given
)";
}

}  // namespace ipp::cli
