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
#include <atomic>
#include <cstdlib>
#include <exception>
#include <new>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "internal.hpp"
#include "ipp/cli.hpp"
#include "ipp/error.hpp"
#include "ipp/rng.hpp"

namespace ipp::cli {

namespace {

namespace fs = std::filesystem;
using detail::ojson;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kDegeneratePath:
      return kExitConfig;
    case ErrorKind::kResourceLimit:
      return kExitResource;
    case ErrorKind::kInfeasibleConstraint:
      return kExitConstraint;
    case ErrorKind::kNumericalFailure:
      return kExitNumerical;
  }
  return kExitConfig;
}

fs::path output_dir(const std::string& flag, const RunConfig* cfg) {
  fs::path dir = !flag.empty() ? fs::path(flag) : (cfg && cfg->output_dir ? *cfg->output_dir : fs::path("."));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::kResourceLimit, "cannot create output directory " + dir.string());
  }
  return dir;
}

ojson robots_json(const std::vector<Path>& paths, bool with_waypoints) {
  ojson robots = ojson::array();
  for (const Path& p : paths) {
    ojson r = ojson::object();
    r["id"] = p.robot_id;
    if (with_waypoints) r["waypoints"] = detail::points_json(p.waypoints);
    r["length_m"] = path_length(p);
    robots.push_back(std::move(r));
  }
  return robots;
}

EvalSensing eval_sensing_for(const SensingModel& s) {
  return s.kind == SensingModel::Kind::kArc ? EvalSensing::continuous() : EvalSensing::discrete();
}

int restart_threads(int restarts) {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("IPP_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw_invalid("IPP_THREADS must be a positive integer");
    cap = static_cast<int>(std::min<long>(v, 1024));
  }
  return std::min(cap, restarts);
}

/// Runs `restarts` independent seeds and keeps the best objective. Restart 0
/// uses the configured seed; ties go to the lower index.
PlanResult plan_with_restarts(const RunConfig& cfg, int restarts) {
  std::vector<std::optional<PlanResult>> results(static_cast<std::size_t>(restarts));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(restarts));
  const PlanOptions options = cfg.plan_options();
  auto work = [&](int i) {
    const std::uint64_t seed = i == 0 ? cfg.seed : derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(i));
    try {
      results[static_cast<std::size_t>(i)] =
          plan_multi(cfg.kernel, cfg.env, cfg.waypoints, cfg.robots, cfg.objective, seed, options);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  const int threads = restart_threads(restarts);
  if (threads <= 1) {
    for (int i = 0; i < restarts; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < restarts; i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  int best = -1;
  for (int i = 0; i < restarts; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    if (!r) continue;
    if (best < 0 || r->objective > results[static_cast<std::size_t>(best)]->objective) best = i;
  }
  if (best < 0) std::rethrow_exception(errors[0]);
  return std::move(*results[static_cast<std::size_t>(best)]);
}

int cmd_gen_data(const std::string& config, const std::string& out_flag, std::ostream& out) {
  const RunConfig cfg = load_config(config);
  const Field field = sample_gp_field(cfg.kernel, cfg.env, cfg.field_resolution, cfg.field_seed);
  const fs::path dir = output_dir(out_flag, &cfg);
  write_field(field, cfg.noise_variance, dir / "field.csv");
  out << "wrote " << (dir / "field.csv").string() << " (" << field.grid().rows() << " points)\n";
  return kExitOk;
}

int cmd_plan(const std::string& config, const std::string& field_path, const std::string& out_flag, int restarts,
             std::ostream& out) {
  const RunConfig cfg = load_config(config);
  std::optional<Field> field;
  if (!field_path.empty()) field = read_field(field_path);
  const fs::path dir = output_dir(out_flag, &cfg);

  const PlanResult res = plan_with_restarts(cfg, restarts);

  ojson paths = ojson::object();
  paths["robots"] = robots_json(res.paths, true);
  paths["objective"] = res.objective;
  paths["seed"] = cfg.seed;
  paths["warning"] = res.warning ? ojson(res.warning_message) : ojson(nullptr);
  paths["columns"] = waypoint_columns(cfg.env, cfg.objective.sensing);
  paths["environment"] = detail::environment_json(cfg.env);
  detail::write_file(dir / "paths.json", detail::dump(paths));

  std::string trace = "iteration,objective\n";
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    trace += std::to_string(i) + "," + (std::isfinite(res.trace[i]) ? format_double(res.trace[i]) : "nan") + "\n";
  }
  detail::write_file(dir / "trace.csv", trace);

  ojson summary = ojson::object();
  summary["objective"] = res.objective;
  ojson lengths = ojson::array();
  for (const Path& p : res.paths) lengths.push_back(path_length(p));
  summary["lengths_m"] = lengths;
  if (field) {
    summary["rmse"] = evaluate_paths(*field, res.paths, eval_sensing_for(cfg.objective.sensing), cfg.noise_variance).rmse;
  }
  summary["warning"] = res.warning ? ojson(res.warning_message) : ojson(nullptr);
  out << detail::dump(summary);
  return res.warning ? kExitNumerical : kExitOk;
}

int cmd_eval(const std::string& paths_path, const std::string& field_path, const std::string& sensing,
             double step, const std::string& out_flag, std::ostream& out) {
  const PathsFile pf = read_paths(paths_path);
  double noise = kDefaultNoiseVariance;
  const Field field = read_field(field_path, &noise);
  const fs::path dir = output_dir(out_flag, nullptr);
  const EvalSensing s = sensing == "continuous" ? EvalSensing::continuous(step) : EvalSensing::discrete();
  const EvalResult res = evaluate_paths(field, pf.paths, s, noise);

  ojson report = ojson::object();
  report["rmse"] = res.rmse;
  report["observations"] = res.observations;
  report["sensing"] = sensing;
  if (s.kind == EvalSensing::Kind::kContinuous) {
    report["step_m"] = step > 0.0 ? step : field.kernel().lengthscales().head(field.env().spatial_dims()).minCoeff() / 5.0;
  }
  report["noise_variance"] = noise;
  report["robots"] = robots_json(pf.paths, false);
  detail::write_file(dir / "report.json", detail::dump(report));
  out << detail::dump(report);
  return kExitOk;
}

int cmd_plot(const std::string& paths_path, const std::string& field_path, const std::string& out_flag,
             std::ostream& out) {
  const PathsFile pf = read_paths(paths_path);
  std::optional<Field> field;
  if (!field_path.empty()) field = read_field(field_path);
  const fs::path dir = output_dir(out_flag, nullptr);
  detail::write_file(dir / "plot.svg", render_svg(pf, field ? &*field : nullptr));
  out << "wrote " << (dir / "plot.svg").string() << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Informative path planning with sparse Gaussian processes", "ipp"};
  app.require_subcommand(1);
  app.footer(config_reference());

  std::string config, out_dir, field_path, paths_path, sensing = "discrete";
  int restarts = 1;
  double step = 0.0;

  CLI::App* gen = app.add_subcommand("gen-data", "Sample a synthetic GP field on a grid (field.csv, field.meta.json)");
  gen->add_option("-c,--config", config, "JSON run config")->required();
  gen->add_option("-o,--output", out_dir, "Output directory (default: config output_dir or .)");
  gen->footer(config_reference());

  CLI::App* plan = app.add_subcommand("plan", "Plan informative paths (paths.json, trace.csv)");
  plan->add_option("-c,--config", config, "JSON run config")->required();
  plan->add_option("--field", field_path, "field.csv to score the plan against");
  plan->add_option("-o,--output", out_dir, "Output directory (default: config output_dir or .)");
  plan->add_option("--restarts", restarts, "Independent seeds, best objective kept (IPP_THREADS caps threads)")
      ->check(CLI::Range(1, 10000));
  plan->footer(config_reference());

  CLI::App* eval = app.add_subcommand("eval", "Reconstruct a field from path observations (report.json)");
  eval->add_option("--paths", paths_path, "paths.json")->required();
  eval->add_option("--field", field_path, "field.csv with field.meta.json next to it")->required();
  eval->add_option("--sensing", sensing, "discrete (waypoints) or continuous (along the path)")
      ->check(CLI::IsMember({"discrete", "continuous"}));
  eval->add_option("--step", step, "Continuous sensing spacing [m], default smallest spatial lengthscale / 5")
      ->check(CLI::NonNegativeNumber);
  eval->add_option("-o,--output", out_dir, "Output directory (default: .)");
  eval->footer(config_reference());

  CLI::App* plot = app.add_subcommand("plot", "Render paths and an optional field as SVG (plot.svg)");
  plot->add_option("--paths", paths_path, "paths.json")->required();
  plot->add_option("--field", field_path, "field.csv for the heatmap layer");
  plot->add_option("-o,--output", out_dir, "Output directory (default: .)");
  plot->footer(config_reference());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(config, out_dir, out);
    if (plan->parsed()) return cmd_plan(config, field_path, out_dir, restarts, out);
    if (eval->parsed()) return cmd_eval(paths_path, field_path, sensing, step, out_dir, out);
    if (plot->parsed()) return cmd_plot(paths_path, field_path, out_dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitResource;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace ipp::cli
