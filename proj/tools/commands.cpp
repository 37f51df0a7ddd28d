// Copyright 2026 The slsctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "slsctl/bench.hpp"
#include "slsctl/errors.hpp"
#include "slsctl/exact_dp.hpp"
#include "slsctl/problem_io.hpp"
#include "slsctl/relaxed.hpp"
#include "slsctl/riccati_cache.hpp"

namespace slsctl::cli {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

void emit(const json& doc, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    save_json(path, doc);
  }
}

RelaxedSettings load_settings(const std::string& path) {
  if (path.empty()) return {};
  return relaxed_settings_from_json(load_json(path));
}

// Maps the library's exception types onto the exit-code contract.
int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kOk;
  } catch (const CapacityExceeded& e) {
    err << "capacity exceeded: " << e.what() << '\n';
    return kCapacityError;
  } catch (const InvalidArgument& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << '\n';
  }
  return kInputError;
}

struct ExactRun {
  ControlSolution solution;
  std::vector<std::size_t> sizes;
  bool cache_hit = false;
  double t_sets_ms = 0.0;
  double t_online_ms = 0.0;
};

ExactRun run_exact(const Problem& problem, const std::string& cache, double dedupe_tol) {
  ExactRun run;
  auto start = Clock::now();
  std::optional<RiccatiSet> sets;
  if (!cache.empty()) sets = load_value_sets(cache, problem.system, problem.spec, dedupe_tol);
  run.cache_hit = sets.has_value();
  if (!sets) {
    ValueSetOptions opts;
    opts.dedupe_tol = dedupe_tol;
    sets = build_value_sets(problem.system, problem.spec, opts);
    if (!cache.empty()) save_value_sets(cache, *sets, problem.system, problem.spec);
  }
  run.t_sets_ms = ms_since(start);
  for (const auto& level : sets->levels) run.sizes.push_back(level.matrices.size());
  start = Clock::now();
  run.solution = exact_online_control(problem.system, problem.spec, *sets, problem.x0);
  run.t_online_ms = ms_since(start);
  return run;
}

json exact_doc(const ExactRun& run) {
  json doc = solution_to_json(run.solution);
  doc["value_set_sizes"] = run.sizes;
  doc["cache_hit"] = run.cache_hit;
  return doc;
}

}  // namespace

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw InvalidArgument("empty entry in threshold list");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad threshold \"" + item + "\"");
    }
    if (used != item.size() || !(v >= 0.0)) throw InvalidArgument("bad threshold \"" + item + "\"");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("threshold list is empty");
  return out;
}

int cmd_exact(const ExactArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Problem problem = load_problem(args.input);
    emit(exact_doc(run_exact(problem, args.cache, args.dedupe_tol)), args.out, out);
  });
}

int cmd_relaxed(const RelaxedArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Problem problem = load_problem(args.input);
    const RelaxedSettings settings = load_settings(args.settings);
    const RelaxedSolution sol = solve_relaxed(problem.system, problem.spec, problem.x0, settings);
    emit(relaxed_report_to_json(sol), args.out, out);
  });
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Problem problem = load_problem(args.input);
    const RelaxedSettings settings = load_settings(args.settings);
    const ExactRun exact = run_exact(problem, args.cache, 1e-12);
    const auto start = Clock::now();
    const RelaxedSolution relaxed = solve_relaxed(problem.system, problem.spec, problem.x0, settings);
    const double t_relaxed = ms_since(start);

    std::size_t hamming = 0;
    std::size_t hamming_projected = 0;
    for (std::size_t k = 0; k < problem.spec.horizon(); ++k) {
      hamming += exact.solution.trajectory.modes[k] != relaxed.control.trajectory.modes[k] ? 1 : 0;
      hamming_projected += exact.solution.trajectory.modes[k] != relaxed.projected[k] ? 1 : 0;
    }
    json doc;
    doc["exact"] = exact_doc(exact);
    doc["relaxed"] = relaxed_report_to_json(relaxed, exact.solution.cost);
    doc["relative_error"] = relative_error(relaxed.control.cost, exact.solution.cost);
    doc["hamming"] = hamming;
    doc["hamming_projected"] = hamming_projected;
    doc["timing_ms"] = {{"value_sets", exact.t_sets_ms}, {"exact_online", exact.t_online_ms}, {"relaxed", t_relaxed}};
    emit(doc, args.out, out);
  });
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RandomSystemConfig config;
    std::string default_thresholds = "1e-5,1e-7,1e-8,1e-10,0";
    if (args.preset == "three-mode") {
      config = RandomSystemConfig::three_mode_batch();
      default_thresholds = "1e-2,1e-5,1e-7,1e-8,1e-10,0";
    } else if (args.preset.empty() || args.preset == "two-mode") {
      config = RandomSystemConfig::two_mode_batch();
    } else {
      throw InvalidArgument("unknown preset \"" + args.preset + "\"");
    }
    if (!args.input.empty()) config = random_config_from_json(load_json(args.input), config);
    if (args.seed) config.seed = *args.seed;
    if (args.count) config.count = *args.count;
    validate(config);

    const auto thresholds = parse_thresholds(args.thresholds.empty() ? default_thresholds : args.thresholds);
    ExperimentOptions options;
    options.jobs = args.jobs;
    options.record_timings = !args.no_timings;
    const ExperimentReport report = run_experiment(config, thresholds, load_settings(args.settings), options);

    if (args.out.empty()) {
      write_csv(out, report);
    } else {
      std::ofstream csv(args.out);
      if (!csv) throw InvalidArgument("cannot write " + args.out);
      write_csv(csv, report);
    }
    const json summary = summary_to_json(report);
    if (!args.summary.empty()) save_json(args.summary, summary);
    if (!args.out.empty() && args.summary.empty()) out << summary.dump(2) << '\n';
  });
}

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal control of discrete-time switched linear systems"};
  app.require_subcommand(1);

  ExactArgs exact;
  auto* exact_cmd = app.add_subcommand("exact", "Exact solution from the value-function sets");
  exact_cmd->add_option("--input", exact.input, "Problem JSON")->required();
  exact_cmd->add_option("--out", exact.out, "Solution JSON (default stdout)");
  exact_cmd->add_option("--cache", exact.cache, "Value-set cache file, reused when the problem hash matches");
  exact_cmd->add_option("--dedupe-tol", exact.dedupe_tol, "Merge value matrices closer than this (0 keeps all)");

  RelaxedArgs relaxed;
  auto* relaxed_cmd = app.add_subcommand("relaxed", "Block-sparse relaxation, projection and online pass");
  relaxed_cmd->add_option("--input", relaxed.input, "Problem JSON")->required();
  relaxed_cmd->add_option("--settings", relaxed.settings, "Relaxed solver settings JSON");
  relaxed_cmd->add_option("--out", relaxed.out, "Report JSON (default stdout)");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Run exact and relaxed solvers and compare");
  compare_cmd->add_option("--input", compare.input, "Problem JSON")->required();
  compare_cmd->add_option("--settings", compare.settings, "Relaxed solver settings JSON");
  compare_cmd->add_option("--out", compare.out, "Comparison JSON (default stdout)");
  compare_cmd->add_option("--cache", compare.cache, "Value-set cache file");

  BenchArgs bench;
  unsigned long long seed = 0;
  std::size_t count = 0;
  auto* bench_cmd = app.add_subcommand("bench", "Random-system batch with relative-error distribution");
  bench_cmd->add_option("--input", bench.input, "Batch config JSON (overrides the preset)");
  bench_cmd->add_option("--preset", bench.preset, "two-mode (default) or three-mode");
  bench_cmd->add_option("--settings", bench.settings, "Relaxed solver settings JSON");
  bench_cmd->add_option("--out", bench.out, "Per-instance CSV (default stdout)");
  bench_cmd->add_option("--summary", bench.summary, "Summary JSON with the threshold table");
  bench_cmd->add_option("--thresholds", bench.thresholds, "Comma-separated relative-error thresholds");
  auto* seed_opt = bench_cmd->add_option("--seed", seed, "Batch seed");
  auto* count_opt = bench_cmd->add_option("--count", count, "Number of instances");
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--no-timings", bench.no_timings, "Write zero timings for byte-reproducible CSV");

  std::vector<std::string> argv(raw.rbegin(), raw.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInputError;
  }
  if (*seed_opt) bench.seed = seed;
  if (*count_opt) bench.count = count;

  if (*exact_cmd) return cmd_exact(exact, out, err);
  if (*relaxed_cmd) return cmd_relaxed(relaxed, out, err);
  if (*compare_cmd) return cmd_compare(compare, out, err);
  return cmd_bench(bench, out, err);
}

}  // namespace slsctl::cli
