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

#include "slsctl/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "slsctl/errors.hpp"
#include "slsctl/problem_io.hpp"

namespace slsctl {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kMaxResamples = 100;
constexpr double kExactZeroTol = 1e-12;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

Matrix standard_normal(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

InstanceRecord run_instance(const RandomSystemConfig& config, const CostSpec& spec, std::size_t index,
                            const RelaxedSettings& settings, const ExperimentOptions& options) {
  const RandomInstance inst = generate_random_system(config, index);
  InstanceRecord rec;
  rec.id = index;

  auto start = Clock::now();
  const RiccatiSet sets = build_value_sets(inst.system, spec, options.value_sets);
  rec.t_value_sets_ms = elapsed_ms(start);
  rec.value_set_size = sets.at(0).matrices.size();

  start = Clock::now();
  const ControlSolution exact = exact_online_control(inst.system, spec, sets, inst.x0);
  rec.t_exact_online_ms = elapsed_ms(start);

  start = Clock::now();
  const StageAbResult ab = solve_stage_ab(inst.system, spec, inst.x0, settings);
  const ModeSequence projected = project_modes(ab.aux);
  rec.t_relaxed_ms = elapsed_ms(start);

  start = Clock::now();
  const StageDResult online = stage_d(inst.system, spec, projected, inst.x0);
  rec.t_relaxed_online_ms = elapsed_ms(start);

  rec.exact_cost = exact.cost;
  rec.relaxed_cost = online.control.cost;
  rec.relative_error = relative_error(rec.relaxed_cost, rec.exact_cost);
  rec.relaxed_converged = ab.converged;
  rec.relaxed_cost_check = evaluate_cost(spec, online.control.trajectory);
  for (std::size_t k = 0; k < spec.horizon(); ++k) {
    if (exact.trajectory.modes[k] != online.control.trajectory.modes[k]) ++rec.hamming;
  }
  if (!options.record_timings) {
    rec.t_value_sets_ms = rec.t_exact_online_ms = rec.t_relaxed_ms = rec.t_relaxed_online_ms = 0.0;
  }
  return rec;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

RandomSystemConfig RandomSystemConfig::two_mode_batch() {
  RandomSystemConfig c;
  c.n = 2;
  c.q = 2;
  c.N = 15;
  return c;
}

RandomSystemConfig RandomSystemConfig::three_mode_batch() {
  RandomSystemConfig c;
  c.n = 3;
  c.q = 3;
  c.N = 10;
  return c;
}

void validate(const RandomSystemConfig& c) {
  if (c.n == 0 || c.q == 0 || c.N == 0 || c.input_dim == 0) throw InvalidArgument("n, q, N and n_u must be positive");
  if (c.count == 0) throw InvalidArgument("count must be at least 1");
  if (!(c.radius_low > 0.0) || !(c.radius_low <= c.radius_high)) {
    throw InvalidArgument("spectral radius range must satisfy 0 < low <= high");
  }
  if (!c.allow_unstable && c.radius_high > 1.0) {
    throw InvalidArgument("spectral radius above 1 requires allow_unstable");
  }
  if (!(c.x0_covariance >= 0.0)) throw InvalidArgument("x0 covariance must be nonnegative");
}

RandomSystemConfig random_config_from_json(const json& doc, RandomSystemConfig c) {
  reject_unknown_keys(doc, {"n", "q", "N", "n_u", "count", "seed", "spectral_radius", "x0_covariance", "allow_unstable"},
                      "bench config");
  const auto positive = [&](const char* key, std::size_t& field) {
    if (const auto it = doc.find(key); it != doc.end()) {
      if (!it->is_number_unsigned()) throw InvalidArgument(std::string("bench config: \"") + key + "\" must be a nonnegative integer");
      field = it->get<std::size_t>();
    }
  };
  positive("n", c.n);
  positive("q", c.q);
  positive("N", c.N);
  positive("n_u", c.input_dim);
  positive("count", c.count);
  if (const auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) throw InvalidArgument("bench config: \"seed\" must be a nonnegative integer");
    c.seed = it->get<std::uint64_t>();
  }
  if (const auto it = doc.find("spectral_radius"); it != doc.end()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
      throw InvalidArgument("bench config: \"spectral_radius\" must be [low, high]");
    }
    c.radius_low = (*it)[0].get<double>();
    c.radius_high = (*it)[1].get<double>();
  }
  if (const auto it = doc.find("x0_covariance"); it != doc.end()) {
    if (!it->is_number()) throw InvalidArgument("bench config: \"x0_covariance\" must be a number");
    c.x0_covariance = it->get<double>();
  }
  if (const auto it = doc.find("allow_unstable"); it != doc.end()) {
    if (!it->is_boolean()) throw InvalidArgument("bench config: \"allow_unstable\" must be a boolean");
    c.allow_unstable = it->get<bool>();
  }
  validate(c);
  return c;
}

json to_json(const RandomSystemConfig& c) {
  return {{"n", c.n},           {"q", c.q},
          {"N", c.N},           {"n_u", c.input_dim},
          {"count", c.count},   {"seed", c.seed},
          {"spectral_radius", {c.radius_low, c.radius_high}},
          {"x0_covariance", c.x0_covariance},
          {"allow_unstable", c.allow_unstable}};
}

double spectral_radius(const Matrix& A) {
  Eigen::EigenSolver<Matrix> eig(A, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

RandomInstance generate_random_system(const RandomSystemConfig& config, std::size_t index) {
  validate(config);
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(std::uint64_t{index} >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> radius(config.radius_low, config.radius_high);
  const auto n = static_cast<Eigen::Index>(config.n);

  std::vector<SwitchedSystem::Mode> modes;
  for (std::size_t i = 0; i < config.q; ++i) {
    Matrix A;
    double r = 0.0;
    for (int attempt = 0; attempt < kMaxResamples && r == 0.0; ++attempt) {
      A = standard_normal(rng, n, n);
      r = spectral_radius(A);
    }
    if (r == 0.0) throw NumericError("could not draw a matrix with nonzero spectral radius");
    A *= radius(rng) / r;
    modes.push_back({std::move(A), standard_normal(rng, n, static_cast<Eigen::Index>(config.input_dim))});
  }
  Vector x0 = std::sqrt(config.x0_covariance) * standard_normal(rng, n, 1);
  return {SwitchedSystem(std::move(modes)), std::move(x0)};
}

CostSpec identity_cost(const RandomSystemConfig& config) {
  const auto n = static_cast<Eigen::Index>(config.n);
  const auto nu = static_cast<Eigen::Index>(config.input_dim);
  return CostSpec::constant(config.N, Matrix::Identity(n, n), Matrix::Identity(nu, nu), Matrix::Identity(n, n));
}

ExperimentReport run_experiment(const RandomSystemConfig& config, const std::vector<double>& thresholds,
                                const RelaxedSettings& settings, const ExperimentOptions& options) {
  validate(config);
  const std::uint64_t projected = saturating_pow(config.q, config.N);
  if (projected > options.value_sets.capacity) {
    throw CapacityExceeded("exact solve needs " + std::to_string(projected) + " value matrices, capacity is " +
                           std::to_string(options.value_sets.capacity));
  }
  const CostSpec spec = identity_cost(config);

  ExperimentReport report;
  report.config = config;
  report.instances.resize(config.count);

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, config.count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < config.count; i = next++) {
      try {
        report.instances[i] = run_instance(config, spec, i, settings, options);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.count;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  report.table = threshold_table(report, thresholds);
  return report;
}

std::vector<ThresholdRow> threshold_table(const ExperimentReport& report, const std::vector<double>& thresholds) {
  std::vector<ThresholdRow> rows;
  const auto count = static_cast<double>(report.instances.size());
  for (double alpha : thresholds) {
    const double effective = alpha == 0.0 ? kExactZeroTol : alpha;
    std::size_t hits = 0;
    for (const auto& rec : report.instances) {
      if (rec.relative_error <= effective) ++hits;
    }
    rows.push_back({alpha, count > 0 ? static_cast<double>(hits) / count : 0.0});
  }
  return rows;
}

void write_csv(std::ostream& out, const ExperimentReport& report) {
  out << "id,J_opt,J_rel,eps,hamming,t_exact_ms,t_relaxed_ms\n";
  for (const auto& r : report.instances) {
    out << r.id << ',' << format_double(r.exact_cost) << ',' << format_double(r.relaxed_cost) << ','
        << format_double(r.relative_error) << ',' << r.hamming << ',' << format_double(r.t_exact_ms()) << ','
        << format_double(r.t_relaxed_total_ms()) << '\n';
  }
}

json summary_to_json(const ExperimentReport& report) {
  json table = json::array();
  for (const auto& row : report.table) table.push_back({{"threshold", row.threshold}, {"fraction", row.fraction}});
  double t_sets = 0, t_exact_online = 0, t_relaxed = 0, t_online = 0;
  std::size_t converged = 0;
  double worst = -std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : report.instances) {
    t_sets += r.t_value_sets_ms;
    t_exact_online += r.t_exact_online_ms;
    t_relaxed += r.t_relaxed_ms;
    t_online += r.t_relaxed_online_ms;
    converged += r.relaxed_converged ? 1 : 0;
    worst = std::max(worst, r.relative_error);
    best = std::min(best, r.relative_error);
  }
  return {{"config", to_json(report.config)},
          {"count", report.instances.size()},
          {"threshold_table", table},
          {"max_relative_error", worst},
          {"min_relative_error", best},
          {"relaxed_converged", converged},
          {"timing_ms",
           {{"value_sets", t_sets},
            {"exact_online", t_exact_online},
            {"relaxed_solve", t_relaxed},
            {"relaxed_online", t_online}}}};
}

}  // namespace slsctl
