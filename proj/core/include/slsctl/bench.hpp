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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <utility>
#include <vector>

#include "slsctl/exact_dp.hpp"
#include "slsctl/relaxed.hpp"

namespace slsctl {

struct RandomSystemConfig {
  std::size_t n = 2;
  std::size_t q = 2;
  std::size_t N = 15;
  std::size_t input_dim = 1;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  double radius_low = 0.5;
  double radius_high = 0.95;
  double x0_covariance = 20.0;
  bool allow_unstable = false;

  /// Two-mode batch: (n, q, N) = (2, 2, 15).
  static RandomSystemConfig two_mode_batch();
  /// Three-mode batch: (n, q, N) = (3, 3, 10).
  static RandomSystemConfig three_mode_batch();
};

void validate(const RandomSystemConfig& config);
[[nodiscard]] RandomSystemConfig random_config_from_json(const nlohmann::json& doc,
                                                         RandomSystemConfig base = {});
[[nodiscard]] nlohmann::json to_json(const RandomSystemConfig& config);

struct RandomInstance {
  SwitchedSystem system;
  Vector x0;
};

/// Per mode, A has standard normal entries rescaled to a spectral radius drawn
/// uniformly from [radius_low, radius_high]; B is standard normal; x0 is
/// N(0, x0_covariance·I). Deterministic in (seed, instance index).
[[nodiscard]] RandomInstance generate_random_system(const RandomSystemConfig& config, std::size_t index);

/// Q = I, R = I, Ψ = I over the configured horizon.
[[nodiscard]] CostSpec identity_cost(const RandomSystemConfig& config);

[[nodiscard]] double spectral_radius(const Matrix& A);

struct InstanceRecord {
  std::size_t id = 0;
  double exact_cost = 0.0;
  double relaxed_cost = 0.0;
  double relative_error = 0.0;
  std::size_t hamming = 0;  // σ* vs applied relaxed modes
  double t_value_sets_ms = 0.0;
  double t_exact_online_ms = 0.0;
  double t_relaxed_ms = 0.0;     // stages (a)-(c)
  double t_relaxed_online_ms = 0.0;
  bool relaxed_converged = false;
  double relaxed_cost_check = 0.0;  // evaluate_cost on the relaxed trajectory
  std::size_t value_set_size = 0;   // |H_0|

  [[nodiscard]] double t_exact_ms() const { return t_value_sets_ms + t_exact_online_ms; }
  [[nodiscard]] double t_relaxed_total_ms() const { return t_relaxed_ms + t_relaxed_online_ms; }
};

struct ThresholdRow {
  double threshold = 0.0;
  double fraction = 0.0;
};

struct ExperimentReport {
  RandomSystemConfig config;
  std::vector<InstanceRecord> instances;
  std::vector<ThresholdRow> table;
};

struct ExperimentOptions {
  std::size_t jobs = 1;
  bool record_timings = true;
  ValueSetOptions value_sets;
};

/// Solves every instance exactly and with the relaxed pipeline. Instances may
/// run on `jobs` threads; records are kept in instance order.
[[nodiscard]] ExperimentReport run_experiment(const RandomSystemConfig& config, const std::vector<double>& thresholds,
                                              const RelaxedSettings& settings = {},
                                              const ExperimentOptions& options = {});

/// fraction(α) = |{i : ε_i ≤ α}| / count, with α = 0 read as ε_i ≤ 1e-12.
[[nodiscard]] std::vector<ThresholdRow> threshold_table(const ExperimentReport& report,
                                                        const std::vector<double>& thresholds);

/// id,J_opt,J_rel,eps,hamming,t_exact_ms,t_relaxed_ms
void write_csv(std::ostream& out, const ExperimentReport& report);
[[nodiscard]] nlohmann::json summary_to_json(const ExperimentReport& report);

}  // namespace slsctl
