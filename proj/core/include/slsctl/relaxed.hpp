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

#include <cstddef>
#include <nlohmann/json.hpp>
#include <optional>
#include <vector>

#include "slsctl/group_lasso.hpp"
#include "slsctl/system.hpp"

namespace slsctl {

struct RelaxedSettings {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  /// Total number of convex solves: one with unit weights, then reweights.
  int reweights = 3;
  double epsilon = 1e-6;
  AdmmSettings solver;
};

/// {"gamma1", "gamma2", "reweights", "epsilon", "solver": {"rho", "abs_tol",
/// "rel_tol", "max_iters", "adaptive_rho", "polish"}}; every key optional, unknown keys rejected.
[[nodiscard]] RelaxedSettings relaxed_settings_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json to_json(const RelaxedSettings& settings);

/// Per-step mode-discrepancy blocks f_i(k) and their penalty weights w_i(k).
struct AuxiliarySequence {
  std::vector<std::vector<Vector>> blocks;   // [k][i]
  std::vector<std::vector<double>> weights;  // [k][i]

  [[nodiscard]] std::size_t horizon() const { return blocks.size(); }
  [[nodiscard]] std::size_t mode_count() const { return blocks.empty() ? 0 : blocks.front().size(); }
  [[nodiscard]] double norm(std::size_t k, std::size_t i) const { return blocks.at(k).at(i).norm(); }
};

/// Unit weights for every (k, i).
[[nodiscard]] std::vector<std::vector<double>> unit_weights(std::size_t horizon, std::size_t modes);

/// The relaxed problem with states eliminated. Decision vector
/// z = [u(0); g(0); u(1); g(1); ...] where g(k) = f_1(k) drives
/// x(k+1) = A_1 x(k) + B_1 u(k) + g(k), and every other block is the affine
/// reconstruction f_i(k) = g(k) + (A_1 − A_i) x(k) + (B_1 − B_i) u(k).
struct CondensedProgram {
  std::size_t n = 0;
  std::size_t nu = 0;
  std::size_t q = 0;
  std::size_t N = 0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;

  /// γ1·V as ½zᵀHz + cᵀz (+ constant); group (i,k) carries τ = γ2·w_i(k).
  GroupLassoQP qp;
  double constant = 0.0;

  /// x(k) = state_map[k] z + state_offset[k], k = 0..N.
  std::vector<Matrix> state_map;
  std::vector<Vector> state_offset;

  /// Stacked blocks [A_1; ..; A_q], [B_1; ..; B_q] and 1_q ⊗ I_n.
  Matrix Abar;
  Matrix Bbar;
  Matrix L;

  std::vector<Matrix> Q;  // Q(0)..Q(N)
  std::vector<Matrix> R;  // R(0)..R(N-1)

  [[nodiscard]] std::size_t dim() const { return N * (nu + n); }
  [[nodiscard]] std::size_t group_index(std::size_t mode, std::size_t step) const { return step * q + mode; }
  [[nodiscard]] Vector input(const Vector& z, std::size_t k) const;
  [[nodiscard]] Vector disturbance(const Vector& z, std::size_t k) const;
  [[nodiscard]] Vector state(const Vector& z, std::size_t k) const;
  [[nodiscard]] Vector block(const Vector& z, std::size_t mode, std::size_t k) const;
  /// γ1·V + γ2 Σ w‖f‖ at z, including the constant term.
  [[nodiscard]] double total_objective(const Vector& z) const;
  /// Blocks f_i(k) at z, tagged with the program's current weights.
  [[nodiscard]] AuxiliarySequence auxiliary(const Vector& z) const;
};

[[nodiscard]] CondensedProgram build_condensed_program(const SwitchedSystem& system, const CostSpec& spec,
                                                       const Vector& x0,
                                                       const std::vector<std::vector<double>>& weights,
                                                       double gamma1, double gamma2);

struct ReweightIteration {
  SolverReport report;
  double objective = 0.0;  // total_objective under that iteration's weights
  ModeSequence projection;
};

struct StageAbResult {
  CondensedProgram program;  // weights of the final solve
  Vector z;
  AuxiliarySequence aux;
  std::vector<Vector> inputs;
  std::vector<ReweightIteration> iterations;
  bool converged = false;  // every solve converged
};

/// Unit-weight solve, then T−1 reweights w_i(k) = 1/(‖f_i(k)‖ + ε) rescaled so
/// Σ_i w_i(k) = q at every step. A non-converged solve keeps its best iterate
/// and the pipeline continues.
[[nodiscard]] StageAbResult solve_stage_ab(const SwitchedSystem& system, const CostSpec& spec, const Vector& x0,
                                           const RelaxedSettings& settings = {});

/// σ̂(k) = argmin_i ‖f_i(k)‖₂, lowest index on ties. Norms within 1e-9 of
/// the step minimum, relative to the largest block norm in the sequence, count
/// as tied.
[[nodiscard]] ModeSequence project_modes(const AuxiliarySequence& aux);

struct StageDResult {
  std::vector<Matrix> chain;   // P̂(0)..P̂(N) along σ̂
  ControlSolution control;     // modes recomputed online
  std::size_t divergence = 0;  // steps where the online mode differs from σ̂
};

/// Riccati chain along σ̂, then the online loop
///   σ'(k) = argmin_i x̂ᵀρ_{i,k}(P̂(k+1))x̂,  û(k) = −K_{σ'(k),k}(P̂(k+1)) x̂.
[[nodiscard]] StageDResult stage_d(const SwitchedSystem& system, const CostSpec& spec, const ModeSequence& modes,
                                   const Vector& x0);

struct MultiplierCertificate {
  std::vector<Vector> multipliers;  // λ̄(1)..λ̄(N), each of size q·n
  double stationarity_residual = 0.0;
  double adjoint_residual = 0.0;
};

/// Least-squares fit of λ̄ to
///   Lᵀλ̄(k) = Q(k)x(k) + Āᵀλ̄(k+1),  Lᵀλ̄(N) = Ψx(N),
///   u(k) = −R(k)⁻¹B̄ᵀλ̄(k+1),
/// with (x, u) rebuilt from z and the f_1 blocks of `aux`.
[[nodiscard]] MultiplierCertificate check_stationarity(const CondensedProgram& program, const Vector& z,
                                                       const AuxiliarySequence& aux);

struct RelaxedReport {
  std::vector<ReweightIteration> iterations;
  int admm_iterations = 0;
  bool converged = false;
  MultiplierCertificate certificate;
};

struct RelaxedSolution {
  ModeSequence projected;   // stage (c) output
  AuxiliarySequence aux;
  std::vector<Matrix> chain;
  ControlSolution control;  // stage (d) output
  std::size_t online_divergence = 0;
  RelaxedReport report;
};

/// Stages (a)+(b) jointly, then projection and the online pass.
[[nodiscard]] RelaxedSolution solve_relaxed(const SwitchedSystem& system, const CostSpec& spec, const Vector& x0,
                                            const RelaxedSettings& settings = {});

/// (J − J_opt)/J_opt, 0 when both costs are ≤ 1e-12.
[[nodiscard]] double relative_error(double cost, double optimal_cost);

/// σ̂, applied modes, block norms, solver residuals and the cost; adds the
/// relative error when the exact optimum is supplied.
[[nodiscard]] nlohmann::json relaxed_report_to_json(const RelaxedSolution& solution,
                                                    std::optional<double> exact_cost = std::nullopt);

}  // namespace slsctl
