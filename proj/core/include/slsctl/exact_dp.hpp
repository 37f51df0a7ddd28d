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
#include <cstdint>
#include <vector>

#include "slsctl/system.hpp"

namespace slsctl {

/// ρ_{i,k}(P) = Q(k) + AᵀPA − AᵀPB (R(k) + BᵀPB)⁻¹ BᵀPA, symmetrized.
/// Throws InvalidArgument on bad indices or shapes, NumericError when
/// R(k) + BᵀPB fails a Cholesky factorization.
[[nodiscard]] Matrix riccati_map(const SwitchedSystem& system, const CostSpec& spec, std::size_t mode,
                                 std::size_t step, const Matrix& P);

struct FeedbackGain {
  Matrix gain;  // n_u x n
  std::size_t mode = 0;
  std::size_t step = 0;
};

/// K_{i,k}(P) = (R(k) + BᵀPB)⁻¹ BᵀPA; the optimal input is u = −K x.
[[nodiscard]] FeedbackGain feedback_gain(const SwitchedSystem& system, const CostSpec& spec,
                                         std::size_t mode, std::size_t step, const Matrix& P);

/// Backward Riccati chain for a fixed mode sequence: P(N) = Ψ,
/// P(k) = ρ_{σ(k),k}(P(k+1)). Returns P(0)..P(N).
[[nodiscard]] std::vector<Matrix> riccati_chain(const SwitchedSystem& system, const CostSpec& spec,
                                                const ModeSequence& modes);

/// Which (mode, parent in H_{k+1}) produced a matrix of H_k.
struct Provenance {
  std::size_t mode = 0;
  std::size_t parent = 0;
};

/// Value-function sets H_0..H_N. levels[k] is H_k; levels[N] = {Ψ}.
struct RiccatiSet {
  struct Level {
    std::vector<Matrix> matrices;
    std::vector<Provenance> provenance;  // empty for H_N
  };
  std::vector<Level> levels;
  double dedupe_tol = 0.0;

  [[nodiscard]] std::size_t horizon() const { return levels.empty() ? 0 : levels.size() - 1; }
  [[nodiscard]] const Level& at(std::size_t k) const { return levels.at(k); }
};

struct ValueSetOptions {
  /// Entrywise max difference under which two matrices are merged; 0 keeps all.
  double dedupe_tol = 1e-12;
  /// Abort with CapacityExceeded when the projected |H_0| exceeds this.
  std::uint64_t capacity = std::uint64_t{1} << 22;
};

/// H_N = {Ψ}; H_k = {ρ_{i,k}(P) : P ∈ H_{k+1}, i ∈ Ω}. Candidates are
/// stored mode-major (all parents for mode 1, then mode 2, ...), so storage
/// order is the (mode, parent) lexicographic tie-break order.
[[nodiscard]] RiccatiSet build_value_sets(const SwitchedSystem& system, const CostSpec& spec,
                                          const ValueSetOptions& options = {});

struct ValueAt {
  double value = 0.0;
  std::size_t index = 0;
};

/// J*_k(x) = ½ min_{P ∈ H_k} xᵀPx with the lowest stored index on ties.
[[nodiscard]] ValueAt value_at(const RiccatiSet& sets, std::size_t step, const Vector& x);

/// Online law: at each step pick (σ, P) minimizing x(k)ᵀρ_{σ,k}(P)x(k) over
/// H_{k+1}, apply u = −K_{σ,k}(P) x(k).
[[nodiscard]] ControlSolution exact_online_control(const SwitchedSystem& system, const CostSpec& spec,
                                                   const RiccatiSet& sets, const Vector& x0);

struct BruteForceOptions {
  std::uint64_t capacity = std::uint64_t{1} << 20;
};

/// Enumerates every sequence in Ω^N, solving each fixed-mode LQR with its own
/// Riccati chain. Ties resolve to the lexicographically smallest sequence.
[[nodiscard]] ControlSolution brute_force_solve(const SwitchedSystem& system, const CostSpec& spec,
                                                const Vector& x0, const BruteForceOptions& options = {});

/// Closed-loop rollout of a fixed mode sequence with its Riccati chain.
[[nodiscard]] ControlSolution fixed_sequence_lqr(const SwitchedSystem& system, const CostSpec& spec,
                                                 const ModeSequence& modes, const Vector& x0);

/// q^e saturated at UINT64_MAX.
[[nodiscard]] std::uint64_t saturating_pow(std::uint64_t base, std::size_t exponent);

}  // namespace slsctl
