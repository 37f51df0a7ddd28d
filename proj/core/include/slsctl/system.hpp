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

#include <Eigen/Dense>
#include <cstddef>
#include <string_view>
#include <vector>

namespace slsctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Mode indices are 0-based in code; file formats and reports use 1-based.
using ModeSequence = std::vector<std::size_t>;

/// Discrete-time switched linear system x(k+1) = A_s x(k) + B_s u(k).
class SwitchedSystem {
 public:
  struct Mode {
    Matrix A;
    Matrix B;
  };

  /// Throws InvalidArgument on empty mode list, inconsistent shapes or
  /// non-finite entries.
  explicit SwitchedSystem(std::vector<Mode> modes);

  [[nodiscard]] std::size_t state_dim() const { return n_; }
  [[nodiscard]] std::size_t input_dim() const { return nu_; }
  [[nodiscard]] std::size_t mode_count() const { return modes_.size(); }

  [[nodiscard]] const Matrix& A(std::size_t mode) const { return modes_.at(mode).A; }
  [[nodiscard]] const Matrix& B(std::size_t mode) const { return modes_.at(mode).B; }
  [[nodiscard]] const std::vector<Mode>& modes() const { return modes_; }

 private:
  std::vector<Mode> modes_;
  std::size_t n_ = 0;
  std::size_t nu_ = 0;
};

/// Finite-horizon quadratic weights. Q holds N+1 matrices with Q(N) the
/// terminal weight; R holds N matrices.
class CostSpec {
 public:
  /// Symmetrizes Q and R. Rejects asymmetry beyond 1e-8, Q with minimum
  /// eigenvalue below -1e-10 and R with minimum eigenvalue not above 1e-12.
  CostSpec(std::vector<Matrix> Q, std::vector<Matrix> R);

  /// Same weights at every step; `terminal` becomes Q(N).
  static CostSpec constant(std::size_t horizon, const Matrix& Q, const Matrix& R,
                           const Matrix& terminal);

  [[nodiscard]] std::size_t horizon() const { return R_.size(); }
  [[nodiscard]] std::size_t state_dim() const { return static_cast<std::size_t>(Q_.front().rows()); }
  [[nodiscard]] std::size_t input_dim() const { return static_cast<std::size_t>(R_.front().rows()); }
  [[nodiscard]] const Matrix& Q(std::size_t k) const { return Q_.at(k); }
  [[nodiscard]] const Matrix& R(std::size_t k) const { return R_.at(k); }
  [[nodiscard]] const Matrix& terminal() const { return Q_.back(); }

 private:
  std::vector<Matrix> Q_;
  std::vector<Matrix> R_;
};

/// Throws InvalidArgument unless system and spec agree on n and n_u.
void check_compatible(const SwitchedSystem& system, const CostSpec& spec);

struct Trajectory {
  std::vector<Vector> states;  // x(0)..x(N)
  std::vector<Vector> inputs;  // u(0)..u(N-1)
  ModeSequence modes;          // sigma(0)..sigma(N-1)

  [[nodiscard]] std::size_t horizon() const { return inputs.size(); }
};

enum class SolverTag { kExactDp, kBruteForce, kRelaxed };

[[nodiscard]] std::string_view to_string(SolverTag tag);

struct ControlSolution {
  Trajectory trajectory;
  double cost = 0.0;
  SolverTag solver = SolverTag::kExactDp;
};

/// Rolls the dynamics forward from x0. Throws InvalidArgument on length or
/// dimension mismatch and on out-of-range mode indices.
[[nodiscard]] Trajectory simulate(const SwitchedSystem& system, const Vector& x0,
                                  const std::vector<Vector>& inputs, const ModeSequence& modes);

/// J = ½ x(N)ᵀΨx(N) + ½ Σ [x(k)ᵀQ(k)x(k) + u(k)ᵀR(k)u(k)].
[[nodiscard]] double evaluate_cost(const CostSpec& spec, const Trajectory& trajectory);

/// Largest entrywise violation of x(k+1) = A x(k) + B u(k) along the trajectory.
[[nodiscard]] double max_dynamics_error(const SwitchedSystem& system, const Trajectory& trajectory);

/// True when lengths are consistent and max_dynamics_error <= tol.
[[nodiscard]] bool is_dynamics_consistent(const SwitchedSystem& system, const Trajectory& trajectory,
                                          double tol = 1e-10);

/// Smallest eigenvalue of the symmetric part of a square matrix.
[[nodiscard]] double min_symmetric_eigenvalue(const Matrix& m);

}  // namespace slsctl
