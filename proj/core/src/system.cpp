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

#include "slsctl/system.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slsctl/errors.hpp"

namespace slsctl {
namespace {

constexpr double kAsymmetryTol = 1e-8;
constexpr double kQMinEig = -1e-10;
constexpr double kRMinEig = 1e-12;

Matrix symmetrized(const Matrix& m, const char* what, std::size_t k) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument(std::string(what) + "(" + std::to_string(k) + ") is not square");
  }
  if (!m.allFinite()) {
    throw InvalidArgument(std::string(what) + "(" + std::to_string(k) + ") has non-finite entries");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kAsymmetryTol) {
    throw InvalidArgument(std::string(what) + "(" + std::to_string(k) + ") is not symmetric");
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

SwitchedSystem::SwitchedSystem(std::vector<Mode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw InvalidArgument("switched system needs at least one mode");
  n_ = static_cast<std::size_t>(modes_.front().A.rows());
  nu_ = static_cast<std::size_t>(modes_.front().B.cols());
  if (n_ == 0 || nu_ == 0) throw InvalidArgument("state and input dimensions must be positive");
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& [A, B] = modes_[i];
    const auto label = "mode " + std::to_string(i + 1);
    if (static_cast<std::size_t>(A.rows()) != n_ || static_cast<std::size_t>(A.cols()) != n_) {
      throw InvalidArgument(label + ": A must be " + std::to_string(n_) + "x" + std::to_string(n_));
    }
    if (static_cast<std::size_t>(B.rows()) != n_ || static_cast<std::size_t>(B.cols()) != nu_) {
      throw InvalidArgument(label + ": B must be " + std::to_string(n_) + "x" + std::to_string(nu_));
    }
    if (!A.allFinite() || !B.allFinite()) throw InvalidArgument(label + ": non-finite entries");
  }
}

CostSpec::CostSpec(std::vector<Matrix> Q, std::vector<Matrix> R) {
  if (R.empty()) throw InvalidArgument("horizon must be at least 1");
  if (Q.size() != R.size() + 1) {
    throw InvalidArgument("expected N+1 = " + std::to_string(R.size() + 1) + " state weights, got " +
                          std::to_string(Q.size()));
  }
  Q_.reserve(Q.size());
  R_.reserve(R.size());
  for (std::size_t k = 0; k < Q.size(); ++k) {
    Matrix s = symmetrized(Q[k], "Q", k);
    if (s.rows() != Q.front().rows()) throw InvalidArgument("state weights differ in size");
    if (s.size() > 0 && min_symmetric_eigenvalue(s) < kQMinEig) {
      throw InvalidArgument("Q(" + std::to_string(k) + ") is not positive semidefinite");
    }
    Q_.push_back(std::move(s));
  }
  for (std::size_t k = 0; k < R.size(); ++k) {
    Matrix s = symmetrized(R[k], "R", k);
    if (s.rows() != R.front().rows()) throw InvalidArgument("input weights differ in size");
    if (s.size() == 0 || min_symmetric_eigenvalue(s) <= kRMinEig) {
      throw InvalidArgument("R(" + std::to_string(k) + ") is not positive definite");
    }
    R_.push_back(std::move(s));
  }
  if (Q_.front().rows() == 0) throw InvalidArgument("state weights are empty");
}

CostSpec CostSpec::constant(std::size_t horizon, const Matrix& Q, const Matrix& R,
                            const Matrix& terminal) {
  std::vector<Matrix> qs(horizon, Q);
  qs.push_back(terminal);
  return CostSpec(std::move(qs), std::vector<Matrix>(horizon, R));
}

void check_compatible(const SwitchedSystem& system, const CostSpec& spec) {
  if (spec.state_dim() != system.state_dim()) {
    throw InvalidArgument("cost weights are " + std::to_string(spec.state_dim()) +
                          "-dimensional, system state is " + std::to_string(system.state_dim()));
  }
  if (spec.input_dim() != system.input_dim()) {
    throw InvalidArgument("input weights are " + std::to_string(spec.input_dim()) +
                          "-dimensional, system input is " + std::to_string(system.input_dim()));
  }
}

std::string_view to_string(SolverTag tag) {
  switch (tag) {
    case SolverTag::kExactDp: return "exact-dp";
    case SolverTag::kBruteForce: return "brute-force";
    case SolverTag::kRelaxed: return "relaxed";
  }
  return "unknown";
}

Trajectory simulate(const SwitchedSystem& system, const Vector& x0, const std::vector<Vector>& inputs,
                    const ModeSequence& modes) {
  if (inputs.empty()) throw InvalidArgument("simulate: horizon must be at least 1");
  if (inputs.size() != modes.size()) {
    throw InvalidArgument("simulate: " + std::to_string(inputs.size()) + " inputs but " +
                          std::to_string(modes.size()) + " modes");
  }
  if (static_cast<std::size_t>(x0.size()) != system.state_dim()) {
    throw InvalidArgument("simulate: initial state has wrong dimension");
  }
  Trajectory traj;
  traj.states.reserve(inputs.size() + 1);
  traj.states.push_back(x0);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (modes[k] >= system.mode_count()) {
      throw InvalidArgument("simulate: mode index " + std::to_string(modes[k] + 1) + " at step " +
                            std::to_string(k) + " is out of range");
    }
    if (static_cast<std::size_t>(inputs[k].size()) != system.input_dim()) {
      throw InvalidArgument("simulate: input " + std::to_string(k) + " has wrong dimension");
    }
    traj.states.push_back(system.A(modes[k]) * traj.states.back() + system.B(modes[k]) * inputs[k]);
  }
  traj.inputs = inputs;
  traj.modes = modes;
  return traj;
}

double evaluate_cost(const CostSpec& spec, const Trajectory& trajectory) {
  const std::size_t N = spec.horizon();
  if (trajectory.inputs.size() != N || trajectory.states.size() != N + 1) {
    throw InvalidArgument("evaluate_cost: trajectory length does not match horizon " + std::to_string(N));
  }
  double running = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const Vector& x = trajectory.states[k];
    const Vector& u = trajectory.inputs[k];
    if (static_cast<std::size_t>(x.size()) != spec.state_dim() ||
        static_cast<std::size_t>(u.size()) != spec.input_dim()) {
      throw InvalidArgument("evaluate_cost: dimension mismatch at step " + std::to_string(k));
    }
    running += x.dot(spec.Q(k) * x) + u.dot(spec.R(k) * u);
  }
  const Vector& xN = trajectory.states.back();
  if (static_cast<std::size_t>(xN.size()) != spec.state_dim()) {
    throw InvalidArgument("evaluate_cost: dimension mismatch at final state");
  }
  return 0.5 * (xN.dot(spec.terminal() * xN) + running);
}

double max_dynamics_error(const SwitchedSystem& system, const Trajectory& trajectory) {
  const std::size_t N = trajectory.inputs.size();
  if (trajectory.states.size() != N + 1 || trajectory.modes.size() != N) {
    throw InvalidArgument("trajectory lengths are inconsistent");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t m = trajectory.modes[k];
    if (m >= system.mode_count()) throw InvalidArgument("trajectory mode index out of range");
    const Vector predicted = system.A(m) * trajectory.states[k] + system.B(m) * trajectory.inputs[k];
    if (predicted.size() != trajectory.states[k + 1].size()) {
      throw InvalidArgument("trajectory state dimension mismatch");
    }
    worst = std::max(worst, (predicted - trajectory.states[k + 1]).cwiseAbs().maxCoeff());
  }
  return worst;
}

bool is_dynamics_consistent(const SwitchedSystem& system, const Trajectory& trajectory, double tol) {
  try {
    return max_dynamics_error(system, trajectory) <= tol;
  } catch (const InvalidArgument&) {
    return false;
  }
}

double min_symmetric_eigenvalue(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace slsctl
