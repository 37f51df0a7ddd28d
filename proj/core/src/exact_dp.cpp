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

#include "slsctl/exact_dp.hpp"

#include <limits>
#include <map>
#include <string>

#include "slsctl/errors.hpp"

namespace slsctl {
namespace {

void check_step(const SwitchedSystem& system, const CostSpec& spec, std::size_t mode, std::size_t step,
                const Matrix& P) {
  if (mode >= system.mode_count()) {
    throw InvalidArgument("mode index " + std::to_string(mode + 1) + " is out of range");
  }
  if (step >= spec.horizon()) throw InvalidArgument("step " + std::to_string(step) + " is past the horizon");
  const auto n = static_cast<Eigen::Index>(system.state_dim());
  if (P.rows() != n || P.cols() != n) throw InvalidArgument("value matrix has wrong shape");
}

// Shared pieces of ρ and K: BᵀPA and the Cholesky factor of R + BᵀPB.
struct StepTerms {
  Matrix PA;
  Matrix BtPA;
  Eigen::LLT<Matrix> llt;
};

StepTerms step_terms(const SwitchedSystem& system, const CostSpec& spec, std::size_t mode, std::size_t step,
                     const Matrix& P) {
  const Matrix& A = system.A(mode);
  const Matrix& B = system.B(mode);
  StepTerms t;
  t.PA = P * A;
  t.BtPA = B.transpose() * t.PA;
  Matrix M = spec.R(step) + B.transpose() * P * B;
  t.llt.compute(0.5 * (M + M.transpose()));
  if (t.llt.info() != Eigen::Success) {
    throw NumericError("R(k) + B'PB is not positive definite at step " + std::to_string(step) + ", mode " +
                       std::to_string(mode + 1));
  }
  return t;
}

Matrix riccati_unchecked(const SwitchedSystem& system, const CostSpec& spec, std::size_t mode,
                         std::size_t step, const Matrix& P) {
  const StepTerms t = step_terms(system, spec, mode, step, P);
  Matrix rho = spec.Q(step) + system.A(mode).transpose() * t.PA - t.BtPA.transpose() * t.llt.solve(t.BtPA);
  return 0.5 * (rho + rho.transpose());
}

Matrix gain_unchecked(const SwitchedSystem& system, const CostSpec& spec, std::size_t mode, std::size_t step,
                      const Matrix& P) {
  const StepTerms t = step_terms(system, spec, mode, step, P);
  return t.llt.solve(t.BtPA);
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Keeps the first occurrence among matrices within `tol` of each other.
// Candidates are bucketed by their (0,0) entry so only near neighbours are
// compared.
class Deduplicator {
 public:
  explicit Deduplicator(double tol) : tol_(tol) {}

  // Returns true when `m` is new and should be kept under index `id`.
  bool insert(const Matrix& m, std::size_t id, const std::vector<Matrix>& kept) {
    const double key = m(0, 0);
    for (auto it = index_.lower_bound(key - tol_); it != index_.end() && it->first <= key + tol_; ++it) {
      if (max_abs_diff(kept[it->second], m) <= tol_) return false;
    }
    index_.emplace(key, id);
    return true;
  }

 private:
  double tol_;
  std::multimap<double, std::size_t> index_;
};

void check_x0(const SwitchedSystem& system, const Vector& x0) {
  if (static_cast<std::size_t>(x0.size()) != system.state_dim()) {
    throw InvalidArgument("initial state has dimension " + std::to_string(x0.size()) + ", expected " +
                          std::to_string(system.state_dim()));
  }
}

}  // namespace

std::uint64_t saturating_pow(std::uint64_t base, std::size_t exponent) {
  std::uint64_t result = 1;
  for (std::size_t e = 0; e < exponent; ++e) {
    if (base != 0 && result > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result *= base;
  }
  return result;
}

Matrix riccati_map(const SwitchedSystem& system, const CostSpec& spec, std::size_t mode, std::size_t step,
                   const Matrix& P) {
  check_compatible(system, spec);
  check_step(system, spec, mode, step, P);
  return riccati_unchecked(system, spec, mode, step, P);
}

FeedbackGain feedback_gain(const SwitchedSystem& system, const CostSpec& spec, std::size_t mode,
                           std::size_t step, const Matrix& P) {
  check_compatible(system, spec);
  check_step(system, spec, mode, step, P);
  return {gain_unchecked(system, spec, mode, step, P), mode, step};
}

std::vector<Matrix> riccati_chain(const SwitchedSystem& system, const CostSpec& spec,
                                  const ModeSequence& modes) {
  check_compatible(system, spec);
  const std::size_t N = spec.horizon();
  if (modes.size() != N) throw InvalidArgument("mode sequence length does not match horizon");
  std::vector<Matrix> P(N + 1);
  P[N] = spec.terminal();
  for (std::size_t k = N; k-- > 0;) {
    if (modes[k] >= system.mode_count()) throw InvalidArgument("mode index out of range");
    P[k] = riccati_unchecked(system, spec, modes[k], k, P[k + 1]);
  }
  return P;
}

RiccatiSet build_value_sets(const SwitchedSystem& system, const CostSpec& spec,
                            const ValueSetOptions& options) {
  check_compatible(system, spec);
  if (!(options.dedupe_tol >= 0.0)) throw InvalidArgument("dedupe tolerance must be nonnegative");
  const std::size_t N = spec.horizon();
  const std::size_t q = system.mode_count();

  RiccatiSet sets;
  sets.dedupe_tol = options.dedupe_tol;
  sets.levels.resize(N + 1);
  sets.levels[N].matrices.push_back(spec.terminal());

  for (std::size_t k = N; k-- > 0;) {
    const auto& parents = sets.levels[k + 1].matrices;
    const std::uint64_t projected = saturating_pow(q, k + 1);
    const std::uint64_t bound = projected > std::numeric_limits<std::uint64_t>::max() / parents.size()
                                    ? std::numeric_limits<std::uint64_t>::max()
                                    : projected * parents.size();
    if (bound > options.capacity) {
      throw CapacityExceeded("projected |H_0| = " + std::to_string(bound) + " exceeds capacity " +
                             std::to_string(options.capacity));
    }
    auto& level = sets.levels[k];
    level.matrices.reserve(parents.size() * q);
    level.provenance.reserve(parents.size() * q);
    Deduplicator dedupe(options.dedupe_tol);
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t p = 0; p < parents.size(); ++p) {
        Matrix rho = riccati_unchecked(system, spec, i, k, parents[p]);
        if (options.dedupe_tol > 0.0 && !dedupe.insert(rho, level.matrices.size(), level.matrices)) continue;
        level.matrices.push_back(std::move(rho));
        level.provenance.push_back({i, p});
      }
    }
  }
  return sets;
}

ValueAt value_at(const RiccatiSet& sets, std::size_t step, const Vector& x) {
  if (step > sets.horizon()) throw InvalidArgument("step is past the horizon");
  const auto& matrices = sets.at(step).matrices;
  ValueAt best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 0; j < matrices.size(); ++j) {
    const double v = x.dot(matrices[j] * x);
    if (v < best.value) best = {v, j};
  }
  best.value *= 0.5;
  return best;
}

ControlSolution exact_online_control(const SwitchedSystem& system, const CostSpec& spec,
                                     const RiccatiSet& sets, const Vector& x0) {
  check_compatible(system, spec);
  check_x0(system, x0);
  const std::size_t N = spec.horizon();
  if (sets.horizon() != N) throw InvalidArgument("value sets were built for a different horizon");

  Trajectory traj;
  traj.states.push_back(x0);
  for (std::size_t k = 0; k < N; ++k) {
    const Vector& x = traj.states.back();
    const ValueAt pick = value_at(sets, k, x);
    const Provenance& origin = sets.at(k).provenance.at(pick.index);
    const Matrix& P = sets.at(k + 1).matrices.at(origin.parent);
    const Vector u = -gain_unchecked(system, spec, origin.mode, k, P) * x;
    traj.states.push_back(system.A(origin.mode) * x + system.B(origin.mode) * u);
    traj.inputs.push_back(u);
    traj.modes.push_back(origin.mode);
  }
  ControlSolution sol;
  sol.cost = evaluate_cost(spec, traj);
  sol.trajectory = std::move(traj);
  sol.solver = SolverTag::kExactDp;
  return sol;
}

ControlSolution fixed_sequence_lqr(const SwitchedSystem& system, const CostSpec& spec,
                                   const ModeSequence& modes, const Vector& x0) {
  check_x0(system, x0);
  const std::vector<Matrix> P = riccati_chain(system, spec, modes);
  Trajectory traj;
  traj.states.push_back(x0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const Vector& x = traj.states.back();
    const Vector u = -gain_unchecked(system, spec, modes[k], k, P[k + 1]) * x;
    traj.states.push_back(system.A(modes[k]) * x + system.B(modes[k]) * u);
    traj.inputs.push_back(u);
  }
  traj.modes = modes;
  ControlSolution sol;
  sol.cost = evaluate_cost(spec, traj);
  sol.trajectory = std::move(traj);
  return sol;
}

ControlSolution brute_force_solve(const SwitchedSystem& system, const CostSpec& spec, const Vector& x0,
                                  const BruteForceOptions& options) {
  check_compatible(system, spec);
  check_x0(system, x0);
  const std::size_t N = spec.horizon();
  const std::size_t q = system.mode_count();
  const std::uint64_t total = saturating_pow(q, N);
  if (total > options.capacity) {
    throw CapacityExceeded("brute force over " + std::to_string(total) + " sequences exceeds capacity " +
                           std::to_string(options.capacity));
  }

  // Counter over Ω^N with σ(0) most significant: lexicographic order.
  ModeSequence seq(N, 0);
  ModeSequence best_seq = seq;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t count = 0; count < total; ++count) {
    const std::vector<Matrix> P = riccati_chain(system, spec, seq);
    const double value = 0.5 * x0.dot(P[0] * x0);
    if (value < best) {
      best = value;
      best_seq = seq;
    }
    for (std::size_t pos = N; pos-- > 0;) {
      if (++seq[pos] < q) break;
      seq[pos] = 0;
    }
  }
  ControlSolution sol = fixed_sequence_lqr(system, spec, best_seq, x0);
  sol.solver = SolverTag::kBruteForce;
  return sol;
}

}  // namespace slsctl
