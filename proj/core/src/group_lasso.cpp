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

#include "slsctl/group_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "slsctl/errors.hpp"

namespace slsctl {
namespace {

constexpr int kAdaptInterval = 50;
constexpr double kAdaptThreshold = 5.0;
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kRelaxation = 1.6;
constexpr int kPolishIters = 30;

double weighted_objective(const GroupLassoQP& p, std::span<const double> w, const Vector& z) {
  double value = 0.5 * z.dot(p.H * z) + p.c.dot(z);
  for (std::size_t g = 0; g < p.groups.size(); ++g) value += w[g] * (p.groups[g].E * z + p.groups[g].e).norm();
  return value;
}

// Groups flagged in `zero` become equality constraints E_g z + e_g = 0; the
// others are smooth near the solution, so damped Newton on the reduced
// problem converges fast. Returns nothing when an active group collapses.
std::optional<Vector> polish(const GroupLassoQP& p, std::span<const double> w, const Vector& start,
                             const std::vector<bool>& zero) {
  const auto d = static_cast<Eigen::Index>(p.dim());
  Eigen::Index mc = 0;
  for (std::size_t g = 0; g < p.groups.size(); ++g) mc += zero[g] ? p.groups[g].E.rows() : 0;
  Matrix C(mc, d);
  Vector ec(mc);
  for (std::size_t g = 0, off = 0; g < p.groups.size(); ++g) {
    if (!zero[g]) continue;
    const auto rows = p.groups[g].E.rows();
    C.middleRows(static_cast<Eigen::Index>(off), rows) = p.groups[g].E;
    ec.segment(static_cast<Eigen::Index>(off), rows) = p.groups[g].e;
    off += static_cast<std::size_t>(rows);
  }
  Vector z = start;
  if (mc > 0) z -= C.completeOrthogonalDecomposition().solve(C * z + ec);

  Matrix K = Matrix::Zero(d + mc, d + mc);
  Vector rhs = Vector::Zero(d + mc);
  for (int it = 0; it < kPolishIters; ++it) {
    Vector grad = p.H * z + p.c;
    Matrix hess = p.H;
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
      if (zero[g]) continue;
      const auto& grp = p.groups[g];
      const Vector v = grp.E * z + grp.e;
      const double nv = v.norm();
      if (nv < 1e-14) return std::nullopt;
      grad += (w[g] / nv) * (grp.E.transpose() * v);
      const Matrix curv = (Matrix::Identity(v.size(), v.size()) - v * v.transpose() / (nv * nv)) / nv;
      hess += w[g] * grp.E.transpose() * curv * grp.E;
    }
    K.topLeftCorner(d, d) = hess;
    if (mc > 0) {
      K.topRightCorner(d, mc) = C.transpose();
      K.bottomLeftCorner(mc, d) = C;
    }
    rhs.head(d) = -grad;
    const Vector dz = K.completeOrthogonalDecomposition().solve(rhs).head(d);
    if (!dz.allFinite()) return std::nullopt;
    if (dz.norm() <= 1e-15 * (1.0 + z.norm())) break;
    const double f0 = weighted_objective(p, w, z);
    double t = 1.0;
    while (t > 1e-10 && weighted_objective(p, w, z + t * dz) > f0) t *= 0.5;
    if (t <= 1e-10) break;
    z += t * dz;
  }
  return z;
}

}  // namespace

Vector block_soft_threshold(const Vector& v, double kappa) {
  const double norm = v.norm();
  if (norm <= kappa || norm == 0.0) return Vector::Zero(v.size());
  return (1.0 - kappa / norm) * v;
}

double objective(const GroupLassoQP& problem, const Vector& z) {
  double value = 0.5 * z.dot(problem.H * z) + problem.c.dot(z);
  for (const auto& g : problem.groups) value += g.weight * (g.E * z + g.e).norm();
  return value;
}

void validate(const GroupLassoQP& problem) {
  const auto d = problem.c.size();
  if (problem.H.rows() != d || problem.H.cols() != d) throw InvalidArgument("H must be d x d with d = size(c)");
  if (!problem.H.allFinite() || !problem.c.allFinite()) throw InvalidArgument("H and c must be finite");
  const double scale = std::max(1.0, problem.H.cwiseAbs().maxCoeff());
  if ((problem.H - problem.H.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw InvalidArgument("H is not symmetric");
  }
  if (d > 0 && min_symmetric_eigenvalue(problem.H) < -1e-10 * scale) {
    throw InvalidArgument("H is not positive semidefinite");
  }
  for (std::size_t i = 0; i < problem.groups.size(); ++i) {
    const auto& g = problem.groups[i];
    if (g.E.cols() != d || g.E.rows() != g.e.size() || g.e.size() == 0) {
      throw InvalidArgument("group " + std::to_string(i) + " has inconsistent shape");
    }
    if (!(g.weight > 0.0) || !std::isfinite(g.weight)) {
      throw InvalidArgument("group " + std::to_string(i) + " weight must be positive");
    }
  }
}

AdmmSolver::AdmmSolver(GroupLassoQP problem, AdmmSettings settings)
    : problem_(std::move(problem)), settings_(settings) {
  validate(problem_);
  if (!(settings_.rho > 0.0)) throw InvalidArgument("ADMM penalty rho must be positive");
  if (settings_.max_iters < 1) throw InvalidArgument("ADMM max_iters must be at least 1");
  const auto d = static_cast<Eigen::Index>(problem_.dim());
  Eigen::Index rows = 0;
  for (const auto& g : problem_.groups) {
    offsets_.push_back(rows);
    rows += g.E.rows();
  }
  E_.resize(rows, d);
  e_.resize(rows);
  for (std::size_t i = 0; i < problem_.groups.size(); ++i) {
    const auto& g = problem_.groups[i];
    E_.middleRows(offsets_[i], g.E.rows()) = g.E;
    e_.segment(offsets_[i], g.e.size()) = g.e;
  }
  zstep_.compute(problem_.H + settings_.rho * E_.transpose() * E_);
  if (zstep_.info() != Eigen::Success) {
    throw InvalidArgument("H + rho E'E is not positive definite; the problem may be unbounded");
  }
}

GroupLassoSolution AdmmSolver::solve() const {
  std::vector<double> weights;
  weights.reserve(problem_.groups.size());
  for (const auto& g : problem_.groups) weights.push_back(g.weight);
  return solve(weights);
}

GroupLassoSolution AdmmSolver::solve(std::span<const double> weights) const {
  if (weights.size() != problem_.groups.size()) throw InvalidArgument("one weight per group is required");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("group weights must be positive");
  }
  double rho = settings_.rho;
  Eigen::LLT<Matrix> adapted;
  const Eigen::LLT<Matrix>* factor = &zstep_;
  const auto d = static_cast<Eigen::Index>(problem_.dim());
  const Eigen::Index m = E_.rows();
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  Vector z = Vector::Zero(d);
  Vector y = Vector::Zero(m);
  Vector u = Vector::Zero(m);  // scaled dual
  Vector Ez(m), y_prev(m), r(m), v(m);

  GroupLassoSolution best{z, {}};
  Vector best_y = y;
  double best_score = std::numeric_limits<double>::infinity();

  SolverReport report;
  for (int it = 1; it <= settings_.max_iters; ++it) {
    z = factor->solve(-problem_.c + rho * E_.transpose() * (y - e_ - u));
    Ez.noalias() = E_ * z;
    y_prev = y;
    v = kRelaxation * (Ez + e_) + (1.0 - kRelaxation) * y_prev;
    for (std::size_t g = 0; g < offsets_.size(); ++g) {
      const Eigen::Index off = offsets_[g];
      const Eigen::Index len = problem_.groups[g].e.size();
      y.segment(off, len) = block_soft_threshold(v.segment(off, len) + u.segment(off, len), weights[g] / rho);
    }
    u += v - y;
    r = Ez + e_ - y;

    report.iterations = it;
    report.primal_residual = r.norm();
    report.dual_residual = rho * (E_.transpose() * (y - y_prev)).norm();
    // Scaled by the two sides of Ez + e = y; Ez and e alone can be large and
    // nearly cancel.
    const double eps_pri = sqrt_m * settings_.abs_tol + settings_.rel_tol * std::max((Ez + e_).norm(), y.norm());
    const double eps_dual = sqrt_d * settings_.abs_tol + settings_.rel_tol * rho * (E_.transpose() * u).norm();
    const double score = std::max(report.primal_residual / eps_pri, report.dual_residual / eps_dual);
    if (score < best_score) {
      best_score = score;
      best.z = z;
      best.report = report;
      best_y = y;
    }
    if (report.primal_residual <= eps_pri && report.dual_residual <= eps_dual) {
      report.converged = true;
      best.z = z;
      best.report = report;
      best_y = y;
      break;
    }
    if (settings_.adaptive_rho && it % kAdaptInterval == 0) {
      const double ratio = std::sqrt((report.primal_residual / eps_pri) / std::max(report.dual_residual / eps_dual, 1e-300));
      if (ratio > kAdaptThreshold || ratio < 1.0 / kAdaptThreshold) {
        const double next = std::clamp(rho * std::clamp(ratio, 1e-2, 1e2), kRhoMin, kRhoMax);
        if (next != rho) {
          u *= rho / next;
          rho = next;
          adapted.compute(problem_.H + rho * E_.transpose() * E_);
          if (adapted.info() != Eigen::Success) throw NumericError("z-step factorization failed");
          factor = &adapted;
        }
      }
    }
  }
  if (!report.converged) best.report.iterations = report.iterations;

  best.report.objective = weighted_objective(problem_, weights, best.z);
  if (settings_.polish && !offsets_.empty()) {
    std::vector<bool> zero(offsets_.size());
    for (std::size_t g = 0; g < offsets_.size(); ++g) {
      zero[g] = best_y.segment(offsets_[g], problem_.groups[g].e.size()).squaredNorm() == 0.0;
    }
    if (const auto refined = polish(problem_, weights, best.z, zero)) {
      GroupLassoQP weighted = problem_;
      for (std::size_t g = 0; g < weights.size(); ++g) weighted.groups[g].weight = weights[g];
      const double value = weighted_objective(problem_, weights, *refined);
      const double before = subgradient_residual(weighted, best.z, 1e-6 * (1.0 + best.z.norm())).residual;
      const double after = subgradient_residual(weighted, *refined, 1e-12 * (1.0 + refined->norm())).residual;
      if (value <= best.report.objective + 1e-12 * (1.0 + std::abs(best.report.objective)) && after <= before) {
        best.z = *refined;
        best.report.objective = value;
        best.report.polished = true;
      }
    }
  }
  return best;
}

GroupLassoSolution solve(const GroupLassoQP& problem, const AdmmSettings& settings) {
  return AdmmSolver(problem, settings).solve();
}

SubgradientCertificate subgradient_residual(const GroupLassoQP& problem, const Vector& z, double zero_tol) {
  validate(problem);
  Vector grad = problem.H * z + problem.c;
  std::vector<std::size_t> zero;
  Eigen::Index zero_rows = 0;
  for (std::size_t g = 0; g < problem.groups.size(); ++g) {
    const auto& grp = problem.groups[g];
    const Vector v = grp.E * z + grp.e;
    const double norm = v.norm();
    if (norm > zero_tol) {
      grad += grp.weight / norm * (grp.E.transpose() * v);
    } else {
      zero.push_back(g);
      zero_rows += grp.E.rows();
    }
  }
  SubgradientCertificate cert;
  cert.zero_groups = zero.size();
  if (!zero.empty()) {
    Matrix Et(z.size(), zero_rows);
    Eigen::Index off = 0;
    for (auto g : zero) {
      const auto& E = problem.groups[g].E;
      Et.middleCols(off, E.rows()) = E.transpose();
      off += E.rows();
    }
    Vector s = Et.completeOrthogonalDecomposition().solve(-grad);
    off = 0;
    for (auto g : zero) {
      const auto len = problem.groups[g].E.rows();
      auto block = s.segment(off, len);
      const double norm = block.norm();
      const double radius = problem.groups[g].weight;
      if (norm > radius) block *= radius / norm;
      off += len;
    }
    grad += Et * s;
  }
  cert.residual = grad.norm();
  return cert;
}

}  // namespace slsctl
