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

#include "slsctl/relaxed.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "slsctl/errors.hpp"
#include "slsctl/exact_dp.hpp"
#include "slsctl/problem_io.hpp"

namespace slsctl {
namespace {

using nlohmann::json;

constexpr double kProjectionTieTol = 1e-9;

template <typename T>
T number(const json& doc, const char* key, T fallback) {
  const auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number()) throw InvalidArgument(std::string("settings: \"") + key + "\" must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) throw InvalidArgument(std::string("settings: \"") + key + "\" must be an integer");
  }
  return it->get<T>();
}

void check_settings(const RelaxedSettings& s) {
  if (!(s.gamma1 > 0.0) || !(s.gamma2 > 0.0)) throw InvalidArgument("gamma1 and gamma2 must be positive");
  if (s.reweights < 1) throw InvalidArgument("reweights must be at least 1");
  if (!(s.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(s.solver.rho > 0.0)) throw InvalidArgument("solver.rho must be positive");
  if (!(s.solver.abs_tol >= 0.0) || !(s.solver.rel_tol >= 0.0)) throw InvalidArgument("solver tolerances must be nonnegative");
  if (s.solver.max_iters < 1) throw InvalidArgument("solver.max_iters must be at least 1");
}

// First strict minimum, so ties go to the lowest mode.
std::size_t online_mode(const SwitchedSystem& system, const CostSpec& spec, std::size_t k, const Matrix& P,
                        const Vector& x) {
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < system.mode_count(); ++i) {
    const double v = x.dot(riccati_map(system, spec, i, k, P) * x);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

}  // namespace

RelaxedSettings relaxed_settings_from_json(const json& doc) {
  reject_unknown_keys(doc, {"gamma1", "gamma2", "reweights", "epsilon", "solver"}, "settings");
  RelaxedSettings s;
  s.gamma1 = number(doc, "gamma1", s.gamma1);
  s.gamma2 = number(doc, "gamma2", s.gamma2);
  s.reweights = number(doc, "reweights", s.reweights);
  s.epsilon = number(doc, "epsilon", s.epsilon);
  if (const auto it = doc.find("solver"); it != doc.end()) {
    reject_unknown_keys(*it, {"rho", "abs_tol", "rel_tol", "max_iters", "adaptive_rho", "polish"}, "settings.solver");
    s.solver.rho = number(*it, "rho", s.solver.rho);
    s.solver.abs_tol = number(*it, "abs_tol", s.solver.abs_tol);
    s.solver.rel_tol = number(*it, "rel_tol", s.solver.rel_tol);
    s.solver.max_iters = number(*it, "max_iters", s.solver.max_iters);
    for (const auto& [key, target] : {std::pair{"adaptive_rho", &s.solver.adaptive_rho},
                                      std::pair{"polish", &s.solver.polish}}) {
      if (const auto flag = it->find(key); flag != it->end()) {
        if (!flag->is_boolean()) throw InvalidArgument(std::string("settings.solver.") + key + " must be a boolean");
        *target = flag->get<bool>();
      }
    }
  }
  check_settings(s);
  return s;
}

json to_json(const RelaxedSettings& s) {
  return {{"gamma1", s.gamma1},
          {"gamma2", s.gamma2},
          {"reweights", s.reweights},
          {"epsilon", s.epsilon},
          {"solver",
           {{"rho", s.solver.rho},
            {"abs_tol", s.solver.abs_tol},
            {"rel_tol", s.solver.rel_tol},
            {"max_iters", s.solver.max_iters},
            {"adaptive_rho", s.solver.adaptive_rho},
            {"polish", s.solver.polish}}}};
}

std::vector<std::vector<double>> unit_weights(std::size_t horizon, std::size_t modes) {
  return std::vector<std::vector<double>>(horizon, std::vector<double>(modes, 1.0));
}

Vector CondensedProgram::input(const Vector& z, std::size_t k) const {
  return z.segment(static_cast<Eigen::Index>(k * (nu + n)), static_cast<Eigen::Index>(nu));
}

Vector CondensedProgram::disturbance(const Vector& z, std::size_t k) const {
  return z.segment(static_cast<Eigen::Index>(k * (nu + n) + nu), static_cast<Eigen::Index>(n));
}

Vector CondensedProgram::state(const Vector& z, std::size_t k) const {
  return state_map.at(k) * z + state_offset.at(k);
}

Vector CondensedProgram::block(const Vector& z, std::size_t mode, std::size_t k) const {
  const auto& g = qp.groups.at(group_index(mode, k));
  return g.E * z + g.e;
}

double CondensedProgram::total_objective(const Vector& z) const { return objective(qp, z) + constant; }

AuxiliarySequence CondensedProgram::auxiliary(const Vector& z) const {
  AuxiliarySequence aux;
  aux.blocks.resize(N);
  aux.weights.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t i = 0; i < q; ++i) {
      aux.blocks[k].push_back(block(z, i, k));
      aux.weights[k].push_back(qp.groups[group_index(i, k)].weight / gamma2);
    }
  }
  return aux;
}

CondensedProgram build_condensed_program(const SwitchedSystem& system, const CostSpec& spec, const Vector& x0,
                                         const std::vector<std::vector<double>>& weights, double gamma1,
                                         double gamma2) {
  check_compatible(system, spec);
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw InvalidArgument("gamma1 and gamma2 must be positive");
  if (static_cast<std::size_t>(x0.size()) != system.state_dim()) throw InvalidArgument("x0 has wrong dimension");

  CondensedProgram p;
  p.n = system.state_dim();
  p.nu = system.input_dim();
  p.q = system.mode_count();
  p.N = spec.horizon();
  p.gamma1 = gamma1;
  p.gamma2 = gamma2;
  if (weights.size() != p.N) throw InvalidArgument("weights must cover every step");
  for (const auto& row : weights) {
    if (row.size() != p.q) throw InvalidArgument("weights must cover every mode");
    for (double w : row) {
      if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be positive and finite");
    }
  }

  const auto n = static_cast<Eigen::Index>(p.n);
  const auto nu = static_cast<Eigen::Index>(p.nu);
  const auto d = static_cast<Eigen::Index>(p.dim());
  const Matrix& A1 = system.A(0);
  const Matrix& B1 = system.B(0);

  p.Abar.resize(static_cast<Eigen::Index>(p.q) * n, n);
  p.Bbar.resize(static_cast<Eigen::Index>(p.q) * n, nu);
  p.L.resize(static_cast<Eigen::Index>(p.q) * n, n);
  for (std::size_t i = 0; i < p.q; ++i) {
    const auto row = static_cast<Eigen::Index>(i) * n;
    p.Abar.middleRows(row, n) = system.A(i);
    p.Bbar.middleRows(row, n) = system.B(i);
    p.L.middleRows(row, n).setIdentity();
  }
  for (std::size_t k = 0; k <= p.N; ++k) p.Q.push_back(spec.Q(k));
  for (std::size_t k = 0; k < p.N; ++k) p.R.push_back(spec.R(k));

  // Forward substitution of x(k+1) = A_1 x(k) + B_1 u(k) + g(k).
  p.state_map.assign(p.N + 1, Matrix::Zero(n, d));
  p.state_offset.assign(p.N + 1, Vector::Zero(n));
  p.state_offset[0] = x0;
  for (std::size_t k = 0; k < p.N; ++k) {
    const auto col = static_cast<Eigen::Index>(k) * (nu + n);
    p.state_map[k + 1] = A1 * p.state_map[k];
    p.state_map[k + 1].middleCols(col, nu) += B1;
    p.state_map[k + 1].middleCols(col + nu, n) += Matrix::Identity(n, n);
    p.state_offset[k + 1] = A1 * p.state_offset[k];
  }

  Matrix H = Matrix::Zero(d, d);
  Vector c = Vector::Zero(d);
  double constant = 0.0;
  for (std::size_t k = 0; k <= p.N; ++k) {
    const Matrix QX = p.Q[k] * p.state_map[k];
    H += p.state_map[k].transpose() * QX;
    c += QX.transpose() * p.state_offset[k];
    constant += 0.5 * p.state_offset[k].dot(p.Q[k] * p.state_offset[k]);
    if (k < p.N) {
      const auto col = static_cast<Eigen::Index>(k) * (nu + n);
      H.block(col, col, nu, nu) += p.R[k];
    }
  }
  p.qp.H = gamma1 * 0.5 * (H + H.transpose());
  p.qp.c = gamma1 * c;
  p.constant = gamma1 * constant;

  p.qp.groups.reserve(p.N * p.q);
  for (std::size_t k = 0; k < p.N; ++k) {
    const auto col = static_cast<Eigen::Index>(k) * (nu + n);
    for (std::size_t i = 0; i < p.q; ++i) {
      const Matrix dA = A1 - system.A(i);
      const Matrix dB = B1 - system.B(i);
      GroupLassoQP::Group g;
      g.E = dA * p.state_map[k];
      g.E.middleCols(col, nu) += dB;
      g.E.middleCols(col + nu, n) += Matrix::Identity(n, n);
      g.e = dA * p.state_offset[k];
      g.weight = gamma2 * weights[k][i];
      p.qp.groups.push_back(std::move(g));
    }
  }
  return p;
}

StageAbResult solve_stage_ab(const SwitchedSystem& system, const CostSpec& spec, const Vector& x0,
                             const RelaxedSettings& settings) {
  check_settings(settings);
  const std::size_t N = spec.horizon();
  const std::size_t q = system.mode_count();

  auto weights = unit_weights(N, q);
  CondensedProgram program = build_condensed_program(system, spec, x0, weights, settings.gamma1, settings.gamma2);
  const AdmmSolver solver(program.qp, settings.solver);

  StageAbResult out{std::move(program), {}, {}, {}, {}, true};
  std::vector<double> taus(N * q);
  for (int t = 0; t < settings.reweights; ++t) {
    if (t > 0) {
      for (std::size_t k = 0; k < N; ++k) {
        double total = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
          weights[k][i] = 1.0 / (out.program.block(out.z, i, k).norm() + settings.epsilon);
          total += weights[k][i];
        }
        for (std::size_t i = 0; i < q; ++i) weights[k][i] *= static_cast<double>(q) / total;
      }
    }
    for (std::size_t k = 0; k < N; ++k) {
      for (std::size_t i = 0; i < q; ++i) {
        taus[out.program.group_index(i, k)] = settings.gamma2 * weights[k][i];
        out.program.qp.groups[out.program.group_index(i, k)].weight = taus[out.program.group_index(i, k)];
      }
    }
    GroupLassoSolution sol = solver.solve(taus);
    out.z = std::move(sol.z);
    out.converged = out.converged && sol.report.converged;
    ReweightIteration iter;
    iter.report = sol.report;
    iter.objective = out.program.total_objective(out.z);
    iter.projection = project_modes(out.program.auxiliary(out.z));
    out.iterations.push_back(std::move(iter));
  }
  out.aux = out.program.auxiliary(out.z);
  for (std::size_t k = 0; k < N; ++k) out.inputs.push_back(out.program.input(out.z, k));
  return out;
}

ModeSequence project_modes(const AuxiliarySequence& aux) {
  double scale = 0.0;
  for (std::size_t k = 0; k < aux.horizon(); ++k) {
    if (aux.blocks[k].empty()) throw InvalidArgument("auxiliary sequence has an empty step");
    for (const auto& b : aux.blocks[k]) scale = std::max(scale, b.norm());
  }
  const double tie = kProjectionTieTol * scale;
  ModeSequence modes;
  modes.reserve(aux.horizon());
  for (std::size_t k = 0; k < aux.horizon(); ++k) {
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& b : aux.blocks[k]) lowest = std::min(lowest, b.norm());
    std::size_t best = 0;
    while (aux.blocks[k][best].norm() > lowest + tie) ++best;
    modes.push_back(best);
  }
  return modes;
}

StageDResult stage_d(const SwitchedSystem& system, const CostSpec& spec, const ModeSequence& modes,
                     const Vector& x0) {
  StageDResult out;
  out.chain = riccati_chain(system, spec, modes);
  if (static_cast<std::size_t>(x0.size()) != system.state_dim()) throw InvalidArgument("x0 has wrong dimension");

  Trajectory traj;
  traj.states.push_back(x0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const Vector& x = traj.states.back();
    const Matrix& P = out.chain[k + 1];
    const std::size_t mode = online_mode(system, spec, k, P, x);
    if (mode != modes[k]) ++out.divergence;
    const Vector u = -feedback_gain(system, spec, mode, k, P).gain * x;
    traj.states.push_back(system.A(mode) * x + system.B(mode) * u);
    traj.inputs.push_back(u);
    traj.modes.push_back(mode);
  }
  out.control.cost = evaluate_cost(spec, traj);
  out.control.trajectory = std::move(traj);
  out.control.solver = SolverTag::kRelaxed;
  return out;
}

MultiplierCertificate check_stationarity(const CondensedProgram& program, const Vector& z,
                                         const AuxiliarySequence& aux) {
  const std::size_t N = program.N;
  if (static_cast<std::size_t>(z.size()) != program.dim()) throw InvalidArgument("z has wrong dimension");
  if (aux.horizon() != N || aux.mode_count() != program.q) throw InvalidArgument("auxiliary sequence has wrong shape");

  const auto n = static_cast<Eigen::Index>(program.n);
  const auto nu = static_cast<Eigen::Index>(program.nu);
  const auto qn = static_cast<Eigen::Index>(program.q) * n;
  const Matrix A1 = program.Abar.topRows(n);
  const Matrix B1 = program.Bbar.topRows(n);

  std::vector<Vector> x(N + 1);
  std::vector<Vector> u(N);
  x[0] = program.state_offset[0];
  for (std::size_t k = 0; k < N; ++k) {
    u[k] = program.input(z, k);
    x[k + 1] = A1 * x[k] + B1 * u[k] + aux.blocks[k][0];
  }

  // Unknowns λ̄(1)..λ̄(N); λ̄(j) occupies columns (j−1)·qn.
  const auto Nn = static_cast<Eigen::Index>(N);
  const Eigen::Index adjoint_rows = Nn * n;
  Matrix M = Matrix::Zero(adjoint_rows + Nn * nu, Nn * qn);
  Vector rhs = Vector::Zero(M.rows());
  const auto col = [&](std::size_t j) { return static_cast<Eigen::Index>(j - 1) * qn; };
  for (std::size_t k = 1; k <= N; ++k) {
    const auto row = static_cast<Eigen::Index>(k - 1) * n;
    M.block(row, col(k), n, qn) = program.L.transpose();
    if (k < N) {
      M.block(row, col(k + 1), n, qn) = -program.Abar.transpose();
      rhs.segment(row, n) = program.Q[k] * x[k];
    } else {
      rhs.segment(row, n) = program.Q[N] * x[N];
    }
  }
  for (std::size_t k = 0; k < N; ++k) {
    const auto row = adjoint_rows + static_cast<Eigen::Index>(k) * nu;
    M.block(row, col(k + 1), nu, qn) = program.R[k].llt().solve(program.Bbar.transpose());
    rhs.segment(row, nu) = -u[k];
  }

  const Vector lambda = M.completeOrthogonalDecomposition().solve(rhs);
  const Vector residual = M * lambda - rhs;

  MultiplierCertificate cert;
  for (std::size_t j = 1; j <= N; ++j) cert.multipliers.push_back(lambda.segment(col(j), qn));
  cert.adjoint_residual = residual.head(adjoint_rows).norm();
  cert.stationarity_residual = residual.tail(Nn * nu).norm();
  return cert;
}

RelaxedSolution solve_relaxed(const SwitchedSystem& system, const CostSpec& spec, const Vector& x0,
                              const RelaxedSettings& settings) {
  StageAbResult ab = solve_stage_ab(system, spec, x0, settings);
  RelaxedSolution out;
  out.projected = project_modes(ab.aux);
  StageDResult d = stage_d(system, spec, out.projected, x0);
  out.chain = std::move(d.chain);
  out.control = std::move(d.control);
  out.online_divergence = d.divergence;
  out.report.certificate = check_stationarity(ab.program, ab.z, ab.aux);
  out.report.converged = ab.converged;
  for (const auto& it : ab.iterations) out.report.admm_iterations += it.report.iterations;
  out.report.iterations = std::move(ab.iterations);
  out.aux = std::move(ab.aux);
  return out;
}

double relative_error(double cost, double optimal_cost) {
  if (std::abs(cost) <= 1e-12 && std::abs(optimal_cost) <= 1e-12) return 0.0;
  return (cost - optimal_cost) / optimal_cost;
}

json relaxed_report_to_json(const RelaxedSolution& solution, std::optional<double> exact_cost) {
  json projected = json::array();
  for (auto m : solution.projected) projected.push_back(m + 1);
  json norms = json::array();
  for (std::size_t k = 0; k < solution.aux.horizon(); ++k) {
    json row = json::array();
    for (std::size_t i = 0; i < solution.aux.mode_count(); ++i) row.push_back(solution.aux.norm(k, i));
    norms.push_back(std::move(row));
  }
  json iterations = json::array();
  for (const auto& it : solution.report.iterations) {
    json proj = json::array();
    for (auto m : it.projection) proj.push_back(m + 1);
    iterations.push_back({{"iterations", it.report.iterations},
                          {"primal_residual", it.report.primal_residual},
                          {"dual_residual", it.report.dual_residual},
                          {"objective", it.objective},
                          {"converged", it.report.converged},
                          {"polished", it.report.polished},
                          {"projection", proj}});
  }
  json doc = solution_to_json(solution.control);
  doc["projected_sigma"] = projected;
  doc["block_norms"] = norms;
  doc["online_divergence"] = solution.online_divergence;
  doc["converged"] = solution.report.converged;
  doc["admm_iterations"] = solution.report.admm_iterations;
  doc["reweight_iterations"] = iterations;
  doc["stationarity_residual"] = solution.report.certificate.stationarity_residual;
  doc["adjoint_residual"] = solution.report.certificate.adjoint_residual;
  if (exact_cost) {
    doc["exact_cost"] = *exact_cost;
    doc["relative_error"] = relative_error(solution.control.cost, *exact_cost);
  }
  return doc;
}

}  // namespace slsctl
