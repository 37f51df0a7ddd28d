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

#include "slsctl/problem_io.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "slsctl/errors.hpp"

namespace slsctl {
namespace {

using nlohmann::json;

int depth(const json& value) {
  if (value.is_number()) return 0;
  if (!value.is_array() || value.empty()) return -1;
  const int inner = depth(value.front());
  return inner < 0 ? -1 : inner + 1;
}

std::vector<Matrix> weight_sequence(const json& value, std::size_t count, std::string_view what) {
  const int d = depth(value);
  if (d == 0 || d == 2) return std::vector<Matrix>(count, matrix_from_json(value, what));
  if (d == 1 || d == 3) {
    if (value.size() != count) {
      throw InvalidArgument(std::string(what) + ": expected " + std::to_string(count) +
                            " matrices, got " + std::to_string(value.size()));
    }
    std::vector<Matrix> out;
    out.reserve(count);
    for (const auto& m : value) out.push_back(matrix_from_json(m, what));
    return out;
  }
  throw InvalidArgument(std::string(what) + ": expected a matrix or a list of matrices");
}

const json& require(const json& obj, const char* key, std::string_view context) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InvalidArgument(std::string(context) + ": missing key \"" + key + "\"");
  return *it;
}

}  // namespace

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view context) {
  if (!obj.is_object()) throw InvalidArgument(std::string(context) + ": expected a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidArgument(std::string(context) + ": unknown key \"" + key + "\"");
    }
  }
}

Matrix matrix_from_json(const json& value, std::string_view what) {
  if (value.is_number()) return Matrix::Constant(1, 1, value.get<double>());
  if (!value.is_array() || value.empty() || !value.front().is_array()) {
    throw InvalidArgument(std::string(what) + ": expected nested row arrays");
  }
  const auto rows = static_cast<Eigen::Index>(value.size());
  const auto cols = static_cast<Eigen::Index>(value.front().size());
  if (cols == 0) throw InvalidArgument(std::string(what) + ": empty row");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = value[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument(std::string(what) + ": ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& entry = row[static_cast<std::size_t>(c)];
      if (!entry.is_number()) throw InvalidArgument(std::string(what) + ": non-numeric entry");
      m(r, c) = entry.get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const json& value, std::string_view what) {
  if (!value.is_array() || value.empty()) throw InvalidArgument(std::string(what) + ": expected a number array");
  Vector v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) throw InvalidArgument(std::string(what) + ": non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = value[i].get<double>();
  }
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entry");
  return v;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Problem parse_problem(const json& doc) {
  reject_unknown_keys(doc, {"modes", "N", "Q", "R", "x0"}, "problem");
  const json& modes_json = require(doc, "modes", "problem");
  if (!modes_json.is_array() || modes_json.empty()) throw InvalidArgument("problem: \"modes\" must be a non-empty array");
  std::vector<SwitchedSystem::Mode> modes;
  for (std::size_t i = 0; i < modes_json.size(); ++i) {
    const auto label = "mode " + std::to_string(i + 1);
    reject_unknown_keys(modes_json[i], {"A", "B"}, label);
    modes.push_back({matrix_from_json(require(modes_json[i], "A", label), label + ".A"),
                     matrix_from_json(require(modes_json[i], "B", label), label + ".B")});
  }
  const json& horizon_json = require(doc, "N", "problem");
  if (!horizon_json.is_number_integer() || horizon_json.get<long long>() < 1) {
    throw InvalidArgument("problem: \"N\" must be a positive integer");
  }
  const auto N = horizon_json.get<std::size_t>();
  SwitchedSystem system(std::move(modes));
  CostSpec spec(weight_sequence(require(doc, "Q", "problem"), N + 1, "Q"),
                weight_sequence(require(doc, "R", "problem"), N, "R"));
  check_compatible(system, spec);
  Vector x0 = vector_from_json(require(doc, "x0", "problem"), "x0");
  if (static_cast<std::size_t>(x0.size()) != system.state_dim()) {
    throw InvalidArgument("problem: x0 has dimension " + std::to_string(x0.size()) + ", expected " +
                          std::to_string(system.state_dim()));
  }
  return Problem{std::move(system), std::move(spec), std::move(x0)};
}

json problem_to_json(const Problem& problem) {
  json modes = json::array();
  for (const auto& mode : problem.system.modes()) modes.push_back({{"A", to_json(mode.A)}, {"B", to_json(mode.B)}});
  const std::size_t N = problem.spec.horizon();
  json Q = json::array();
  for (std::size_t k = 0; k <= N; ++k) Q.push_back(to_json(problem.spec.Q(k)));
  json R = json::array();
  for (std::size_t k = 0; k < N; ++k) R.push_back(to_json(problem.spec.R(k)));
  return {{"modes", modes}, {"N", N}, {"Q", Q}, {"R", R}, {"x0", to_json(problem.x0)}};
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

Problem load_problem(const std::filesystem::path& path) {
  try {
    return parse_problem(load_json(path));
  } catch (const json::exception& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

json solution_to_json(const ControlSolution& solution) {
  const Trajectory& t = solution.trajectory;
  json sigma = json::array();
  for (auto m : t.modes) sigma.push_back(m + 1);
  json u = json::array();
  for (const auto& v : t.inputs) u.push_back(to_json(v));
  json x = json::array();
  for (const auto& v : t.states) x.push_back(to_json(v));
  return {{"solver", std::string(to_string(solution.solver))}, {"cost", solution.cost},
          {"sigma", sigma}, {"u", u}, {"x", x}};
}

Trajectory trajectory_from_json(const json& doc) {
  Trajectory t;
  const json& sigma = require(doc, "sigma", "solution");
  if (!sigma.is_array()) throw InvalidArgument("solution: \"sigma\" must be an array");
  for (const auto& s : sigma) {
    if (!s.is_number_integer() || s.get<long long>() < 1) {
      throw InvalidArgument("solution: mode indices are 1-based positive integers");
    }
    t.modes.push_back(s.get<std::size_t>() - 1);
  }
  for (const auto& v : require(doc, "u", "solution")) t.inputs.push_back(vector_from_json(v, "u"));
  for (const auto& v : require(doc, "x", "solution")) t.states.push_back(vector_from_json(v, "x"));
  return t;
}

}  // namespace slsctl
