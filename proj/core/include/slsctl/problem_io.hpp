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

#include <filesystem>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <string_view>

#include "slsctl/system.hpp"

namespace slsctl {

/// A switched LQ problem instance: dynamics, weights and initial state.
struct Problem {
  SwitchedSystem system;
  CostSpec spec;
  Vector x0;
};

/// Problem file layout:
///   {"modes": [{"A": [[..]], "B": [[..]]}, ...],
///    "N": 15,
///    "Q": matrix | [matrix x (N+1)],
///    "R": matrix | [matrix x N],
///    "x0": [..]}
/// A single matrix is repeated over the horizon (Q also becomes the terminal
/// weight). A bare number is a 1x1 matrix, so a flat number list is a
/// sequence of 1x1 weights. Unknown keys are rejected.
[[nodiscard]] Problem parse_problem(const nlohmann::json& doc);
[[nodiscard]] Problem load_problem(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json problem_to_json(const Problem& problem);

[[nodiscard]] nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& doc);

[[nodiscard]] Matrix matrix_from_json(const nlohmann::json& value, std::string_view what);
[[nodiscard]] Vector vector_from_json(const nlohmann::json& value, std::string_view what);
[[nodiscard]] nlohmann::json to_json(const Matrix& m);
[[nodiscard]] nlohmann::json to_json(const Vector& v);

/// {"solver", "cost", "sigma" (1-based), "u", "x"}.
[[nodiscard]] nlohmann::json solution_to_json(const ControlSolution& solution);
/// Reads "sigma", "u" and "x" back from a solution document.
[[nodiscard]] Trajectory trajectory_from_json(const nlohmann::json& doc);

/// Throws InvalidArgument naming the first key of `obj` not in `allowed`.
void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view context);

}  // namespace slsctl
