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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace slsctl::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kCapacityError = 2 };

struct ExactArgs {
  std::string input;
  std::string out;    // empty: stdout
  std::string cache;  // empty: no cache
  double dedupe_tol = 1e-12;
};

struct RelaxedArgs {
  std::string input;
  std::string settings;  // empty: defaults
  std::string out;
};

struct CompareArgs {
  std::string input;
  std::string settings;
  std::string out;
  std::string cache;
};

struct BenchArgs {
  std::string input;   // optional config JSON
  std::string preset;  // two-mode | three-mode
  std::string settings;
  std::string out;      // CSV
  std::string summary;  // JSON
  std::string thresholds;
  std::optional<unsigned long long> seed;
  std::optional<std::size_t> count;
  std::size_t jobs = 1;
  bool no_timings = false;
};

/// Each command writes its documents and returns an ExitCode. Errors are
/// reported on `err`.
int cmd_exact(const ExactArgs& args, std::ostream& out, std::ostream& err);
int cmd_relaxed(const RelaxedArgs& args, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

/// Parses "1e-5,1e-7,0" style lists.
std::vector<double> parse_thresholds(const std::string& text);

/// Full command line, argv[0] excluded.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slsctl::cli
